"""Unit and property tests for the epoch-boundary adaptation rule."""

import warnings

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activelr import (
    MODE_ABSOLUTE,
    MODE_GAIN,
    POLICY_LITERAL,
    POLICY_SKIP_ADAPT,
    ActiveConfig,
    ConstraintWarning,
    DivergenceError,
    accumulate,
    effective_alphas,
    end_epoch,
    init_active,
)


def make_config(**kwargs):
    kwargs.setdefault("alpha0", 0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstraintWarning)
        return ActiveConfig(**kwargs)


def run_boundaries(config, cumulative_grads):
    """Feed one cumulative gradient per epoch and close each epoch."""
    n = len(cumulative_grads[0])
    state = init_active(config, n)
    reports = []
    for g in cumulative_grads:
        accumulate(state, np.asarray(g, dtype=float))
        reports.append(end_epoch(state, config))
    return state, reports


def test_init_state_starts_at_alpha0_with_zero_accumulators():
    config = ActiveConfig(alpha0=0.05)
    state = init_active(config, 4)
    npt.assert_array_equal(state.alphas, np.full(4, 0.05))
    npt.assert_array_equal(state.g_cu_prev, np.zeros(4))
    npt.assert_array_equal(state.g_cu_curr, np.zeros(4))
    assert state.epoch == 0
    assert state.n_params == 4


def test_gain_mode_starts_at_unit_gain():
    config = make_config(alpha0=0.05, mode=MODE_GAIN)
    state = init_active(config, 3)
    npt.assert_array_equal(state.alphas, np.ones(3))
    npt.assert_allclose(effective_alphas(state, config), np.full(3, 0.05))


@pytest.mark.parametrize("bad", [0.0, -1e-3])
def test_alpha0_must_be_positive(bad):
    with pytest.raises(ValueError):
        ActiveConfig(alpha0=bad)


@pytest.mark.parametrize("bad", [0.0, 1.0, 1.5, -0.1])
def test_alpha_low_must_lie_in_open_unit_interval(bad):
    with pytest.raises(ValueError):
        make_config(alpha_low=bad)


def test_unknown_mode_and_policy_are_rejected():
    with pytest.raises(ValueError):
        make_config(mode="relative")
    with pytest.raises(ValueError):
        make_config(first_epoch_policy="warmup")
    with pytest.raises(ValueError):
        init_active(ActiveConfig(alpha0=0.1), 0)


def test_pair_not_summing_to_one_warns_but_still_constructs():
    with pytest.warns(ConstraintWarning):
        config = ActiveConfig(alpha0=0.1, alpha_high=0.5, alpha_low=0.9)
    assert config.alpha_high == 0.5


def test_recommended_pair_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ActiveConfig(alpha0=0.1, alpha_high=0.1, alpha_low=0.9)


def test_accumulate_rejects_shape_mismatch_and_nonfinite():
    config = ActiveConfig(alpha0=0.1)
    state = init_active(config, 3)
    with pytest.raises(ValueError):
        accumulate(state, np.zeros(4))
    with pytest.raises(DivergenceError):
        accumulate(state, np.array([1.0, np.nan, 0.0]))


def test_accumulate_sums_minibatch_gradients():
    config = ActiveConfig(alpha0=0.1)
    state = init_active(config, 2)
    accumulate(state, [1.0, -2.0])
    accumulate(state, [0.5, 0.5])
    npt.assert_allclose(state.g_cu_curr, [1.5, -1.5])
    assert state.accumulated_steps == 2


def test_end_epoch_without_gradients_warns_and_adapts_nothing():
    config = ActiveConfig(alpha0=0.1)
    state = init_active(config, 2)
    with pytest.warns(UserWarning):
        report = end_epoch(state, config)
    assert not report.adapted
    npt.assert_array_equal(state.alphas, np.full(2, 0.1))
    assert state.epoch == 0


def test_sign_agreement_grows_additively_and_disagreement_shrinks():
    config = ActiveConfig(alpha0=0.2, alpha_high=0.1, alpha_low=0.9)
    # First boundary: zero g_cu_prev, so every product is zero -> shrink.
    state, reports = run_boundaries(
        config, [[1.0, 1.0, 1.0], [2.0, -3.0, 0.0]])
    first, second = reports
    assert (first.grown, first.shrunk) == (0, 3)
    npt.assert_allclose(state.g_cu_prev, [2.0, -3.0, 0.0])
    # Second boundary: products are (+, -, 0) against [1, 1, 1].
    assert (second.grown, second.shrunk) == (1, 2)
    npt.assert_allclose(
        state.alphas, [0.2 * 0.9 + 0.1, 0.2 * 0.9 * 0.9, 0.2 * 0.9 * 0.9])


def test_zero_cumulative_gradient_takes_the_shrink_branch():
    config = ActiveConfig(alpha0=1.0)
    state, reports = run_boundaries(config, [[5.0], [0.0], [5.0]])
    # Products: 0 (prev is init), 0 (curr is zero), 0 (prev is zero).
    assert all(r.shrunk == 1 for r in reports)
    npt.assert_allclose(state.alphas, [0.9 ** 3])


def test_skip_adapt_policy_leaves_first_boundary_untouched():
    config = make_config(alpha0=0.3, first_epoch_policy=POLICY_SKIP_ADAPT)
    state = init_active(config, 2)
    accumulate(state, [1.0, -1.0])
    report = end_epoch(state, config)
    assert not report.adapted
    assert (report.grown, report.shrunk) == (0, 0)
    npt.assert_array_equal(state.alphas, np.full(2, 0.3))
    # The buffer swap still happened, so the next boundary sees the signs.
    npt.assert_allclose(state.g_cu_prev, [1.0, -1.0])
    accumulate(state, [2.0, 1.0])
    report = end_epoch(state, config)
    assert report.adapted
    assert (report.grown, report.shrunk) == (1, 1)
    npt.assert_allclose(state.alphas, [0.4, 0.27])


def test_literal_policy_shrinks_everything_at_first_boundary():
    config = ActiveConfig(alpha0=0.3, first_epoch_policy=POLICY_LITERAL)
    state, (report,) = run_boundaries(config, [[9.0, -9.0]])
    assert (report.grown, report.shrunk) == (0, 2)
    npt.assert_allclose(state.alphas, [0.27, 0.27])


def test_boundary_resets_accumulator_and_advances_epoch():
    config = ActiveConfig(alpha0=0.1)
    state = init_active(config, 2)
    accumulate(state, [1.0, 2.0])
    end_epoch(state, config)
    npt.assert_array_equal(state.g_cu_curr, np.zeros(2))
    assert state.accumulated_steps == 0
    assert state.epoch == 1


def test_report_alpha_stats_are_effective_rates_in_gain_mode():
    config = make_config(alpha0=0.5, mode=MODE_GAIN,
                         first_epoch_policy=POLICY_SKIP_ADAPT)
    state = init_active(config, 2)
    accumulate(state, [1.0, 1.0])
    end_epoch(state, config)
    accumulate(state, [1.0, -1.0])
    report = end_epoch(state, config)
    # Gains are now (1.1, 0.9); stats must be reported on alpha0 * gain.
    npt.assert_allclose(report.alpha_min, 0.45)
    npt.assert_allclose(report.alpha_max, 0.55)
    npt.assert_allclose(report.alpha_mean, 0.5)


def test_sign_stable_stream_grows_linearly_from_alpha0():
    config = make_config(alpha0=0.05, first_epoch_policy=POLICY_SKIP_ADAPT)
    state = init_active(config, 1)
    for k in range(1, 11):
        accumulate(state, [3.0])
        end_epoch(state, config)
        if k > 1:
            npt.assert_allclose(state.alphas, [0.05 + (k - 1) * 0.1])


def test_persistent_disagreement_decays_geometrically():
    config = ActiveConfig(alpha0=1.0)
    grads = [[(-1.0) ** k] for k in range(12)]
    state, _ = run_boundaries(config, grads)
    npt.assert_allclose(state.alphas, [0.9 ** 12], rtol=1e-12)


sign_streams = st.lists(
    st.lists(st.sampled_from([-1.0, 0.0, 1.0]), min_size=3, max_size=3),
    min_size=1, max_size=20)


@settings(max_examples=60, deadline=None)
@given(sign_streams, st.sampled_from([MODE_ABSOLUTE, MODE_GAIN]))
def test_alphas_stay_strictly_positive(stream, mode):
    config = make_config(alpha0=0.01, mode=mode)
    state, _ = run_boundaries(config, stream)
    assert np.all(effective_alphas(state, config) > 0)


@settings(max_examples=60, deadline=None)
@given(sign_streams)
def test_modes_agree_when_alpha0_is_one(stream):
    """With alpha0 = 1 the gain multiplier and the absolute rate coincide."""
    state_a, _ = run_boundaries(make_config(alpha0=1.0), stream)
    state_g, _ = run_boundaries(make_config(alpha0=1.0, mode=MODE_GAIN), stream)
    npt.assert_allclose(state_a.alphas, state_g.alphas, rtol=0, atol=0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
                min_size=1, max_size=10),
       st.permutations(list(range(4))))
def test_adaptation_is_permutation_equivariant(stream, perm):
    """Each parameter's rate depends only on its own gradient history."""
    perm = np.asarray(perm)
    config = ActiveConfig(alpha0=0.1)
    state, _ = run_boundaries(config, [np.asarray(g) for g in stream])
    permuted, _ = run_boundaries(
        config, [np.asarray(g)[perm] for g in stream])
    npt.assert_array_equal(state.alphas[perm], permuted.alphas)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=8))
def test_within_epoch_split_does_not_change_adaptation(grads):
    """Only the epoch total matters, not how mini-batches divided it."""
    config = ActiveConfig(alpha0=0.1)
    split = init_active(config, 1)
    for g in grads:
        accumulate(split, [g])
    end_epoch(split, config)

    whole = init_active(config, 1)
    accumulate(whole, [np.sum(grads)])
    end_epoch(whole, config)

    npt.assert_allclose(split.g_cu_prev, whole.g_cu_prev,
                        rtol=1e-12, atol=1e-12)
    npt.assert_array_equal(split.alphas, whole.alphas)
