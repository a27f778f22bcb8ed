"""Tests for the guarantee checkers and the step-size walk simulator.

The hand-computed cases use quadratics small enough to evaluate on paper:
for f(x) = 0.5 a x^2 a single adapted step satisfies
lhs - rhs = 0.5 a (alpha_branch - alpha)^2 g^2 exactly, which pins both
sides of the advantage inequality.
"""

import json

import numpy as np
import numpy.testing as npt
import pytest

from activelr import (
    HIGH_ADD,
    HIGH_MULTIPLY,
    LOW_MULTIPLY,
    LOW_SUBTRACT,
    check_sign_agreement,
    check_step_advantage,
    convex_quadratic,
    cubic_1d,
    finite_diff_grad,
    mse_line,
    reports_to_json,
    sign_agreement_suite,
    simulate_lr_walk,
    step_advantage_suite,
    walk_suite,
    walk_suite_summary,
)


def scalar_pair(a, c):
    """Batch pair for 0.5 a (x - c)^2."""
    def f_t(theta):
        return 0.5 * a * float((theta[0] - c) ** 2)

    def g_t(theta):
        return np.array([a * (theta[0] - c)])

    return f_t, g_t


def order_seed_for(perm, n=2, tries=50):
    """Smallest seed whose batch permutation equals ``perm``."""
    for s in range(tries):
        if np.array_equal(np.random.default_rng(s).permutation(n), perm):
            return s
    raise AssertionError(f"no seed produced permutation {perm}")


def test_sign_agreement_hand_case_with_identical_batches():
    """Two copies of 0.5 (x-1)^2 from x = 2 at alpha = 0.25.

    Frozen pass: gradients 1 + 1 = 2.  Inner loop: gradient 1 moves x to
    1.75, gradient 0.75 follows, so cu_hat = 1.75 regardless of order.
    """
    obj = convex_quadratic(np.array([[1.0]]), np.array([1.0]),
                           batches=[scalar_pair(1.0, 1.0),
                                    scalar_pair(1.0, 1.0)])
    rep = check_sign_agreement(obj, [2.0], alpha=0.25)
    npt.assert_allclose(rep.cu_star, [2.0], rtol=1e-14)
    npt.assert_allclose(rep.cu_hat, [1.75], rtol=1e-14)
    npt.assert_allclose(rep.product, [3.5], rtol=1e-14)
    assert not rep.diverged
    # End point 1.5625: summed loss drops from 1.0 to 2 * 0.5 * 0.5625^2.
    expected_bound = (1.0 - 0.5625 ** 2) / 0.25
    npt.assert_allclose(rep.lower_bound, expected_bound, rtol=1e-12)
    assert rep.inner_product >= rep.lower_bound


def test_sign_agreement_respects_the_requested_batch_order():
    """Asymmetric pair 0.5 (x-1)^2, 0.5 (x+1)^2 from x = 2 at alpha = 0.25."""
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]),
                           batches=[scalar_pair(1.0, 1.0),
                                    scalar_pair(1.0, -1.0)])
    seed_id = order_seed_for([0, 1])
    seed_sw = order_seed_for([1, 0])
    rep_id = check_sign_agreement(obj, [2.0], 0.25, order_seed=seed_id)
    rep_sw = check_sign_agreement(obj, [2.0], 0.25, order_seed=seed_sw)
    npt.assert_allclose(rep_id.cu_star, [4.0], rtol=1e-14)
    npt.assert_allclose(rep_sw.cu_star, [4.0], rtol=1e-14)
    # Identity order: 1 then g(1.75) = 2.75.  Swapped: 3 then g(1.25) = 0.25.
    npt.assert_allclose(rep_id.cu_hat, [3.75], rtol=1e-14)
    npt.assert_allclose(rep_sw.cu_hat, [3.25], rtol=1e-14)


def test_sign_agreement_reports_divergence_instead_of_raising():
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]),
                           batches=[scalar_pair(1.0, 0.0),
                                    scalar_pair(1.0, 0.0)])
    rep = check_sign_agreement(obj, [1.0], alpha=5.0)  # far above 2/L
    assert rep.diverged
    assert rep.lower_bound < 0


def test_sign_agreement_input_validation():
    with pytest.raises(ValueError):
        check_sign_agreement(cubic_1d(), [5.0], 0.1)  # not convex
    with pytest.raises(ValueError):
        check_sign_agreement(mse_line(), [0.0], 0.1)  # no batches
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]),
                           batches=[scalar_pair(1.0, 0.0),
                                    scalar_pair(1.0, 0.0)])
    with pytest.raises(ValueError):
        check_sign_agreement(obj, [1.0], alpha=0.0)


def test_step_advantage_hand_case_grow_branch():
    """f = 0.5 x^2 from x = 1: alpha 0.1 vs grown 0.15.

    Vanilla lands at 0.9, adapted at 0.85, so
    lhs = 0.5 (0.81 - 0.7225) = 0.04375 and
    rhs = 0.85 * 1 * 0.05 = 0.0425; the gap is 0.5 * 0.05^2.
    """
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]))
    rep = check_step_advantage(obj, [1.0], alpha=0.1, alpha_high_eff=0.15,
                               alpha_low_eff=0.05, prior_grad=[1.0])
    assert rep.high_branch.tolist() == [True]
    npt.assert_allclose(rep.lhs, 0.04375, rtol=1e-12)
    npt.assert_allclose(rep.rhs, 0.0425, rtol=1e-12)
    npt.assert_allclose(rep.lhs - rep.rhs, 0.5 * 0.05 ** 2, rtol=1e-12)
    assert rep.segment_condition  # gradient sign persists on this segment
    assert rep.lhs >= rep.rhs >= 0


def test_step_advantage_hand_case_shrink_branch():
    """Same quadratic with a disagreeing prior: alpha 0.1 vs shrunk 0.05.

    Adapted lands at 0.95: lhs = 0.5 (0.81 - 0.9025) = -0.04625,
    rhs = 0.95 * 1 * (-0.05) = -0.0475; lhs still beats rhs.
    """
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]))
    rep = check_step_advantage(obj, [1.0], alpha=0.1, alpha_high_eff=0.15,
                               alpha_low_eff=0.05, prior_grad=[-1.0])
    assert rep.high_branch.tolist() == [False]
    npt.assert_allclose(rep.lhs, -0.04625, rtol=1e-12)
    npt.assert_allclose(rep.rhs, -0.0475, rtol=1e-12)
    assert rep.lhs >= rep.rhs
    # Prior disagreed but the next product agrees, so the sign pattern broke.
    assert not rep.segment_condition


def test_step_advantage_zero_prior_takes_the_shrink_branch():
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]))
    rep = check_step_advantage(obj, [1.0], 0.1, 0.15, 0.05,
                               prior_grad=[0.0])
    assert rep.high_branch.tolist() == [False]


def test_step_advantage_input_validation():
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]))
    with pytest.raises(ValueError):
        check_step_advantage(cubic_1d(), [1.0], 0.1, 0.15, 0.05, [1.0])
    with pytest.raises(ValueError):
        check_step_advantage(obj, [1.0], 0.1, 0.05, 0.15, [1.0])


def test_multiply_add_walk_is_stationary_and_positive():
    stats = simulate_lr_walk(LOW_MULTIPLY, HIGH_ADD, 0.9, 0.1, seed=0)
    assert stats.series.shape == (10_001,)
    assert stats.series[0] == 1.0
    assert 0.9 <= stats.mean <= 1.1
    assert 0.23 <= stats.std <= 0.37
    assert stats.min > 0
    assert not stats.crossed_zero


def test_multiply_add_walk_matches_its_fixed_point_mean():
    """E[alpha] solves E = 0.5 low E + 0.5 (E + high) = high / (1 - low)."""
    means = [simulate_lr_walk(LOW_MULTIPLY, HIGH_ADD, 0.9, 0.2,
                              seed=s).mean for s in range(10)]
    npt.assert_allclose(np.mean(means), 0.2 / 0.1, atol=0.2)


def test_walk_burn_in_discards_a_far_initial_value():
    stats = simulate_lr_walk(LOW_MULTIPLY, HIGH_ADD, 0.9, 0.1,
                             alpha_init=100.0, seed=3)
    assert stats.series[0] == 100.0
    assert stats.mean < 3.0  # stats start after the burn-in window


def test_subtract_walks_go_negative():
    for high_op in (HIGH_ADD, HIGH_MULTIPLY):
        stats = simulate_lr_walk(LOW_SUBTRACT, high_op, 0.9, 0.1,
                                 epochs=50, seed=0)
        assert stats.crossed_zero
        assert stats.min < 0


def test_multiply_multiply_walk_collapses_but_stays_positive_early():
    stats = simulate_lr_walk(LOW_MULTIPLY, HIGH_MULTIPLY, 0.9, 0.1,
                             epochs=300, seed=1)
    assert np.all(np.diff(stats.series) < 0)  # both operations shrink
    assert stats.series[-1] < 1e-2
    assert stats.min > 0


def test_walk_input_validation():
    with pytest.raises(ValueError):
        simulate_lr_walk("divide", HIGH_ADD, 0.9, 0.1)
    with pytest.raises(ValueError):
        simulate_lr_walk(LOW_MULTIPLY, "append", 0.9, 0.1)
    with pytest.raises(ValueError):
        simulate_lr_walk(LOW_MULTIPLY, HIGH_ADD, 0.9, 0.1, epochs=0)
    with pytest.raises(ValueError):
        finite_diff_grad(mse_line(), [0.0], h=0.0)


def test_walk_suite_summary_separates_the_four_pairs():
    results = walk_suite(seeds=range(5), epochs=2000)
    summary = walk_suite_summary(results)
    assert set(summary) == {"multiply/add", "multiply/multiply",
                            "subtract/add", "subtract/multiply"}
    assert summary["multiply/add"]["min"] > 0
    assert not summary["multiply/add"]["any_crossed_zero"]
    assert summary["subtract/add"]["all_crossed_zero"]
    assert summary["subtract/multiply"]["all_crossed_zero"]
    assert summary["multiply/multiply"]["grand_mean"] < 1e-2


@pytest.mark.parametrize("seed", [0, 11, 99])
def test_sign_agreement_suite_passes_on_small_draws(seed):
    result = sign_agreement_suite(n_cases=40, seed=seed)
    assert result.passed
    assert result.n_failed == 0
    assert result.n_diverged < 40


@pytest.mark.parametrize("seed", [0, 11, 99])
def test_step_advantage_suite_passes_and_hits_both_branches(seed):
    result = step_advantage_suite(n_cases=40, seed=seed)
    assert result.passed
    assert result.n_failed == 0


def test_sign_agreement_is_per_parameter_only():
    """Outside the per-coordinate regime the guarantee really can break.

    With cross-coupled curvature and a start near the minimizer, a
    coordinate whose frozen cumulative gradient is almost zero can be
    dragged across it by the other coordinates; the checker must report
    the negative product honestly rather than clip it.
    """
    from activelr import random_convex_quadratic

    rng = np.random.default_rng(11)
    worst = 0.0
    for case in range(60):
        dim = int(rng.integers(2, 9))
        k = int(rng.integers(2, 17))
        cond = float(rng.uniform(1.0, 50.0))
        obj = random_convex_quadratic(seed=int(rng.integers(2 ** 31)),
                                      dim=dim, cond_number=cond, n_batches=k)
        theta0 = obj.stationary_points[0] + rng.uniform(-3.0, 3.0, size=dim)
        alpha = float(rng.uniform(0.05, 1.0)) / (2.0 * obj.smoothness)
        rep = check_sign_agreement(obj, theta0, alpha, order_seed=case)
        if not rep.diverged:
            worst = min(worst, float(rep.product.min()))
    assert worst < -1e-6


def test_reports_serialize_to_json(tmp_path):
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.0]),
                           batches=[scalar_pair(1.0, 0.5),
                                    scalar_pair(1.0, -0.5)])
    reports = [check_sign_agreement(obj, [2.0], 0.2),
               check_step_advantage(obj, [1.0], 0.1, 0.15, 0.05, [1.0])]
    path = tmp_path / "reports.json"
    reports_to_json(reports, path)
    payload = json.loads(path.read_text())
    assert len(payload) == 2
    assert payload[0]["product"][0] > 0
    assert isinstance(payload[1]["high_branch"][0], bool)
