"""Epoch-boundary step-size adaptation from cumulative-gradient signs.

Each parameter owns its own step size alpha_i.  During an epoch the raw
mini-batch gradients are summed into a cumulative gradient; at the epoch
boundary each alpha_i grows additively if the cumulative gradient kept its
sign since the previous epoch, and shrinks multiplicatively otherwise.
The inner-loop optimizer (see :mod:`activelr.backbones`) consumes the
per-parameter alphas and is otherwise untouched.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

MODE_ABSOLUTE = "absolute"
MODE_GAIN = "gain"
POLICY_LITERAL = "literal"
POLICY_SKIP_ADAPT = "skip_adapt"


class DivergenceError(RuntimeError):
    """A non-finite value entered the optimizer state."""


class ConstraintWarning(UserWarning):
    """A soft hyperparameter recommendation was violated."""


@dataclass
class ActiveConfig:
    """Hyperparameters of the adaptation rule.

    ``alpha_high`` is the additive growth constant, ``alpha_low`` the
    multiplicative shrink factor.  The pair (0.9, 0.1) sums to 1, which is
    the recommended family; other pairs work but trigger a
    :class:`ConstraintWarning`.

    ``mode`` selects what the adapted quantity is: ``"absolute"`` mutates
    alpha_i itself, ``"gain"`` mutates a multiplier on alpha0 (so the
    effective rate is alpha0 * gain_i and the additive growth is relative
    to the initial rate).
    """

    alpha0: float
    alpha_high: float = 0.1
    alpha_low: float = 0.9
    mode: str = MODE_ABSOLUTE
    first_epoch_policy: str = POLICY_LITERAL

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")
        if not self.alpha_high > 0:
            raise ValueError(f"alpha_high must be positive, got {self.alpha_high}")
        if not 0 < self.alpha_low < 1:
            raise ValueError(f"alpha_low must lie in (0, 1), got {self.alpha_low}")
        if self.mode not in (MODE_ABSOLUTE, MODE_GAIN):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.first_epoch_policy not in (POLICY_LITERAL, POLICY_SKIP_ADAPT):
            raise ValueError(f"unknown first_epoch_policy {self.first_epoch_policy!r}")
        if abs(self.alpha_low + self.alpha_high - 1.0) > 1e-12:
            warnings.warn(
                f"alpha_low + alpha_high = {self.alpha_low + self.alpha_high:g} != 1; "
                "the (0.9, 0.1) family is the recommended stable choice",
                ConstraintWarning,
                stacklevel=2,
            )


@dataclass
class ActiveState:
    """Per-parameter adaptation state.

    ``alphas`` holds alpha_i in absolute mode and gain_i in gain mode.
    ``g_cu_prev`` / ``g_cu_curr`` are the previous epoch's cumulative
    gradient and the running accumulator for the current one.
    """

    alphas: np.ndarray
    g_cu_prev: np.ndarray
    g_cu_curr: np.ndarray
    epoch: int = 0
    accumulated_steps: int = field(default=0, repr=False)

    @property
    def n_params(self):
        return self.alphas.shape[0]


@dataclass
class EpochAdaptReport:
    """What an epoch boundary did: branch counts and effective-alpha stats."""

    grown: int
    shrunk: int
    alpha_min: float
    alpha_mean: float
    alpha_max: float
    adapted: bool = True


def init_active(config: ActiveConfig, n_params: int) -> ActiveState:
    """Fresh state: alphas at alpha0 (gains at 1), zero cumulative gradients."""
    if n_params < 1:
        raise ValueError(f"n_params must be >= 1, got {n_params}")
    start = 1.0 if config.mode == MODE_GAIN else config.alpha0
    return ActiveState(
        alphas=np.full(n_params, start, dtype=np.float64),
        g_cu_prev=np.zeros(n_params, dtype=np.float64),
        g_cu_curr=np.zeros(n_params, dtype=np.float64),
        epoch=0,
    )


def accumulate(state: ActiveState, raw_grad) -> None:
    """Add one raw mini-batch gradient to the current epoch's accumulator.

    The gradient must be the untransformed mini-batch gradient, not the
    backbone's momentum or second-moment output.
    """
    g = np.asarray(raw_grad, dtype=np.float64)
    if g.shape != state.g_cu_curr.shape:
        raise ValueError(
            f"gradient length {g.shape} does not match parameter count "
            f"{state.g_cu_curr.shape}"
        )
    if not np.all(np.isfinite(g)):
        raise DivergenceError("non-finite component in mini-batch gradient")
    state.g_cu_curr += g
    state.accumulated_steps += 1


def effective_alphas(state: ActiveState, config: ActiveConfig) -> np.ndarray:
    """Per-parameter step sizes the backbone should use right now."""
    if config.mode == MODE_GAIN:
        return config.alpha0 * state.alphas
    return state.alphas


def end_epoch(state: ActiveState, config: ActiveConfig) -> EpochAdaptReport:
    """Close the epoch: adapt every alpha_i, swap buffers, reset accumulator.

    Growth branch (strictly positive product of consecutive cumulative
    gradients): alpha_i += alpha_high.  Shrink branch (product <= 0,
    including either factor being exactly zero): alpha_i *= alpha_low.
    Under the ``skip_adapt`` first-epoch policy the very first boundary
    only swaps buffers, since g_cu_prev is still the all-zero initializer
    and the zero product would otherwise shrink every parameter.
    """
    if state.accumulated_steps == 0:
        warnings.warn("end_epoch called with no accumulated gradients; skipping",
                      stacklevel=2)
        eff = effective_alphas(state, config)
        return EpochAdaptReport(0, 0, float(eff.min()), float(eff.mean()),
                                float(eff.max()), adapted=False)

    skip = (config.first_epoch_policy == POLICY_SKIP_ADAPT and state.epoch == 0)
    grown = shrunk = 0
    if not skip:
        grow = state.g_cu_curr * state.g_cu_prev > 0
        state.alphas[grow] += config.alpha_high
        state.alphas[~grow] *= config.alpha_low
        grown = int(np.count_nonzero(grow))
        shrunk = state.n_params - grown

    state.g_cu_prev, state.g_cu_curr = state.g_cu_curr, state.g_cu_prev
    state.g_cu_curr[:] = 0.0
    state.epoch += 1
    state.accumulated_steps = 0

    eff = effective_alphas(state, config)
    return EpochAdaptReport(grown, shrunk, float(eff.min()), float(eff.mean()),
                            float(eff.max()), adapted=not skip)
