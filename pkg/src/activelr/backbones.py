"""Inner-loop parameter updates, parametrized on a per-parameter step size.

Every backbone implements theta_i <- theta_i - alpha_i * F(g_i), where F
is the backbone's gradient transform.  A constant alpha vector
(:func:`vanilla_alphas`) reproduces the textbook optimizer; an adapted
vector from :mod:`activelr.core` gives the active variant.  The two share
this one code path.

Decoupled weight decay, when enabled, is scaled by the same per-parameter
alpha_i and folded into the same displacement, so the whole step stays
linear in alpha.
"""

from dataclasses import dataclass

import numpy as np

from .core import DivergenceError

SGD_MOMENTUM = "sgd_momentum"
ADAMW = "adamw"
RADAM = "radam"
ADABELIEF = "adabelief"

KINDS = (SGD_MOMENTUM, ADAMW, RADAM, ADABELIEF)

# Rectification threshold for the variance-adaptive branch: with fewer
# effective samples than this the second moment is too noisy to divide by.
RADAM_RHO_THRESHOLD = 4.0


@dataclass
class BackboneConfig:
    kind: str = ADAMW
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    momentum: float = 0.9
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown backbone kind {self.kind!r}; valid: {KINDS}")
        for name in ("beta1", "beta2", "momentum"):
            val = getattr(self, name)
            if not 0 <= val < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {val}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be non-negative, got {self.weight_decay}")


@dataclass
class BackboneState:
    """Moment buffers; ``v`` holds the belief variance s for adabelief."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0


def init_backbone(n_params: int) -> BackboneState:
    if n_params < 1:
        raise ValueError(f"n_params must be >= 1, got {n_params}")
    return BackboneState(m=np.zeros(n_params), v=np.zeros(n_params), t=0)


def vanilla_alphas(alpha: float, n: int) -> np.ndarray:
    """Constant step-size vector: the vanilla optimizer's alpha, everywhere."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.full(n, float(alpha))


def _radam_rho(beta2: float, t: int):
    rho_inf = 2.0 / (1.0 - beta2) - 1.0
    beta2_t = beta2 ** t
    rho_t = rho_inf - 2.0 * t * beta2_t / (1.0 - beta2_t)
    return rho_inf, rho_t


def step(params, raw_grad, alphas, state: BackboneState, config: BackboneConfig) -> None:
    """One inner-loop update of ``params`` in place.

    ``raw_grad`` is the mini-batch gradient; ``alphas`` the per-parameter
    step sizes (all positive).  Raises :class:`DivergenceError` if any
    updated component is non-finite.
    """
    g = np.asarray(raw_grad, dtype=np.float64)
    if not (params.shape == g.shape == alphas.shape == state.m.shape):
        raise ValueError(
            f"shape mismatch: params {params.shape}, grad {g.shape}, "
            f"alphas {alphas.shape}, state {state.m.shape}"
        )

    state.t += 1
    t = state.t
    b1, b2, eps = config.beta1, config.beta2, config.epsilon

    if config.kind == SGD_MOMENTUM:
        state.m *= config.momentum
        state.m += g
        update = state.m
    elif config.kind == ADAMW:
        state.m *= b1
        state.m += (1.0 - b1) * g
        state.v *= b2
        state.v += (1.0 - b2) * g * g
        m_hat = state.m / (1.0 - b1 ** t)
        v_hat = state.v / (1.0 - b2 ** t)
        update = m_hat / (np.sqrt(v_hat) + eps)
    elif config.kind == RADAM:
        state.m *= b1
        state.m += (1.0 - b1) * g
        state.v *= b2
        state.v += (1.0 - b2) * g * g
        m_hat = state.m / (1.0 - b1 ** t)
        rho_inf, rho_t = _radam_rho(b2, t)
        if rho_t > RADAM_RHO_THRESHOLD:
            r_t = np.sqrt(
                ((rho_t - 4.0) * (rho_t - 2.0) * rho_inf)
                / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t)
            )
            v_hat = state.v / (1.0 - b2 ** t)
            update = r_t * m_hat / (np.sqrt(v_hat) + eps)
        else:
            update = m_hat
    else:  # adabelief
        state.m *= b1
        state.m += (1.0 - b1) * g
        diff = g - state.m
        state.v *= b2
        state.v += (1.0 - b2) * diff * diff + eps
        m_hat = state.m / (1.0 - b1 ** t)
        s_hat = state.v / (1.0 - b2 ** t)
        update = m_hat / (np.sqrt(s_hat) + eps)

    if config.weight_decay > 0.0:
        update = update + config.weight_decay * params

    params -= alphas * update
    if not np.all(np.isfinite(params)):
        raise DivergenceError("non-finite parameter after backbone step")
