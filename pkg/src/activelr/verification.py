"""Executable checkers for the convexity guarantees and the step-size walk.

Two guarantees are checked numerically on convex objectives:

* sign agreement — over one epoch, the cumulative gradient computed with
  frozen parameters and the one computed along the inner-loop SGD path
  point the same way (non-negative elementwise product), with an explicit
  lower bound on the product in the scalar case;
* per-epoch advantage — one adapted full-batch step from a shared iterate
  costs no more than the constant-step one, with the margin bounded below
  by a gradient-product term.

The walk simulator reproduces the shrink/grow operation ablation: only
multiplicative shrink paired with additive growth keeps the step size
positive and stationary.
"""

import json
import random
from dataclasses import dataclass, asdict

import numpy as np

from .objectives import (Objective, random_axis_aligned_quadratic,
                         random_convex_quadratic)

# Slack for floating-point comparisons of theoretically non-negative
# quantities; scaled by the magnitude of the terms involved.
NUMERICAL_SLACK = 1e-12

LOW_MULTIPLY = "multiply"
LOW_SUBTRACT = "subtract"
HIGH_ADD = "add"
HIGH_MULTIPLY = "multiply"

WALK_BURN_IN = 100


@dataclass
class SignAgreementReport:
    """One-epoch comparison of frozen vs inner-loop cumulative gradients.

    ``product`` is the elementwise product of the two cumulative
    gradients; ``lower_bound`` is the summed per-batch loss decrease along
    the inner loop divided by the step size, which bounds the scalar
    product from below when the run does not diverge.
    """

    cu_star: np.ndarray
    cu_hat: np.ndarray
    product: np.ndarray
    inner_product: float
    lower_bound: float
    diverged: bool

    def to_json(self):
        d = asdict(self)
        for key in ("cu_star", "cu_hat", "product"):
            d[key] = [float(v) for v in d[key]]
        return d


@dataclass
class StepAdvantageReport:
    """Cost gap between constant-step and adapted-step epochs.

    ``lhs`` = f(constant-step iterate) - f(adapted-step iterate);
    ``rhs`` = sum_i g_next_i * g_curr_i * (alpha_branch_i - alpha).
    ``segment_condition`` reports whether the sign pattern of consecutive
    gradient products matched coordinate-wise, which is when ``rhs`` is
    guaranteed non-negative.
    """

    lhs: float
    rhs: float
    high_branch: np.ndarray
    segment_condition: bool

    def to_json(self):
        d = asdict(self)
        d["high_branch"] = [bool(v) for v in d["high_branch"]]
        return d


@dataclass
class WalkStats:
    series: np.ndarray
    mean: float
    std: float
    min: float
    crossed_zero: bool


def check_sign_agreement(obj: Objective, theta0, alpha, order_seed=0) -> SignAgreementReport:
    """Run one epoch twice from the same start: frozen and with SGD updates.

    The frozen pass sums every batch gradient at theta0.  The inner-loop
    pass applies plain SGD after each batch and sums the gradients it
    actually saw.  Divergence (summed final batch losses above the initial
    ones) is reported, not raised.
    """
    if not obj.convex:
        raise ValueError("sign-agreement check is only valid for convex objectives")
    if not obj.batches or len(obj.batches) < 2:
        raise ValueError("objective must carry at least 2 batches")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    theta0 = np.asarray(theta0, dtype=float)
    order = np.random.default_rng(order_seed).permutation(len(obj.batches))
    batches = [obj.batches[i] for i in order]

    cu_star = np.zeros_like(theta0)
    for _, g_t in batches:
        cu_star += g_t(theta0)

    theta = theta0.copy()
    cu_hat = np.zeros_like(theta0)
    for _, g_t in batches:
        g = g_t(theta)
        cu_hat += g
        theta = theta - alpha * g

    loss_start = sum(f_t(theta0) for f_t, _ in batches)
    loss_end = sum(f_t(theta) for f_t, _ in batches)
    diverged = bool(loss_end > loss_start)
    lower_bound = (loss_start - loss_end) / alpha

    return SignAgreementReport(
        cu_star=cu_star,
        cu_hat=cu_hat,
        product=cu_star * cu_hat,
        inner_product=float(cu_star @ cu_hat),
        lower_bound=float(lower_bound),
        diverged=diverged,
    )


def check_step_advantage(obj: Objective, theta_e, alpha, alpha_high_eff,
                         alpha_low_eff, prior_grad) -> StepAdvantageReport:
    """Compare one constant-step epoch against one adapted-step epoch.

    Both start from ``theta_e`` with the same full-batch gradient.  The
    adapted step uses ``alpha_high_eff`` on coordinates whose gradient
    kept the sign of ``prior_grad`` and ``alpha_low_eff`` otherwise
    (a zero product falls in the low branch).
    """
    if not obj.convex:
        raise ValueError("step-advantage check is only valid for convex objectives")
    if not alpha_low_eff < alpha < alpha_high_eff:
        raise ValueError(
            f"need alpha_low < alpha < alpha_high, got "
            f"{alpha_low_eff} / {alpha} / {alpha_high_eff}"
        )

    theta_e = np.atleast_1d(np.asarray(theta_e, dtype=float))
    prior = np.broadcast_to(np.asarray(prior_grad, dtype=float), theta_e.shape)

    g_curr = obj.grad(theta_e)
    high = prior * g_curr > 0
    alpha_branch = np.where(high, alpha_high_eff, alpha_low_eff)

    theta_vanilla = theta_e - alpha * g_curr
    theta_active = theta_e - alpha_branch * g_curr
    g_next = obj.grad(theta_active)

    lhs = obj.f(theta_vanilla) - obj.f(theta_active)
    rhs = float(np.sum(g_next * g_curr * (alpha_branch - alpha)))

    curr_products = prior * g_curr
    next_products = g_next * g_curr
    segment = bool(np.all(np.sign(next_products) == np.sign(curr_products)))

    return StepAdvantageReport(
        lhs=float(lhs),
        rhs=rhs,
        high_branch=high,
        segment_condition=segment,
    )


def simulate_lr_walk(low_op, high_op, alpha_low, alpha_high, alpha_init=1.0,
                     epochs=10_000, seed=0) -> WalkStats:
    """Fair-coin walk over the step size applying one operation per epoch.

    Heads shrinks via ``low_op`` (multiply by or subtract alpha_low),
    tails grows via ``high_op`` (add or multiply by alpha_high).  Mean
    and std are computed after a burn-in of ``WALK_BURN_IN`` steps so the
    stats reflect the stationary regime rather than the initial value;
    ``min`` and ``crossed_zero`` cover the whole series.
    """
    if low_op not in (LOW_MULTIPLY, LOW_SUBTRACT):
        raise ValueError(f"unknown low_op {low_op!r}")
    if high_op not in (HIGH_ADD, HIGH_MULTIPLY):
        raise ValueError(f"unknown high_op {high_op!r}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")

    rng = random.Random(seed)
    alpha = float(alpha_init)
    series = np.empty(epochs + 1)
    series[0] = alpha
    for i in range(1, epochs + 1):
        if rng.random() < 0.5:
            alpha = alpha * alpha_low if low_op == LOW_MULTIPLY else alpha - alpha_low
        else:
            alpha = alpha + alpha_high if high_op == HIGH_ADD else alpha * alpha_high
        series[i] = alpha

    tail = series[min(WALK_BURN_IN, epochs):]
    return WalkStats(
        series=series,
        mean=float(tail.mean()),
        std=float(tail.std()),
        min=float(series.min()),
        crossed_zero=bool(np.any(series <= 0.0)),
    )


def finite_diff_grad(obj: Objective, theta, h=1e-6) -> np.ndarray:
    """Centered differences per coordinate with step h * (1 + |theta_j|)."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for j in range(theta.shape[0]):
        step = h * (1.0 + abs(theta[j]))
        plus = theta.copy()
        plus[j] += step
        minus = theta.copy()
        minus[j] -= step
        grad[j] = (obj.f(plus) - obj.f(minus)) / (2.0 * step)
    return grad


def walk_suite(seeds=range(30), epochs=10_000, alpha_low=0.9, alpha_high=0.1,
               alpha_init=1.0):
    """Run all four operation pairs over the given seeds.

    Returns {(low_op, high_op): [WalkStats, ...]} for downstream
    aggregation and the JSON summary used by the CLI.
    """
    results = {}
    for low_op in (LOW_MULTIPLY, LOW_SUBTRACT):
        for high_op in (HIGH_ADD, HIGH_MULTIPLY):
            results[(low_op, high_op)] = [
                simulate_lr_walk(low_op, high_op, alpha_low, alpha_high,
                                 alpha_init, epochs, seed)
                for seed in seeds
            ]
    return results


def walk_suite_summary(results):
    summary = {}
    for (low_op, high_op), stats in results.items():
        summary[f"{low_op}/{high_op}"] = {
            "grand_mean": float(np.mean([s.mean for s in stats])),
            "grand_std": float(np.mean([s.std for s in stats])),
            "min": float(min(s.min for s in stats)),
            "any_crossed_zero": bool(any(s.crossed_zero for s in stats)),
            "all_crossed_zero": bool(all(s.crossed_zero for s in stats)),
        }
    return summary


def reports_to_json(reports, path):
    """Serialize a list of checker reports to one JSON document."""
    payload = [r.to_json() for r in reports]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


@dataclass
class SuiteResult:
    """Aggregate outcome of a randomized checker suite."""

    name: str
    n_cases: int
    n_diverged: int
    n_failed: int
    failures: list
    passed: bool

    def to_json(self):
        return asdict(self)


def sign_agreement_suite(n_cases=200, seed=0, dim_max=8, batches_max=16) -> SuiteResult:
    """Random batched convex quadratics, step size at most 1/(2L).

    The guarantee is per parameter, so the cases are drawn from the
    regime where each parameter is its own 1-D problem: axis-aligned
    batches, with the start placed strictly outside each coordinate's
    span of batch minimizers (by more than the span's width, so one
    epoch cannot carry the iterate past the far side of any batch).
    Cross-coupled curvature or a start inside that span can flip the
    sign of a near-zero coordinate and voids the guarantee.

    A case fails if, without divergence, any elementwise product of the
    two cumulative gradients is negative, or (scalar cases) the inner
    product undercuts its loss-decrease lower bound.
    """
    rng = np.random.default_rng(seed)
    n_diverged = 0
    failures = []
    for case in range(n_cases):
        dim = int(rng.integers(1, dim_max + 1))
        k = int(rng.integers(2, batches_max + 1))
        obj = random_axis_aligned_quadratic(seed=int(rng.integers(2 ** 31)),
                                            dim=dim, n_batches=k)
        centers = obj.extras["batch_centers"]
        span_lo = centers.min(axis=0)
        span_hi = centers.max(axis=0)
        width = span_hi - span_lo
        side = rng.choice([-1.0, 1.0], size=dim)
        gap = width + rng.uniform(0.1, 2.0, size=dim)
        theta0 = np.where(side > 0, span_hi + gap, span_lo - gap)
        alpha = float(rng.uniform(0.05, 1.0)) / (2.0 * obj.smoothness)
        rep = check_sign_agreement(obj, theta0, alpha, order_seed=case)
        if rep.diverged:
            n_diverged += 1
            continue
        scale = 1.0 + np.abs(rep.cu_star) * np.abs(rep.cu_hat)
        if np.any(rep.product < -NUMERICAL_SLACK * scale):
            failures.append({"case": case, "reason": "negative product",
                             "product_min": float(rep.product.min())})
            continue
        if dim == 1:
            slack = NUMERICAL_SLACK * (1.0 + abs(rep.inner_product))
            if rep.lower_bound < -slack:
                failures.append({"case": case, "reason": "negative lower bound",
                                 "lower_bound": rep.lower_bound})
            elif rep.inner_product < rep.lower_bound - slack:
                failures.append({"case": case, "reason": "bound violated",
                                 "inner_product": rep.inner_product,
                                 "lower_bound": rep.lower_bound})
    return SuiteResult(name="sign-agreement", n_cases=n_cases,
                       n_diverged=n_diverged, n_failed=len(failures),
                       failures=failures, passed=not failures)


def step_advantage_suite(n_cases=200, seed=0, dim_max=8) -> SuiteResult:
    """Random convex quadratics with random prior-gradient sign contexts.

    Each case must satisfy lhs >= rhs; cases meeting the sign-stability
    segment condition must additionally have rhs >= 0.  Both branch types
    (grown and shrunk coordinates) must occur across the suite.
    """
    rng = np.random.default_rng(seed)
    failures = []
    saw_high = saw_low = False
    for case in range(n_cases):
        dim = int(rng.integers(1, dim_max + 1))
        cond = float(rng.uniform(1.0, 50.0))
        obj = random_convex_quadratic(seed=int(rng.integers(2 ** 31)), dim=dim,
                                      cond_number=cond)
        theta_e = obj.stationary_points[0] + rng.uniform(-3.0, 3.0, size=dim)
        alpha = float(rng.uniform(0.05, 0.8)) / obj.smoothness
        alpha_low_eff = alpha * float(rng.uniform(0.2, 0.9))
        alpha_high_eff = alpha + float(rng.uniform(0.05, 1.0)) / obj.smoothness
        prior = rng.choice([-1.0, 1.0], size=dim)
        rep = check_step_advantage(obj, theta_e, alpha, alpha_high_eff,
                                   alpha_low_eff, prior)
        saw_high = saw_high or bool(np.any(rep.high_branch))
        saw_low = saw_low or bool(np.any(~rep.high_branch))
        slack = NUMERICAL_SLACK * (1.0 + abs(rep.lhs) + abs(rep.rhs))
        if rep.lhs < rep.rhs - slack:
            failures.append({"case": case, "reason": "lhs below rhs",
                             "lhs": rep.lhs, "rhs": rep.rhs})
        elif rep.segment_condition and rep.rhs < -slack:
            failures.append({"case": case, "reason": "negative rhs under segment condition",
                             "rhs": rep.rhs})
    if not (saw_high and saw_low):
        failures.append({"reason": "suite did not exercise both branches"})
    return SuiteResult(name="step-advantage", n_cases=n_cases, n_diverged=0,
                       n_failed=len(failures), failures=failures,
                       passed=not failures)
