"""Analytic test objectives and a random convex-quadratic generator.

Each objective bundles f, its analytic gradient, known stationary points,
and (where the global minimum is at infinity) an escape-region predicate
so "got past the trap" is a testable event instead of a race to -inf.
"""

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass
class Objective:
    """An evaluatable function bundle over a flat parameter vector.

    ``batches``, when present, is a list of (f_t, grad_t) pairs whose mean
    recomposes the full objective.  ``smoothness`` is the largest gradient
    Lipschitz constant across batches (max Hessian eigenvalue for
    quadratics), used to pick safe step sizes.
    """

    name: str
    dim: int
    f: callable
    grad: callable
    batches: list = None
    stationary_points: list = None
    convex: bool = False
    escape: callable = None
    default_init: np.ndarray = None
    bounds: list = None
    smoothness: float = None
    # Optional vectorized forms over a (k, dim) stack of points, used by
    # :func:`replicated` to advance many replicas per numpy call:
    # f_rows -> (k,) losses, grad_rows -> (k, dim), escape_rows -> (k,) bools.
    f_rows: callable = None
    grad_rows: callable = None
    escape_rows: callable = None
    extras: dict = field(default_factory=dict)


def cubic_1d() -> Objective:
    """x^3 - 6x^2 + 9x: local max at 1, local min at 3, unbounded below.

    Escape region x < 0.5, past the hump left of the trapping minimum.
    """
    def f(theta):
        x = np.asarray(theta, dtype=float)[0]
        return x ** 3 - 6.0 * x ** 2 + 9.0 * x

    def grad(theta):
        x = np.asarray(theta, dtype=float)[0]
        return np.array([3.0 * x ** 2 - 12.0 * x + 9.0])

    return Objective(
        name="cubic",
        dim=1,
        f=f,
        grad=grad,
        stationary_points=[np.array([1.0]), np.array([3.0])],
        escape=lambda theta: theta[0] < 0.5,
        default_init=np.array([5.0]),
        bounds=[(-2.0, 6.0)],
        f_rows=lambda th: th[:, 0] ** 3 - 6.0 * th[:, 0] ** 2 + 9.0 * th[:, 0],
        grad_rows=lambda th: (3.0 * th[:, 0] ** 2 - 12.0 * th[:, 0] + 9.0)[:, None],
        escape_rows=lambda th: th[:, 0] < 0.5,
    )


def bivariate_multimodal() -> Objective:
    """-x^3 - x^2 y + y^2 + 4y + 1680: three finite stationary points.

    (0, -2) is a genuine local minimum with f = 1676; (-4, 6) and
    (1, -1.5) are stationary but have indefinite Hessians.  The function
    is unbounded below; the escape predicate is f dropping under the
    trapping value f(0, -2) = 1676.
    """
    def f(theta):
        x, y = np.asarray(theta, dtype=float)
        return -x ** 3 - x ** 2 * y + y ** 2 + 4.0 * y + 1680.0

    def grad(theta):
        x, y = np.asarray(theta, dtype=float)
        return np.array([-3.0 * x ** 2 - 2.0 * x * y, -x ** 2 + 2.0 * y + 4.0])

    def f_rows(th):
        x, y = th[:, 0], th[:, 1]
        return -x ** 3 - x ** 2 * y + y ** 2 + 4.0 * y + 1680.0

    def grad_rows(th):
        x, y = th[:, 0], th[:, 1]
        return np.stack([-3.0 * x ** 2 - 2.0 * x * y,
                         -x ** 2 + 2.0 * y + 4.0], axis=1)

    trap_value = 1676.0  # f at (0, -2)
    return Objective(
        name="multimodal",
        dim=2,
        f=f,
        grad=grad,
        stationary_points=[np.array([-4.0, 6.0]), np.array([0.0, -2.0]),
                           np.array([1.0, -1.5])],
        escape=lambda theta: f(theta) < trap_value,
        default_init=np.array([-3.99, 6.01]),
        bounds=[(-6.0, 4.0), (-4.0, 8.0)],
        f_rows=f_rows,
        grad_rows=grad_rows,
        escape_rows=lambda th: f_rows(th) < trap_value,
    )


def saddle_2d() -> Objective:
    """y^4 - 2y^2 + x^2: saddle at the origin, minima at (0, +-1)."""
    def f(theta):
        x, y = np.asarray(theta, dtype=float)
        return y ** 4 - 2.0 * y ** 2 + x ** 2

    def grad(theta):
        x, y = np.asarray(theta, dtype=float)
        return np.array([2.0 * x, 4.0 * y ** 3 - 4.0 * y])

    return Objective(
        name="saddle",
        dim=2,
        f=f,
        grad=grad,
        stationary_points=[np.array([0.0, 0.0]), np.array([0.0, 1.0]),
                           np.array([0.0, -1.0])],
        default_init=np.array([0.5, 0.1]),
        bounds=[(-1.5, 1.5), (-1.5, 1.5)],
        f_rows=lambda th: th[:, 1] ** 4 - 2.0 * th[:, 1] ** 2 + th[:, 0] ** 2,
        grad_rows=lambda th: np.stack([2.0 * th[:, 0],
                                       4.0 * th[:, 1] ** 3 - 4.0 * th[:, 1]],
                                      axis=1),
    )


def convex_quadratic(A, theta_star, name="quadratic", batches=None,
                     smoothness=None) -> Objective:
    """f(theta) = 0.5 (theta - theta*)^T A (theta - theta*) for SPD A."""
    A = np.asarray(A, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    dim = theta_star.shape[0]

    def f(theta):
        d = np.asarray(theta, dtype=float) - theta_star
        return 0.5 * float(d @ A @ d)

    def grad(theta):
        d = np.asarray(theta, dtype=float) - theta_star
        return A @ d

    if smoothness is None:
        smoothness = float(np.linalg.eigvalsh(A).max())
    return Objective(
        name=name,
        dim=dim,
        f=f,
        grad=grad,
        batches=batches,
        stationary_points=[theta_star.copy()],
        convex=True,
        default_init=None,
        smoothness=smoothness,
    )


def random_axis_aligned_quadratic(seed, dim, n_batches,
                                  curvature_range=(0.5, 8.0),
                                  center_spread=0.5) -> Objective:
    """Batched quadratic whose batches share the coordinate axes.

    Every batch is 0.5 * sum_i a_ti (theta_i - c_ti)^2 with diagonal
    curvature, so each coordinate evolves as an independent 1-D problem
    under any elementwise optimizer.  The full objective is the batch
    mean; its minimizer is the curvature-weighted mean of the batch
    centers per coordinate.  ``extras['batch_centers']`` exposes the
    (K, dim) center matrix so callers can reason about the span each
    coordinate's iterates can visit.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if n_batches < 2:
        raise ValueError(f"n_batches must be >= 2, got {n_batches}")
    lo, hi = curvature_range
    if not 0 < lo <= hi:
        raise ValueError(f"curvature_range must be 0 < lo <= hi, got {curvature_range}")
    rng = np.random.default_rng(seed)

    curvatures = np.exp(rng.uniform(np.log(lo), np.log(hi),
                                    size=(n_batches, dim)))
    mu = rng.standard_normal(dim)
    centers = mu + center_spread * rng.standard_normal((n_batches, dim))

    def make_pair(a_t, c_t):
        def f_t(theta):
            d = np.asarray(theta, dtype=float) - c_t
            return 0.5 * float(np.sum(a_t * d * d))

        def g_t(theta):
            return a_t * (np.asarray(theta, dtype=float) - c_t)

        return f_t, g_t

    batch_pairs = [make_pair(a_t, c_t)
                   for a_t, c_t in zip(curvatures, centers)]
    a_bar = curvatures.mean(axis=0)
    center_bar = (curvatures * centers).sum(axis=0) / curvatures.sum(axis=0)
    offset = float(np.mean(
        [0.5 * np.sum(a_t * (c_t - center_bar) ** 2)
         for a_t, c_t in zip(curvatures, centers)]))

    def f(theta):
        d = np.asarray(theta, dtype=float) - center_bar
        return 0.5 * float(np.sum(a_bar * d * d)) + offset

    def grad(theta):
        return a_bar * (np.asarray(theta, dtype=float) - center_bar)

    return Objective(
        name="axis_quadratic",
        dim=dim,
        f=f,
        grad=grad,
        batches=batch_pairs,
        stationary_points=[center_bar],
        convex=True,
        smoothness=float(curvatures.max()),
        extras={"batch_centers": centers, "batch_curvatures": curvatures},
    )


def random_convex_quadratic(seed, dim, cond_number, n_batches=None) -> Objective:
    """Random SPD quadratic with eigenvalues spanning ``cond_number``.

    With ``n_batches`` = K, also builds K batch quadratics (random SPD
    curvature, minimizers scattered around the overall one) whose mean is
    the full objective; the full minimizer is then recomputed from the
    batch system.  ``smoothness`` reports the largest eigenvalue across
    batches.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if cond_number < 1:
        raise ValueError(f"cond_number must be >= 1, got {cond_number}")
    rng = np.random.default_rng(seed)

    def random_spd(d):
        eigs = np.exp(rng.uniform(0.0, np.log(cond_number), size=d)) if d > 1 \
            else np.array([1.0 + rng.uniform(0.0, cond_number - 1.0)])
        if d > 1:
            # pin the spectrum's ends so the condition number is exact
            eigs[0], eigs[-1] = 1.0, float(cond_number)
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        return (q * eigs) @ q.T

    theta_star = rng.standard_normal(dim)

    if not n_batches:
        A = random_spd(dim)
        return convex_quadratic(A, theta_star)

    if n_batches < 2:
        raise ValueError(f"n_batches must be >= 2, got {n_batches}")
    mats, centers, batch_pairs = [], [], []
    for _ in range(n_batches):
        A_t = random_spd(dim)
        c_t = theta_star + 0.5 * rng.standard_normal(dim)
        mats.append(A_t)
        centers.append(c_t)

    def make_pair(A_t, c_t):
        def f_t(theta):
            d = np.asarray(theta, dtype=float) - c_t
            return 0.5 * float(d @ A_t @ d)

        def g_t(theta):
            d = np.asarray(theta, dtype=float) - c_t
            return A_t @ d

        return f_t, g_t

    for A_t, c_t in zip(mats, centers):
        batch_pairs.append(make_pair(A_t, c_t))

    A_bar = np.mean(mats, axis=0)
    rhs = np.mean([A_t @ c_t for A_t, c_t in zip(mats, centers)], axis=0)
    center_bar = np.linalg.solve(A_bar, rhs)
    offset_terms = [0.5 * float((c - center_bar) @ A_t @ (c - center_bar))
                    for A_t, c in zip(mats, centers)]
    offset = float(np.mean(offset_terms))

    def f(theta):
        d = np.asarray(theta, dtype=float) - center_bar
        return 0.5 * float(d @ A_bar @ d) + offset

    def grad(theta):
        d = np.asarray(theta, dtype=float) - center_bar
        return A_bar @ d

    smoothness = max(float(np.linalg.eigvalsh(A_t).max()) for A_t in mats)
    return Objective(
        name="quadratic",
        dim=dim,
        f=f,
        grad=grad,
        batches=batch_pairs,
        stationary_points=[center_bar],
        convex=True,
        smoothness=smoothness,
    )


def replicated(obj: Objective, copies: int, freeze_escaped=False) -> Objective:
    """Sum of ``copies`` independent copies of a separable objective.

    Coordinate block j evolves exactly as an independent run of the base
    objective, so one optimizer call advances ``copies`` replicas at once.
    Only valid together with purely elementwise optimizers.

    With ``freeze_escaped`` each replica's gradient is zeroed from the
    first evaluation at which its escape predicate held, pinning it in
    place while the others keep moving (escape regions may be unbounded
    below, so a run to a fixed epoch count would otherwise blow up).  The
    latch lives in ``extras["escaped_mask"]``.
    """
    d = obj.dim
    mask = np.zeros(copies, dtype=bool)
    if freeze_escaped and obj.escape is None:
        raise ValueError("freeze_escaped needs an escape predicate on the base objective")

    def row_losses(th):
        if obj.f_rows is not None:
            return obj.f_rows(th)
        return np.array([obj.f(row) for row in th])

    def row_grads(th):
        if obj.grad_rows is not None:
            return obj.grad_rows(th)
        return np.stack([obj.grad(row) for row in th])

    def row_escapes(th):
        if obj.escape_rows is not None:
            return obj.escape_rows(th)
        return np.array([bool(obj.escape(row)) for row in th])

    def f(theta):
        th = np.asarray(theta, dtype=float).reshape(copies, d)
        return float(row_losses(th).sum())

    def grad(theta):
        th = np.asarray(theta, dtype=float).reshape(copies, d)
        g = row_grads(th)
        if freeze_escaped:
            np.logical_or(mask, row_escapes(th), out=mask)
            g[mask] = 0.0
        return g.reshape(-1)

    escape = None
    if obj.escape is not None:
        if freeze_escaped:
            def escape(theta):
                return bool(mask.all())
        else:
            def escape(theta):
                th = np.asarray(theta, dtype=float).reshape(copies, d)
                return bool(np.all(row_escapes(th)))

    return Objective(
        name=f"{obj.name}_x{copies}",
        dim=d * copies,
        f=f,
        grad=grad,
        convex=obj.convex,
        escape=escape,
        extras={"base": obj, "copies": copies, "escaped_mask": mask},
    )


def mse_line() -> Objective:
    """Least-squares slope fit of y = w x on a fixed noiseless 1-D sample.

    Convex in w with the minimum exactly at the generating slope 1.5.
    """
    xs = np.linspace(-2.0, 2.0, 17)
    w_true = 1.5
    ys = w_true * xs
    mean_x2 = float(np.mean(xs ** 2))

    def f(theta):
        w = np.asarray(theta, dtype=float)[0]
        return float(np.mean(0.5 * (w * xs - ys) ** 2))

    def grad(theta):
        w = np.asarray(theta, dtype=float)[0]
        return np.array([float(np.mean((w * xs - ys) * xs))])

    return Objective(
        name="mse_line",
        dim=1,
        f=f,
        grad=grad,
        stationary_points=[np.array([w_true])],
        convex=True,
        default_init=np.array([-1.0]),
        bounds=[(-1.5, 4.5)],
        smoothness=mean_x2,
        extras={"xs": xs, "ys": ys},
    )


def plot_quadratic() -> Objective:
    """Fixed mildly anisotropic 2-D quadratic, minimized at (1, -1).

    The matrix [[3, 1], [1, 2]] has eigenvalues (5 +- sqrt(5)) / 2, so
    curvature varies by roughly 2.6x across directions.
    """
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    base = convex_quadratic(A, np.array([1.0, -1.0]))
    return replace(
        base,
        default_init=np.array([-2.0, 2.0]),
        bounds=[(-3.0, 3.0), (-3.0, 3.0)],
        f_rows=lambda th: 0.5 * np.einsum(
            "ki,ij,kj->k", th - np.array([1.0, -1.0]), A, th - np.array([1.0, -1.0])),
    )


OBJECTIVE_NAMES = ("cubic", "multimodal", "saddle", "quadratic", "mse_line")

_FACTORIES = {
    "cubic": cubic_1d,
    "multimodal": bivariate_multimodal,
    "saddle": saddle_2d,
    "quadratic": plot_quadratic,
    "mse_line": mse_line,
}


def named_objective(name: str) -> Objective:
    """Fresh instance of one of the five named plotting objectives."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; valid: {', '.join(OBJECTIVE_NAMES)}"
        ) from None
    return factory()


def minibatch_split(dataset_or_n, batch_size, seed=0, shuffle=True):
    """Partition row indices into consecutive batches covering every row once.

    The last batch may be smaller.  Deterministic given ``seed``;
    ``shuffle=False`` keeps the original order.
    """
    n = dataset_or_n if isinstance(dataset_or_n, int) else dataset_or_n.n
    if not 1 <= batch_size <= n:
        raise ValueError(f"batch_size must lie in [1, {n}], got {batch_size}")
    order = np.arange(n)
    if shuffle:
        order = np.random.default_rng(seed).permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]
