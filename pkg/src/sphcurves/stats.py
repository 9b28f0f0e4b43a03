"""Weighted centres of point sets on S^2.

Three estimators are provided: the extrinsic mean (renormalized Euclidean
average), the intrinsic (Karcher) mean and the geometric median.  Each has a
public single-sample function and a batched private counterpart that solves
``T`` weighted problems over the same points at once; the principal-curve
expectation step uses the batched versions.
"""

from dataclasses import dataclass

import numpy as np

from .geom import GeometryError, as_unit, exp3, geodesic_distance, log3

__all__ = [
    "DegenerateMeanError",
    "IterationConfig",
    "extrinsic_mean",
    "intrinsic_mean",
    "geometric_median",
    "karcher_objective",
    "median_objective",
]

# Sample points closer than this to the current median iterate are skipped.
COINCIDENT_TOL = 1e-12
# Antipodal gap under which a point cannot be log-mapped at the iterate.


class DegenerateMeanError(GeometryError):
    """The weighted resultant vanishes, so the mean is undefined."""


@dataclass(frozen=True)
class IterationConfig:
    """Stopping rule for the iterative estimators.

    ``damping_alpha`` only affects the geometric median, whose step at
    iteration ``j`` is divided by ``j ** damping_alpha``.
    """

    tol: float = 1e-10
    max_iter: int = 100
    damping_alpha: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping_alpha <= 1:
            raise ValueError("damping_alpha must lie in (0, 1]")


MEDIAN_DEFAULTS = IterationConfig(tol=1e-7, max_iter=1000, damping_alpha=0.75)


def _sample(points, weights):
    X = as_unit(np.atleast_2d(points))
    if len(X) == 0:
        raise ValueError("empty sample")
    if weights is None:
        w = np.ones(len(X))
    else:
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape != (len(X),):
            raise ValueError("weights must match the number of points")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if not w.sum() > 0:
            raise ValueError("weights must have a positive sum")
    return X, w


def extrinsic_mean(points, weights=None):
    """Weighted Euclidean average of ``points`` projected back to the sphere.

    Raises :class:`DegenerateMeanError` when the resultant is (numerically)
    zero, e.g. for balanced antipodal data.
    """
    X, w = _sample(points, weights)
    s = w @ X
    norm = np.linalg.norm(s)
    if norm < 1e-12 * w.sum():
        raise DegenerateMeanError("weighted resultant is zero")
    return s / norm


def karcher_objective(m, points, weights=None):
    X, w = _sample(points, weights)
    return float(w @ geodesic_distance(m, X) ** 2)


def median_objective(m, points, weights=None):
    X, w = _sample(points, weights)
    return float(w @ geodesic_distance(m, X))


def _check_cfg(cfg, kwargs, default):
    if cfg is None:
        cfg = default
    if kwargs:
        cfg = IterationConfig(**{**cfg.__dict__, **kwargs})
    return cfg


def _batch_intrinsic_mean(X, W, M0, tol, max_iter, history=None):
    """Karcher means for every row of ``W`` (shape ``(T, n)``).

    Returns ``(M, n_iter, converged)`` with per-row arrays.  Rows whose
    positive-weight points include an antipode of the iterate are left as
    they are and reported as not converged.
    """
    M = M0.copy()
    T = len(M)
    active = np.ones(T, dtype=bool)
    n_iter = np.zeros(T, dtype=int)
    wsum = W.sum(axis=1)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Ma = M[idx]
        Wa = W[idx] / wsum[idx, None]
        V = log3(Ma[:, None, :], X[None, :, :])
        step = np.einsum("tn,tnk->tk", Wa, V)
        M[idx] = exp3(Ma, step)
        n_iter[idx] += 1
        if history is not None:
            history.append(M[idx].copy())
        done = np.linalg.norm(step, axis=1) < tol
        active[idx[done]] = False
    return M, n_iter, ~active


def intrinsic_mean(points, weights=None, cfg=None, *, full_output=False, **kwargs):
    """Weighted intrinsic (Karcher) mean.

    Minimizes ``sum_i w_i d(m, x_i)^2`` by the fixed-point iteration
    ``m <- exp_m(sum_i w_i log_m(x_i) / sum_i w_i)`` started from the
    extrinsic mean (or the first point when the extrinsic mean is
    degenerate).  Stops when the step is shorter than ``tol``.

    Parameters
    ----------
    points : array_like, shape (n, 3)
    weights : array_like, shape (n,), optional
    cfg : IterationConfig, optional
        Keyword overrides ``tol``/``max_iter`` are also accepted.
    full_output : bool
        Also return ``(n_iter, converged)``.
    """
    cfg = _check_cfg(cfg, kwargs, IterationConfig())
    X, w = _sample(points, weights)
    try:
        m0 = extrinsic_mean(X, w)
    except DegenerateMeanError:
        m0 = X[0]
    M, n_iter, conv = _batch_intrinsic_mean(X, w[None, :], m0[None, :], cfg.tol, cfg.max_iter)
    if full_output:
        return M[0], int(n_iter[0]), bool(conv[0])
    return M[0]


def _batch_median(X, W, M0, tol, max_iter, alpha):
    """Damped Riemannian gradient descent for weighted geometric medians.

    At iteration ``j`` the update is ``j**-alpha`` times the normalized
    weighted sum of unit log vectors, skipping points that coincide with the
    iterate.  A row stops once the undamped step norm drops below ``tol``.
    Finally each row is replaced by its nearest sample point when that point
    scores no worse on the weighted distance sum.
    """
    M = M0.copy()
    T = len(M)
    active = np.ones(T, dtype=bool)
    n_iter = np.zeros(T, dtype=int)
    Wn = W / W.sum(axis=1, keepdims=True)
    for j in range(1, max_iter + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Ma = M[idx]
        V = log3(Ma[:, None, :], X[None, :, :])
        d = np.linalg.norm(V, axis=-1)
        use = (d > COINCIDENT_TOL) & (Wn[idx] > 0)
        U = np.divide(V, d[..., None], out=np.zeros_like(V), where=use[..., None])
        grad = np.einsum("tn,tnk->tk", Wn[idx], U)
        M[idx] = exp3(Ma, grad / j**alpha)
        n_iter[idx] += 1
        done = np.linalg.norm(grad, axis=1) < tol
        active[idx[done]] = False
    # a median sitting on a sample point is only circled by the damped steps
    D = geodesic_distance(M[:, None, :], X[None, :, :])
    near = np.argmin(D, axis=1)
    cand = X[near]
    f_last = np.sum(Wn * D, axis=1)
    f_cand = np.sum(Wn * geodesic_distance(cand[:, None, :], X[None, :, :]), axis=1)
    snap = f_cand <= f_last
    M[snap] = cand[snap]
    return M, n_iter, ~active


def geometric_median(points, weights=None, cfg=None, *, init="first", full_output=False, **kwargs):
    """Weighted geometric median on the sphere.

    Minimizes ``sum_i w_i d(m, x_i)`` with the damped descent
    ``M_{j+1} = exp_{M_j}(j**-alpha * sum_i w_i u_i / sum_i w_i)``, where
    ``u_i`` is the unit log vector from ``M_j`` to ``x_i`` and points
    coinciding with ``M_j`` are skipped.

    Parameters
    ----------
    points : array_like, shape (n, 3)
    weights : array_like, shape (n,), optional
    cfg : IterationConfig, optional
        Defaults to ``tol=1e-7, max_iter=1000, damping_alpha=0.75``.  The
        tolerance is compared with the undamped step norm.
    init : {"first", "extrinsic"}
        Start at the first positive-weight point or at the extrinsic mean.
    full_output : bool
        Also return ``(n_iter, converged)``.
    """
    cfg = _check_cfg(cfg, kwargs, MEDIAN_DEFAULTS)
    X, w = _sample(points, weights)
    if init == "first":
        m0 = X[np.flatnonzero(w > 0)[0]]
    elif init == "extrinsic":
        m0 = extrinsic_mean(X, w)
    else:
        raise ValueError(f"unknown init {init!r}")
    M, n_iter, conv = _batch_median(
        X, w[None, :], m0[None, :], cfg.tol, cfg.max_iter, cfg.damping_alpha
    )
    if full_output:
        return M[0], int(n_iter[0]), bool(conv[0])
    return M[0]
