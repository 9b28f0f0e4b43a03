"""Principal curves on the sphere.

A curve is a polyline of great-circle segments.  Fitting alternates a
projection step (every data point is projected onto the nearest point of
the continuous curve) with an expectation step (every vertex moves to a
kernel-weighted centre of the data whose projection index is nearby).
Setting ``hauberg_projection`` replaces the continuous projection by a
nearest-vertex rule, which is the usual discrete baseline.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .geom import (
    AmbiguousGeodesicError,
    GeometryError,
    NORTH,
    as_unit,
    geodesic_distance,
    rotation_taking,
    to_spherical,
)
from .stats import (
    MEDIAN_DEFAULTS,
    IterationConfig,
    _batch_intrinsic_mean,
    _batch_median,
)

log = logging.getLogger(__name__)

__all__ = [
    "Curve",
    "CurveFitConfig",
    "DegenerateCurveError",
    "FitReport",
    "ProjectionResult",
    "expectation_step",
    "fit",
    "hauberg_project",
    "kernel",
    "project_to_curve",
    "project_to_segment",
    "reparameterize_unit_speed",
    "sample_circle_vertices",
    "smoother_weights",
]

_MERGE_TOL = 1e-12
_ANTIPODAL_GAP = 1e-9
_AMBIGUITY_TOL = 1e-12
_TIE_TOL = 1e-12


class DegenerateCurveError(GeometryError):
    """A curve with no length, or with an undefined segment."""


@dataclass(frozen=True)
class Curve:
    """Geodesic polyline with unit-speed parameter in [0, 1].

    ``lambdas[t]`` is the arc length up to vertex ``t`` divided by
    ``total_length``.  A closed curve has an extra segment from the last
    vertex back to the first.
    """

    vertices: np.ndarray
    closed: bool
    lambdas: np.ndarray
    total_length: float
    segment_lengths: np.ndarray

    @property
    def T(self):
        return len(self.vertices)

    def segments(self):
        """Start and end points of every segment, in parameter order."""
        A = self.vertices
        B = np.roll(A, -1, axis=0) if self.closed else A[1:]
        return (A, B) if self.closed else (A[:-1], B)

    def at(self, lam):
        """Evaluate the curve at parameter values ``lam``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if self.closed:
            lam = np.mod(lam, 1.0)
        lam = np.clip(lam, 0.0, 1.0)
        A, B = self.segments()
        starts = self.lambdas[: len(A)]
        s = np.clip(np.searchsorted(starts, lam, side="right") - 1, 0, len(A) - 1)
        seg_frac = self.segment_lengths[s] / self.total_length
        t = np.clip((lam - starts[s]) / seg_frac, 0.0, 1.0)
        return _slerp(A[s], B[s], t, self.segment_lengths[s])


def _slerp(a, b, t, omega):
    omega = np.asarray(omega, dtype=float)
    v = b - np.sum(a * b, axis=-1, keepdims=True) * a
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    u = np.divide(v, n, out=np.zeros_like(v), where=n > 0)
    ang = (np.asarray(t) * omega)[..., None]
    out = np.cos(ang) * a + np.sin(ang) * u
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def reparameterize_unit_speed(vertices, closed=True):
    """Build a :class:`Curve` with arc-length parameterization.

    Consecutive vertices closer than 1e-12 rad are merged.  Raises
    :class:`DegenerateCurveError` if fewer than two distinct vertices
    remain or if consecutive vertices are antipodal.
    """
    V = as_unit(np.atleast_2d(vertices))
    keep = [0]
    for i in range(1, len(V)):
        if geodesic_distance(V[keep[-1]], V[i]) >= _MERGE_TOL:
            keep.append(i)
    if closed and len(keep) > 1 and geodesic_distance(V[keep[-1]], V[keep[0]]) < _MERGE_TOL:
        keep.pop()
    V = V[keep]
    if len(V) < 2:
        raise DegenerateCurveError("all vertices coincide")
    B = np.roll(V, -1, axis=0) if closed else V[1:]
    A = V if closed else V[:-1]
    seg = geodesic_distance(A, B)
    if np.any(seg > np.pi - _ANTIPODAL_GAP):
        raise DegenerateCurveError("consecutive vertices are antipodal")
    total = float(seg.sum())
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    lambdas = cum[: len(V)] / total
    if not closed:
        lambdas[-1] = 1.0
    return Curve(V, bool(closed), lambdas, total, seg)


def sample_circle_vertices(circle, T):
    """``T`` vertices equally spaced in azimuth around ``circle``, closed.

    Azimuth zero is the image of the x axis under the rotation taking the
    north pole to the circle centre.
    """
    if T < 3:
        raise ValueError("need at least 3 vertices")
    r = circle.radius
    if not 0 < r < np.pi:
        raise DegenerateCurveError("circle radius must lie in (0, pi)")
    phi = 2 * np.pi * np.arange(T) / T
    local = np.stack([np.sin(r) * np.cos(phi), np.sin(r) * np.sin(phi), np.full(T, np.cos(r))], axis=1)
    R = rotation_taking(NORTH, circle.center)
    return reparameterize_unit_speed(local @ R.T, closed=True)


# --- projection ---------------------------------------------------------------


def project_to_segment(p, a, b, *, full_output=False):
    """Nearest point to ``p`` on the geodesic segment from ``a`` to ``b``.

    The segment is rotated onto the equator: first ``a`` is taken to the
    north pole, which puts the segment on a meridian; the pole of that
    meridian's great circle lies a quarter turn further in azimuth and is
    then rotated to the north pole.  In that frame the closest point of the
    great circle is ``p`` with its z coordinate dropped; if its azimuth is
    outside the segment the nearer endpoint is used.

    Returns ``(foot, distance, t)`` with ``t`` the fractional position along
    the segment; ``full_output`` adds an ambiguity flag, set when ``p`` is a
    pole of the segment's great circle (every segment point is then
    equidistant and ``t = 0`` is returned).
    """
    p, a, b = as_unit(p), as_unit(a), as_unit(b)
    omega = float(geodesic_distance(a, b))
    if omega < _MERGE_TOL or omega > np.pi - _ANTIPODAL_GAP:
        raise AmbiguousGeodesicError("segment endpoints coincide or are antipodal")
    R1 = rotation_taking(a, NORTH)
    theta_b, _ = to_spherical(R1 @ b)
    pole = np.array([np.cos(theta_b + np.pi / 2), np.sin(theta_b + np.pi / 2), 0.0])
    R2 = rotation_taking(pole, NORTH)
    R = R2 @ R1
    pr, ar, br = R @ p, R @ a, R @ b
    az_a = np.arctan2(ar[1], ar[0])
    span = np.mod(np.arctan2(br[1], br[0]) - az_a, 2 * np.pi)
    if span > np.pi:
        # segment runs clockwise in this frame; flip so azimuth increases
        span = 2 * np.pi - span
        sign = -1.0
    else:
        sign = 1.0
    ambiguous = abs(pr[2]) >= 1.0 - _AMBIGUITY_TOL
    if ambiguous:
        t = 0.0
        foot = a.copy()
    else:
        rel = np.mod(sign * (np.arctan2(pr[1], pr[0]) - az_a), 2 * np.pi)
        if rel <= span:
            t = rel / span
            az = az_a + sign * rel
            foot = R.T @ np.array([np.cos(az), np.sin(az), 0.0])
        else:
            da, db = geodesic_distance(p, a), geodesic_distance(p, b)
            t, foot = (0.0, a.copy()) if da <= db else (1.0, b.copy())
    if t == 0.0:
        foot = a.copy()
    elif t == 1.0:
        foot = b.copy()
    dist = float(geodesic_distance(p, foot))
    if full_output:
        return foot, dist, float(t), bool(ambiguous)
    return foot, dist, float(t)


@dataclass
class ProjectionResult:
    """Projection of one point (scalar fields) or many (array fields)."""

    lam: np.ndarray
    foot: np.ndarray
    distance: np.ndarray
    segment: np.ndarray
    ambiguous: np.ndarray

    def __len__(self):
        return len(np.atleast_1d(self.lam))

    def take(self, i):
        return ProjectionResult(self.lam[i], self.foot[i], self.distance[i], self.segment[i], self.ambiguous[i])


def _segment_frames(A, B):
    """Rotation rows ``(e1, e2, n)`` putting each segment on the equator
    from azimuth 0 to its length."""
    e1 = A
    v = B - np.sum(A * B, axis=1, keepdims=True) * A
    e2 = v / np.linalg.norm(v, axis=1, keepdims=True)
    n = np.cross(e1, e2)
    return e1, e2, n


def _project_all(P, curve):
    A, B = curve.segments()
    omega = curve.segment_lengths
    e1, e2, nrm = _segment_frames(A, B)
    x = P @ e1.T  # (n, S)
    y = P @ e2.T
    z = P @ nrm.T
    az = np.arctan2(y, x)
    inside = (az >= 0) & (az <= omega[None, :])
    d_inside = np.arctan2(np.abs(z), np.hypot(x, y))
    dA = geodesic_distance(P[:, None, :], A[None, :, :])
    dB = geodesic_distance(P[:, None, :], B[None, :, :])
    use_b = dB < dA
    t = np.where(inside, az / omega[None, :], np.where(use_b, 1.0, 0.0))
    dist = np.where(inside, d_inside, np.where(use_b, dB, dA))
    amb = np.abs(z) >= 1.0 - _AMBIGUITY_TOL
    t = np.where(amb, 0.0, t)
    dist = np.where(amb, dA, dist)
    return t, dist, amb


def project_to_curve(points, curve):
    """Continuous projection of ``points`` onto ``curve``.

    Every segment is tried and the closest foot wins; distances within
    1e-12 of the minimum count as ties and the smallest projection index is
    chosen.  Accepts a single point or an ``(n, 3)`` array.
    """
    P = as_unit(points)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    t, dist, amb = _project_all(P, curve)
    starts = curve.lambdas[: dist.shape[1]]
    frac = curve.segment_lengths / curve.total_length
    lam = starts[None, :] + t * frac[None, :]
    if curve.closed:
        lam = np.mod(lam, 1.0)
    best = dist.min(axis=1, keepdims=True)
    cand = dist <= best + _TIE_TOL
    lam_masked = np.where(cand, lam, np.inf)
    seg = np.argmin(lam_masked, axis=1)
    rows = np.arange(len(P))
    A, B = curve.segments()
    t_sel = t[rows, seg]
    foot = _slerp(A[seg], B[seg], t_sel, curve.segment_lengths[seg])
    foot = np.where((t_sel == 0.0)[:, None], A[seg], foot)
    foot = np.where((t_sel == 1.0)[:, None], B[seg], foot)
    lam_sel = lam[rows, seg]
    # ties between segments that do not share the foot are ambiguities too
    spread = np.ptp(np.where(cand, lam, lam_sel[:, None]), axis=1)
    ambiguous = amb[rows, seg] | (spread > 1e-9)
    res = ProjectionResult(lam_sel, foot, geodesic_distance(P, foot), seg, ambiguous)
    return res.take(0) if single else res


def hauberg_project(points, curve):
    """Nearest-vertex projection; ties go to the smallest vertex index."""
    P = as_unit(points)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    D = geodesic_distance(P[:, None, :], curve.vertices[None, :, :])
    best = D.min(axis=1, keepdims=True)
    idx = np.argmax(D <= best + _TIE_TOL, axis=1)
    seg = np.minimum(idx, len(curve.segment_lengths) - 1)
    amb = (D <= best + _TIE_TOL).sum(axis=1) > 1
    res = ProjectionResult(curve.lambdas[idx], curve.vertices[idx].copy(), D[np.arange(len(P)), idx], seg, amb)
    return res.take(0) if single else res


# --- expectation --------------------------------------------------------------


def kernel(u):
    """Quadratic (biweight) kernel ``(1 - u^2)^2`` on ``|u| <= 1``."""
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, (1.0 - u * u) ** 2, 0.0)


def smoother_weights(curve, lambdas_data, q):
    """Kernel weights ``w[t, i] = k(gap(lambda_t, lambda_i) / q)``.

    ``q`` is the bandwidth as a fraction of the curve length.  On closed
    curves the gap is measured around the loop.
    """
    if not q > 0:
        raise ValueError("q must be positive")
    gap = np.abs(curve.lambdas[:, None] - np.asarray(lambdas_data, dtype=float)[None, :])
    if curve.closed:
        gap = np.minimum(gap, 1.0 - gap)
    return kernel(gap / q)


def expectation_step(data, curve, weights, mean_kind="extrinsic", *, cfg=None, return_flags=False):
    """New vertex positions: the weighted centre of ``data`` for each row.

    ``mean_kind`` is ``"extrinsic"``, ``"intrinsic"`` or ``"median"``.  Rows
    with no weight, or whose centre is undefined, keep their old vertex and
    are flagged.
    """
    X = as_unit(np.atleast_2d(data))
    W = np.asarray(weights, dtype=float)
    V_old = curve.vertices
    wsum = W.sum(axis=1)
    flags = wsum <= 0
    S = W @ X
    norm = np.linalg.norm(S, axis=1)
    flags |= norm < 1e-12 * np.maximum(wsum, 1e-300)
    ok = ~flags
    new = V_old.copy()
    if not ok.any():
        return (new, flags) if return_flags else new
    ext = S[ok] / norm[ok, None]
    if mean_kind == "extrinsic":
        new[ok] = ext
    elif mean_kind == "intrinsic":
        cfg = cfg or IterationConfig()
        M, _, conv = _batch_intrinsic_mean(X, W[ok], ext, cfg.tol, cfg.max_iter)
        new[ok] = M
    elif mean_kind == "median":
        cfg = cfg or MEDIAN_DEFAULTS
        Wk = W[ok]
        first = np.argmax(Wk > 0, axis=1)
        M, _, conv = _batch_median(X, Wk, X[first], cfg.tol, cfg.max_iter, cfg.damping_alpha)
        new[ok] = M
    else:
        raise ValueError(f"unknown mean_kind {mean_kind!r}")
    return (new, flags) if return_flags else new


# --- fitting loop -------------------------------------------------------------


@dataclass(frozen=True)
class CurveFitConfig:
    """Settings of the projection/expectation loop.

    ``threshold`` is relative to the previous error.  With
    ``stop_rule="decrease"`` iteration stops once
    ``delta_prev - delta < threshold * delta_prev`` (so any increase stops
    it and the better curve is kept).  ``stop_rule="change"`` only stops
    when ``|delta_prev - delta| < threshold * delta_prev``; the error may
    then grow and the last curve is returned.
    """

    T: int = 100
    q: float = 0.05
    mean_kind: str = "extrinsic"
    threshold: float = 1e-4
    max_iter: int = 50
    closed: bool = True
    hauberg_projection: bool = False
    stop_rule: str = "decrease"

    def __post_init__(self):
        if self.stop_rule not in ("decrease", "change"):
            raise ValueError(f"unknown stop_rule {self.stop_rule!r}")
        if self.T < 2 or not self.q > 0 or not self.threshold > 0 or self.max_iter < 1:
            raise ValueError("need T >= 2, q > 0, threshold > 0, max_iter >= 1")
        if self.mean_kind not in ("extrinsic", "intrinsic", "median"):
            raise ValueError(f"unknown mean_kind {self.mean_kind!r}")


@dataclass
class FitReport:
    final_curve: Curve
    projections: ProjectionResult
    delta_history: list
    iterations: int
    converged: bool
    distinct_projections: int
    delta: float
    error: str = None
    flagged_vertices: list = field(default_factory=list)


def _project(data, curve, hauberg):
    return hauberg_project(data, curve) if hauberg else project_to_curve(data, curve)


def fit(data, init, cfg=None):
    """Fit a principal curve to ``data`` starting from the curve ``init``.

    Each iteration runs expectation, unit-speed reparameterization and
    projection, then recomputes the reconstruction error
    ``delta = sum_i d(x_i, f(lambda_f(x_i)))^2``.  The loop ends when the
    relative decrease of ``delta`` falls below ``cfg.threshold`` or after
    ``cfg.max_iter`` iterations.  If the final iteration increased
    ``delta``, the previous curve is kept.
    """
    from .evaluation import distinct_projection_count

    cfg = cfg or CurveFitConfig()
    X = as_unit(np.atleast_2d(data))
    curve = init if isinstance(init, Curve) else reparameterize_unit_speed(init, cfg.closed)
    proj = _project(X, curve, cfg.hauberg_projection)
    delta = float(np.sum(proj.distance ** 2))
    history = [delta]
    converged = False
    error = None
    flagged = []
    it = 0
    while it < cfg.max_iter:
        it += 1
        W = smoother_weights(curve, proj.lam, cfg.q)
        new_vertices, flags = expectation_step(X, curve, W, cfg.mean_kind, return_flags=True)
        flagged.append(int(flags.sum()))
        try:
            new_curve = reparameterize_unit_speed(new_vertices, curve.closed)
        except DegenerateCurveError as exc:
            error = str(exc)
            log.warning("fit aborted at iteration %d: %s", it, exc)
            break
        new_proj = _project(X, new_curve, cfg.hauberg_projection)
        new_delta = float(np.sum(new_proj.distance ** 2))
        history.append(new_delta)
        prev = delta
        if cfg.stop_rule == "change":
            curve, proj, delta = new_curve, new_proj, new_delta
            if abs(prev - new_delta) < cfg.threshold * prev or prev == 0.0:
                converged = True
                break
            continue
        if new_delta <= delta:
            curve, proj, delta = new_curve, new_proj, new_delta
        if prev - new_delta < cfg.threshold * prev or prev == 0.0:
            converged = True
            break
    return FitReport(
        final_curve=curve,
        projections=proj,
        delta_history=history,
        iterations=it,
        converged=converged,
        distinct_projections=distinct_projection_count(proj),
        delta=delta,
        error=error,
        flagged_vertices=flagged,
    )
