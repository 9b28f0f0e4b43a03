"""Fit metrics, perturbation checks and the Monte Carlo harness."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .circlefit import fit_principal_circle
from .geom import as_unit, exp3, geodesic_distance, geodesic_point
from .pcurve import (
    Curve,
    CurveFitConfig,
    ProjectionResult,
    fit,
    hauberg_project,
    project_to_curve,
    reparameterize_unit_speed,
    sample_circle_vertices,
)

log = logging.getLogger(__name__)

__all__ = [
    "DISTINCT_TOL",
    "MonteCarloConfig",
    "PerturbSpec",
    "distinct_projection_count",
    "perturb_curve",
    "random_perturbation_target",
    "reconstruction_error",
    "run_monte_carlo",
    "stationarity_gradient",
    "translate_curve",
]

DISTINCT_TOL = 1e-6
METHODS = ("extrinsic", "intrinsic", "median", "hauberg")


def reconstruction_error(data, curve, rule="continuous"):
    """Sum of squared distances from ``data`` to their projections on ``curve``.

    ``rule`` selects the continuous projection or the nearest-vertex one.
    """
    X = np.atleast_2d(as_unit(data))
    if rule == "continuous":
        d = project_to_curve(X, curve).distance
    elif rule == "hauberg":
        d = hauberg_project(X, curve).distance
    else:
        raise ValueError(f"unknown projection rule {rule!r}")
    return float(np.sum(d ** 2))


def distinct_projection_count(projections, tol=DISTINCT_TOL, closed=True):
    """Number of distinct projection feet.

    Feet are sorted by projection index and chained greedily: a foot within
    ``tol`` radians of the previous one joins its cluster.  On closed curves
    the last and first clusters merge when they touch across the seam.
    ``projections`` is a :class:`ProjectionResult` or an ``(n, 3)`` array of
    feet already in parameter order.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if isinstance(projections, ProjectionResult):
        feet = np.atleast_2d(projections.foot)
        feet = feet[np.argsort(np.atleast_1d(projections.lam), kind="stable")]
    else:
        feet = np.atleast_2d(np.asarray(projections, dtype=float))
    if len(feet) == 0:
        raise ValueError("no projections")
    gaps = geodesic_distance(feet[1:], feet[:-1])
    count = 1 + int(np.sum(gaps > tol))
    if closed and count > 1 and geodesic_distance(feet[-1], feet[0]) <= tol:
        count -= 1
    return count


# --- perturbations ------------------------------------------------------------


@dataclass(frozen=True)
class PerturbSpec:
    """Target curve ``h`` (same vertex count as ``f``) and the fraction
    ``eps`` of the way to walk from each vertex of ``f`` towards ``h``."""

    target: Curve
    eps: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.eps):
            raise ValueError("eps must be finite")


def perturb_curve(f, spec):
    """Vertexwise ``geodesic_point(f_t, h_t, eps)``, reparameterized."""
    if spec.target.T != f.T:
        raise ValueError("target must have the same vertex count")
    if spec.eps == 0:
        return f
    V = geodesic_point(f.vertices, spec.target.vertices, spec.eps)
    return reparameterize_unit_speed(V, f.closed)


def _vertex_tangents(curve):
    V = curve.vertices
    if curve.closed:
        fwd, back = np.roll(V, -1, axis=0), np.roll(V, 1, axis=0)
    else:
        fwd = np.vstack([V[1:], V[-1:]])
        back = np.vstack([V[:1], V[:-1]])
    u = fwd - back
    u -= np.sum(u * V, axis=1, keepdims=True) * V
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u, np.cross(V, u)


def random_perturbation_target(f, rng, max_disp=0.1, n_freq=3):
    """A smooth random target curve near ``f``.

    Each vertex moves along its normal and tangent directions by sums of
    ``n_freq`` sinusoids in the projection index (integer frequencies
    ``1..n_freq`` with random amplitudes and phases), scaled so that the
    largest displacement is ``max_disp`` radians.
    """
    u, nrm = _vertex_tangents(f)
    k = np.arange(1, n_freq + 1)
    lam = f.lambdas[:, None]
    comps = []
    for _ in range(2):
        amp = rng.normal(size=n_freq)
        phase = rng.uniform(0, 2 * np.pi, n_freq)
        comps.append(np.sin(2 * np.pi * k * lam + phase) @ amp)
    disp = comps[0][:, None] * nrm + comps[1][:, None] * u
    scale = np.linalg.norm(disp, axis=1).max()
    disp *= max_disp / scale
    return reparameterize_unit_speed(exp3(f.vertices, disp), f.closed)


def translate_curve(f, axis, angle):
    """Rotate every vertex of ``f`` by ``angle`` about ``axis``."""
    from .geom import _axis_angle

    R = _axis_angle(as_unit(axis), angle)
    return reparameterize_unit_speed(f.vertices @ R.T, f.closed)


_LOSSES = {
    "cosine": np.cos,
    "squared": np.square,
    "absolute": lambda d: d,
}


def perturbed_loss(data, f, target, eps, loss_kind):
    """Mean loss of ``data`` against the curve ``eps`` of the way to ``target``."""
    curve = perturb_curve(f, PerturbSpec(target, eps))
    d = project_to_curve(np.atleast_2d(data), curve).distance
    return float(np.mean(_LOSSES[loss_kind](d)))


def stationarity_gradient(data, f, spec, loss_kind="squared", eps_fd=1e-3):
    """Central difference of the mean loss along the perturbation ``spec``.

    ``loss_kind`` is ``cosine`` (mean of cos d), ``squared`` (mean d^2) or
    ``absolute`` (mean d), where d is the distance of each point to the
    perturbed curve.  ``spec.eps`` is ignored; the derivative is taken at 0.
    """
    if loss_kind not in _LOSSES:
        raise ValueError(f"unknown loss_kind {loss_kind!r}")
    if not 0 < eps_fd <= 0.1:
        raise ValueError("eps_fd must lie in (0, 0.1]")
    X = np.atleast_2d(as_unit(data))
    hi = perturbed_loss(X, f, spec.target, eps_fd, loss_kind)
    lo = perturbed_loss(X, f, spec.target, -eps_fd, loss_kind)
    return (hi - lo) / (2 * eps_fd)


def loss_scale(data, f, loss_kind):
    """Reference magnitude for stationarity bounds.

    Mean distance for ``absolute``; mean squared distance otherwise (the
    cosine loss deviates from 1 by about half of it).
    """
    d = project_to_curve(np.atleast_2d(data), f).distance
    return float(np.mean(d)) if loss_kind == "absolute" else float(np.mean(d ** 2))


# --- Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloConfig:
    shape: str = "circle"
    alpha: float = 1 / 3
    freq: int = 4
    n: int = 100
    noise_sigma: float = 0.07
    noise_kind: str = "gaussian"
    T: int = 100
    q: float = 0.05
    mean_kinds: tuple = ("extrinsic", "intrinsic", "hauberg")
    runs: int = 50
    seed: int = 0
    threads: int = 1
    max_iter: int = 50
    threshold: float = 1e-4
    stop_rule: str = "decrease"

    def __post_init__(self):
        if self.runs < 1 or self.n < 2:
            raise ValueError("need runs >= 1 and n >= 2")
        bad = set(self.mean_kinds) - set(METHODS)
        if bad or not self.mean_kinds:
            raise ValueError(f"unknown methods {sorted(bad)}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def method_config(method, T, q, max_iter=50, threshold=1e-4, stop_rule="decrease"):
    """Curve-fit settings for a method name; ``hauberg`` pairs the
    intrinsic mean with nearest-vertex projection."""
    common = dict(T=T, q=q, max_iter=max_iter, threshold=threshold, stop_rule=stop_rule)
    if method == "hauberg":
        return CurveFitConfig(mean_kind="intrinsic", hauberg_projection=True, **common)
    return CurveFitConfig(mean_kind=method, **common)


def _one_run(cfg, seed_seq):
    from .dataio import GenSpec, generate

    spec = GenSpec(shape=cfg.shape, n=cfg.n, noise_sigma=cfg.noise_sigma,
                   noise_kind=cfg.noise_kind, alpha=cfg.alpha, freq=cfg.freq)
    ds = generate(spec, np.random.default_rng(seed_seq))
    out = {}
    try:
        init = sample_circle_vertices(fit_principal_circle(ds.points), cfg.T)
    except Exception as exc:  # noqa: BLE001 - a failed run is recorded, not raised
        return {m: {"failed": f"initialization: {exc}"} for m in cfg.mean_kinds}
    for m in cfg.mean_kinds:
        fc = method_config(m, cfg.T, cfg.q, cfg.max_iter, cfg.threshold, cfg.stop_rule)
        try:
            rep = fit(ds.points, init, fc)
            if rep.error is not None:
                raise RuntimeError(rep.error)
            rule = "hauberg" if fc.hauberg_projection else "continuous"
            out[m] = {
                "error": reconstruction_error(ds.truth, rep.final_curve, rule),
                "distinct": rep.distinct_projections,
                "fit_delta": rep.delta,
                "initial_delta": rep.delta_history[0],
                "iterations": rep.iterations,
                "converged": rep.converged,
            }
        except Exception as exc:  # noqa: BLE001
            out[m] = {"failed": str(exc)}
    return out


def _summary(values):
    a = np.asarray(values, dtype=float)
    if len(a) == 0:
        return math.nan, math.nan
    sd = float(np.std(a, ddof=1)) if len(a) > 1 else 0.0
    return float(np.mean(a)), sd


def run_monte_carlo(cfg):
    """Repeat generate / initialize / fit ``cfg.runs`` times.

    Run ``k`` draws its data from the ``k``-th child of
    ``SeedSequence(cfg.seed)``, so results do not depend on ``threads``.
    Reconstruction error is measured from the noiseless generating points
    to the fitted curve; distinct projections are counted for the noisy
    sample.  Returns a JSON-ready dict with per-method aggregates
    (``error_mean``, ``error_sd``, ``distinct_mean``, ``distinct_sd``,
    ``failures``) and the per-run records.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.runs)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            runs = list(pool.map(lambda s: _one_run(cfg, s), children))
    else:
        runs = [_one_run(cfg, s) for s in children]
    methods = {}
    for m in cfg.mean_kinds:
        recs = [r[m] for r in runs]
        ok = [r for r in recs if "failed" not in r]
        em, es = _summary([r["error"] for r in ok])
        dm, ds = _summary([r["distinct"] for r in ok])
        methods[m] = {
            "error_mean": em,
            "error_sd": es,
            "distinct_mean": dm,
            "distinct_sd": ds,
            "runs_ok": len(ok),
            "failures": len(recs) - len(ok),
            "converged_fraction": float(np.mean([r["converged"] for r in ok])) if ok else 0.0,
            "monotone": all(r["fit_delta"] <= r["initial_delta"] for r in ok),
            "runs": recs,
        }
    return {"config": asdict(cfg), "methods": methods}
