"""Least-squares circles on the sphere.

A circle is stored as a centre and an angular radius.  ``(c, r)`` and
``(-c, pi - r)`` describe the same set, so fitted circles are returned with
``r <= pi/2``.
"""

from dataclasses import dataclass, field

import numpy as np

from .geom import (
    GeometryError,
    as_unit,
    from_spherical,
    geodesic_distance,
    log_map,
    rotation_taking,
    tangent_frame,
    to_spherical,
)
from .stats import intrinsic_mean

__all__ = [
    "Circle",
    "CircleFitConfig",
    "DegenerateInputError",
    "circle_loss",
    "spherical_distance",
    "fit_principal_circle",
    "fit_pga_great_circle",
]

_R_MIN = 1e-6
_POLE_SIN = 1e-4
# sufficient-decrease constant of the backtracking line search
_ARMIJO = 1e-4
_EQUATOR = np.array([1.0, 0.0, 0.0])


class DegenerateInputError(GeometryError):
    """Too few or too concentrated points to define the requested fit."""


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_unit(self.center))
        if not 0.0 <= self.radius <= np.pi:
            raise ValueError("radius must lie in [0, pi]")

    def canonical(self):
        if self.radius > np.pi / 2:
            return Circle(-self.center, np.pi - self.radius)
        return self


@dataclass(frozen=True)
class CircleFitConfig:
    step_beta: float = 0.01
    threshold: float = 1e-6
    max_iter: int = 5000
    gradient_mode: str = "finite-difference"
    fd_step: float = 1e-6

    def __post_init__(self):
        if not self.step_beta > 0 or not self.threshold > 0 or self.max_iter < 1:
            raise ValueError("step_beta and threshold must be positive, max_iter >= 1")
        if self.gradient_mode not in ("finite-difference", "analytic"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")


def circle_loss(data, circle):
    """Sum of squared geodesic distances from ``data`` to ``circle``.

    The distance from ``x`` to the circle is ``|d(x, center) - r|``.
    """
    d = geodesic_distance(circle.center, as_unit(np.atleast_2d(data)))
    return float(np.sum((d - circle.radius) ** 2))


def spherical_distance(theta_c, rho_c, theta_x, rho_x):
    """Distance between two points given in spherical coordinates.

    Spherical law of cosines through the pole; the cosine is clamped to
    [-1, 1] before ``arccos``.
    """
    u = np.cos(rho_c) * np.cos(rho_x) + np.sin(rho_c) * np.sin(rho_x) * np.cos(theta_c - theta_x)
    return np.arccos(np.clip(u, -1.0, 1.0))


def _loss_params(params, theta_x, rho_x):
    theta_c, rho_c, r = params
    d = spherical_distance(theta_c, rho_c, theta_x, rho_x)
    return float(np.sum((d - r) ** 2))


def _grad_fd(params, theta_x, rho_x, h):
    g = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        g[k] = (_loss_params(params + e, theta_x, rho_x) - _loss_params(params - e, theta_x, rho_x)) / (2 * h)
    return g


def _grad_analytic(params, theta_x, rho_x):
    theta_c, rho_c, r = params
    dtheta = theta_c - theta_x
    u = np.cos(rho_c) * np.cos(rho_x) + np.sin(rho_c) * np.sin(rho_x) * np.cos(dtheta)
    u = np.clip(u, -1.0, 1.0)
    d = np.arccos(u)
    # d(arccos u)/du = -1/sqrt(1-u^2); the clip guards points at the centre
    dd_du = -1.0 / np.sqrt(np.maximum(1.0 - u * u, 1e-30))
    du_dtheta = -np.sin(rho_c) * np.sin(rho_x) * np.sin(dtheta)
    du_drho = -np.sin(rho_c) * np.cos(rho_x) + np.cos(rho_c) * np.sin(rho_x) * np.cos(dtheta)
    res = 2.0 * (d - r)
    return np.array([
        np.sum(res * dd_du * du_dtheta),
        np.sum(res * dd_du * du_drho),
        -np.sum(res),
    ])


def loss_gradient(params, data, mode="finite-difference", h=1e-6):
    """Gradient of the circle loss in ``(theta_c, rho_c, r)`` coordinates."""
    theta_x, rho_x = to_spherical(as_unit(np.atleast_2d(data)))
    params = np.asarray(params, dtype=float)
    if mode == "analytic":
        return _grad_analytic(params, theta_x, rho_x)
    return _grad_fd(params, theta_x, rho_x, h)


@dataclass
class CircleFitResult:
    circle: Circle
    loss: float
    iterations: int
    loss_history: list = field(default_factory=list)


def fit_principal_circle(data, cfg=None, *, full_output=False):
    """Least-squares circle by gradient descent on ``(theta_c, rho_c, r)``.

    Starts from the intrinsic mean's spherical coordinates with ``r = pi/2``.
    A step of size ``beta`` (at most ``step_beta``) is accepted only if it
    lowers the loss by at least ``1e-4 * beta * |grad|^2``; otherwise the
    step size is halved and retried, and it doubles again after each
    accepted step.  Descent stops once an accepted step lowers the loss by
    less than ``threshold``.  Coordinates are taken in a rotated frame whose
    equator holds the starting centre, and the frame is rotated again if the
    centre drifts near one of its poles.

    Returns the canonical :class:`Circle`, or a :class:`CircleFitResult`
    when ``full_output`` is set.
    """
    cfg = cfg or CircleFitConfig()
    X = as_unit(np.atleast_2d(data))
    if len(X) < 3:
        raise DegenerateInputError("principal circle needs at least 3 points")
    m = intrinsic_mean(X)
    frame = np.eye(3)  # maps original coordinates to working coordinates
    theta_c, rho_c = to_spherical(m)
    params = np.array([theta_c, rho_c, np.pi / 2])

    def recenter(params, frame):
        center = frame.T @ from_spherical(params[0], params[1])
        frame = rotation_taking(center, _EQUATOR)
        return np.array([0.0, np.pi / 2, params[2]]), frame

    # descend in a frame where the start sits on the equator, far from the
    # coordinate singularities at rho = 0 and pi
    params, frame = recenter(params, frame)
    theta_x, rho_x = to_spherical(X @ frame.T)
    loss = _loss_params(params, theta_x, rho_x)
    history = [loss]
    beta = cfg.step_beta
    it = 0
    while it < cfg.max_iter:
        it += 1
        if cfg.gradient_mode == "analytic":
            g = _grad_analytic(params, theta_x, rho_x)
        else:
            g = _grad_fd(params, theta_x, rho_x, cfg.fd_step)
        gg = float(g @ g)
        accepted = False
        for _ in range(60):
            trial = params - beta * g
            trial[2] = np.clip(trial[2], _R_MIN, np.pi - _R_MIN)
            trial_loss = _loss_params(trial, theta_x, rho_x)
            if trial_loss <= loss - _ARMIJO * beta * gg:
                accepted = True
                break
            beta *= 0.5
        if not accepted:
            break
        beta = min(2.0 * beta, cfg.step_beta)
        decrease = loss - trial_loss
        params, loss = trial, trial_loss
        history.append(loss)
        if abs(np.sin(params[1])) < _POLE_SIN:
            params, frame = recenter(params, frame)
            theta_x, rho_x = to_spherical(X @ frame.T)
        if decrease < cfg.threshold:
            break
    center = frame.T @ from_spherical(params[0], params[1])
    circle = Circle(center, float(params[2])).canonical()
    if full_output:
        return CircleFitResult(circle, circle_loss(X, circle), it, history)
    return circle


def fit_pga_great_circle(data):
    """Great circle through the intrinsic mean along the first principal
    direction of the log-mapped data (tangent-plane PCA)."""
    X = as_unit(np.atleast_2d(data))
    if len(X) < 2:
        raise DegenerateInputError("PGA needs at least 2 points")
    m = intrinsic_mean(X)
    V = log_map(m, X)
    S = V.T @ V
    if np.trace(S) < 1e-24:
        raise DegenerateInputError("all points coincide")
    evals, evecs = np.linalg.eigh(S)
    u = evecs[:, -1]
    e1, e2 = tangent_frame(m)
    direction = u[0] * e1 + u[1] * e2
    return Circle(np.cross(m, direction), np.pi / 2).canonical()
