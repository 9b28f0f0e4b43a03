"""Exact geometry on the unit sphere S^2.

Points are plain numpy arrays: a single point has shape ``(3,)``, a set of
points has shape ``(n, 3)``.  Spherical coordinates are ``(theta, rho)`` with
``theta`` the azimuth in ``[0, 2*pi)`` and ``rho`` the polar angle in
``[0, pi]``.  Tangent vectors returned by :func:`log_map` are 2-vectors in a
frame attached to the base point (see :func:`tangent_frame`).
"""

import numpy as np

__all__ = [
    "GeometryError",
    "AmbiguousGeodesicError",
    "as_unit",
    "lonlat_to_unit",
    "unit_to_lonlat",
    "to_spherical",
    "from_spherical",
    "geodesic_distance",
    "geodesic_point",
    "rotation_taking",
    "tangent_frame",
    "log_map",
    "exp_map",
]

NORTH = np.array([0.0, 0.0, 1.0])

# Norm below which a vector cannot be renormalized onto the sphere.
_MIN_NORM = 1e-12
# Geodesic gap to the antipode below which the shortest geodesic is ambiguous.
_ANTIPODAL_GAP = 1e-9


class GeometryError(ValueError):
    """Invalid geometric input (non-finite coordinates, zero vectors...)."""


class AmbiguousGeodesicError(GeometryError):
    """The shortest geodesic between two points is not unique."""


def as_unit(p):
    """Return ``p`` renormalized onto the sphere.

    Accepts a single 3-vector or an ``(n, 3)`` array.  Raises
    :class:`GeometryError` for non-finite input or norms below 1e-12.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise GeometryError(f"expected 3-vectors, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise GeometryError("non-finite coordinates")
    norm = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(norm < _MIN_NORM):
        raise GeometryError("vector too short to normalize onto the sphere")
    return p / norm


def lonlat_to_unit(lon_deg, lat_deg):
    """Convert longitude/latitude in degrees to unit vectors.

    Works elementwise on scalars or arrays; the result has a trailing
    axis of length 3.
    """
    lon = np.asarray(lon_deg, dtype=float)
    lat = np.asarray(lat_deg, dtype=float)
    if not (np.all(np.isfinite(lon)) and np.all(np.isfinite(lat))):
        raise GeometryError("invalid coordinate: non-finite longitude/latitude")
    if np.any(np.abs(lat) > 90.0):
        raise GeometryError("invalid coordinate: latitude outside [-90, 90]")
    lon = np.radians(np.mod(lon, 360.0))
    lat = np.radians(lat)
    c = np.cos(lat)
    return np.stack([c * np.cos(lon), c * np.sin(lon), np.sin(lat)], axis=-1)


def unit_to_lonlat(p):
    """Inverse of :func:`lonlat_to_unit`; longitude in (-180, 180]."""
    p = np.asarray(p, dtype=float)
    lon = np.degrees(np.arctan2(p[..., 1], p[..., 0]))
    lon = np.where(lon <= -180.0, lon + 360.0, lon)
    lat = np.degrees(np.arcsin(np.clip(p[..., 2], -1.0, 1.0)))
    return lon, lat


def to_spherical(p):
    """Return ``(theta, rho)`` for unit vector(s) ``p``.

    At the poles the azimuth is undefined and set to 0.
    """
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    rho = np.arctan2(np.hypot(x, y), z)
    theta = np.mod(np.arctan2(y, x), 2 * np.pi)
    # mod can return exactly 2*pi for tiny negative angles
    theta = np.where(theta >= 2 * np.pi, 0.0, theta)
    theta = np.where(np.hypot(x, y) == 0.0, 0.0, theta)
    if theta.ndim == 0:
        return float(theta), float(rho)
    return theta, rho


def from_spherical(theta, rho):
    theta, rho = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(rho, dtype=float))
    s = np.sin(rho)
    return np.stack([s * np.cos(theta), s * np.sin(theta), np.cos(rho)], axis=-1)


def geodesic_distance(a, b):
    """Great-circle distance in radians, broadcasting over leading axes.

    Uses ``atan2(|a x b|, a . b)``, which equals the clamped ``arccos`` of
    the dot product but keeps full precision near 0 and pi.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.arctan2(cross, dot)


def _unit_direction(a, b):
    """Unit tangent at ``a`` pointing along the geodesic towards ``b``."""
    # (a x b) x a equals b - (a.b) a but loses less near antipodes
    a, b = np.broadcast_arrays(a, b)
    v = np.cross(np.cross(a, b), a)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v, n


def geodesic_point(a, b, eps):
    """Point a fraction ``eps`` of the way along the geodesic from a to b.

    ``d(a, result) = |eps| * d(a, b)``; negative ``eps`` walks away from
    ``b``.  Broadcasts over leading axes of ``a`` and ``b``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if eps == 0:
        return np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape)).copy()
    if eps == 1:
        return np.broadcast_to(b, np.broadcast_shapes(a.shape, b.shape)).copy()
    omega = geodesic_distance(a, b)
    if np.any(omega > np.pi - _ANTIPODAL_GAP):
        raise AmbiguousGeodesicError("geodesic between (near) antipodal points")
    v, n = _unit_direction(a, b)
    u = np.divide(v, n, out=np.zeros_like(v), where=n > 0)
    ang = (eps * omega)[..., None]
    return as_unit(np.cos(ang) * a + np.sin(ang) * u)


def _any_orthogonal(p):
    """Deterministic unit vector orthogonal to ``p``.

    The normalized projection of the z axis onto p's orthogonal complement,
    or of the x axis when p is a pole.
    """
    for axis in (NORTH, np.array([1.0, 0.0, 0.0])):
        v = axis - np.dot(axis, p) * p
        n = np.linalg.norm(v)
        if n > 1e-8:
            return v / n
    raise GeometryError("cannot build orthogonal direction")  # pragma: no cover


def _axis_angle(axis, angle):
    k = np.asarray(axis, dtype=float)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def rotation_taking(src, dst):
    """Minimal rotation matrix ``R`` with ``R @ src == dst``.

    Rotates about ``src x dst`` by the angle between them.  For antipodal
    inputs the rotation is by pi about a deterministic orthogonal axis.
    """
    src = as_unit(src)
    dst = as_unit(dst)
    cross = np.cross(src, dst)
    s = np.linalg.norm(cross)
    c = float(np.dot(src, dst))
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        return _axis_angle(_any_orthogonal(src), np.pi)
    return _axis_angle(cross / s, np.arctan2(s, c))


def tangent_frame(base):
    """Orthonormal basis ``(e1, e2)`` of the tangent plane at ``base``.

    It is the image of the x and y axes under the rotation taking the north
    pole to ``base``, so at the north pole it is the standard basis.
    """
    R = rotation_taking(NORTH, base)
    return R[:, 0], R[:, 1]


def log_map(base, p):
    """Riemannian logarithm at ``base`` in tangent-frame coordinates.

    ``base`` is rotated onto the north pole, where the log map is
    ``(x1, x2) * theta / sin(theta)`` with ``theta = arccos(x3)``.  Returns
    shape ``(2,)`` for a single point or ``(n, 2)`` for many.
    """
    base = as_unit(base)
    p = as_unit(p)
    R = rotation_taking(base, NORTH)
    q = p @ R.T
    theta = geodesic_distance(NORTH, q)
    if np.any(theta > np.pi - _ANTIPODAL_GAP):
        raise AmbiguousGeodesicError("log map undefined at the antipode")
    sin_t = np.hypot(q[..., 0], q[..., 1])
    scale = np.divide(theta, sin_t, out=np.ones_like(theta), where=sin_t > 0)
    return q[..., :2] * scale[..., None]


def exp_map(base, t):
    """Riemannian exponential at ``base``; inverse of :func:`log_map`."""
    base = as_unit(base)
    t = np.asarray(t, dtype=float)
    norm = np.linalg.norm(t, axis=-1)
    if np.any(norm >= np.pi):
        raise GeometryError("tangent vector outside the injectivity radius (pi)")
    safe = np.where(norm > 0, norm, 1.0)
    direction = t / safe[..., None]
    q = np.concatenate(
        [np.sin(norm)[..., None] * direction, np.cos(norm)[..., None]], axis=-1
    )
    R = rotation_taking(NORTH, base)
    return as_unit(q @ R.T)


# --- batched 3-D helpers used by the estimators -------------------------------


def log3(base, p):
    """Log map returning ambient 3-vectors tangent at ``base``.

    Broadcasts ``base`` of shape ``(..., 3)`` against ``p``.  Antipodal
    pairs map to the zero vector; callers mask them out.
    """
    v, n = _unit_direction(base, p)
    theta = np.arctan2(n[..., 0], np.sum(base * p, axis=-1))
    scale = np.divide(theta, n[..., 0], out=np.zeros_like(theta), where=n[..., 0] > 0)
    return v * scale[..., None]


def exp3(base, v):
    """Exponential map for ambient tangent vectors ``v`` at ``base``."""
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(n > 0, n, 1.0)
    out = np.cos(n) * base + np.sin(n) * v / safe
    return out / np.linalg.norm(out, axis=-1, keepdims=True)
