import numpy as np
import pytest
from hypothesis import strategies as st

from sphcurves.geom import as_unit


def random_unit(rng, n=None):
    shape = (3,) if n is None else (n, 3)
    return as_unit(rng.normal(size=shape))


def random_cap(rng, center, radius, n):
    """Uniform-ish points within ``radius`` of ``center``."""
    from sphcurves.geom import exp3, tangent_frame

    e1, e2 = tangent_frame(center)
    ang = rng.uniform(0, 2 * np.pi, n)
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    v = (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2) * r[:, None]
    return exp3(np.broadcast_to(center, v.shape), v)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def local_grid(center, half_width, step):
    """Points exp_center(u e1 + v e2) on a square tangent mesh."""
    from sphcurves.geom import exp3, tangent_frame

    e1, e2 = tangent_frame(center)
    ticks = np.arange(-half_width, half_width + step / 2, step)
    U, V = np.meshgrid(ticks, ticks)
    vec = U.ravel()[:, None] * e1 + V.ravel()[:, None] * e2
    return exp3(np.broadcast_to(center, vec.shape), vec)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


unit_vectors = st.tuples(
    st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)
).filter(lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: as_unit(np.array(v)))


def grid_argmin(X, w, power, center, coarse_half=0.6):
    """Minimize sum w d^power by a 0.01-rad mesh around ``center`` refined
    to 0.001-rad and then 0.0001-rad meshes; no mesh depends on the
    estimate under test."""
    from sphcurves.geom import geodesic_distance

    def best(c, half, step):
        # sample points join the mesh: the unsquared objective can peak
        # sharply at a data point between mesh nodes
        G = np.vstack([local_grid(c, half, step), X])
        v = (geodesic_distance(G[:, None, :], X[None, :, :]) ** power) @ w
        return G[np.argmin(v)]

    return best(best(best(center, coarse_half, 0.01), 0.02, 0.001), 0.002, 0.0001)


def median_is_data_point(X, w):
    """True when some sample point satisfies the subgradient optimality test."""
    from sphcurves.geom import log3

    for k in range(len(X)):
        others = np.arange(len(X)) != k
        V = log3(np.broadcast_to(X[k], X[others].shape), X[others])
        U = V / np.linalg.norm(V, axis=1, keepdims=True)
        if np.linalg.norm(w[others] @ U) <= w[k]:
            return True
    return False


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE = {}


def record(criterion, part, ok, detail=""):
    """Store one acceptance sub-check; the terminal summary folds them per criterion."""
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    print(f"criterion {criterion} [{part}]: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(str(k)), str(k))):
        parts = ACCEPTANCE[key]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}")
        for name, good, detail in parts:
            tr.write_line(f"    {'ok  ' if good else 'FAIL'} {name}: {detail}")
