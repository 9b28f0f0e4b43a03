import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_cap, random_rotation, random_unit
from sphcurves.circlefit import Circle, fit_principal_circle
from sphcurves.dataio import GenSpec, generate
from sphcurves.geom import NORTH, from_spherical, geodesic_distance, geodesic_point
from sphcurves.pcurve import (
    CurveFitConfig,
    DegenerateCurveError,
    expectation_step,
    fit,
    hauberg_project,
    kernel,
    project_to_curve,
    project_to_segment,
    reparameterize_unit_speed,
    sample_circle_vertices,
    smoother_weights,
)

EX, EY = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])


def dense(curve, m):
    lam = np.linspace(0, 1, m, endpoint=not curve.closed)
    return lam, curve.at(lam)


def random_polyline(rng, T, closed):
    # a wobbly loop around a random axis keeps segments short and non-antipodal
    axis = random_unit(rng)
    c = sample_circle_vertices(Circle(axis, rng.uniform(0.3, 1.2)), T)
    V = c.vertices + rng.normal(scale=0.05, size=c.vertices.shape)
    return reparameterize_unit_speed(V, closed)


class TestSegmentProjection:
    def test_point_on_segment(self):
        p = geodesic_point(EX, EY, 0.3)
        foot, d, t = project_to_segment(p, EX, EY)
        assert np.allclose(foot, p, atol=1e-12) and d <= 1e-12 and t == pytest.approx(0.3, abs=1e-12)

    def test_off_segment_point(self):
        p = np.array([np.cos(0.3) * np.cos(0.4), np.sin(0.3) * np.cos(0.4), np.sin(0.4)])
        foot, d, t = project_to_segment(p, EX, EY)
        assert np.allclose(foot, [np.cos(0.3), np.sin(0.3), 0], atol=1e-9)
        assert d == pytest.approx(0.4, abs=1e-9)
        # brute force over 1e6 segment samples
        s = np.linspace(0, np.pi / 2, 1_000_000)
        S = np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], 1)
        assert d <= geodesic_distance(p, S).min() + 1e-12

    def test_endpoint_clamp(self):
        p = np.array([np.cos(2.0), np.sin(2.0), 0.1])
        p /= np.linalg.norm(p)
        foot, d, t = project_to_segment(p, EX, EY)
        assert np.allclose(foot, EY) and t == 1.0
        s = np.linspace(0, np.pi / 2, 100_001)
        S = np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], 1)
        assert np.argmin(geodesic_distance(p, S)) == len(s) - 1

    def test_pole_is_ambiguous(self):
        foot, d, t, amb = project_to_segment(NORTH, EX, EY, full_output=True)
        assert amb and t == 0.0 and np.allclose(foot, EX)

    def test_reversed_segment(self, rng):
        for _ in range(50):
            a, b, p = random_unit(rng), random_unit(rng), random_unit(rng)
            f1, d1, t1 = project_to_segment(p, a, b)
            f2, d2, t2 = project_to_segment(p, b, a)
            assert d1 == pytest.approx(d2, abs=1e-12)
            if 1e-6 < t1 < 1 - 1e-6:
                assert t2 == pytest.approx(1 - t1, abs=1e-9)

    def test_matches_curve_projection(self, rng):
        for _ in range(50):
            a, b, p = random_unit(rng), random_unit(rng), random_unit(rng)
            if geodesic_distance(a, b) > 3.0:
                continue
            foot, d, t = project_to_segment(p, a, b)
            r = project_to_curve(p, reparameterize_unit_speed([a, b], closed=False))
            assert r.distance == pytest.approx(d, abs=1e-12)
            assert np.allclose(r.foot, foot, atol=1e-9)

    def test_antipodal_segment_rejected(self):
        from sphcurves.geom import AmbiguousGeodesicError

        with pytest.raises(AmbiguousGeodesicError):
            project_to_segment(EY, EX, -EX)


class TestCurveProjection:
    def test_vertex(self):
        c = sample_circle_vertices(Circle(NORTH, 0.7), 12)
        r = project_to_curve(c.vertices[5], c)
        assert r.distance <= 1e-12 and np.allclose(r.foot, c.vertices[5])
        assert r.lam == pytest.approx(5 / 12, abs=1e-12)

    def test_pole_over_equator_square(self):
        c = sample_circle_vertices(Circle(NORTH, np.pi / 2), 4)
        r = project_to_curve(NORTH, c)
        assert r.ambiguous and r.lam == 0.0
        assert r.distance == pytest.approx(np.pi / 2)

    @pytest.mark.parametrize("closed", [True, False])
    def test_dense_sampling_oracle(self, rng, closed):
        c = random_polyline(rng, 15, closed)
        lam, S = dense(c, 100_000)
        X = random_cap(rng, c.vertices[0], 1.0, 100)
        r = project_to_curve(X, c)
        D = geodesic_distance(X[:, None, :], S[None, :, :])
        j = np.argmin(D, axis=1)
        # refine each coarse minimum on a 1e4-sample window two spacings wide
        step = lam[1] - lam[0]
        best_lam = np.empty(len(X))
        best_d = np.empty(len(X))
        for i in range(len(X)):
            loc = lam[j[i]] + np.linspace(-2 * step, 2 * step, 10_001)
            d = geodesic_distance(X[i], c.at(loc))
            best_lam[i], best_d[i] = loc[np.argmin(d)], d.min()
        assert np.all(r.distance <= best_d + 1e-12)
        assert np.allclose(r.distance, best_d, atol=1e-6)
        if closed:
            best_lam = np.mod(best_lam, 1.0)
        gap = np.abs(r.lam - best_lam)
        if closed:
            gap = np.minimum(gap, 1 - gap)
        assert np.all(gap <= 1e-4)

    def test_result_invariants(self, rng):
        c = random_polyline(rng, 20, True)
        X = random_unit(rng, 200)
        r = project_to_curve(X, c)
        assert np.allclose(r.distance, geodesic_distance(X, r.foot), atol=1e-12)
        A, B = c.segments()
        a, b = A[r.segment], B[r.segment]
        on = geodesic_distance(a, r.foot) + geodesic_distance(r.foot, b) - geodesic_distance(a, b)
        assert np.all(np.abs(on) <= 1e-9)
        assert np.allclose(c.at(r.lam), r.foot, atol=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.booleans())
    def test_dominates_nearest_vertex(self, seed, closed):
        rng = np.random.default_rng(seed)
        c = random_polyline(rng, int(rng.integers(3, 30)), closed)
        X = random_unit(rng, 50)
        assert np.all(project_to_curve(X, c).distance <= hauberg_project(X, c).distance + 1e-12)

    def test_ties_pick_smallest_lambda(self):
        # a point on the bisector of an equatorial V picks the earlier segment
        V = from_spherical(np.array([0.0, 0.5, 1.0]), np.pi / 2)
        c = reparameterize_unit_speed(V, closed=False)
        p = from_spherical(0.5, np.pi / 2 - 0.3)
        r = project_to_curve(p, c)
        assert r.lam == pytest.approx(0.5, abs=1e-12)


class TestHauberg:
    def setup_method(self):
        self.c = sample_circle_vertices(Circle(NORTH, np.pi / 2), 8)

    def test_vertex(self):
        r = hauberg_project(self.c.vertices[3], self.c)
        assert np.array_equal(r.foot, self.c.vertices[3]) and r.distance == 0

    def test_nearer_vertex_and_interior_foot(self):
        V = self.c.vertices
        p = geodesic_point(V[3], V[4], 0.3)
        p = geodesic_point(p, NORTH, 0.05)
        h = hauberg_project(p, self.c)
        assert np.array_equal(h.foot, V[3])
        assert geodesic_distance(p, V).argmin() == 3
        r = project_to_curve(p, self.c)
        assert r.distance < h.distance and 0 < geodesic_distance(r.foot, V).min()

    def test_tie_smallest_index(self):
        V = np.array([[1.0, 0, 0], [0, 0, 1.0], [0, 1.0, 0], [0, 0, -1.0], [-1.0, 0, 0.01], [0, -1.0, 0]])
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        c = reparameterize_unit_speed(V, closed=False)
        p = np.array([0.0, 1.0, 1.0]) / np.sqrt(2)  # equidistant from vertices 1 and 2
        assert hauberg_project(p, c).foot.tolist() == V[1].tolist()


class TestReparameterize:
    def test_open_equator(self):
        c = reparameterize_unit_speed(from_spherical(np.array([0, 0.5, 1.0]), np.pi / 2), closed=False)
        assert np.allclose(c.lambdas, [0, 0.5, 1])

    def test_closed_equator(self):
        c = reparameterize_unit_speed(from_spherical(np.arange(4) * np.pi / 2, np.pi / 2), closed=True)
        assert np.allclose(c.lambdas, [0, 0.25, 0.5, 0.75]) and c.total_length == pytest.approx(2 * np.pi)

    @pytest.mark.parametrize("closed", [True, False])
    def test_total_length(self, rng, closed):
        c = random_polyline(rng, 25, closed)
        V = c.vertices
        W = np.vstack([V, V[:1]]) if closed else V
        assert c.total_length == pytest.approx(geodesic_distance(W[1:], W[:-1]).sum(), abs=1e-12)
        assert c.lambdas[0] == 0 and np.all(np.diff(c.lambdas) > 0)
        if not closed:
            assert c.lambdas[-1] == 1.0

    def test_merges_duplicates(self):
        c = reparameterize_unit_speed([EX, EX, EY, NORTH], closed=True)
        assert c.T == 3

    def test_degenerate(self):
        with pytest.raises(DegenerateCurveError):
            reparameterize_unit_speed([EX, EX, EX])
        with pytest.raises(DegenerateCurveError):
            reparameterize_unit_speed([EX, -EX], closed=False)


class TestWeights:
    def test_kernel_values(self):
        assert kernel(0) == 1 and kernel(1) == 0 and kernel(2) == 0
        assert kernel(0.5) == pytest.approx(0.5625)

    def test_weight_examples(self):
        c = sample_circle_vertices(Circle(NORTH, 1.0), 10)
        W = smoother_weights(c, [0.0, 0.05, 0.1, 0.2, 0.975], 0.1)
        assert W[0].tolist()[:4] == pytest.approx([1, 0.5625, 0, 0])
        # circular gap of 0.025 across the seam
        assert W[0, 4] == pytest.approx(kernel(0.25))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.floats(0.01, 0.5), st.booleans())
    def test_range_and_unit_only_at_zero(self, lam, q, closed):
        V = sample_circle_vertices(Circle(NORTH, 1.0), 10).vertices
        c = reparameterize_unit_speed(V, closed)
        W = smoother_weights(c, lam, q)
        assert np.all((W >= 0) & (W <= 1))
        gap = np.abs(c.lambdas[:, None] - np.array(lam)[None, :])
        if closed:
            gap = np.minimum(gap, 1 - gap)
        assert np.all(W[gap == 0] == 1)
        # away from zero the kernel reaches 1 only through rounding
        assert np.all(gap[W == 1] / q < 1e-7)

    def test_bad_q(self):
        with pytest.raises(ValueError):
            smoother_weights(sample_circle_vertices(Circle(NORTH, 1.0), 5), [0.1], 0)


class TestExpectation:
    def setup_method(self):
        self.c = sample_circle_vertices(Circle(NORTH, 1.0), 6)

    @pytest.mark.parametrize("kind", ["extrinsic", "intrinsic", "median"])
    def test_single_location(self, kind, rng):
        p = random_unit(rng)
        X = np.tile(p, (5, 1))
        W = rng.uniform(0.1, 1, (6, 5))
        assert np.allclose(expectation_step(X, self.c, W, kind), p, atol=1e-9)

    def test_two_point_extrinsic(self):
        W = np.zeros((6, 2))
        W[2] = 1
        new, flags = expectation_step([EX, EY], self.c, W, "extrinsic", return_flags=True)
        assert np.allclose(new[2], [2**-0.5, 2**-0.5, 0])
        assert np.array_equal(new[0], self.c.vertices[0]) and flags[0] and not flags[2]

    def test_local_agreement(self, rng):
        X = random_cap(rng, random_unit(rng), 0.1, 40)
        W = rng.uniform(0, 1, (6, 40))
        a = expectation_step(X, self.c, W, "intrinsic")
        b = expectation_step(X, self.c, W, "extrinsic")
        assert np.all(geodesic_distance(a, b) <= 1e-3)

    def test_matches_single_estimators(self, rng):
        from sphcurves.stats import geometric_median, intrinsic_mean

        X = random_cap(rng, NORTH, 0.5, 30)
        W = rng.uniform(0, 1, (6, 30))
        for kind, est in (("intrinsic", intrinsic_mean), ("median", geometric_median)):
            new = expectation_step(X, self.c, W, kind)
            for t in range(6):
                assert geodesic_distance(new[t], est(X, W[t])) <= 1e-6

    def test_degenerate_row_flagged(self):
        W = np.zeros((6, 2))
        W[1] = 1
        new, flags = expectation_step([NORTH, -NORTH], self.c, W, "extrinsic", return_flags=True)
        assert flags[1] and np.array_equal(new[1], self.c.vertices[1])


class TestSampleCircle:
    def test_equator_four(self):
        c = sample_circle_vertices(Circle(NORTH, np.pi / 2), 4)
        assert np.allclose(c.vertices, from_spherical(np.arange(4) * np.pi / 2, np.pi / 2), atol=1e-15)

    def test_radius_and_gaps(self, rng):
        circ = Circle(random_unit(rng), np.pi / 4)
        c = sample_circle_vertices(circ, 500)
        assert np.allclose(geodesic_distance(circ.center, c.vertices), np.pi / 4, atol=1e-12)
        assert np.ptp(c.segment_lengths) <= 1e-9

    def test_bad_radius(self):
        with pytest.raises(DegenerateCurveError):
            sample_circle_vertices(Circle(NORTH, 0.0), 10)
        with pytest.raises(ValueError):
            sample_circle_vertices(Circle(NORTH, 1.0), 2)


def _circle_data(seed, sigma=0.07, n=100):
    return generate(GenSpec(n=n, noise_sigma=sigma, seed=seed)).points


class TestFit:
    def test_noiseless_circle(self):
        X = _circle_data(0, sigma=0.0)
        init = sample_circle_vertices(fit_principal_circle(X), 100)
        rep = fit(X, init, CurveFitConfig(T=100, q=0.05))
        assert rep.delta <= 1e-4
        assert np.all(np.abs(geodesic_distance(rep.projections.foot, NORTH) - np.pi / 4) <= 2e-2)

    @pytest.mark.parametrize("kind", ["extrinsic", "intrinsic", "median"])
    def test_report_consistency(self, kind):
        X = _circle_data(1)
        init = sample_circle_vertices(fit_principal_circle(X), 60)
        rep = fit(X, init, CurveFitConfig(T=60, q=0.05, mean_kind=kind))
        assert rep.delta == pytest.approx(float(np.sum(rep.projections.distance ** 2)), abs=1e-12)
        assert rep.delta <= rep.delta_history[0]
        assert len(rep.delta_history) == rep.iterations + 1
        assert rep.converged and rep.error is None
        assert len(rep.projections) == len(X)

    def test_accepted_iterations_decrease(self):
        X = _circle_data(2)
        init = sample_circle_vertices(fit_principal_circle(X), 100)
        rep = fit(X, init, CurveFitConfig(T=100, q=0.05, threshold=1e-4))
        h = rep.delta_history
        # every step before the stopping one lowered delta by the threshold
        for a, b in zip(h[:-2], h[1:-1]):
            assert a - b >= 1e-4 * a

    def test_rotation_equivariance(self):
        X = _circle_data(3)
        init = sample_circle_vertices(fit_principal_circle(X), 50)
        R = random_rotation(np.random.default_rng(7))
        cfg = CurveFitConfig(T=50, q=0.05)
        a = fit(X, init, cfg).final_curve.vertices
        rinit = reparameterize_unit_speed(init.vertices @ R.T, True)
        b = fit(X @ R.T, rinit, cfg).final_curve.vertices
        assert np.allclose(b, a @ R.T, atol=1e-6)

    def test_hauberg_uses_vertices(self):
        X = _circle_data(4)
        init = sample_circle_vertices(fit_principal_circle(X), 50)
        rep = fit(X, init, CurveFitConfig(T=50, q=0.05, hauberg_projection=True, mean_kind="intrinsic"))
        V = rep.final_curve.vertices
        assert all(np.any(np.all(f == V, axis=1)) for f in rep.projections.foot)

    def test_change_rule_keeps_last_curve(self):
        X = _circle_data(5)
        init = sample_circle_vertices(fit_principal_circle(X), 50)
        rep = fit(X, init, CurveFitConfig(T=50, q=0.05, stop_rule="change", threshold=1e-12, max_iter=5))
        assert rep.iterations == 5 and rep.delta == rep.delta_history[-1]

    def test_open_curve(self):
        X = _circle_data(6)
        init = reparameterize_unit_speed(sample_circle_vertices(fit_principal_circle(X), 40).vertices, closed=False)
        rep = fit(X, init, CurveFitConfig(T=40, q=0.05, closed=False))
        assert not rep.final_curve.closed and rep.delta <= rep.delta_history[0]

    @pytest.mark.parametrize("kw", [{"T": 1}, {"q": 0}, {"threshold": 0}, {"max_iter": 0}, {"mean_kind": "mode"}, {"stop_rule": "never"}])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            CurveFitConfig(**kw)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_projection_beats_dense_samples(seed, closed):
    rng = np.random.default_rng(seed)
    c = random_polyline(rng, int(rng.integers(3, 25)), closed)
    X = random_unit(rng, 20)
    _, S = dense(c, 10_000)
    brute = geodesic_distance(X[:, None, :], S[None, :, :]).min(axis=1)
    assert np.all(project_to_curve(X, c).distance <= brute + 1e-6)
