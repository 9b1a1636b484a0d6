import numpy as np
import pytest

from geoschwarz import (
    DegenerateInitialization,
    MidpointFailure,
    Sphere,
    Stiefel,
    TangentVector,
    Waypoints,
    fixed_point_residual,
    gauss_seidel_sweep,
    geodesic_waypoints,
    init_waypoints,
    jacobi_sweep,
    piecewise_length,
    run_leapfrog,
)


def e(i, d=3):
    v = np.zeros(d)
    v[i] = 1.0
    return v


def sphere_midpoint_oracle(x, y):
    # independent closed form: the geodesic midpoint is the normalized sum
    s = x + y
    return s / np.linalg.norm(s)


def sphere_dist_oracle(x, y):
    return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))


def perturbed_waypoints(man, p, q, m, sigma, seed):
    W = geodesic_waypoints(p, q, m)
    rng = np.random.default_rng(seed)
    pts = list(W.points)
    for i in range(1, m - 1):
        xi = man.random_tangent(rng, pts[i], norm=sigma)
        pts[i] = man.retract(pts[i], xi)
    return Waypoints(tuple(pts))


@pytest.fixture
def s3():
    return Sphere(3)


class TestInitWaypoints:
    def test_chord_m3_quarter_circle(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        W = init_waypoints(p, q, 3)
        assert np.allclose(W.points[1].coords, (e(0) + e(1)) / np.sqrt(2), atol=1e-15)

    def test_endpoints_exact_in_both_modes(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        for kwargs in (dict(mode="chord"), dict(mode="perturbed", sigma=0.3, seed=5)):
            W = init_waypoints(p, q, 5, **kwargs)
            assert W.points[0] is p
            assert W.points[-1] is q

    def test_zero_sigma_equals_chord_bitwise(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        chord = init_waypoints(p, q, 6)
        pert = init_waypoints(p, q, 6, mode="perturbed", sigma=0.0, seed=42)
        for a, b in zip(chord.points, pert.points):
            assert np.array_equal(a.coords, b.coords)

    def test_antipodal_chord_degenerates(self, s3):
        p, q = s3.point(e(0)), s3.point(-e(0))
        with pytest.raises(DegenerateInitialization):
            init_waypoints(p, q, 3)

    def test_m_validation(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        with pytest.raises(ValueError):
            init_waypoints(p, q, 2)

    def test_stiefel_chord_on_manifold(self):
        st = Stiefel(8, 3)
        rng = np.random.default_rng(3)
        p = st.random_point(rng)
        q = st.exp(p, st.random_tangent(rng, p, norm=1.5))
        W = init_waypoints(p, q, 5)
        for pt in W.points:
            assert st.constraint_residual(pt.coords) <= 1e-12


class TestJacobiSweep:
    def test_fixed_point_of_equispaced_geodesic(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.8 * np.pi * e(1)))
        W = geodesic_waypoints(p, q, 6)
        G = jacobi_sweep(W)
        for a, b in zip(W.points, G.points):
            assert np.abs(a.coords - b.coords).max() <= 1e-12

    def test_m3_moves_interior_to_midpoint(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        W = Waypoints((p, s3.point(e(2)), q))
        G = jacobi_sweep(W)
        assert np.allclose(G.points[1].coords,
                           sphere_midpoint_oracle(e(0), e(1)), atol=1e-14)

    def test_matches_midpoint_by_midpoint_oracle(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.2 * e(1)))
        W = perturbed_waypoints(s3, p, q, 4, sigma=0.15, seed=7)
        G = jacobi_sweep(W)
        for i in range(1, 3):
            expected = sphere_midpoint_oracle(W.points[i - 1].coords,
                                              W.points[i + 1].coords)
            assert np.linalg.norm(G.points[i].coords - expected) <= 1e-13

    def test_midpoint_failure_tagged_with_index(self, s3):
        W = Waypoints((s3.point(e(0)), s3.point(e(1)), s3.point(-e(0))))
        with pytest.raises(MidpointFailure) as err:
            jacobi_sweep(W)
        assert err.value.index == 1


class TestGaussSeidelSweep:
    def test_fixed_point_preserved(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.7 * np.pi * e(2)))
        W = geodesic_waypoints(p, q, 5)
        G = gauss_seidel_sweep(W)
        for a, b in zip(W.points, G.points):
            assert np.abs(a.coords - b.coords).max() <= 1e-12

    def test_m3_identical_to_jacobi(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        W = Waypoints((p, s3.point(e(2)), q))
        gs = gauss_seidel_sweep(W)
        ja = jacobi_sweep(W)
        assert np.array_equal(gs.points[1].coords, ja.points[1].coords)

    def test_m5_differs_from_jacobi_on_perturbed_input(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.5 * e(1)))
        W = perturbed_waypoints(s3, p, q, 5, sigma=0.2, seed=11)
        gs = gauss_seidel_sweep(W)
        ja = jacobi_sweep(W)
        diffs = [np.abs(a.coords - b.coords).max()
                 for a, b in zip(gs.points, ja.points)]
        assert max(diffs) > 1e-6


class TestFixedPointResidual:
    def test_zero_on_equispaced_geodesic(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 2.0 * e(1)))
        W = geodesic_waypoints(p, q, 5)
        vec, r2, rinf = fixed_point_residual(W)
        assert rinf <= 1e-12

    def test_m3_substitution(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        W = Waypoints((p, p, q))  # interior collapsed onto X_0
        vec, _, _ = fixed_point_residual(W)
        expected = e(0) - sphere_midpoint_oracle(e(0), e(1))
        assert np.allclose(vec, expected, atol=1e-14)

    def test_equals_difference_with_jacobi_bitwise(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.1 * e(2)))
        W = perturbed_waypoints(s3, p, q, 6, sigma=0.1, seed=3)
        vec, _, _ = fixed_point_residual(W)
        G = jacobi_sweep(W)
        direct = np.concatenate([(W.points[i].coords - G.points[i].coords)
                                 for i in range(1, 5)])
        assert np.array_equal(vec, direct)


class TestPiecewiseLength:
    def test_all_points_equal(self, s3):
        p = s3.point(e(0))
        W = Waypoints((p, p, p))
        assert piecewise_length(W) == 0.0

    def test_additive_along_geodesic(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.9 * np.pi * e(1)))
        W = geodesic_waypoints(p, q, 4)
        assert abs(piecewise_length(W) - 0.9 * np.pi) <= 1e-10

    def test_matches_pairwise_distance_oracle(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.4 * e(1)))
        W = perturbed_waypoints(s3, p, q, 5, sigma=0.25, seed=19)
        expected = sum(sphere_dist_oracle(W.points[i].coords, W.points[i + 1].coords)
                       for i in range(4))
        assert piecewise_length(W) == pytest.approx(expected, abs=1e-12)

    def test_at_least_endpoint_distance(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.0 * e(1)))
        W = perturbed_waypoints(s3, p, q, 5, sigma=0.3, seed=23)
        assert piecewise_length(W) >= sphere_dist_oracle(p.coords, q.coords) - 1e-10


class TestRunLeapfrog:
    def test_zero_iterations_at_fixed_point(self, s3):
        # the m=3 chord initialization already sits at the fixed point
        p, q = s3.point(e(0)), s3.point(e(1))
        W, rec = run_leapfrog(p, q, 3)
        assert rec.converged
        assert rec.iterations == 0
        assert len(rec.rows) == 1

    def test_converges_to_great_circle(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.5 * np.pi * e(1)))
        W, rec = run_leapfrog(p, q, 4, init_mode="perturbed", init_sigma=0.2,
                              init_seed=2)
        assert rec.converged
        v = s3.log(p, q)
        dists = []
        for i, pt in enumerate(W.points):
            t = i / 3
            ref = s3.exp(p, TangentVector(t * v.coords, p))
            assert np.linalg.norm(pt.coords - ref.coords) <= 1e-8
        for i in range(3):
            dists.append(sphere_dist_oracle(W.points[i].coords,
                                            W.points[i + 1].coords))
        assert max(dists) - min(dists) <= 1e-8

    def test_gauss_seidel_length_monotone(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.9 * np.pi * e(1)))
        W, rec = run_leapfrog(p, q, 5, init_mode="perturbed", init_sigma=0.3,
                              init_seed=8)
        assert rec.converged
        lengths = [row.piecewise_length for row in rec.rows]
        assert all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))

    def test_endpoints_bitwise_immutable(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 2.5 * e(2)))
        W, rec = run_leapfrog(p, q, 6)
        assert W.points[0] is p
        assert W.points[-1] is q

    def test_jacobi_variant_converges(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.4 * np.pi * e(1)))
        W, rec = run_leapfrog(p, q, 4, variant="jacobi", init_mode="perturbed",
                              init_sigma=0.1, init_seed=4)
        assert rec.converged
        assert rec.method == "leapfrog_jacobi"

    def test_rows_indexed_consecutively(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 1.3 * e(1)))
        _, rec = run_leapfrog(p, q, 4, init_mode="perturbed", init_sigma=0.05,
                              init_seed=6)
        assert [row.iteration for row in rec.rows] == list(range(len(rec.rows)))

    def test_max_iters_flagged(self, s3):
        p = s3.point(e(0))
        q = s3.exp(p, s3.tangent(p, 0.9 * np.pi * e(1)))
        _, rec = run_leapfrog(p, q, 8, max_iters=3)
        assert not rec.converged
        assert rec.status == "max_iters"
        assert len(rec.rows) == 4

    def test_stiefel_run(self):
        st = Stiefel(6, 2)
        rng = np.random.default_rng(31)
        p = st.random_point(rng)
        q = st.exp(p, st.random_tangent(rng, p, norm=0.8))
        W, rec = run_leapfrog(p, q, 4, max_iters=300)
        assert rec.converged
        for pt in W.points:
            assert st.constraint_residual(pt.coords) <= 1e-12
        lengths = [row.piecewise_length for row in rec.rows]
        assert all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))
        assert rec.rows[1].inner_solver_calls > 0

    def test_variant_validation(self, s3):
        p, q = s3.point(e(0)), s3.point(e(1))
        with pytest.raises(ValueError):
            run_leapfrog(p, q, 4, variant="sor")
