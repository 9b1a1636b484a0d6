import numpy as np
import pytest

from geoschwarz import (
    DegenerateRetraction,
    Sphere,
    Stiefel,
    TangentVector,
    qr_positive,
)


def second_difference_ode_residual(man, y, v, t=0.37, h=1e-4):
    """FD oracle for the geodesic equation: ||c'' + c (c'^T c')||_F.

    c(t) = Exp_y(t v); derivatives by central differences. Independent of
    how the exponential is evaluated internally.
    """
    c = lambda s: man._exp(y, s * v)
    c0 = c(t)
    cp = c(t + h)
    cm = c(t - h)
    cdd = (cp - 2.0 * c0 + cm) / h**2
    cd = (cp - cm) / (2.0 * h)
    return float(np.linalg.norm(cdd + c0 @ (cd.T @ cd)))


def to_sphere_vec(mat):
    return mat[:, 0]


@pytest.fixture
def st62():
    return Stiefel(6, 2)


class TestQrPositive:
    def test_positive_diagonal_and_reconstruction(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((6, 3))
        q, r = qr_positive(a)
        assert np.all(np.diag(r) > 0)
        assert np.allclose(q @ r, a, atol=1e-13)
        assert np.allclose(q.T @ q, np.eye(3), atol=1e-14)

    def test_rank_deficient_raises(self):
        a = np.zeros((4, 2))
        a[:, 0] = 1.0
        with pytest.raises(ValueError):
            qr_positive(a)


class TestProject:
    def test_projects_self_to_zero(self, st62):
        rng = np.random.default_rng(1)
        y = st62.random_point(rng)
        out = st62.project(y, y.coords)
        assert np.abs(out.coords).max() <= 1e-15

    def test_idempotent_on_tangents(self, st62):
        rng = np.random.default_rng(2)
        y = st62.random_point(rng)
        z = st62.project(y, rng.standard_normal((6, 2)))
        again = st62.project(y, z.coords)
        assert np.abs(again.coords - z.coords).max() <= 1e-14

    def test_reduces_to_sphere_projector(self):
        st = Stiefel(3, 1)
        y = st.point(np.array([[1.0], [0.0], [0.0]]))
        z = np.array([[1.0], [1.0], [0.0]])
        out = st.project(y, z)
        assert np.allclose(out.coords, np.array([[0.0], [1.0], [0.0]]), atol=1e-16)


class TestRetract:
    def test_zero_tangent_identity(self, st62):
        rng = np.random.default_rng(3)
        y = st62.random_point(rng)
        out = st62.retract(y, st62.zero_tangent(y))
        assert np.array_equal(out.coords, y.coords)

    def test_matches_sphere_retraction_for_p1(self):
        st = Stiefel(3, 1)
        sph = Sphere(3)
        rng = np.random.default_rng(4)
        for _ in range(10):
            y = st.random_point(rng)
            v = st.random_tangent(rng, y, norm=rng.uniform(0.1, 2.0))
            got = st._retract(y.coords, v.coords)[:, 0]
            expected = sph._retract(y.coords[:, 0], v.coords[:, 0])
            assert np.abs(got - expected).max() <= 1e-14

    def test_constraint_residual_small(self, st62):
        rng = np.random.default_rng(5)
        for _ in range(20):
            y = st62.random_point(rng)
            v = st62.random_tangent(rng, y, norm=rng.uniform(0.1, 3.0))
            out = st62.retract(y, v)
            assert st62.constraint_residual(out.coords) <= 1e-13

    def test_rank_deficiency_raises(self, st62):
        rng = np.random.default_rng(6)
        y = st62.random_point(rng)
        v = TangentVector(-y.coords, y)  # ambient direction collapsing Y+V to 0
        with pytest.raises(DegenerateRetraction):
            st62._retract(y.coords, v.coords)


class TestExp:
    def test_zero_tangent(self, st62):
        rng = np.random.default_rng(7)
        y = st62.random_point(rng)
        out = st62.exp(y, st62.zero_tangent(y))
        assert np.array_equal(out.coords, y.coords)

    def test_matches_sphere_exp_for_p1(self):
        st = Stiefel(3, 1)
        sph = Sphere(3)
        rng = np.random.default_rng(8)
        for _ in range(10):
            y = st.random_point(rng)
            v = st.random_tangent(rng, y, norm=rng.uniform(0.05, 2.5))
            got = st._exp(y.coords, v.coords)[:, 0]
            expected = sph._exp(y.coords[:, 0], v.coords[:, 0])
            assert np.linalg.norm(got - expected) <= 1e-10

    def test_ode_residual_under_finite_differencing(self):
        st = Stiefel(8, 3)
        rng = np.random.default_rng(9)
        for _ in range(5):
            y = st.random_point(rng)
            v = st.random_tangent(rng, y, norm=1.0)
            res = second_difference_ode_residual(st, y.coords, v.coords)
            assert res <= 1e-5

    def test_constant_speed(self, st62):
        rng = np.random.default_rng(10)
        y = st62.random_point(rng)
        v = st62.random_tangent(rng, y, norm=0.8)
        h = 1e-6
        speeds = []
        for t in (0.0, 0.3, 0.6, 1.0):
            cd = (st62._exp(y.coords, (t + h) * v.coords)
                  - st62._exp(y.coords, (t - h) * v.coords)) / (2 * h)
            speeds.append(np.linalg.norm(cd))
        assert max(speeds) - min(speeds) <= 1e-6

    def test_constraint_preserved(self, st62):
        rng = np.random.default_rng(11)
        for _ in range(20):
            y = st62.random_point(rng)
            v = st62.random_tangent(rng, y, norm=rng.uniform(0.1, 2.0))
            out = st62.exp(y, v)
            assert st62.constraint_residual(out.coords) <= 1e-12

    def test_exp_many_matches_single(self, st62):
        rng = np.random.default_rng(12)
        y = st62.random_point(rng)
        vs = np.stack([st62.random_tangent(rng, y, norm=s).coords
                       for s in (0.0, 0.2, 0.9, 1.7)])
        batch = st62.exp_many(y.coords, vs)
        for k in range(vs.shape[0]):
            single = st62._exp(y.coords, vs[k])
            assert np.linalg.norm(batch[k] - single) <= 1e-12


class TestLog:
    def test_same_point(self, st62):
        rng = np.random.default_rng(13)
        y = st62.random_point(rng)
        out = st62.log(y, y)
        assert np.abs(out.coords).max() <= 1e-15

    def test_roundtrip(self, st62):
        rng = np.random.default_rng(14)
        y = st62.random_point(rng)
        u = st62.random_tangent(rng, y, norm=1.0)
        q = st62.exp(y, TangentVector(0.4 * u.coords, y))
        got = st62.log(y, q)
        assert np.linalg.norm(got.coords - 0.4 * u.coords) <= 1e-6

    def test_matches_sphere_log_for_p1(self):
        st = Stiefel(3, 1)
        sph = Sphere(3)
        rng = np.random.default_rng(15)
        for _ in range(5):
            y = st.random_point(rng)
            v = st.random_tangent(rng, y, norm=rng.uniform(0.1, 1.5))
            q = st.exp(y, v)
            got = st._log(y.coords, q.coords)[0][:, 0]
            expected = sph._log(y.coords[:, 0], q.coords[:, 0])[0]
            assert np.linalg.norm(got - expected) <= 1e-8


class TestTangentStructure:
    def test_projected_tangents_have_skew_y_component(self, st62):
        rng = np.random.default_rng(16)
        y = st62.random_point(rng)
        v = st62.random_tangent(rng, y, norm=1.3)
        a = y.coords.T @ v.coords
        assert np.linalg.norm(a + a.T) <= 1e-12

    def test_tangency_residual_of_produced_tangents(self, st62):
        rng = np.random.default_rng(17)
        y = st62.random_point(rng)
        v = st62.random_tangent(rng, y, norm=2.0)
        assert st62.tangency_residual(y.coords, v.coords) <= 1e-10
