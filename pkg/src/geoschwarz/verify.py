"""Self-contained invariant suite behind ``geo-schwarz verify``.

Small, fast spot checks of the library's core guarantees, printing one
line per check. Returns the number of failures, which the CLI turns into
the exit code. The pytest suite is the exhaustive version of these.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np

from .bench import ExperimentConfig, run_experiment
from .leapfrog import (
    fixed_point_residual,
    gauss_seidel_sweep,
    geodesic_waypoints,
    run_leapfrog,
)
from .manifolds.base import TangentVector, dist, midpoint
from .manifolds.sphere import Sphere
from .manifolds.stiefel import Stiefel
from .newton_schwarz import apply_jacobian_fd, assemble_jacobian, run_newton_schwarz

__all__ = ["run_invariant_suite"]


def _fd_blocks(man, x, y, h=1e-6):
    d = x.size
    first = np.empty((d, d))
    second = np.empty((d, d))
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        first[:, l] = (man.midpoint_from_ambient(x + e, y)
                       - man.midpoint_from_ambient(x - e, y)) / (2 * h)
        second[:, l] = (man.midpoint_from_ambient(x, y + e)
                        - man.midpoint_from_ambient(x, y - e)) / (2 * h)
    return first, second


def run_invariant_suite(seed: int = 0, out=print) -> int:
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        if ok:
            out(f"ok   {name}")
        else:
            failures += 1
            out(f"FAIL {name}{': ' + detail if detail else ''}")

    rng = np.random.default_rng(seed)
    sph = Sphere(8)
    st = Stiefel(7, 2)

    # exp/log roundtrips
    p = sph.random_point(rng)
    v = sph.random_tangent(rng, p, norm=0.8 * np.pi)
    err = np.linalg.norm(sph.log(p, sph.exp(p, v)).coords - v.coords)
    check("sphere exp/log roundtrip <= 1e-10", err <= 1e-10, f"{err:.2e}")

    y = st.random_point(rng)
    w = st.random_tangent(rng, y, norm=0.6)
    err = np.linalg.norm(st.log(y, st.exp(y, w)).coords - w.coords)
    check("stiefel exp/log roundtrip <= 1e-6", err <= 1e-6, f"{err:.2e}")

    # distance against the arccos closed form
    a, b = sph.random_point(rng), sph.random_point(rng)
    expected = float(np.arccos(np.clip(np.dot(a.coords, b.coords), -1, 1)))
    check("sphere dist equals arccos <= 1e-12",
          abs(dist(a, b) - expected) <= 1e-12)

    # geodesic ODE residual of the closed-form exponential
    h = 1e-4
    t = 0.41
    c = lambda s: st._exp(y.coords, s * w.coords)
    cdd = (c(t + h) - 2 * c(t) + c(t - h)) / h**2
    cd = (c(t + h) - c(t - h)) / (2 * h)
    res = float(np.linalg.norm(cdd + c(t) @ (cd.T @ cd)))
    check("stiefel exponential ODE residual <= 1e-5", res <= 1e-5, f"{res:.2e}")

    # St(n,1) reduces to the sphere
    st1 = Stiefel(5, 1)
    sph5 = Sphere(5)
    y1 = st1.random_point(rng)
    v1 = st1.random_tangent(rng, y1, norm=1.1)
    err = np.linalg.norm(st1._exp(y1.coords, v1.coords)[:, 0]
                         - sph5._exp(y1.coords[:, 0], v1.coords[:, 0]))
    check("St(n,1) exponential matches sphere <= 1e-8", err <= 1e-8, f"{err:.2e}")

    # midpoint bisection
    for man, label in ((sph, "sphere"), (st, "stiefel")):
        pp = man.random_point(rng)
        qq = man.exp(pp, man.random_tangent(rng, pp, norm=0.9))
        mid = midpoint(pp, qq)
        gap = abs(dist(pp, mid) - dist(mid, qq))
        check(f"{label} midpoint bisects <= 1e-8", gap <= 1e-8, f"{gap:.2e}")

    # analytic midpoint derivative blocks against central differences
    pa = sph.random_point(rng)
    qa = sph.exp(pa, sph.random_tangent(rng, pa, norm=1.3))
    blocks = sph.midpoint_jacobian(pa, qa)
    fd1, fd2 = _fd_blocks(sph, pa.coords, qa.coords)
    rel = max(np.linalg.norm(blocks.wrt_first - fd1) / np.linalg.norm(fd1),
              np.linalg.norm(blocks.wrt_second - fd2) / np.linalg.norm(fd2))
    check("sphere analytic vs FD midpoint blocks <= 1e-6", rel <= 1e-6, f"{rel:.2e}")

    # matrix-free apply against the dense product
    pw = sph.random_point(rng)
    qw = sph.exp(pw, sph.random_tangent(rng, pw, norm=1.5))
    W = geodesic_waypoints(pw, qw, 5)
    pts = list(W.points)
    for i in range(1, 4):
        pts[i] = sph.retract(pts[i], sph.random_tangent(rng, pts[i], norm=0.1))
    W = W.replace_interior(pts[1:4])
    vdir = np.concatenate([sph.random_tangent(rng, W.points[i], norm=1.0).coords
                           for i in W.interior_indices()])
    dense = assemble_jacobian(W).matvec(vdir)
    mf = apply_jacobian_fd(W, vdir)
    rel = np.linalg.norm(mf - dense) / np.linalg.norm(dense)
    check("matrix-free Jacobian apply vs dense <= 1e-5", rel <= 1e-5, f"{rel:.2e}")

    # fixed point: equispaced geodesic waypoints, zero-iteration runs
    W0 = geodesic_waypoints(pw, qw, 5)
    _, _, rinf = fixed_point_residual(W0)
    check("equispaced geodesic has ||F|| <= 1e-12", rinf <= 1e-12, f"{rinf:.2e}")
    _, rec_lf = run_leapfrog(pw, qw, 3)
    _, rec_nw = run_newton_schwarz(pw, qw, 3)
    check("solvers take 0 iterations at a fixed point",
          rec_lf.iterations == 0 and rec_nw.iterations == 0)

    # Gauss-Seidel length monotonicity
    _, rec = run_leapfrog(pw, qw, 5, init_mode="perturbed", init_sigma=0.2,
                          init_seed=seed)
    lengths = [row.piecewise_length for row in rec.rows]
    mono = all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))
    check("gauss-seidel piecewise length non-increasing", rec.converged and mono)

    # converged waypoints satisfy the manifold constraint
    Wc, _ = run_leapfrog(y, st.exp(y, w), 4)
    worst = max(st.constraint_residual(pt.coords) for pt in Wc.points)
    check("waypoints satisfy constraints <= 1e-12", worst <= 1e-12, f"{worst:.2e}")

    # byte-identical CSV reruns (timings disabled)
    with tempfile.TemporaryDirectory() as tmp:
        cfg = ExperimentConfig("verify", Sphere(6), m=4, distance=0.5 * np.pi,
                               methods=("leapfrog_gs", "newton_schwarz"),
                               seed=seed, record_timings=False)
        first = {pth.name: pth.read_bytes()
                 for pth in run_experiment(cfg, Path(tmp) / "a")}
        second = {pth.name: pth.read_bytes()
                  for pth in run_experiment(cfg, Path(tmp) / "b")}
        check("identical configs give byte-identical CSVs", first == second)

    out(f"{'all checks passed' if failures == 0 else f'{failures} check(s) FAILED'}")
    return failures
