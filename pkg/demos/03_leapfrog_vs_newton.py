#!/usr/bin/env python3
"""Leapfrog relaxation vs its Newton acceleration on the sphere.

The leapfrog sweep replaces every interior waypoint by the geodesic
midpoint of its neighbors. It converges linearly, and degrades as the
endpoints move apart. Applying Newton's method to the fixed-point residual
F(X) = X - G(X) (with the analytic block-tridiagonal Jacobian) restores
fast, distance-insensitive convergence.
"""

import numpy as np

from geoschwarz import (
    NewtonConfig,
    Sphere,
    gen_endpoint_pair,
    run_leapfrog,
    run_newton_schwarz,
)

sph = Sphere(100)

print(f"{'dist':>8} | {'leapfrog iters to 1e-6':>23} | {'newton iters to 1e-10':>22}")
print("-" * 60)
for frac in (0.1, 0.5, 0.9):
    p, q = gen_endpoint_pair(sph, frac * np.pi, seed=0)
    _, lf = run_leapfrog(p, q, 4, tol=1e-6, max_iters=5000)
    _, nw = run_newton_schwarz(p, q, 4, cfg=NewtonConfig(tol=1e-13, max_iters=40))
    print(f"{frac:>6.1f}pi | {lf.iterations_to(1e-6):>23} | "
          f"{nw.iterations_to(1e-10):>22}")

print("\nNewton residual history at dist = 0.9pi (note the quadratic drops):")
p, q = gen_endpoint_pair(sph, 0.9 * np.pi, seed=0)
_, nw = run_newton_schwarz(p, q, 4, cfg=NewtonConfig(tol=1e-13, max_iters=40))
for row in nw.rows:
    print(f"  iter {row.iteration}:  ||F||_inf = {row.residual_inf:.3e}")

print("\nGauss-Seidel sweeps never lengthen the piecewise geodesic:")
_, lf = run_leapfrog(p, q, 6, tol=1e-10, max_iters=3000,
                     init_mode="perturbed", init_sigma=0.25, init_seed=3)
lengths = [row.piecewise_length for row in lf.rows]
print(f"  lengths: {lengths[0]:.6f} -> {lengths[1]:.6f} -> ... -> {lengths[-1]:.6f}")
print(f"  monotone: {all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))}"
      f"   (true length {lengths[-1]:.6f} = 0.9pi = {0.9 * np.pi:.6f})")
