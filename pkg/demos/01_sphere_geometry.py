#!/usr/bin/env python3
"""Tour of the sphere geometry: exp/log maps, distances, midpoint derivatives.

Everything on S^{d-1} is available in closed form, which makes the sphere
the reference geometry for checking the generic solvers.
"""

import numpy as np

from geoschwarz import Sphere, TangentVector, dist, geodesic_point, midpoint

sph = Sphere(4)
rng = np.random.default_rng(0)

p = sph.random_point(rng)
v = sph.random_tangent(rng, p, norm=0.7)
q = sph.exp(p, v)

print("Two points on S^3, connected by the geodesic with velocity v:")
print("  p =", np.round(p.coords, 4))
print("  q = Exp_p(v) =", np.round(q.coords, 4))
print(f"  |q| = {np.linalg.norm(q.coords):.16f}   (stays on the sphere)")

back = sph.log(p, q)
print(f"\nLog_p(q) recovers v:  |Log_p(q) - v| = {np.linalg.norm(back.coords - v.coords):.2e}")
print(f"dist(p, q) = {dist(p, q):.12f}  vs  arccos(<p,q>) = "
      f"{np.arccos(np.clip(np.dot(p.coords, q.coords), -1, 1)):.12f}")

mid = midpoint(p, q)
print(f"\nMidpoint bisects: d(p,m) = {dist(p, mid):.12f}, d(m,q) = {dist(mid, q):.12f}")
third = geodesic_point(p, q, 1.0 / 3.0)
print(f"Point at t=1/3 sits at distance {dist(p, third):.12f} = dist/3 = {dist(p, q) / 3:.12f}")

# Derivative blocks of the midpoint map, checked against central differences
blocks = sph.midpoint_jacobian(p, q)
h = 1e-6
fd = np.empty((4, 4))
for col in range(4):
    e = np.zeros(4)
    e[col] = h
    fd[:, col] = (sph.midpoint_from_ambient(p.coords + e, q.coords)
                  - sph.midpoint_from_ambient(p.coords - e, q.coords)) / (2 * h)
rel = np.linalg.norm(blocks.wrt_first - fd) / np.linalg.norm(fd)
print(f"\nAnalytic midpoint derivative vs finite differences: rel. err = {rel:.2e}")
print("(these blocks fill the Newton solver's block-tridiagonal Jacobian)")
