"""Closed-form geometry of the unit sphere S^{d-1} embedded in R^d.

Includes the analytic derivative blocks of the midpoint map used to
assemble the dense solver Jacobian. For unit x, y the geodesic midpoint
reduces to the normalized chord (x + y)/||x + y||, which makes those
blocks closed-form and regular for every non-antipodal pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateRetraction, NonUniqueGeodesic
from .base import Manifold, ManifoldPoint

__all__ = ["Sphere", "MidpointJacobian", "ANTIPODAL_EPS"]

# Non-uniqueness guard on 1 + <x, y>; below this the connecting geodesic
# (and the midpoint derivative) is ill-defined.
ANTIPODAL_EPS = 1e-8

_SMALL_ANGLE = 1e-4


def _sinc(t: float) -> float:
    # sin(t)/t, series-evaluated near zero so exp is smooth at v = 0
    if t < _SMALL_ANGLE:
        t2 = t * t
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return np.sin(t) / t


@dataclass(frozen=True)
class MidpointJacobian:
    """Derivative blocks of the midpoint map's ambient-smooth extension.

    ``wrt_first`` maps perturbations of the first argument to ambient
    directions, ``wrt_second`` those of the second; both are d x d.
    """

    wrt_first: np.ndarray
    wrt_second: np.ndarray


@dataclass(frozen=True)
class Sphere(Manifold):
    """Unit sphere {x in R^d : x^T x = 1} with the embedded metric."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"ambient dimension must be >= 2, got {self.d}")

    @property
    def name(self) -> str:
        return f"sphere(d={self.d})"

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return (self.d,)

    @property
    def dim(self) -> int:
        return self.d - 1

    # -- kernel ----------------------------------------------------------------

    def _exp(self, x, v):
        t = float(np.linalg.norm(v))
        return np.cos(t) * x + _sinc(t) * v

    def _log(self, x, y, v0=None, tol=None):
        # v0/tol accepted for interface uniformity; the closed form needs neither.
        c = float(np.dot(x, y))
        if 1.0 + c <= ANTIPODAL_EPS:
            raise NonUniqueGeodesic(
                f"(near-)antipodal points: 1 + <x,y> = {1.0 + c:.3e}"
            )
        u = y - c * x
        s = float(np.linalg.norm(u))
        if s == 0.0:
            return np.zeros_like(x), 1
        # atan2 keeps full accuracy where arccos(c) loses digits (c near +-1)
        theta = float(np.arctan2(s, c))
        return (theta / s) * u, 1

    def _project(self, x, z):
        return z - np.dot(x, z) * x

    def _retract(self, x, v):
        if not v.any():
            return x
        w = x + v
        n = float(np.linalg.norm(w))
        if n < 1e-14:
            raise DegenerateRetraction("x + v vanishes; retraction undefined")
        return w / n

    def exp_many(self, x, tangents):
        V = np.asarray(tangents, dtype=float)
        t = np.linalg.norm(V, axis=1)
        sinc = np.where(t < _SMALL_ANGLE,
                        1.0 - t * t / 6.0 + t ** 4 / 120.0,
                        np.sin(t) / np.where(t == 0.0, 1.0, t))
        return np.cos(t)[:, None] * x + sinc[:, None] * V

    def constraint_residual(self, coords) -> float:
        return abs(float(np.linalg.norm(coords)) - 1.0)

    def tangency_residual(self, x, z) -> float:
        return abs(float(np.dot(x, z)))

    def normalize(self, z):
        n = float(np.linalg.norm(z))
        if n < 1e-14:
            raise ValueError("cannot normalize a (near-)zero vector onto the sphere")
        return z / n

    # -- midpoint-map derivatives ----------------------------------------------

    def midpoint_from_ambient(self, x, y):
        """Ambient-smooth extension of the midpoint map: normalize, then map.

        This is the function the finite-difference Jacobian oracle perturbs.
        """
        xn = self.normalize(np.asarray(x, dtype=float))
        yn = self.normalize(np.asarray(y, dtype=float))
        v, _ = self._log(xn, yn)
        return self._exp(xn, 0.5 * v)

    def midpoint_jacobian(self, x_i: ManifoldPoint, x_j: ManifoldPoint) -> MidpointJacobian:
        """Analytic derivative blocks of ``midpoint_from_ambient`` at unit inputs.

        On the sphere the midpoint is the normalized chord, so with
        u = x + y and w = u/||u|| the blocks are
        (I - w w^T)(I - x x^T)/||u||   and   (I - w w^T)(I - y y^T)/||u||.
        """
        x = x_i.coords
        y = x_j.coords
        c = float(np.dot(x, y))
        if 1.0 + c <= ANTIPODAL_EPS:
            raise NonUniqueGeodesic(
                f"(near-)antipodal points: 1 + <x,y> = {1.0 + c:.3e}"
            )
        u = x + y
        nu = float(np.linalg.norm(u))
        w = u / nu
        pw = np.eye(self.d) - np.outer(w, w)
        px = np.eye(self.d) - np.outer(x, x)
        py = np.eye(self.d) - np.outer(y, y)
        return MidpointJacobian(pw @ px / nu, pw @ py / nu)

    # -- sampling ----------------------------------------------------------------

    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        return ManifoldPoint(self.normalize(rng.standard_normal(self.d)), self)
