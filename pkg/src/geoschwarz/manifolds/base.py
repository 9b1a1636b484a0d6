"""Manifold abstraction and the derived geodesic operations.

A geometry implements {exp, log, project, retract, inner, constraint_residual}
on ambient-coordinate arrays; the solvers are generic over that interface.
The log map is allowed to be iterative and fallible (Stiefel delegates to a
shooting solver) and always reports failure through an exception rather than
returning a silently bad value.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Manifold",
    "ManifoldPoint",
    "TangentVector",
    "Geodesic",
    "inner",
    "dist",
    "midpoint",
    "geodesic_point",
]

CONSTRAINT_TOL = 1e-12
TANGENCY_TOL = 1e-10


@dataclass(frozen=True)
class ManifoldPoint:
    """Ambient-coordinate array satisfying the manifold constraint."""

    coords: np.ndarray
    manifold: "Manifold"

    @property
    def manifold_id(self) -> str:
        return self.manifold.name


@dataclass(frozen=True)
class TangentVector:
    """Ambient array lying in the tangent space at ``base``."""

    coords: np.ndarray
    base: ManifoldPoint

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class Geodesic:
    """The curve c(t) = Exp_base(t * velocity) for t in [0, 1]."""

    base: ManifoldPoint
    velocity: TangentVector

    def point_at(self, t: float) -> ManifoldPoint:
        man = self.base.manifold
        return man.exp(self.base, TangentVector(t * self.velocity.coords, self.base))

    def length(self) -> float:
        return self.velocity.norm()


def _same_point(p: ManifoldPoint, q: ManifoldPoint) -> bool:
    return p.manifold == q.manifold and np.array_equal(p.coords, q.coords)


@dataclass(frozen=True)
class Manifold(ABC):
    """Embedded Riemannian manifold with the ambient (Frobenius) metric."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Tag identifying the geometry (used on points)."""

    @property
    @abstractmethod
    def ambient_shape(self) -> tuple[int, ...]:
        ...

    @property
    @abstractmethod
    def dim(self) -> int:
        """Intrinsic dimension of the manifold."""

    @property
    def default_fixed_point_tol(self) -> float:
        """Default ||F||_inf stopping tolerance for the waypoint solvers."""
        return 1e-10

    # -- coordinate-level kernel, implemented by each geometry ---------------

    @abstractmethod
    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _log(self, x: np.ndarray, y: np.ndarray, v0=None,
             tol: float | None = None) -> tuple[np.ndarray, int]:
        """Return (tangent coords, solver iterations used).

        ``tol`` overrides the endpoint tolerance of an iterative log solver;
        closed-form geometries ignore it.
        """

    @abstractmethod
    def _project(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _retract(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def constraint_residual(self, coords: np.ndarray) -> float:
        ...

    @abstractmethod
    def tangency_residual(self, x: np.ndarray, z: np.ndarray) -> float:
        ...

    @abstractmethod
    def normalize(self, z: np.ndarray) -> np.ndarray:
        """Map a generic ambient array onto the manifold (used by chord init)."""

    def exp_many(self, x: np.ndarray, tangents: np.ndarray) -> np.ndarray:
        """Exponentials of a (B, ...) stack of tangents at one base point."""
        return np.stack([self._exp(x, v) for v in tangents])

    def _tangent_basis_coords(self, x: np.ndarray):
        """Geometry-specific orthonormal tangent basis, or None for the generic path."""
        return None

    # -- validated constructors ----------------------------------------------

    def point(self, coords, check: bool = True) -> ManifoldPoint:
        arr = np.asarray(coords, dtype=float)
        if arr.shape != self.ambient_shape:
            raise ValueError(f"expected shape {self.ambient_shape}, got {arr.shape}")
        if check:
            res = self.constraint_residual(arr)
            if res > CONSTRAINT_TOL:
                raise ValueError(f"constraint residual {res:.3e} exceeds {CONSTRAINT_TOL}")
        return ManifoldPoint(arr, self)

    def tangent(self, p: ManifoldPoint, coords, check: bool = True) -> TangentVector:
        arr = np.asarray(coords, dtype=float)
        if arr.shape != self.ambient_shape:
            raise ValueError(f"expected shape {self.ambient_shape}, got {arr.shape}")
        if check:
            res = self.tangency_residual(p.coords, arr)
            if res > TANGENCY_TOL:
                raise ValueError(f"tangency residual {res:.3e} exceeds {TANGENCY_TOL}")
        return TangentVector(arr, p)

    def zero_tangent(self, p: ManifoldPoint) -> TangentVector:
        return TangentVector(np.zeros(self.ambient_shape), p)

    # -- public wrappers -------------------------------------------------------

    def exp(self, p: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        if not _same_point(v.base, p):
            raise ValueError("tangent vector is based at a different point")
        return ManifoldPoint(self._exp(p.coords, v.coords), self)

    def log(self, p: ManifoldPoint, q: ManifoldPoint, v0=None) -> TangentVector:
        return self.log_with_info(p, q, v0=v0)[0]

    def log_with_info(self, p: ManifoldPoint, q: ManifoldPoint, v0=None,
                      tol: float | None = None):
        """Log map plus the inner-solver iteration count (1 for closed forms)."""
        if q.manifold != self:
            raise ValueError("points live on different manifolds")
        coords, iters = self._log(p.coords, q.coords, v0=v0, tol=tol)
        return TangentVector(coords, p), iters

    def project(self, p: ManifoldPoint, z) -> TangentVector:
        arr = np.asarray(z, dtype=float)
        if arr.shape != self.ambient_shape:
            raise ValueError(f"expected shape {self.ambient_shape}, got {arr.shape}")
        return TangentVector(self._project(p.coords, arr), p)

    def retract(self, p: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        if not _same_point(v.base, p):
            raise ValueError("tangent vector is based at a different point")
        return ManifoldPoint(self._retract(p.coords, v.coords), self)

    def inner(self, p: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
        if not (_same_point(u.base, p) and _same_point(v.base, p)):
            raise ValueError("tangent vectors must be based at p")
        return float(np.vdot(u.coords, v.coords))

    # -- sampling (seeded rng in, deterministic out) ---------------------------

    @abstractmethod
    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        ...

    def random_tangent(self, rng: np.random.Generator, p: ManifoldPoint,
                       norm: float = 1.0) -> TangentVector:
        """Projected Gaussian direction scaled to the requested metric norm."""
        raw = self._project(p.coords, rng.standard_normal(self.ambient_shape))
        nrm = np.linalg.norm(raw)
        if nrm == 0.0:
            raise RuntimeError("degenerate random tangent draw")
        return TangentVector((norm / nrm) * raw, p)


# -- derived operations shared by all solvers -----------------------------------


def inner(p: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
    """Metric scalar product at p (ambient Euclidean/Frobenius)."""
    return p.manifold.inner(p, u, v)


def dist(p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Geodesic distance, the metric norm of the log map."""
    return p.manifold.log(p, q).norm()


def geodesic_point(p: ManifoldPoint, q: ManifoldPoint, t: float) -> ManifoldPoint:
    """Point Exp_p(t * Log_p(q)) on the connecting geodesic, t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    man = p.manifold
    v = man.log(p, q)
    return man.exp(p, TangentVector(t * v.coords, p))


def midpoint(x: ManifoldPoint, y: ManifoldPoint) -> ManifoldPoint:
    """Geodesic midpoint Exp_x(0.5 * Log_x(y))."""
    return geodesic_point(x, y, 0.5)


def connecting_geodesic(p: ManifoldPoint, q: ManifoldPoint) -> Geodesic:
    return Geodesic(p, p.manifold.log(p, q))
