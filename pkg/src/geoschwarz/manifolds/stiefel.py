"""Geometry of the Stiefel manifold St(n, p) with the embedded metric.

The exponential solves the embedded-metric geodesic equation
Q'' + Q (Q'^T Q') = 0 in closed form through a 2p x 2p matrix exponential;
the logarithm has no closed form and is computed by the single-shooting
solver. The QR retraction fixes diag(R) > 0 so iterates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import DegenerateRetraction
from ..expm import expm_batch
from .base import Manifold, ManifoldPoint

__all__ = ["Stiefel", "qr_positive"]


def qr_positive(a: np.ndarray, rank_tol: float = 1e-12):
    """Thin QR with the sign convention diag(R) > 0.

    Raises ValueError when a diagonal entry of R is (relatively) zero,
    i.e. the input has deficient column rank.
    """
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    scale = np.abs(diag).max(initial=0.0)
    if scale == 0.0 or np.abs(diag).min() <= rank_tol * scale:
        raise ValueError("column-rank-deficient matrix in QR normalization")
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return q * signs, signs[:, None] * r


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class Stiefel(Manifold):
    """St(n, p) = {Q in R^{n x p} : Q^T Q = I_p}, embedded metric."""

    n: int
    p: int

    def __post_init__(self):
        if not self.n >= self.p >= 1:
            raise ValueError(f"need n >= p >= 1, got n={self.n}, p={self.p}")

    @property
    def name(self) -> str:
        return f"stiefel(n={self.n},p={self.p})"

    @property
    def ambient_shape(self) -> tuple[int, ...]:
        return (self.n, self.p)

    @property
    def dim(self) -> int:
        return self.n * self.p - self.p * (self.p + 1) // 2

    @property
    def default_fixed_point_tol(self) -> float:
        # shooting-backed midpoints bottom out earlier than closed forms
        return 1e-8

    # -- kernel ----------------------------------------------------------------

    def _project(self, y, z):
        return z - y @ _sym(y.T @ z)

    def _retract(self, y, v):
        if not v.any():
            return y
        try:
            q, _ = qr_positive(y + v)
        except ValueError as exc:
            raise DegenerateRetraction(str(exc)) from None
        return q

    def _exp(self, y, v):
        if not v.any():
            return y
        a = y.T @ v
        s = v.T @ v
        block = np.block([[a, -s], [np.eye(self.p), a]])
        e_big = scipy.linalg.expm(block)
        e_small = scipy.linalg.expm(-a)
        return np.hstack((y, v)) @ e_big[:, : self.p] @ e_small

    def exp_many(self, y, tangents):
        V = np.asarray(tangents, dtype=float)
        nb, n, p = V.shape
        A = y.T @ V                         # (B, p, p), broadcast matmul
        S = np.transpose(V, (0, 2, 1)) @ V
        blocks = np.empty((nb, 2 * p, 2 * p))
        blocks[:, :p, :p] = A
        blocks[:, :p, p:] = -S
        blocks[:, p:, :p] = np.eye(p)
        blocks[:, p:, p:] = A
        e_big = expm_batch(blocks)[:, :, :p]
        e_small = expm_batch(-A)
        yv = np.concatenate((np.broadcast_to(y, V.shape), V), axis=2)
        return yv @ e_big @ e_small

    def _log(self, y0, y1, v0=None, tol=None):
        # no closed form; single shooting on the endpoint residual
        from ..shooting import ShootingConfig, shoot_log

        p0 = ManifoldPoint(y0, self)
        p1 = ManifoldPoint(y1, self)
        cfg = ShootingConfig() if tol is None else ShootingConfig(tol=tol)
        result = shoot_log(p0, p1, v0=v0, cfg=cfg)
        return result.v.coords, result.iters

    def constraint_residual(self, coords) -> float:
        return float(np.linalg.norm(coords.T @ coords - np.eye(self.p)))

    def tangency_residual(self, y, z) -> float:
        return float(np.linalg.norm(y.T @ z + z.T @ y))

    def normalize(self, z):
        q, _ = qr_positive(np.asarray(z, dtype=float))
        return q

    # -- tangent basis -----------------------------------------------------------

    def _tangent_basis_coords(self, y):
        """Orthonormal tangent basis built from a completion [y, y_perp].

        Tangents split as y*Omega + y_perp*K with Omega skew; the basis is
        the np - p(p+1)/2 elements y(e_i e_j^T - e_j e_i^T)/sqrt(2) (i < j)
        followed by y_perp e_a e_b^T, in fixed lexicographic order.
        """
        n, p = self.n, self.p
        q_full, _ = np.linalg.qr(y, mode="complete")
        y_perp = q_full[:, p:]                       # orthonormal complement
        basis = np.zeros((self.dim, n, p))
        k = 0
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        for i in range(p):
            for j in range(i + 1, p):
                basis[k, :, j] = inv_sqrt2 * y[:, i]
                basis[k, :, i] = -inv_sqrt2 * y[:, j]
                k += 1
        for a in range(n - p):
            for b in range(p):
                basis[k, :, b] = y_perp[:, a]
                k += 1
        return basis

    # -- sampling ----------------------------------------------------------------

    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        g = rng.standard_normal((self.n, self.p))
        q, _ = qr_positive(g)
        return ManifoldPoint(q, self)
