"""Single shooting for the log map on manifolds without a closed form.

Gauss-Newton on the endpoint residual r(alpha) = vec(Exp_p(sum alpha_k b_k) - q)
over coefficients in an orthonormal tangent basis at p. The Jacobian is
finite-differenced column by column (batched through the geometry's
exp_many), the least-squares step is solved by QR, and a halving line
search enforces strict residual decrease. Failure raises with the residual
trace attached: far-apart endpoints legitimately defeat single shooting,
and callers (the leapfrog layer, the benchmark baseline) rely on seeing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ShootingDidNotConverge
from .manifolds.base import Manifold, ManifoldPoint, TangentVector

__all__ = ["ShootingConfig", "ShootingResult", "tangent_basis", "shoot_log"]

_RANK_TOL = 1e-10


@dataclass(frozen=True)
class ShootingConfig:
    tol: float = 1e-9
    max_iters: int = 100
    fd_step_scale: float = float(np.sqrt(np.finfo(float).eps))
    max_step_halvings: int = 20

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class ShootingResult:
    v: TangentVector
    residual_norm: float
    iters: int
    converged: bool
    # accepted-iterate traces, index 0 = initial guess
    residuals: tuple[float, ...]
    residuals_inf: tuple[float, ...]
    tangent_history: tuple[np.ndarray, ...]


def tangent_basis(p: ManifoldPoint) -> list[TangentVector]:
    """Orthonormal basis of the tangent space at p, in a fixed order."""
    coords = _tangent_basis_coords(p.manifold, p.coords)
    return [TangentVector(c, p) for c in coords]


def _tangent_basis_coords(man: Manifold, x: np.ndarray) -> np.ndarray:
    custom = man._tangent_basis_coords(x)
    if custom is not None:
        return np.asarray(custom)
    # generic path: project the ambient canonical basis and orthonormalize
    # with a rank-revealing pivoted QR
    size = int(np.prod(man.ambient_shape))
    cols = np.empty((size, size))
    for k in range(size):
        e = np.zeros(man.ambient_shape)
        e.flat[k] = 1.0
        cols[:, k] = man._project(x, e).ravel()
    q, r, _ = scipy.linalg.qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int((diag > _RANK_TOL * diag[0]).sum())
    if rank != man.dim:
        raise RuntimeError(
            f"tangent basis rank {rank} does not match manifold dimension {man.dim}"
        )
    return q[:, :rank].T.reshape(rank, *man.ambient_shape)


def shoot_log(p: ManifoldPoint, q: ManifoldPoint, v0=None,
              cfg: ShootingConfig | None = None) -> ShootingResult:
    """Solve Exp_p(v) = q for v by Gauss-Newton; raises ShootingDidNotConverge."""
    cfg = cfg or ShootingConfig()
    man = p.manifold
    if q.manifold != man:
        raise ValueError("points live on different manifolds")

    basis = _tangent_basis_coords(man, p.coords)
    k = basis.shape[0]
    basis_flat = basis.reshape(k, -1)
    q_flat = q.coords.ravel()

    if v0 is None:
        v0c = man._project(p.coords, q.coords - p.coords)
    else:
        v0c = man._project(p.coords, np.asarray(v0, dtype=float))
    alpha = basis_flat @ v0c.ravel()

    def tangent_of(a):
        return np.tensordot(a, basis, axes=1)

    def residual_of(a):
        r = man._exp(p.coords, tangent_of(a)).ravel() - q_flat
        return float(np.linalg.norm(r)), float(np.abs(r).max(initial=0.0))

    rnorm, rinf = residual_of(alpha)
    trace = [rnorm]
    trace_inf = [rinf]
    history = [tangent_of(alpha)]

    def result(converged, iters):
        return ShootingResult(
            v=TangentVector(tangent_of(alpha), p),
            residual_norm=trace[-1],
            iters=iters,
            converged=converged,
            residuals=tuple(trace),
            residuals_inf=tuple(trace_inf),
            tangent_history=tuple(history),
        )

    if rnorm <= cfg.tol:
        return result(True, 0)

    for it in range(1, cfg.max_iters + 1):
        h = cfg.fd_step_scale * (1.0 + float(np.linalg.norm(alpha)))
        # one batched sweep: row 0 is the base point, rows 1..k the FD probes
        probes = np.concatenate(
            (tangent_of(alpha)[None], tangent_of(alpha)[None] + h * basis)
        )
        endpoints = man.exp_many(p.coords, probes).reshape(k + 1, -1)
        base = endpoints[0] - q_flat
        jac = (endpoints[1:] - endpoints[0]).T / h          # ambient x k

        try:
            qj, rj = np.linalg.qr(jac)
            diag = np.abs(np.diag(rj))
            if diag.min() <= 1e-14 * diag.max():
                raise np.linalg.LinAlgError("rank-deficient shooting Jacobian")
            delta = scipy.linalg.solve_triangular(rj, -(qj.T @ base))
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jac, -base, rcond=None)[0]

        step = 1.0
        accepted = False
        for _ in range(cfg.max_step_halvings + 1):
            cand = alpha + step * delta
            rnorm_c, rinf_c = residual_of(cand)
            if rnorm_c < rnorm:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise ShootingDidNotConverge(
                f"line search stalled at residual {rnorm:.3e} (iteration {it})",
                residuals=trace,
                iters=it - 1,
            )

        alpha, rnorm, rinf = cand, rnorm_c, rinf_c
        trace.append(rnorm)
        trace_inf.append(rinf)
        history.append(tangent_of(alpha))
        if rnorm <= cfg.tol:
            return result(True, it)

    raise ShootingDidNotConverge(
        f"no convergence to {cfg.tol:.1e} within {cfg.max_iters} iterations "
        f"(final residual {rnorm:.3e})",
        residuals=trace,
        iters=cfg.max_iters,
    )
