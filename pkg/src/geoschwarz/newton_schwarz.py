"""Newton acceleration of the waypoint fixed-point equation F(X) = X - G(X).

G is the simultaneous (Jacobi) midpoint sweep, so the Jacobian of F is
block tridiagonal with identity diagonal blocks and negated midpoint
derivatives off the diagonal. Two solve paths:

- dense: assemble the blocks (analytic on the sphere, or central FD on the
  geometry's ambient-smooth midpoint extension) and eliminate block-by-block
  (Thomas), solving in the full ambient product space before projecting.
- matrix-free: approximate the Jacobian action by differencing F along a
  retracted tangent perturbation and run restarted GMRES on the tangent
  product space (the only option when midpoints come from shooting).

Each Newton direction is projected to the tangent product space and applied
through the retraction; a halving safeguard rejects steps that increase
||F||_2, falling back to the full flagged step so local quadratic behavior
is untouched.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import GeodesicError, KrylovDidNotConverge, SingularJacobian
from .leapfrog import (
    ConvergenceRecord,
    IterationRow,
    Waypoints,
    _residual_from_sweep,
    _SolveStats,
    _starting_waypoints,
    jacobi_sweep,
    piecewise_length,
)
from .manifolds.base import ManifoldPoint, TangentVector

__all__ = [
    "NewtonConfig",
    "BlockTridiagonalJacobian",
    "NewtonStepDiagnostics",
    "assemble_jacobian",
    "apply_jacobian_fd",
    "newton_step",
    "run_newton_schwarz",
]

_JACOBIAN_MODES = ("dense_analytic", "dense_fd", "matrix_free")


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-10
    max_iters: int = 50
    jacobian_mode: str = "dense_analytic"
    fd_step: float | None = None          # None: 1e-7 * (1 + ||X||)
    krylov_tol: float = 1e-8
    krylov_max: int = 200
    safeguard_halvings: int = 10

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if not self.krylov_tol < 1.0:
            raise ValueError("krylov_tol must be < 1")
        if self.jacobian_mode not in _JACOBIAN_MODES:
            raise ValueError(f"jacobian_mode must be one of {_JACOBIAN_MODES}")


@dataclass
class BlockTridiagonalJacobian:
    """I - J_G: identity diagonal blocks, bandwidth one block, m-2 block rows.

    ``lower[r-1]`` couples block row r to row r-1, ``upper[r]`` to row r+1.
    """

    lower: list[np.ndarray]
    upper: list[np.ndarray]
    block_size: int
    n_blocks: int

    def matvec(self, v: np.ndarray) -> np.ndarray:
        d, n = self.block_size, self.n_blocks
        blocks = v.reshape(n, d)
        out = blocks.copy()
        for r in range(1, n):
            out[r] += self.lower[r - 1] @ blocks[r - 1]
        for r in range(n - 1):
            out[r] += self.upper[r] @ blocks[r + 1]
        return out.ravel()

    def to_dense(self) -> np.ndarray:
        d, n = self.block_size, self.n_blocks
        full = np.eye(n * d)
        for r in range(1, n):
            full[r * d:(r + 1) * d, (r - 1) * d:r * d] = self.lower[r - 1]
        for r in range(n - 1):
            full[r * d:(r + 1) * d, (r + 1) * d:(r + 2) * d] = self.upper[r]
        return full

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Block-Thomas elimination; LU with partial pivoting inside blocks."""
        d, n = self.block_size, self.n_blocks
        b = rhs.reshape(n, d).copy()
        eye = np.eye(d)

        def factor(block):
            lu = scipy.linalg.lu_factor(block)
            udiag = np.abs(np.diag(lu[0]))
            if udiag.min() <= 1e-14 * max(1.0, udiag.max()):
                raise SingularJacobian("singular diagonal block in Thomas elimination")
            return lu

        c_prime: list[np.ndarray | None] = [None] * n
        lu = factor(eye)
        if n > 1:
            c_prime[0] = scipy.linalg.lu_solve(lu, self.upper[0])
        b[0] = scipy.linalg.lu_solve(lu, b[0])
        for r in range(1, n):
            diag = eye - self.lower[r - 1] @ c_prime[r - 1]
            lu = factor(diag)
            if r < n - 1:
                c_prime[r] = scipy.linalg.lu_solve(lu, self.upper[r])
            b[r] = scipy.linalg.lu_solve(lu, b[r] - self.lower[r - 1] @ b[r - 1])
        for r in range(n - 2, -1, -1):
            b[r] -= c_prime[r] @ b[r + 1]
        return b.ravel()


def assemble_jacobian(W: Waypoints, mode: str = "dense_analytic",
                      fd_step: float = 1e-6) -> BlockTridiagonalJacobian:
    """Blocks of I - J_G from the geometry's midpoint derivatives.

    ``dense_analytic`` uses the geometry's closed-form blocks,
    ``dense_fd`` central differences of its ambient-smooth midpoint
    extension with the given step.
    """
    if mode not in ("dense_analytic", "dense_fd"):
        raise ValueError("assemble_jacobian requires a dense jacobian_mode")
    man = W.manifold
    d = int(np.prod(man.ambient_shape))
    n = W.m - 2
    lower: list[np.ndarray] = []
    upper: list[np.ndarray] = []
    for i in W.interior_indices():
        left, right = W.points[i - 1], W.points[i + 1]
        try:
            if mode == "dense_analytic":
                blocks = man.midpoint_jacobian(left, right)
                wrt_first, wrt_second = blocks.wrt_first, blocks.wrt_second
            else:
                wrt_first, wrt_second = _fd_midpoint_blocks(man, left.coords,
                                                            right.coords, fd_step)
        except AttributeError:
            raise ValueError(
                f"{man.name} does not provide midpoint derivatives; "
                "use jacobian_mode='matrix_free'"
            ) from None
        except GeodesicError as exc:
            raise type(exc)(
                f"midpoint derivative failed for segment at interior index {i}: {exc}"
            ) from exc
        if i - 1 >= 1:
            lower.append(-wrt_first)
        if i + 1 <= W.m - 2:
            upper.append(-wrt_second)
    return BlockTridiagonalJacobian(lower, upper, d, n)


def _fd_midpoint_blocks(man, x: np.ndarray, y: np.ndarray, h: float):
    ext = man.midpoint_from_ambient
    size = x.size
    first = np.empty((size, size))
    second = np.empty((size, size))
    for l in range(size):
        e = np.zeros_like(x)
        e.flat[l] = h
        first[:, l] = (ext(x + e, y) - ext(x - e, y)).ravel() / (2.0 * h)
        second[:, l] = (ext(x, y + e) - ext(x, y - e)).ravel() / (2.0 * h)
    return first, second


def _project_stack(W: Waypoints, vec: np.ndarray) -> np.ndarray:
    man = W.manifold
    shape = man.ambient_shape
    d = int(np.prod(shape))
    out = np.empty_like(vec)
    for r, i in enumerate(W.interior_indices()):
        block = vec[r * d:(r + 1) * d].reshape(shape)
        out[r * d:(r + 1) * d] = man._project(W.points[i].coords, block).ravel()
    return out


def _retract_stack(W: Waypoints, vec: np.ndarray) -> Waypoints:
    man = W.manifold
    shape = man.ambient_shape
    d = int(np.prod(shape))
    new_interior = []
    for r, i in enumerate(W.interior_indices()):
        xi = vec[r * d:(r + 1) * d].reshape(shape)
        new_interior.append(
            man.retract(W.points[i], TangentVector(xi, W.points[i]))
        )
    return W.replace_interior(new_interior)


def _default_fd_step(W: Waypoints) -> float:
    return 1e-7 * (1.0 + float(np.linalg.norm(W.stacked_interior())))


def _operator_log_tol(W: Waypoints) -> float:
    # inner midpoint accuracy for Krylov matvecs: as tight as shooting
    # reliably converges, so little noise survives the division by fd_step
    return 1e-12


def apply_jacobian_fd(W: Waypoints, V: np.ndarray, fd_step: float | None = None,
                      base_residual: np.ndarray | None = None,
                      warm: dict | None = None, stats=None,
                      log_tol: float | None = None) -> np.ndarray:
    """Matrix-free Jacobian action (F(W (+) h V) - F(W)) / h.

    V is interpreted blockwise as one direction per interior point and is
    projected onto the tangent spaces on entry; the perturbed waypoints come
    from retracting each interior point along h times its block. ``log_tol``
    tightens iterative midpoint solves, which caps the noise the division
    by h amplifies.
    """
    h = _default_fd_step(W) if fd_step is None else fd_step
    vt = _project_stack(W, np.asarray(V, dtype=float))
    if base_residual is None:
        base_residual, _, _ = _residual_from_sweep(
            W, jacobi_sweep(W, warm, stats, log_tol=log_tol))
    perturbed = _retract_stack(W, h * vt)
    pert_residual, _, _ = _residual_from_sweep(
        perturbed, jacobi_sweep(perturbed, warm, stats, log_tol=log_tol))
    return (pert_residual - base_residual) / h


@dataclass
class NewtonStepDiagnostics:
    residual_before_2: float
    residual_before_inf: float
    residual_after_2: float
    residual_after_inf: float
    krylov_iters: int | None = None
    halvings: int = 0
    flagged: bool = False
    residual_vec_after: np.ndarray | None = None


def _krylov_solve(W: Waypoints, rhs: np.ndarray, cfg: NewtonConfig, stats):
    """Restarted GMRES on the tangent-restricted FD Jacobian.

    The finite-difference operator carries noise from the inner midpoint
    solves, so relative residuals below that floor are unreachable. When
    GMRES stops short of krylov_tol the iterate is still accepted as an
    inexact Newton direction if it reached sqrt(krylov_tol); anything worse
    counts as stagnation and raises.
    """
    size = rhs.size
    counter = {"matvecs": 0}

    # All F evaluations inside the operator run cold (no warm starts) and at
    # a tightened inner tolerance. Cold starts make base and perturbed
    # midpoint solves follow near-identical iteration paths, so their errors
    # cancel in the finite difference; a warm-started base can return
    # immediately (error at the solver tolerance) while the perturbed state
    # refines one step further (error near machine), and that mismatch
    # divided by the FD step would drown the product. The tight tolerance
    # bounds whatever noise does not cancel.
    inner_tol = _operator_log_tol(W)
    base_fd, _, _ = _residual_from_sweep(
        W, jacobi_sweep(W, None, stats, log_tol=inner_tol))

    def action(v):
        counter["matvecs"] += 1
        jv = apply_jacobian_fd(W, v, fd_step=cfg.fd_step,
                               base_residual=base_fd, warm=None, stats=stats,
                               log_tol=inner_tol)
        return _project_stack(W, jv)

    op = scipy.sparse.linalg.LinearOperator((size, size), matvec=action, dtype=float)
    restart = min(50, size)
    maxiter = max(1, math.ceil(cfg.krylov_max / restart))
    # safeguarded forcing term: far from the solution a crude direction is
    # all Newton needs, so don't burn the matvec budget polishing it
    rtol = max(cfg.krylov_tol, min(0.1, float(np.linalg.norm(rhs))))
    x, info = scipy.sparse.linalg.gmres(op, rhs, rtol=rtol, atol=0.0,
                                        restart=restart, maxiter=maxiter)
    if info != 0:
        rel = float(np.linalg.norm(action(x) - rhs)
                    / max(float(np.linalg.norm(rhs)), 1e-300))
        # near the noise floor the system cannot be solved to krylov_tol;
        # a direction that contracted the linear residual substantially is
        # still a sound inexact-Newton direction (the step safeguard vets
        # it), so only genuine stagnation raises
        if not np.isfinite(rel) or rel > 0.5:
            raise KrylovDidNotConverge(
                f"GMRES stagnated after {counter['matvecs']} products "
                f"(relative residual {rel:.3e})",
                iterations=counter["matvecs"],
                residual=rel,
            )
    return x, counter["matvecs"]


def newton_step(W: Waypoints, cfg: NewtonConfig | None = None,
                warm: dict | None = None, stats=None,
                precomputed=None) -> tuple[Waypoints, NewtonStepDiagnostics]:
    """One modified Newton update: solve, project, retract, safeguard."""
    cfg = cfg or NewtonConfig()
    if precomputed is None:
        vec, r2, rinf = _residual_from_sweep(W, jacobi_sweep(W, warm, stats))
    else:
        vec, r2, rinf = precomputed

    if r2 == 0.0:
        diag = NewtonStepDiagnostics(r2, rinf, r2, rinf, residual_vec_after=vec)
        return W, diag

    krylov_iters = None
    if cfg.jacobian_mode == "matrix_free":
        rhs = _project_stack(W, -vec)
        delta, krylov_iters = _krylov_solve(W, rhs, cfg, stats)
    else:
        jac = assemble_jacobian(W, mode=cfg.jacobian_mode)
        delta = jac.solve(-vec)

    xi = _project_stack(W, delta)

    # safeguard: shrink while the retracted step increases ||F||_2
    scale = 1.0
    halvings = 0
    flagged = False
    full_eval = None
    accepted = None
    for attempt in range(cfg.safeguard_halvings + 1):
        cand = _retract_stack(W, scale * xi)
        cvec, c2, cinf = _residual_from_sweep(cand, jacobi_sweep(cand, warm, stats))
        if attempt == 0:
            full_eval = (cand, cvec, c2, cinf)
        if c2 <= r2:
            accepted = (cand, cvec, c2, cinf)
            break
        scale *= 0.5
        halvings += 1
    if accepted is None:
        # still increasing after all halvings: take the full step, flagged
        accepted = full_eval
        halvings = cfg.safeguard_halvings
        flagged = True

    new_w, new_vec, new_r2, new_rinf = accepted
    diag = NewtonStepDiagnostics(r2, rinf, new_r2, new_rinf,
                                 krylov_iters=krylov_iters,
                                 halvings=halvings, flagged=flagged,
                                 residual_vec_after=new_vec)
    return new_w, diag


def run_newton_schwarz(p: ManifoldPoint, q: ManifoldPoint, m: int,
                       cfg: NewtonConfig | None = None,
                       init_mode: str = "chord",
                       init_sigma: float = 0.0,
                       init_seed: int = 0,
                       start: Waypoints | None = None,
                       error_to_reference: Callable[[Waypoints], float] | None = None,
                       record_timings: bool = True):
    """Newton iteration on F until ||F||_inf <= cfg.tol; mirrors run_leapfrog."""
    cfg = cfg or NewtonConfig()
    record = ConvergenceRecord(method="newton_schwarz")
    warm: dict = {}
    t0 = time.perf_counter()

    W = _starting_waypoints(p, q, m, init_mode, init_sigma, init_seed, start)
    carry = _SolveStats()
    current = None       # residual triple at W, reused from the accepted step
    pending_krylov = None  # Krylov products of the step that produced this row
    try:
        for k in range(cfg.max_iters + 1):
            stats = carry
            carry = _SolveStats()
            if current is None:
                current = _residual_from_sweep(W, jacobi_sweep(W, warm, stats))
            vec, r2, rinf = current
            plen = piecewise_length(W, warm, stats)
            err = error_to_reference(W) if error_to_reference is not None else None
            elapsed = (time.perf_counter() - t0) * 1e3 if record_timings else None
            record.rows.append(IterationRow(k, r2, rinf, plen, err, stats.calls,
                                            elapsed, krylov_iters=pending_krylov))
            if rinf <= cfg.tol:
                record.converged = True
                record.status = "converged"
                break
            if k == cfg.max_iters:
                record.status = "max_iters"
                break
            W, diag = newton_step(W, cfg, warm, carry, precomputed=(vec, r2, rinf))
            current = (diag.residual_vec_after, diag.residual_after_2,
                       diag.residual_after_inf)
            pending_krylov = diag.krylov_iters
    except GeodesicError as exc:
        record.status = f"failed:{type(exc).__name__}"
    return W, record
