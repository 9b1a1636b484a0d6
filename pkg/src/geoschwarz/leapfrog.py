"""Waypoint relaxation for endpoint geodesics.

A geodesic between p and q is approximated by an m-tuple of waypoints with
frozen endpoints. One sweep replaces each interior point by the geodesic
midpoint of its neighbors, either sequentially (Gauss-Seidel, the classic
leapfrog ordering, which never increases the piecewise length) or
simultaneously (Jacobi). The fixed-point residual of the simultaneous map
is what the Newton solver in newton_schwarz.py drives to zero, so both
solvers share the stopping criterion ||F||_inf <= tol.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateInitialization, GeodesicError
from .manifolds.base import Manifold, ManifoldPoint, TangentVector

__all__ = [
    "Waypoints",
    "IterationRow",
    "ConvergenceRecord",
    "MidpointFailure",
    "init_waypoints",
    "geodesic_waypoints",
    "jacobi_sweep",
    "gauss_seidel_sweep",
    "fixed_point_residual",
    "piecewise_length",
    "run_leapfrog",
]


class MidpointFailure(GeodesicError):
    """A midpoint solve failed; carries the interior index it happened at."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"midpoint solve failed at interior index {index}: {cause}")
        self.index = index


@dataclass(frozen=True)
class Waypoints:
    """Ordered tuple (X_0, ..., X_{m-1}); endpoints are never rewritten."""

    points: tuple[ManifoldPoint, ...]

    def __post_init__(self):
        if len(self.points) < 3:
            raise ValueError("need at least m = 3 waypoints")
        man = self.points[0].manifold
        if any(pt.manifold != man for pt in self.points):
            raise ValueError("waypoints live on different manifolds")

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def manifold(self) -> Manifold:
        return self.points[0].manifold

    def interior_indices(self) -> range:
        return range(1, self.m - 1)

    def replace_interior(self, new_interior) -> "Waypoints":
        pts = (self.points[0], *new_interior, self.points[-1])
        return Waypoints(pts)

    def stacked_interior(self) -> np.ndarray:
        return np.concatenate([self.points[i].coords.ravel()
                               for i in self.interior_indices()])


@dataclass
class IterationRow:
    iteration: int
    residual_2: float
    residual_inf: float | None
    piecewise_length: float | None
    error_to_reference: float | None = None
    inner_solver_calls: int = 0
    wall_time_ms: float | None = None
    krylov_iters: int | None = None


@dataclass
class ConvergenceRecord:
    """Per-iteration history of one solver run."""

    method: str
    rows: list[IterationRow] = field(default_factory=list)
    converged: bool = False
    status: str = "running"

    @property
    def iterations(self) -> int:
        return len(self.rows) - 1

    def residuals_inf(self) -> list[float]:
        return [row.residual_inf for row in self.rows]

    def iterations_to(self, threshold: float) -> int | None:
        """Index of the first row whose sup-norm residual is below threshold."""
        for row in self.rows:
            if row.residual_inf is not None and row.residual_inf <= threshold:
                return row.iteration
        return None


class _SolveStats:
    __slots__ = ("calls",)

    def __init__(self):
        self.calls = 0


def _log_between(man, x: ManifoldPoint, y: ManifoldPoint, warm, key, stats,
                 tol=None):
    v0 = warm.get(key) if warm is not None else None
    vec, iters = man.log_with_info(x, y, v0=v0, tol=tol)
    if warm is not None:
        warm[key] = vec.coords
    if stats is not None:
        stats.calls += iters
    return vec


def _midpoint_between(man, x, y, warm, key, stats, tol=None) -> ManifoldPoint:
    v = _log_between(man, x, y, warm, key, stats, tol=tol)
    return man.exp(x, TangentVector(0.5 * v.coords, x))


def init_waypoints(p: ManifoldPoint, q: ManifoldPoint, m: int,
                   mode: str = "chord", sigma: float = 0.0,
                   seed: int = 0) -> Waypoints:
    """Initial waypoint guess: normalized chord, optionally tangent-perturbed.

    Interior point i is the ambient convex combination at s_i = i/(m-1)
    mapped onto the manifold by the geometry's normalization; "perturbed"
    additionally retracts a tangent perturbation of norm sigma at each
    interior point. Endpoints are installed exactly.
    """
    if m < 3:
        raise ValueError(f"need m >= 3, got {m}")
    if mode not in ("chord", "perturbed"):
        raise ValueError(f"unknown init mode {mode!r}")
    man = p.manifold
    if q.manifold != man:
        raise ValueError("endpoints live on different manifolds")

    interior = []
    for i in range(1, m - 1):
        s = i / (m - 1)
        combo = (1.0 - s) * p.coords + s * q.coords
        try:
            interior.append(ManifoldPoint(man.normalize(combo), man))
        except ValueError as exc:
            raise DegenerateInitialization(
                f"chord combination degenerate at s={s:.3g}: {exc}"
            ) from None

    if mode == "perturbed":
        rng = np.random.default_rng(seed)
        perturbed = []
        for pt in interior:
            xi = man.random_tangent(rng, pt, norm=sigma)
            perturbed.append(man.retract(pt, xi))
        interior = perturbed

    return Waypoints((p, *interior, q))


def geodesic_waypoints(p: ManifoldPoint, q: ManifoldPoint, m: int,
                       v: TangentVector | None = None) -> Waypoints:
    """Waypoints placed exactly on the connecting geodesic (for fixed-point tests)."""
    man = p.manifold
    if v is None:
        v = man.log(p, q)
    pts = [p]
    for i in range(1, m - 1):
        t = i / (m - 1)
        pts.append(man.exp(p, TangentVector(t * v.coords, p)))
    pts.append(q)
    return Waypoints(tuple(pts))


def jacobi_sweep(W: Waypoints, warm: dict | None = None,
                 stats: _SolveStats | None = None,
                 log_tol: float | None = None) -> Waypoints:
    """All interior points replaced by midpoints of their old neighbors."""
    man = W.manifold
    new_interior = []
    for i in W.interior_indices():
        try:
            new_interior.append(
                _midpoint_between(man, W.points[i - 1], W.points[i + 1],
                                  warm, i, stats, tol=log_tol)
            )
        except GeodesicError as exc:
            raise MidpointFailure(i, exc) from exc
    return W.replace_interior(new_interior)


def gauss_seidel_sweep(W: Waypoints, warm: dict | None = None,
                       stats: _SolveStats | None = None) -> Waypoints:
    """Sequential sweep: each midpoint already sees the updated left neighbor."""
    man = W.manifold
    pts = list(W.points)
    for i in W.interior_indices():
        try:
            pts[i] = _midpoint_between(man, pts[i - 1], pts[i + 1], warm, i, stats)
        except GeodesicError as exc:
            raise MidpointFailure(i, exc) from exc
    return Waypoints(tuple(pts))


def fixed_point_residual(W: Waypoints, warm: dict | None = None,
                         stats: _SolveStats | None = None):
    """Stacked residual of the simultaneous sweep, with its 2- and sup-norms."""
    g = jacobi_sweep(W, warm, stats)
    return _residual_from_sweep(W, g)


def _residual_from_sweep(W: Waypoints, g: Waypoints):
    vec = np.concatenate([
        (W.points[i].coords - g.points[i].coords).ravel()
        for i in W.interior_indices()
    ])
    return vec, float(np.linalg.norm(vec)), float(np.abs(vec).max(initial=0.0))


def piecewise_length(W: Waypoints, warm: dict | None = None,
                     stats: _SolveStats | None = None) -> float:
    """Length of the piecewise geodesic joining consecutive waypoints."""
    man = W.manifold
    total = 0.0
    for i in range(W.m - 1):
        total += _log_between(man, W.points[i], W.points[i + 1],
                              warm, ("seg", i), stats).norm()
    return total


def _starting_waypoints(p, q, m, init_mode, init_sigma, init_seed,
                        start: Waypoints | None) -> Waypoints:
    if start is None:
        return init_waypoints(p, q, m, mode=init_mode, sigma=init_sigma,
                              seed=init_seed)
    if start.m != m:
        raise ValueError(f"start has m={start.m}, expected {m}")
    if not (np.array_equal(start.points[0].coords, p.coords)
            and np.array_equal(start.points[-1].coords, q.coords)):
        raise ValueError("start waypoints do not share the requested endpoints")
    return start


def run_leapfrog(p: ManifoldPoint, q: ManifoldPoint, m: int,
                 variant: str = "gauss_seidel",
                 tol: float | None = None,
                 max_iters: int = 1000,
                 init_mode: str = "chord",
                 init_sigma: float = 0.0,
                 init_seed: int = 0,
                 start: Waypoints | None = None,
                 error_to_reference: Callable[[Waypoints], float] | None = None,
                 record_timings: bool = True):
    """Iterate sweeps until ||F||_inf <= tol; returns (Waypoints, ConvergenceRecord).

    Row k logs the state X^k before the (k+1)-th sweep; row 0 is the initial
    guess, so a run that starts at a fixed point performs zero sweeps.
    ``start`` overrides the built-in initialization. Failures inside a sweep
    flag the record instead of raising, so callers always get the history up
    to the failure.
    """
    if variant not in ("gauss_seidel", "jacobi"):
        raise ValueError(f"unknown variant {variant!r}")
    man = p.manifold
    if tol is None:
        tol = man.default_fixed_point_tol
    record = ConvergenceRecord(method=f"leapfrog_{'gs' if variant == 'gauss_seidel' else 'jacobi'}")
    warm: dict = {}
    t0 = time.perf_counter()

    W = _starting_waypoints(p, q, m, init_mode, init_sigma, init_seed, start)
    carry = _SolveStats()
    try:
        for k in range(max_iters + 1):
            stats = carry
            carry = _SolveStats()
            g = jacobi_sweep(W, warm, stats)
            _, r2, rinf = _residual_from_sweep(W, g)
            plen = piecewise_length(W, warm, stats)
            err = error_to_reference(W) if error_to_reference is not None else None
            elapsed = (time.perf_counter() - t0) * 1e3 if record_timings else None
            record.rows.append(IterationRow(k, r2, rinf, plen, err,
                                            stats.calls, elapsed))
            if rinf <= tol:
                record.converged = True
                record.status = "converged"
                break
            if k == max_iters:
                record.status = "max_iters"
                break
            if variant == "jacobi":
                W = g
            else:
                pts = list(W.points)
                pts[1] = g.points[1]  # identical inputs to the sequential update
                for i in range(2, W.m - 1):
                    try:
                        pts[i] = _midpoint_between(man, pts[i - 1], pts[i + 1],
                                                   warm, i, carry)
                    except GeodesicError as exc:
                        raise MidpointFailure(i, exc) from exc
                W = Waypoints(tuple(pts))
    except GeodesicError as exc:
        record.status = f"failed:{type(exc).__name__}"
    return W, record
