"""Benchmark experiments: seeded endpoint pairs, solver runs, CSV histories.

One experiment is a (manifold, m, distance, seed) quadruple run with a set
of methods; each (experiment, method) pair writes one CSV file with the
fixed column order below. Reruns with identical configuration and
record_timings=False are byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ShootingDidNotConverge
from .leapfrog import ConvergenceRecord, IterationRow, Waypoints, run_leapfrog
from .manifolds.base import Manifold, ManifoldPoint, TangentVector
from .manifolds.sphere import Sphere
from .manifolds.stiefel import Stiefel
from .newton_schwarz import NewtonConfig, run_newton_schwarz
from .shooting import ShootingConfig, shoot_log

__all__ = [
    "CSV_COLUMNS",
    "METHODS",
    "ExperimentConfig",
    "ReferenceSolution",
    "gen_endpoint_pair",
    "build_reference",
    "global_shooting_baseline",
    "run_experiment",
    "preset_configs",
    "load_experiment_configs",
    "write_record_csv",
]

CSV_COLUMNS = (
    "experiment_id", "method", "manifold", "dims", "m", "distance", "seed",
    "iter", "residual_2", "residual_inf", "piecewise_length",
    "error_to_reference", "inner_solver_calls", "wall_time_ms", "status",
)

METHODS = ("leapfrog_gs", "leapfrog_jacobi", "newton_schwarz", "global_shooting")

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig4-desk")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    manifold: Manifold
    m: int
    distance: float
    methods: tuple[str, ...] = ("leapfrog_gs", "newton_schwarz")
    seed: int = 0
    tol: float | None = None          # None: per-method defaults
    max_iters: int | None = None
    init_mode: str = "chord"
    init_sigma: float = 0.0
    init_seed: int = 0
    record_timings: bool = True

    def __post_init__(self):
        if self.distance <= 0.0:
            raise ValueError("distance must be positive")
        if isinstance(self.manifold, Sphere) and not self.distance < np.pi:
            raise ValueError("sphere distances must stay below pi")
        if self.m < 3:
            raise ValueError("need m >= 3")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass(frozen=True)
class ReferenceSolution:
    """Log_p(q) from an authoritative source, for error-vs-iteration curves."""

    tangent: TangentVector
    source: str  # "closed_form" | "high_accuracy_shooting"
    replay_error: float


def gen_endpoint_pair(manifold: Manifold, distance: float, seed: int,
                      return_tangent: bool = False):
    """Seeded endpoint pair at exactly the requested geodesic distance.

    The base point is drawn uniformly (normalized Gaussian / Q-factor of a
    Gaussian matrix), the second endpoint is Exp_p(distance * u) for a
    random unit tangent u, so the distance is exact by construction.
    """
    rng = np.random.default_rng(seed)
    p = manifold.random_point(rng)
    if distance == 0.0:
        return (p, p, manifold.zero_tangent(p)) if return_tangent else (p, p)
    u = manifold.random_tangent(rng, p, norm=1.0)
    q = manifold.exp(p, TangentVector(distance * u.coords, p))
    if return_tangent:
        return p, q, u
    return p, q


def build_reference(p: ManifoldPoint, q: ManifoldPoint,
                    gen_tangent: TangentVector | None = None):
    """Reference log map: closed form where available, else tight shooting.

    Returns None when no trustworthy reference exists (shooting failed or
    the endpoint replay error exceeds its bound).
    """
    man = p.manifold
    if isinstance(man, Sphere):
        v = man.log(p, q)
        replay = float(np.linalg.norm(man.exp(p, v).coords - q.coords))
        if replay <= 1e-10:
            return ReferenceSolution(v, "closed_form", replay)
        return None
    try:
        result = shoot_log(
            p, q,
            v0=None if gen_tangent is None else gen_tangent.coords,
            cfg=ShootingConfig(tol=1e-11, max_iters=150),
        )
    except ShootingDidNotConverge:
        return None
    if result.residual_norm <= 1e-9:
        return ReferenceSolution(result.v, "high_accuracy_shooting",
                                 result.residual_norm)
    return None


def _waypoint_error_fn(reference: ReferenceSolution, p: ManifoldPoint, m: int):
    """Max interior distance (ambient norm) to the reference geodesic points."""
    man = p.manifold
    ref_points = [
        man.exp(p, TangentVector((i / (m - 1)) * reference.tangent.coords, p)).coords
        for i in range(m)
    ]

    def error(W: Waypoints) -> float:
        return max(
            float(np.linalg.norm(W.points[i].coords - ref_points[i]))
            for i in W.interior_indices()
        )

    return error


def _default_tol(man: Manifold, method: str) -> float:
    if isinstance(man, Sphere):
        return {"leapfrog_gs": 1e-10, "leapfrog_jacobi": 1e-10,
                "newton_schwarz": 1e-12, "global_shooting": 1e-10}[method]
    return {"leapfrog_gs": 1e-8, "leapfrog_jacobi": 1e-8,
            "newton_schwarz": 1e-8, "global_shooting": 1e-8}[method]


def _default_max_iters(method: str) -> int:
    return {"leapfrog_gs": 2000, "leapfrog_jacobi": 2000,
            "newton_schwarz": 50, "global_shooting": 100}[method]


def global_shooting_baseline(p: ManifoldPoint, q: ManifoldPoint,
                             tol: float = 1e-9, max_iters: int = 100,
                             reference: ReferenceSolution | None = None,
                             record_timings: bool = True) -> ConvergenceRecord:
    """Single shooting straight between the endpoints, logged per iteration.

    The number of waypoints is irrelevant here; the residual columns carry
    the Gauss-Newton endpoint residual instead of ||F||.
    """
    record = ConvergenceRecord(method="global_shooting")
    start = time.perf_counter()
    try:
        result = shoot_log(p, q, cfg=ShootingConfig(tol=tol, max_iters=max_iters))
        res2 = result.residuals
        res_inf = result.residuals_inf
        history = result.tangent_history
        record.converged = True
        record.status = "converged"
    except ShootingDidNotConverge as exc:
        res2 = tuple(exc.residuals)
        res_inf = (None,) * len(res2)
        history = (None,) * len(res2)
        record.status = f"failed:{type(exc).__name__}"
    elapsed = (time.perf_counter() - start) * 1e3 if record_timings else None
    for k, r2 in enumerate(res2):
        err = None
        if reference is not None and history[k] is not None:
            err = float(np.linalg.norm(history[k] - reference.tangent.coords))
        record.rows.append(IterationRow(
            iteration=k,
            residual_2=float(r2),
            residual_inf=None if res_inf[k] is None else float(res_inf[k]),
            piecewise_length=None,
            error_to_reference=err,
            inner_solver_calls=1,
            wall_time_ms=elapsed if k == len(res2) - 1 else None,
        ))
    return record


def _dims_string(man: Manifold) -> str:
    if isinstance(man, Sphere):
        return str(man.d)
    return f"{man.n}x{man.p}"


def _manifold_kind(man: Manifold) -> str:
    return "sphere" if isinstance(man, Sphere) else "stiefel"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # builtin-float repr: shortest round-trip digits, no numpy wrapper
        return repr(float(value))
    return str(value)


def write_record_csv(path: Path, cfg: ExperimentConfig, method: str,
                     record: ConvergenceRecord) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(CSV_COLUMNS)]
    prefix = (cfg.experiment_id, method, _manifold_kind(cfg.manifold),
              _dims_string(cfg.manifold), str(cfg.m), repr(float(cfg.distance)),
              str(cfg.seed))
    for row in record.rows:
        cells = prefix + (
            str(row.iteration),
            _fmt(row.residual_2),
            _fmt(row.residual_inf),
            _fmt(row.piecewise_length),
            _fmt(row.error_to_reference),
            _fmt(row.inner_solver_calls),
            _fmt(row.wall_time_ms),
            record.status,
        )
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def run_experiment(cfg: ExperimentConfig, out_dir="out") -> list[Path]:
    """Run every requested method and write one CSV per (experiment, method).

    Solver failures are recorded in the status column; remaining methods
    still run.
    """
    man = cfg.manifold
    p, q, gen_u = gen_endpoint_pair(man, cfg.distance, cfg.seed,
                                    return_tangent=True)
    reference = build_reference(p, q, gen_tangent=gen_u)
    paths = []
    for method in cfg.methods:
        tol = cfg.tol if cfg.tol is not None else _default_tol(man, method)
        max_iters = (cfg.max_iters if cfg.max_iters is not None
                     else _default_max_iters(method))
        err_fn = (None if reference is None
                  else _waypoint_error_fn(reference, p, cfg.m))
        if method in ("leapfrog_gs", "leapfrog_jacobi"):
            variant = "gauss_seidel" if method == "leapfrog_gs" else "jacobi"
            _, record = run_leapfrog(
                p, q, cfg.m, variant=variant, tol=tol, max_iters=max_iters,
                init_mode=cfg.init_mode, init_sigma=cfg.init_sigma,
                init_seed=cfg.init_seed, error_to_reference=err_fn,
                record_timings=cfg.record_timings)
        elif method == "newton_schwarz":
            mode = ("dense_analytic" if hasattr(man, "midpoint_jacobian")
                    else "matrix_free")
            # matrix-free runs take a larger FD step than the config default:
            # waypoint norms are fixed on the manifold (||X_i||_F = sqrt(p)),
            # and the larger step keeps solver noise out of the Jacobian
            # action near convergence; the linearity check still gates it
            fd_step = None
            krylov_max = 200
            if mode == "matrix_free":
                stack_norm = np.sqrt((cfg.m - 2) * man.p)
                fd_step = 1e-5 * (1.0 + float(stack_norm))
                # each matvec costs two shooting-backed sweeps; near the
                # noise floor extra products buy nothing
                krylov_max = 60
            ncfg = NewtonConfig(tol=tol, max_iters=max_iters, jacobian_mode=mode,
                                fd_step=fd_step, krylov_max=krylov_max)
            _, record = run_newton_schwarz(
                p, q, cfg.m, cfg=ncfg, init_mode=cfg.init_mode,
                init_sigma=cfg.init_sigma, init_seed=cfg.init_seed,
                error_to_reference=err_fn, record_timings=cfg.record_timings)
        else:
            record = global_shooting_baseline(
                p, q, tol=tol, max_iters=max_iters, reference=reference,
                record_timings=cfg.record_timings)
        out = Path(out_dir) / f"{cfg.experiment_id}__{method}.csv"
        paths.append(write_record_csv(out, cfg, method, record))
    return paths


# -- presets -------------------------------------------------------------------


def preset_configs(name: str, seed: int = 0) -> list[ExperimentConfig]:
    """The stock experiment families at their published parameters.

    fig2: sphere d=100, m=4, distances 0.1pi/0.5pi/0.9pi.
    fig3: sphere d=100, dist 0.9pi, m in {4, 7, 10}.
    fig4: St(100, p), p in {2, 12, 22}, m=4, dist 0.8pi (slow at p=22).
    fig4-desk: St(40, p), p in {2, 6, 12}, the laptop-scale variant.
    """
    sphere_methods = ("leapfrog_gs", "newton_schwarz")
    stiefel_methods = ("leapfrog_gs", "global_shooting", "newton_schwarz")
    if name == "fig2":
        return [
            ExperimentConfig(f"fig2_dist{frac}pi", Sphere(100), m=4,
                             distance=frac * np.pi, methods=sphere_methods,
                             seed=seed)
            for frac in (0.1, 0.5, 0.9)
        ]
    if name == "fig3":
        return [
            ExperimentConfig(f"fig3_m{m}", Sphere(100), m=m,
                             distance=0.9 * np.pi, methods=sphere_methods,
                             seed=seed)
            for m in (4, 7, 10)
        ]
    if name == "fig4":
        return [
            ExperimentConfig(f"fig4_p{p}", Stiefel(100, p), m=4,
                             distance=0.8 * np.pi, methods=stiefel_methods,
                             seed=seed)
            for p in (2, 12, 22)
        ]
    if name == "fig4-desk":
        return [
            ExperimentConfig(f"fig4desk_p{p}", Stiefel(40, p), m=4,
                             distance=0.8 * np.pi, methods=stiefel_methods,
                             seed=seed)
            for p in (2, 6, 12)
        ]
    raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


# -- config files ----------------------------------------------------------------


def _parse_distance(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace(" ", "").replace("*", "")
    if text.endswith("pi"):
        head = text[:-2]
        return (float(head) if head else 1.0) * np.pi
    return float(text)


def _parse_manifold(spec: dict, p_value=None) -> Manifold:
    kind = spec.get("kind")
    if kind == "sphere":
        return Sphere(int(spec["d"]))
    if kind == "stiefel":
        p = int(p_value if p_value is not None else spec["p"])
        return Stiefel(int(spec["n"]), p)
    raise ValueError(f"unknown manifold kind {kind!r}")


def load_experiment_configs(path) -> list[ExperimentConfig]:
    """Parse a YAML experiment file (one document per experiment).

    List-valued fields (distance, m, seed, and stiefel p) sweep: the
    document expands to the cross product, with the swept values appended
    to the experiment id.
    """
    text = Path(path).read_text(encoding="utf-8")
    configs: list[ExperimentConfig] = []
    for doc in yaml.safe_load_all(text):
        if doc is None:
            continue
        if not isinstance(doc, dict):
            raise ValueError("each YAML document must be a mapping")
        base_id = str(doc.get("experiment_id", "experiment"))
        man_spec = doc.get("manifold")
        if not isinstance(man_spec, dict):
            raise ValueError("manifold: {kind: sphere|stiefel, ...} is required")
        init = doc.get("init", {"mode": "chord"}) or {"mode": "chord"}
        methods = tuple(doc.get("methods", ("leapfrog_gs", "newton_schwarz")))

        def as_list(value):
            return value if isinstance(value, list) else [value]

        distances = [_parse_distance(v) for v in as_list(doc.get("distance"))]
        ms = [int(v) for v in as_list(doc.get("m", 4))]
        seeds = [int(v) for v in as_list(doc.get("seed", 0))]
        p_sweep = (as_list(man_spec.get("p"))
                   if man_spec.get("kind") == "stiefel" else [None])

        for pv in p_sweep:
            for distance in distances:
                for m in ms:
                    for seed in seeds:
                        suffix = ""
                        if len(p_sweep) > 1:
                            suffix += f"_p{pv}"
                        if len(distances) > 1:
                            suffix += f"_dist{distance:.6g}"
                        if len(ms) > 1:
                            suffix += f"_m{m}"
                        if len(seeds) > 1:
                            suffix += f"_seed{seed}"
                        configs.append(ExperimentConfig(
                            experiment_id=base_id + suffix,
                            manifold=_parse_manifold(man_spec, pv),
                            m=m,
                            distance=distance,
                            methods=methods,
                            seed=seed,
                            tol=(None if doc.get("tol") is None
                                 else float(doc["tol"])),
                            max_iters=(None if doc.get("max_iters") is None
                                       else int(doc["max_iters"])),
                            init_mode=str(init.get("mode", "chord")),
                            init_sigma=float(init.get("sigma", 0.0)),
                            init_seed=int(init.get("seed", 0)),
                            record_timings=bool(doc.get("record_timings", True)),
                        ))
    return configs
