"""Endpoint geodesics on embedded manifolds via Schwarz-type waypoint sweeps.

The library provides:

- geometries with the ambient metric: the unit sphere (all maps closed form)
  and the Stiefel manifold (closed-form exponential, shooting-based log),
- a generic single-shooting solver for the log map,
- the leapfrog waypoint relaxation (Gauss-Seidel and Jacobi sweeps),
- a Newton solver for the sweep's fixed-point equation with dense
  block-tridiagonal and matrix-free Krylov linear algebra,
- a benchmark runner with seeded endpoint generation and CSV output,
  exposed through the ``geo-schwarz`` command line tool.
"""

from .errors import (
    DegenerateInitialization,
    DegenerateRetraction,
    GeodesicError,
    KrylovDidNotConverge,
    NonUniqueGeodesic,
    ShootingDidNotConverge,
    SingularJacobian,
)
from .manifolds import (
    ANTIPODAL_EPS,
    Geodesic,
    Manifold,
    ManifoldPoint,
    MidpointJacobian,
    Sphere,
    Stiefel,
    TangentVector,
    connecting_geodesic,
    dist,
    geodesic_point,
    inner,
    midpoint,
    qr_positive,
)
from .shooting import ShootingConfig, ShootingResult, shoot_log, tangent_basis
from .leapfrog import (
    ConvergenceRecord,
    IterationRow,
    MidpointFailure,
    Waypoints,
    fixed_point_residual,
    gauss_seidel_sweep,
    geodesic_waypoints,
    init_waypoints,
    jacobi_sweep,
    piecewise_length,
    run_leapfrog,
)
from .newton_schwarz import (
    BlockTridiagonalJacobian,
    NewtonConfig,
    NewtonStepDiagnostics,
    apply_jacobian_fd,
    assemble_jacobian,
    newton_step,
    run_newton_schwarz,
)
from .bench import (
    CSV_COLUMNS,
    ExperimentConfig,
    ReferenceSolution,
    build_reference,
    gen_endpoint_pair,
    global_shooting_baseline,
    load_experiment_configs,
    preset_configs,
    run_experiment,
    write_record_csv,
)
from .expm import expm_batch

__version__ = "0.1.0"

__all__ = [
    "ANTIPODAL_EPS",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "ReferenceSolution",
    "build_reference",
    "gen_endpoint_pair",
    "global_shooting_baseline",
    "load_experiment_configs",
    "preset_configs",
    "run_experiment",
    "write_record_csv",
    "BlockTridiagonalJacobian",
    "ConvergenceRecord",
    "DegenerateInitialization",
    "DegenerateRetraction",
    "Geodesic",
    "GeodesicError",
    "IterationRow",
    "KrylovDidNotConverge",
    "Manifold",
    "ManifoldPoint",
    "MidpointFailure",
    "MidpointJacobian",
    "NewtonConfig",
    "NewtonStepDiagnostics",
    "NonUniqueGeodesic",
    "ShootingConfig",
    "ShootingDidNotConverge",
    "ShootingResult",
    "SingularJacobian",
    "Sphere",
    "Stiefel",
    "TangentVector",
    "Waypoints",
    "apply_jacobian_fd",
    "assemble_jacobian",
    "connecting_geodesic",
    "dist",
    "expm_batch",
    "fixed_point_residual",
    "gauss_seidel_sweep",
    "geodesic_point",
    "geodesic_waypoints",
    "init_waypoints",
    "inner",
    "jacobi_sweep",
    "midpoint",
    "newton_step",
    "piecewise_length",
    "qr_positive",
    "run_leapfrog",
    "run_newton_schwarz",
    "shoot_log",
    "tangent_basis",
]
