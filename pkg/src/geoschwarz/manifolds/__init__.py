from .base import (
    Geodesic,
    Manifold,
    ManifoldPoint,
    TangentVector,
    connecting_geodesic,
    dist,
    geodesic_point,
    inner,
    midpoint,
)
from .sphere import ANTIPODAL_EPS, MidpointJacobian, Sphere
from .stiefel import Stiefel, qr_positive

__all__ = [
    "Geodesic",
    "Manifold",
    "ManifoldPoint",
    "TangentVector",
    "connecting_geodesic",
    "dist",
    "geodesic_point",
    "inner",
    "midpoint",
    "ANTIPODAL_EPS",
    "MidpointJacobian",
    "Sphere",
    "Stiefel",
    "qr_positive",
]
