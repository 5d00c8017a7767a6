"""Convexity geometry of planar norms and verification tools for the
kinetic selection of curl-free unit-norm vector fields."""

from .geometry import (
    BoundaryAtlas,
    Cone,
    CornerNormError,
    NormSpec,
    PlanarNorm,
    boundary_atlas,
    cone_contains,
    parse_norm_spec,
    radial_project,
    radial_symmetry,
    rot90,
    rot90_inv,
)

__version__ = "0.1.0"
