"""Ends, residual domains and classification of triangulated surfaces."""
from .core import (
    SurfaceComplex,
    SurfaceError,
    Subcomplex,
    Region,
    barycentric_subdivision,
    boundary_components,
    euler_characteristic,
    genus,
    validate_surface,
)
from .exhaustion import ExhaustionStream, EndTree, end_tree, ends, end_is_planar, validate_exhaustion
from .residual import (
    canonical_exhaustion,
    check_end_bound,
    c18_decide,
    domain_ends,
    frontier_components,
    residual_domains,
    verify_canonical,
)
from .classify import ClassificationSignature, double, generate_model, homeomorphic, signature
from .dynamics import SimplicialAutomorphism, induced_end_map, verify_p51

__all__ = [name for name in dir() if not name.startswith("_")]
