"""Relative differential geometry of skew ruled surfaces.

A surface is given by its distribution parameter ``delta``, conical curvature
``kappa`` and striction ``lambda = cot(sigma)`` as functions of ``u``; a
relative normalization by its support function ``q(u, v)``.
"""

from .central import (
    central_image,
    central_invariants,
    central_sphere_tests,
    darboux_ruled_surface,
    darboux_vector,
    focal_curve,
    inverse_problem,
    tchebychev_predicates,
)
from .expr import Jet3, SmoothFn1, parse
from .geom_core import (
    RuledSurface,
    euclidean_curvatures,
    frame_at,
    fundamental_forms,
    position,
    unit_normal,
)
from .normalizations import (
    NormalizationSpec,
    classify,
    make_central,
    make_euclidean,
    make_polar,
    make_product,
    make_right,
    right_image_type,
)
from .relnorm import (
    CustomSupport,
    SupportField,
    divergence_T,
    pick_invariant,
    rel_curvatures,
    relative_invariants,
    relative_normal,
    relative_normal_vector,
    scalar_curvature,
    shape_operator,
    tchebychev,
)
from .spheres import (
    build_improper_conoidal,
    build_improper_nonconoidal,
    build_proper_conoidal,
    build_proper_nonconoidal,
    constantly_linked,
    is_improper_sphere,
    is_proper_sphere,
)

__version__ = "0.1.0"
