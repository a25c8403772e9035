"""Bertrand curves and spherical indicatrices in 3-dimensional Lie groups."""

from .bertrand import (BertrandReport, MateApparatus, arclength_map,
                       check_bertrand, geodesic_curvature_gamma,
                       mate_apparatus)
from .errors import LieBertrandError
from .expr import Expression, eval_expr, parse_expr
from .frenet import (ApparatusField, CurveSpec, Grid, apparatus_from_tangent,
                     classify, harmonic_curvature, integrate_frenet,
                     sigma_function)
from .indicatrix import IndicatrixApparatus
from .lie import LieStructure, bracket, covariant_derivative, inner
from .verify import (ResidualReport, compare, oracle_apparatus,
                     run_full_verification, verify_frame_odes)

__version__ = "0.1.0"

__all__ = [
    "ApparatusField", "BertrandReport", "CurveSpec", "Expression", "Grid",
    "IndicatrixApparatus", "LieBertrandError", "LieStructure",
    "MateApparatus", "ResidualReport", "apparatus_from_tangent",
    "arclength_map", "bracket", "check_bertrand", "classify", "compare",
    "covariant_derivative", "eval_expr", "geodesic_curvature_gamma",
    "harmonic_curvature", "inner", "integrate_frenet",
    "mate_apparatus", "oracle_apparatus", "parse_expr",
    "run_full_verification", "sigma_function", "verify_frame_odes",
]
