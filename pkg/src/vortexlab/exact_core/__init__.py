"""Exact scalars, Laurent polynomials, rational functions and linear algebra."""

from .integrate import Obstruction, rational_antiderivative, solve_first_order
from .linalg import (Inconsistency, LinearSolution, cofactor_det, fraction_free_det,
                     fraction_free_pfaffian, solve_linear)
from .poly import (InexactDivision, Poly, TagMismatch, poly_gcd, poly_xgcd,
                   squarefree_decomposition, squarefree_part)
from .ratfunc import RationalFunction, as_rational, log_diff_poly
from .scalar import (I, GaussianRational, Scalar, as_scalar, conjugate, format_scalar, gaussian,
                     imag_part, is_real, parse_scalar, real_part, scalar_from_json, scalar_to_json, to_mp)

__all__ = [
    "GaussianRational", "I", "Inconsistency", "InexactDivision", "LinearSolution", "Obstruction",
    "Poly", "RationalFunction", "Scalar", "TagMismatch", "as_rational", "as_scalar", "cofactor_det",
    "conjugate", "format_scalar", "fraction_free_det", "fraction_free_pfaffian", "gaussian",
    "imag_part", "is_real", "log_diff_poly", "parse_scalar", "poly_gcd", "poly_xgcd",
    "rational_antiderivative", "real_part", "scalar_from_json", "scalar_to_json", "solve_first_order",
    "solve_linear", "squarefree_decomposition", "squarefree_part", "to_mp",
]
