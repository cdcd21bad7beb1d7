"""Scalars, exact roots of unity, dense matrices and integer Laurent polynomials."""

from .laurent import LaurentPolynomial, eval_laurent
from .matrix import (
    Matrix,
    det,
    inverse,
    matrix_from_pairs,
    matrix_to_pairs,
    pivot_columns,
    rank,
    slogdet,
    slogdet_checked,
)
from .scalars import (
    DEFAULT_BITS,
    ENV_VAR,
    ComplexScalar,
    RootOfUnity,
    bits_from_env,
    close,
    get_precision,
    is_extended,
    log_magnitude,
    precision,
    primitive_root,
    set_precision,
    to_scalar,
    tolerance,
)

SquareMatrix = Matrix

__all__ = [
    "ComplexScalar",
    "DEFAULT_BITS",
    "ENV_VAR",
    "LaurentPolynomial",
    "Matrix",
    "RootOfUnity",
    "SquareMatrix",
    "bits_from_env",
    "close",
    "det",
    "eval_laurent",
    "get_precision",
    "inverse",
    "is_extended",
    "log_magnitude",
    "matrix_from_pairs",
    "matrix_to_pairs",
    "pivot_columns",
    "precision",
    "primitive_root",
    "rank",
    "set_precision",
    "slogdet",
    "slogdet_checked",
    "to_scalar",
    "tolerance",
]
