"""Exact scalars, polynomials, truncated series, and dense linear algebra."""

from fractions import Fraction

from ..errors import ExptypeError
from .fields import (
    ExtensionField,
    Field,
    PrimeField,
    QQ,
    RationalField,
    Scalar,
    check_generator_image,
    is_prime,
    parse_scalar,
    prime_extension,
    rational_extension,
    reduce_rep,
)
from .matrix import (
    Matrix,
    MatrixSeries,
    commutator,
    eigenvalues,
    generalized_eigenspaces,
    solve_linear,
    spectral_projectors,
)
from .poly import (
    Poly,
    char_zero_roots,
    factor_over_finite_field,
    find_irreducible,
    parse_poly,
    poly_divmod,
    poly_gcd,
    rational_roots,
    roots_over_finite_field,
    splitting_field,
)
from .series import TruncSeries


def char_poly(m: Matrix, var="x") -> Poly:
    """Monic characteristic polynomial of a square matrix."""
    return m.char_poly(var=var)


def reduce_mod_p(x, target: Field, generator_image=None):
    """Reduce a characteristic-zero value (scalar, poly, matrix, series) mod p.

    Ring-homomorphic entrywise reduction.  ``generator_image`` maps the
    source extension generator to a root of the reduced minimal polynomial
    in the target; it is only needed when extension coordinates actually
    appear.
    """
    if isinstance(x, Scalar):
        return Scalar(target, reduce_rep(x.field, x.rep, target, generator_image))
    if isinstance(x, Fraction) or isinstance(x, int):
        return Scalar(target, target.from_fraction(Fraction(x)))
    if isinstance(x, Poly):
        return x.map_coefficients(target, lambda c: reduce_rep(x.field, c, target, generator_image))
    if isinstance(x, Matrix):
        return x.map_entries(target, lambda c: reduce_rep(x.field, c, target, generator_image))
    if isinstance(x, (TruncSeries, MatrixSeries)):
        return x.map_entries(target, lambda c: reduce_rep(x.field, c, target, generator_image)) \
            if isinstance(x, MatrixSeries) else \
            x.map_coefficients(target, lambda c: reduce_rep(x.field, c, target, generator_image))
    raise ExptypeError(f"cannot reduce object of type {type(x).__name__}")
