import random
from fractions import Fraction

import pytest

from exptype.algebra import (
    QQ,
    Poly,
    PrimeField,
    factor_over_finite_field,
    parse_poly,
    poly_divmod,
    prime_extension,
    rational_roots,
    splitting_field,
)
from exptype.errors import CharacteristicZero, ExptypeError


def dense(field, coeffs):
    return Poly.from_dense(field, "x", [field.coerce(c) for c in coeffs])


def test_factor_x2_minus_4_over_f3():
    f3 = PrimeField(3)
    f = dense(f3, [-4, 0, 1])
    factors = factor_over_finite_field(f, f3)
    assert sorted(g.to_dense() for g, _ in factors) == [[1, 1], [2, 1]]  # (x+1)(x+2) = (x-2)(x-1)
    assert all(m == 1 for _, m in factors)


def test_factor_x_over_f5():
    f5 = PrimeField(5)
    f = dense(f5, [0, 1])
    assert factor_over_finite_field(f, f5) == [(dense(f5, [0, 1]), 1)]


def test_factor_x3_minus_27_over_f5():
    f5 = PrimeField(5)
    f = dense(f5, [-27, 0, 0, 1])
    factors = factor_over_finite_field(f, f5)
    degrees = sorted(g.total_degree() for g, _ in factors)
    assert degrees == [1, 2]
    linear = next(g for g, _ in factors if g.total_degree() == 1)
    # root is 3 since 3^3 = 27 = 2 mod 5
    assert linear.to_dense() == [f5.from_int(-3), 1]


def test_factor_rejects_char_zero():
    with pytest.raises(CharacteristicZero):
        factor_over_finite_field(dense(QQ, [1, 1]), QQ)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_factor_roundtrip_random(p):
    field = PrimeField(p)
    rng = random.Random(p)
    for _ in range(100):
        deg = rng.randint(1, 8)
        coeffs = [field.random_rep(rng) for _ in range(deg)] + [field.one()]
        while all(field.is_zero(c) for c in coeffs[:-1]) and deg == 0:
            coeffs = [field.random_rep(rng) for _ in range(deg)] + [field.one()]
        f = dense(field, coeffs)
        product = Poly.constant(field, ("x",), field.one())
        for g, mult in factor_over_finite_field(f, field, seed=rng.randint(0, 10**6)):
            assert g.is_monic_univariate()
            product = product * g ** mult
        assert product == f


def test_factor_roundtrip_extension_field():
    f9 = prime_extension(3, [1, 0, 1])
    rng = random.Random(9)
    for _ in range(25):
        deg = rng.randint(1, 5)
        coeffs = [f9.random_rep(rng) for _ in range(deg)] + [f9.one()]
        f = dense(f9, coeffs)
        product = Poly.constant(f9, ("x",), f9.one())
        for g, mult in factor_over_finite_field(f, f9, seed=rng.randint(0, 10**6)):
            product = product * g ** mult
        assert product == f


def test_splitting_field_cases():
    f3 = PrimeField(3)
    assert splitting_field(dense(f3, [-4, 0, 1]), 3) == f3            # both roots in F_3
    ext = splitting_field(dense(f3, [1, 0, 1]), 3)                     # x^2+1 needs F_9
    assert ext.size == 9
    assert splitting_field(dense(f3, [1, 1]), 3) == f3                 # linear


def test_splitting_field_of_x3_minus_27_mod_7_is_f7():
    f7 = PrimeField(7)
    assert splitting_field(dense(f7, [-27, 0, 0, 1]), 7) == f7


def test_rational_roots_exact():
    f = dense(QQ, [-4, 0, 1])
    roots, rem = rational_roots(f)
    assert [(str(r), m) for r, m in roots] == [("-2", 1), ("2", 1)]
    assert rem.total_degree() == 0
    g = dense(QQ, [1, 0, 1])  # x^2 + 1: no rational roots
    roots, rem = rational_roots(g)
    assert roots == [] and rem.total_degree() == 2


def test_poly_divmod_and_eval():
    f5 = PrimeField(5)
    f = dense(f5, [1, 2, 3, 1])
    g = dense(f5, [2, 1])
    q, r = poly_divmod(f, g)
    assert q * g + r == f
    assert f.eval({"x": 1}) == f5.scalar(1 + 2 + 3 + 1)


def test_multivariate_arithmetic():
    f = parse_poly("z^3 + w^3", ("z", "w"), QQ)
    g = parse_poly("z - w", ("z", "w"), QQ)
    prod = f * g
    assert prod.coefficient((4, 0)) == QQ.scalar(1)
    assert prod.coefficient((3, 1)) == QQ.scalar(-1)
    dz = f.derivative("z")
    assert dz == parse_poly("3*z^2", ("z", "w"), QQ)


def test_parse_poly_rational_coefficients():
    f = parse_poly("1/2*x^2 - 3*x + 2", ("x",), QQ)
    assert f.to_dense() == [Fraction(2), Fraction(-3), Fraction(1, 2)]


def test_parse_poly_rejects_garbage():
    with pytest.raises(ExptypeError):
        parse_poly("x^", ("x",), QQ)
    with pytest.raises(ExptypeError):
        parse_poly("x + $", ("x",), QQ)
