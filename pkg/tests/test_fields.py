import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from exptype.algebra import (
    QQ,
    PrimeField,
    Scalar,
    check_generator_image,
    prime_extension,
    rational_extension,
    reduce_mod_p,
)
from exptype.errors import DenominatorDivisibleByP, ExptypeError, IrreducibilityUnverified


FIELDS = [
    QQ,
    PrimeField(3),
    PrimeField(7),
    prime_extension(3, [1, 0, 1]),       # F_9 = F_3[i]
    prime_extension(5, [3, 3, 1]),       # F_25
    rational_extension([1, 1, 1]),       # Q(omega), omega^2+omega+1=0
    rational_extension([-2, 0, 1]),      # Q(sqrt 2)
]


@pytest.mark.parametrize("field", FIELDS, ids=repr)
@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_field_axioms(field, data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    a = Scalar(field, field.random_rep(rng))
    b = Scalar(field, field.random_rep(rng))
    c = Scalar(field, field.random_rep(rng))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert a + field.scalar(0) == a
    assert a * field.scalar(1) == a
    assert (a - a).is_zero()
    if not b.is_zero():
        assert (b * b.inverse()) == field.scalar(1)
        assert (a / b) * b == a


def test_prime_field_requires_odd_prime():
    with pytest.raises(ExptypeError):
        PrimeField(2)
    with pytest.raises(ExptypeError):
        PrimeField(9)


def test_extension_requires_monic_irreducible():
    with pytest.raises(ExptypeError):
        prime_extension(3, [2, 0, 2])  # not monic
    with pytest.raises(ExptypeError):
        prime_extension(3, [2, 0, 1])  # x^2 - 1 = (x-1)(x+1)
    with pytest.raises((ExptypeError, IrreducibilityUnverified)):
        rational_extension([-1, 0, 1])  # x^2 - 1 has rational roots
    with pytest.raises(ExptypeError):
        rational_extension([Fraction(1, 2)])  # degree 0


def test_no_extension_towers():
    f9 = prime_extension(3, [1, 0, 1])
    from exptype.algebra import ExtensionField

    with pytest.raises(ExptypeError):
        ExtensionField(f9, [f9.one(), f9.one()])


def test_extension_arithmetic_known_values():
    f9 = prime_extension(3, [1, 0, 1])
    i = f9.generator()
    assert i * i == f9.scalar(-1)
    assert (i + 1) * (i - 1) == i * i - 1
    omega_field = rational_extension([1, 1, 1])
    w = omega_field.generator()
    assert w * w + w + 1 == omega_field.scalar(0)
    assert w ** 3 == omega_field.scalar(1)
    assert (1 / w) == w * w  # w^-1 = w^2


def test_reduce_mod_p_values():
    f5 = PrimeField(5)
    assert reduce_mod_p(QQ.scalar(Fraction(3, 2)), f5) == f5.scalar(4)
    with pytest.raises(DenominatorDivisibleByP):
        reduce_mod_p(QQ.scalar(Fraction(1, 5)), f5)


@given(
    nums=st.tuples(st.integers(-40, 40), st.integers(-40, 40)),
    dens=st.tuples(st.integers(1, 30), st.integers(1, 30)),
)
@settings(max_examples=60, deadline=None)
def test_reduce_mod_p_is_ring_hom(nums, dens):
    f7 = PrimeField(7)
    try:
        a = QQ.scalar(Fraction(nums[0], dens[0]))
        b = QQ.scalar(Fraction(nums[1], dens[1]))
        ra = reduce_mod_p(a, f7)
        rb = reduce_mod_p(b, f7)
        assert reduce_mod_p(a + b, f7) == ra + rb
        assert reduce_mod_p(a * b, f7) == ra * rb
    except DenominatorDivisibleByP:
        pass


def test_reduce_extension_element_needs_generator_image():
    omega_field = rational_extension([1, 1, 1])
    w = omega_field.generator()
    f7 = PrimeField(7)
    with pytest.raises(ExptypeError):
        reduce_mod_p(w, f7)
    # x^2+x+1 has roots 2 and 4 mod 7
    assert check_generator_image(omega_field, f7, 2)
    assert check_generator_image(omega_field, f7, 4)
    assert not check_generator_image(omega_field, f7, 3)
    img = reduce_mod_p(w, f7, generator_image=2)
    assert img == f7.scalar(2)
    assert reduce_mod_p(w * w + w, f7, generator_image=2) == f7.scalar(-1)


def test_scalar_sort_keys_are_total():
    f9 = prime_extension(3, [1, 0, 1])
    rng = random.Random(0)
    reps = [f9.random_rep(rng) for _ in range(10)]
    keys = sorted(f9.sort_key(r) for r in reps)
    assert keys == sorted(keys)


def test_reduce_matrix_entrywise():
    from exptype.algebra import Matrix

    f7 = PrimeField(7)
    m = Matrix(QQ, [[0, 2], [2, 0]])
    assert reduce_mod_p(m, f7) == Matrix(f7, [[0, 2], [2, 0]])


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_reduce_mod_p_commutes_with_matrix_products(seed):
    from exptype.algebra import Matrix

    rng = random.Random(seed)
    f7 = PrimeField(7)
    def rand_matrix():
        return Matrix(QQ, [[Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3, 4, 5, 6, 8, 9]))
                            for _ in range(2)] for _ in range(2)])
    a, b = rand_matrix(), rand_matrix()
    try:
        ra = reduce_mod_p(a, f7)
        rb = reduce_mod_p(b, f7)
        assert reduce_mod_p(a * b, f7) == ra * rb
        assert reduce_mod_p(a + b, f7) == ra + rb
    except DenominatorDivisibleByP:
        pass
