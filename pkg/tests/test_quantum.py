from fractions import Fraction

import pytest

from exptype.algebra import Matrix, PrimeField, QQ, rational_extension
from exptype.errors import (
    AssociativityFailure,
    CharPolyDoesNotSplit,
    GradingFailure,
)
from exptype.quantum import (
    build_q_connection,
    build_t_connection,
    build_t_connection_bigraded,
    cp_n_ring,
    eigendata_c1,
    mu_matrix,
    ring_from_manifest,
)


def cp1_manifest_section():
    return {
        "basis": ["1", "h"],
        "degrees": [0, 2],
        "unit": "1",
        "c1": ["0", "2"],
        "products": [
            {"x0": "h", "x1": "h", "terms": [{"q": 2, "coeffs": ["1", "0"]}]},
        ],
    }


def test_cp1_ring_from_manifest_valid():
    ring = ring_from_manifest(cp1_manifest_section(), QQ)
    assert ring.rank == 2
    assert ring.mult_vectors_q1((0, 1), (0, 1)) == (Fraction(1), Fraction(0))


def test_wrong_q_exponent_fails_grading():
    section = cp1_manifest_section()
    section["products"][0]["terms"][0]["q"] = 1  # 2+2 != 0 + 2*1
    with pytest.raises(GradingFailure):
        ring_from_manifest(section, QQ)


def test_nonassociative_table_reports_witness():
    # rank-3 even table with a deliberate associativity break
    section = {
        "basis": ["1", "a", "b"],
        "degrees": [0, 2, 4],
        "unit": "1",
        "c1": ["0", "1", "0"],
        "products": [
            {"x0": "a", "x1": "a", "terms": [{"q": 0, "coeffs": ["0", "0", "1"]}]},
            {"x0": "a", "x1": "b", "terms": [{"q": 3, "coeffs": ["1", "0", "0"]}]},
            # graded (4+4 = 2+2*3) but breaks (a*a)*b = a*(a*b)
            {"x0": "b", "x1": "b", "terms": [{"q": 3, "coeffs": ["0", "2", "0"]}]},
        ],
    }
    with pytest.raises(AssociativityFailure) as exc:
        ring_from_manifest(section, QQ)
    assert len(exc.value.witness) == 3


def test_cp_n_ring_basics():
    for n in (1, 2, 3):
        ring = cp_n_ring(n, QQ)
        e = ring.unit_vector()
        for j in range(ring.rank):
            basis_vec = tuple(QQ.one() if k == j else QQ.zero() for k in range(ring.rank))
            assert ring.mult_vectors_q1(e, basis_vec) == basis_vec


def test_cp1_c1_matrix_and_charpoly():
    ring = cp_n_ring(1, QQ)
    m = ring.mult_matrix_q1(ring.c1)
    assert m == Matrix(QQ, [[0, 2], [2, 0]])
    ring2 = cp_n_ring(2, QQ)
    m2 = ring2.mult_matrix_q1(ring2.c1)
    assert m2.char_poly().to_dense() == [Fraction(-27), 0, 0, Fraction(1)]


def test_mu_matrix_half_integers():
    ring = cp_n_ring(1, QQ)
    assert mu_matrix(ring) == Matrix(QQ, [[Fraction(-1, 2), 0], [0, Fraction(1, 2)]])


def test_build_t_connection_cp1():
    ring = cp_n_ring(1, QQ)
    c = build_t_connection(ring, 8)
    assert c.coeffs[0] == Matrix(QQ, [[0, -2], [-2, 0]])
    assert c.coeffs[1] == Matrix(QQ, [[Fraction(-1, 2), 0], [0, Fraction(1, 2)]])
    assert all(c.coeffs[i].is_zero() for i in range(2, 8))


def test_c1_zero_ring_gives_pure_simple_pole():
    section = {
        "basis": ["1"],
        "degrees": [0],
        "unit": "1",
        "c1": ["0"],
        "dimension": 1,
        "products": [],
    }
    ring = ring_from_manifest(section, QQ)
    c = build_t_connection(ring, 6)
    assert c.coeffs[0].is_zero()
    assert not c.coeffs[1].is_zero()  # mu = -1/2 on the unit


def test_q_connection_values_cp1():
    f3 = PrimeField(3)
    ring = cp_n_ring(1, f3)
    op = build_q_connection(ring, (6, 6))
    v = op.module.basis_vector(1)  # h at q^0 t^0
    image = op.apply(v)
    # c1 * h = 2 q^2 * 1
    assert image.coeff(2, 0) == Matrix(f3, [[2], [0]])
    unit = op.module.basis_vector(0)
    image_u = op.apply(unit)
    assert image_u.coeff(0, 0) == Matrix(f3, [[0], [2]])  # c1 itself


def test_eigendata_cp1_over_q():
    ring = cp_n_ring(1, QQ)
    data = eigendata_c1(ring)
    assert [str(l) for l in data.eigenvalues] == ["-2", "2"]
    half = Fraction(1, 2)
    lookup = {str(l): e for l, e in zip(data.eigenvalues, data.idempotents)}
    assert lookup["2"] == (half, half)     # (1 + h)/2
    assert lookup["-2"] == (half, -half)   # (1 - h)/2


def test_eigendata_cp1_mod_3():
    f3 = PrimeField(3)
    ring = cp_n_ring(1, f3)
    data = eigendata_c1(ring)
    lookup = {l.rep: e for l, e in zip(data.eigenvalues, data.idempotents)}
    assert lookup[2] == (2, 2)   # (1+h)/2 = 2 + 2h mod 3
    assert lookup[1] == (2, 1)   # (1-h)/2 = 2 + h mod 3


def test_eigendata_toy_nilpotent_c1():
    section = {
        "basis": ["1"],
        "degrees": [0],
        "unit": "1",
        "c1": ["0"],
        "products": [],
    }
    ring = ring_from_manifest(section, QQ)
    data = eigendata_c1(ring)
    assert len(data.eigenvalues) == 1 and data.eigenvalues[0].is_zero()
    assert data.idempotents[0] == (Fraction(1),)


def test_eigendata_cp2_needs_extension():
    ring = cp_n_ring(2, QQ)
    with pytest.raises(CharPolyDoesNotSplit):
        eigendata_c1(ring)
    omega_field = rational_extension([1, 1, 1])
    ring_w = cp_n_ring(2, omega_field)
    w = omega_field.generator()
    hints = [omega_field.scalar(3), w * 3, w * w * 3]
    data = eigendata_c1(ring_w, hints=hints)
    assert len(data.eigenvalues) == 3


def test_cp2_eigendata_over_f7():
    f7 = PrimeField(7)
    ring = cp_n_ring(2, f7)
    data = eigendata_c1(ring)
    assert sorted(l.rep for l in data.eigenvalues) == [3, 5, 6]


def test_bigraded_t_connection_restricts_to_q1():
    f5 = PrimeField(5)
    ring = cp_n_ring(1, f5)
    op = build_t_connection_bigraded(ring, (8, 8))
    conn = build_t_connection(ring, 8)
    # applying the bigraded operator to a q^0 t^0 basis vector and collapsing q
    # matches t^2 d/dt + B(t) applied at q=1
    for i in range(2):
        v = op.module.basis_vector(i)
        image = op.apply(v)
        collapsed = image.collapse_q1(max_q_support=4)
        b = conn.t2_frame()
        e_i = Matrix(f5, [[f5.one() if r == i else f5.zero()] for r in range(2)])
        from exptype.algebra import MatrixSeries

        direct = b * MatrixSeries.from_matrix(e_i, 8)
        common = min(collapsed.order, direct.order)
        assert (collapsed.truncate(common) - direct.truncate(common)).is_zero()
