import pytest

from exptype.algebra import Matrix, MatrixSeries, PrimeField, QQ
from exptype.connection import direct_sum, elementary_split, euler
from exptype.errors import CharacteristicZero, TruncationTooSmall
from exptype.pcurvature import (
    BigradedModule,
    Derivation,
    check_q_t_identity,
    connection_commutes,
    deg_operator,
    derivation_pth_power,
    nilpotency_test,
    p_curvature,
    pth_power_multiplier,
    shifted_block_pcurvature,
)
from exptype.quantum import build_t_connection, cp_n_ring


@pytest.mark.parametrize("p", [3, 5, 7])
def test_derivation_pth_powers(p):
    f = PrimeField(p)
    # (t d/dt)^p = t d/dt
    vals = derivation_pth_power(Derivation("t_dt"), p)
    assert vals["t"].terms == {(1,): 1}
    # (t^2 d/dt)^p = 0
    vals = derivation_pth_power(Derivation("t2_dt"), p)
    assert vals["t"].is_zero()
    # (d/dt)^p = 0
    vals = derivation_pth_power(Derivation("dt"), p)
    assert vals["t"].is_zero()
    # (tq d/dq)^p = t^(p-1) * (tq d/dq)
    vals = derivation_pth_power(Derivation("tq_dq"), p)
    assert vals["q"].terms == {(1, p): 1}
    assert vals["t"].is_zero()
    mult = pth_power_multiplier(Derivation("tq_dq"), p)
    assert mult == ((0, p - 1), 1)
    assert pth_power_multiplier(Derivation("t2_dt"), p) is None
    assert pth_power_multiplier(Derivation("t_dt"), p) == ((0,), 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("lam", [1, 2, 3])
def test_euler_p_curvature_exact(p, lam):
    f = PrimeField(p)
    c = euler(f, lam, order=p + 4)
    result = p_curvature(c, Derivation("t2_dt"), p)
    expected = MatrixSeries.from_matrix(
        Matrix(f, [[f.neg(f.pow(f.from_int(lam), p))]]), result.matrix.order)
    assert (result.matrix - expected).is_zero()
    assert result.linearity_checked


def test_trivial_connection_zero_curvature():
    f5 = PrimeField(5)
    c = euler(f5, 0, order=9, rank=2)
    for frame in ("t2_dt", "t_dt"):
        result = p_curvature(c, Derivation(frame), 5)
        assert result.matrix.is_zero()


def test_p_curvature_rejects_char_zero_and_small_order():
    c = euler(QQ, 1, order=9)
    with pytest.raises(CharacteristicZero):
        p_curvature(c, Derivation("t2_dt"), 5)
    f5 = PrimeField(5)
    with pytest.raises(TruncationTooSmall):
        p_curvature(euler(f5, 1, order=5), Derivation("t2_dt"), 5)


def test_cp1_full_curvature_block_structure():
    f3 = PrimeField(3)
    c = build_t_connection(cp_n_ring(1, f3), 12)
    result = p_curvature(c, Derivation("t2_dt"), 3)
    # F restricted to each split block is -lambda^p + nilpotent (rank 1: exact)
    split = elementary_split(c)
    gauged_f = split.gauge.inverse_series() * result.matrix * split.gauge.series
    for (off, size), a0_eig in zip(split.offsets, split.eigenvalues):
        lam = f3.neg(a0_eig.rep)  # exponential-type eigenvalue
        block_entry = gauged_f.entry(off, off)
        expected = f3.neg(f3.pow(lam, 3))
        assert block_entry.coeff(0) == expected
        assert all(f3.is_zero(block_entry.coeff(k)) for k in range(1, block_entry.order))


def test_p_curvature_commutes_with_connection():
    f5 = PrimeField(5)
    c = build_t_connection(cp_n_ring(1, f5), 12)
    result = p_curvature(c, Derivation("t2_dt"), 5)
    assert connection_commutes(c, result.matrix)


def test_nilpotency_verdicts():
    f5 = PrimeField(5)
    zero = MatrixSeries.from_matrix(Matrix.zeros(f5, 2), 8)
    v = nilpotency_test(zero)
    assert v.nilpotent and v.index == 1
    scalar = MatrixSeries.from_matrix(Matrix.identity(f5, 2).scale(3), 8)
    v = nilpotency_test(scalar)
    assert not v.nilpotent and v.definitive_not
    jordan = MatrixSeries.from_matrix(Matrix(f5, [[0, 1], [0, 0]]), 8)
    v = nilpotency_test(jordan)
    assert v.nilpotent and v.index == 2


def test_shifted_euler_block_is_exactly_zero():
    f7 = PrimeField(7)
    c = euler(f7, 4, order=11)
    split = elementary_split(c)
    verdicts = shifted_block_pcurvature(split, 7)
    assert len(verdicts) == 1
    assert verdicts[0].exponent == f7.scalar(4)
    assert verdicts[0].verdict.nilpotent and verdicts[0].verdict.index == 1


@pytest.mark.parametrize("p", [3, 5])
def test_cp1_shifted_blocks_nilpotent(p):
    f = PrimeField(p)
    c = build_t_connection(cp_n_ring(1, f), 2 * p + 4)
    split = elementary_split(c)
    for verdict in shifted_block_pcurvature(split, p):
        assert verdict.verdict.nilpotent
        assert verdict.verdict.index <= verdict.rank


def test_direct_sum_curvature_is_blockwise():
    f5 = PrimeField(5)
    c = direct_sum(euler(f5, 1, order=9), euler(f5, 2, order=9))
    result = p_curvature(c, Derivation("t2_dt"), 5)
    expected = Matrix.diagonal(f5, [f5.neg(f5.pow(f5.from_int(1), 5)),
                                    f5.neg(f5.pow(f5.from_int(2), 5))])
    assert (result.matrix - MatrixSeries.from_matrix(expected, result.matrix.order)).is_zero()


def test_deg_operator_examples():
    f5 = PrimeField(5)
    module = BigradedModule(field=f5, degrees=(0, 2), dim_n=1, q_order=6, t_order=6)
    deg = deg_operator(module)
    assert deg.eigenvalue(0, 0, 0) == -1   # the unit: 2*(0+0-1/2)
    assert deg.eigenvalue(1, 0, 1) == 3    # h * t
    assert deg.eigenvalue(0, 1, 0) == 1    # q * 1
    v = module.basis_vector(0)
    assert deg.apply(v).coeff(0, 0) == Matrix(f5, [[-1], [0]])


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2])
def test_q_t_identity_cp_n(p, n):
    f = PrimeField(p)
    ring = cp_n_ring(n, f)
    verdict = check_q_t_identity(ring, p, (2 * p + 2, 2 * p + 4))
    assert verdict.holds, verdict.witness
    assert verdict.frame_identity_holds


def test_q_t_identity_classical_limit():
    # truncating the q-window to 1 keeps only the classical terms; the
    # identity still holds degreewise
    f3 = PrimeField(3)
    ring = cp_n_ring(1, f3)
    verdict = check_q_t_identity(ring, 3, (1, 8))
    assert verdict.holds


def test_covariantly_constant_endomorphism_is_block_diagonal():
    # the p-curvature commutes with the connection, so conjugating it into
    # the splitting basis must leave it block diagonal (functoriality)
    f5 = PrimeField(5)
    from exptype.quantum import build_t_connection as btc

    c = btc(cp_n_ring(1, f5), 12)
    split = elementary_split(c)
    result = p_curvature(c, Derivation("t2_dt"), 5)
    gauged = split.gauge.inverse_series() * result.matrix * split.gauge.series
    for k in range(gauged.low, gauged.order):
        mat = gauged.coeff(k)
        assert f5.is_zero(mat.rows[0][1]) and f5.is_zero(mat.rows[1][0])


def test_deg_operator_missing_degree():
    from exptype.errors import MissingDegree

    f5 = PrimeField(5)
    module = BigradedModule(field=f5, degrees=(0, None), dim_n=1, q_order=4, t_order=4)
    with pytest.raises(MissingDegree):
        deg_operator(module)


def test_collapse_requires_certified_bound():
    from exptype.errors import CollapseNotFinite
    from exptype.pcurvature import BiMatrixSeries

    f5 = PrimeField(5)
    op = BiMatrixSeries.from_matrix(Matrix.identity(f5, 2), 4, 4)
    with pytest.raises(CollapseNotFinite):
        op.collapse_q1(max_q_support=4)  # bound not inside the window
    assert op.collapse_q1(max_q_support=3).coeff(0) == Matrix.identity(f5, 2)


def test_frobenius_linearity_across_frames():
    # F_{g D} = g^p F_D: the t^2 d/dt curvature is t^p times the t d/dt one
    f3 = PrimeField(3)
    c = build_t_connection(cp_n_ring(1, f3), 14)
    f_t2 = p_curvature(c, Derivation("t2_dt"), 3).matrix
    f_t1 = p_curvature(c, Derivation("t_dt"), 3).matrix
    shifted = f_t1.shift(3)
    common = min(f_t2.order, shifted.order)
    assert (f_t2.truncate(common) - shifted.truncate(common)).is_zero()


def test_euler_oracle_over_extension_field():
    # lambda the F_9 generator: F = -lambda^p id with lambda^p the Frobenius image
    from exptype.algebra import prime_extension

    f9 = prime_extension(3, [1, 0, 1])
    lam = f9.generator().rep
    c = euler(f9, lam, order=9)
    result = p_curvature(c, Derivation("t2_dt"), 3)
    expected = Matrix(f9, [[f9.neg(f9.pow(lam, 3))]])
    assert (result.matrix - MatrixSeries.from_matrix(expected, result.matrix.order)).is_zero()
    assert f9.eq(f9.pow(lam, 3), f9.neg(lam))  # i^3 = -i, so the shift moves


def test_cp1_pipeline_over_f9():
    from exptype.algebra import prime_extension
    from exptype.connection import elementary_split

    f9 = prime_extension(3, [1, 0, 1])
    ring = cp_n_ring(1, f9)
    c = build_t_connection(ring, 12)
    split = elementary_split(c)
    for verdict in shifted_block_pcurvature(split, 3):
        assert verdict.verdict.nilpotent and verdict.verdict.index == 1
