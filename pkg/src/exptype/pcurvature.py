"""p-th powers of derivations and p-curvature along the frame catalogue.

The p-curvature F = (nabla_D)^p - nabla_{D^p} is computed by p-fold
operator composition on truncated series vectors, never by closed-form
expansion; D^p itself is re-derived by applying D p times to the
coordinate functions (a derivation in characteristic p is determined by
its values on generators).  Function-linearity of every result is
spot-checked, and nilpotency verdicts are explicitly truncation-qualified
("nilpotent to order N") while non-nilpotency is definitive via
Cayley-Hamilton.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import Field, Matrix, MatrixSeries, Poly, PrimeField, Scalar, commutator
from .connection import FormalConnection, SplittingResult
from .errors import (
    CharacteristicZero,
    CollapseNotFinite,
    DimensionMismatch,
    ExptypeError,
    MissingDegree,
    TruncationTooSmall,
)

FRAMES = ("dt", "t_dt", "t2_dt", "q_dq", "tq_dq")

_FRAME_DATA = {
    # frame -> (variables, {var: generator image as exponent dict})
    "dt": (("t",), {"t": {(0,): 1}}),
    "t_dt": (("t",), {"t": {(1,): 1}}),
    "t2_dt": (("t",), {"t": {(2,): 1}}),
    "q_dq": (("q", "t"), {"q": {(1, 0): 1}}),
    "tq_dq": (("q", "t"), {"q": {(1, 1): 1}}),
}


@dataclass(frozen=True)
class Derivation:
    frame: str

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise ExptypeError(f"unknown frame {self.frame!r}; catalogue: {FRAMES}")

    @property
    def variables(self):
        return _FRAME_DATA[self.frame][0]

    def generator_values(self, field: Field):
        """D(v) for each variable v, as polynomials over the given field."""
        variables, table = _FRAME_DATA[self.frame]
        out = {}
        for v in variables:
            terms = table.get(v, {})
            out[v] = Poly(field, variables, {e: field.from_int(c) for e, c in terms.items()})
        return out

    def t_exponent(self):
        """k with D = t^k d/dt, for the single-variable frames."""
        return {"dt": 0, "t_dt": 1, "t2_dt": 2}[self.frame]


def derivation_pth_power(d: Derivation, p: int):
    """D^p expressed by its values on the coordinate functions, mod p.

    Returns {variable: Poly over F_p}.  Computed by p-fold application of
    D, so identities like (t^2 d/dt)^p = 0 come out of the arithmetic
    rather than being assumed.
    """
    field = PrimeField(p)
    values = d.generator_values(field)
    variables = d.variables

    def apply_d(g: Poly) -> Poly:
        acc = Poly.zero(field, variables)
        for v in variables:
            acc = acc + g.derivative(v) * values[v]
        return acc

    out = {}
    for v in variables:
        g = Poly.variable(field, variables, v)
        for _ in range(p):
            g = apply_d(g)
        out[v] = g
    return out


def pth_power_multiplier(d: Derivation, p: int):
    """D^p = multiplier * D with the multiplier a monomial (or zero).

    Verified against the generic computation; every catalogue frame has
    this shape.  Returns an exponent dict {var: exp} plus a unit flag, or
    None when D^p = 0.
    """
    field = PrimeField(p)
    values = derivation_pth_power(d, p)
    base = d.generator_values(field)
    ratio = None
    for v in d.variables:
        bv, pv = base[v], values[v]
        if bv.is_zero():
            if not pv.is_zero():
                raise ExptypeError("D^p does not factor through D")
            continue
        if pv.is_zero():
            candidate = None
        else:
            (be, bc), = bv.terms.items()
            (pe, pc), = pv.terms.items()
            exps = tuple(a - b for a, b in zip(pe, be))
            if any(e < 0 for e in exps):
                raise ExptypeError("D^p / D has a pole")
            candidate = (exps, field.div(pc, bc))
        if ratio is None or ratio == candidate:
            ratio = candidate
        else:
            raise ExptypeError("inconsistent D^p ratio across generators")
    return ratio


@dataclass
class NilpotencyVerdict:
    nilpotent: bool
    index: int          # smallest e with F^e = 0 within the window (if nilpotent)
    order: int          # validity order of the verdict
    rank: int
    definitive_not: bool = False

    def __bool__(self):
        return self.nilpotent


def nilpotency_test(f_series: MatrixSeries, rank: int = None) -> NilpotencyVerdict:
    """Truncation-qualified nilpotency of a function-linear matrix series.

    Nilpotency over k((t)) forces F^rank = 0 exactly, so a nonzero F^rank
    within the window refutes nilpotency definitively; vanishing certifies
    it to the window's order only.
    """
    if f_series.nrows != f_series.ncols:
        raise DimensionMismatch("nilpotency test needs a square series")
    d = f_series.nrows if rank is None else rank
    power = f_series
    if f_series.is_zero():
        return NilpotencyVerdict(True, 1, f_series.order, d)
    for e in range(2, d + 1):
        power = power * f_series
        if power.is_zero():
            return NilpotencyVerdict(True, e, power.order, d)
    return NilpotencyVerdict(False, 0, power.order, d, definitive_not=True)


@dataclass
class PCurvatureResult:
    matrix: MatrixSeries
    frame: str
    p: int
    order: int
    linearity_checked: bool


def _apply_nabla(c: FormalConnection, t_exp: int, v: MatrixSeries) -> MatrixSeries:
    """nabla_{t^k d/dt} v = t^k v' + t^(k-2) B v, B the t^2-frame multiplier."""
    b = c.t2_frame()
    return v.derivative().shift(t_exp) + b.shift(t_exp - 2) * v


def p_curvature(c: FormalConnection, d: Derivation, p: int,
                linearity_samples: int = 3, seed: int = 0) -> PCurvatureResult:
    """F = (nabla_D)^p - nabla_{D^p} by p-fold operator composition.

    Requires characteristic p and truncation order >= p + 2.  The validity
    window shrinks by the pole consumption of the frame: none for t^2 d/dt,
    one order per application for t d/dt, two for d/dt.
    """
    f = c.field
    if f.char == 0:
        raise CharacteristicZero("p-curvature requires characteristic p")
    if f.char != p:
        raise ExptypeError(f"field characteristic {f.char} != p = {p}")
    if c.order < p + 2:
        raise TruncationTooSmall(f"order {c.order} < p + 2 = {p + 2}")
    if d.frame not in ("dt", "t_dt", "t2_dt"):
        raise ExptypeError("bigraded frames take the bigraded route")
    k = d.t_exponent()
    multiplier = pth_power_multiplier(d, p)

    def op_power(v: MatrixSeries) -> MatrixSeries:
        out = v
        for _ in range(p):
            out = _apply_nabla(c, k, out)
        return out

    def full(v: MatrixSeries) -> MatrixSeries:
        out = op_power(v)
        if multiplier is not None:
            exps, unit = multiplier
            corr = _apply_nabla(c, k, v).shift(exps[0]).scale(unit)
            out = out - corr
        return out

    n = c.rank
    columns = []
    for i in range(n):
        e_i = MatrixSeries.from_matrix(
            Matrix(f, [[f.one() if r == i else f.zero()] for r in range(n)]), c.order)
        columns.append(full(e_i))
    low = min(col.low for col in columns)
    order = min(col.order for col in columns)
    coeffs = []
    for idx in range(low, order):
        coeffs.append(Matrix(f, [[columns[j].coeff(idx).rows[i][0] for j in range(n)]
                                 for i in range(n)]))
    f_mat = MatrixSeries(f, coeffs, low=low, order=order, shape=(n, n))

    rng = random.Random(seed)
    for _ in range(linearity_samples):
        shift = rng.randint(1, 2)
        vec = MatrixSeries.from_matrix(
            Matrix(f, [[f.random_rep(rng)] for _ in range(n)]), c.order).shift(shift)
        direct = full(vec)
        via_matrix = f_mat * vec
        common = min(direct.order, via_matrix.order)
        if not (direct.truncate(common) - via_matrix.truncate(common)).is_zero():
            raise ExptypeError("p-curvature failed the function-linearity check")
    return PCurvatureResult(matrix=f_mat, frame=d.frame, p=p, order=order,
                            linearity_checked=linearity_samples > 0)


def connection_commutes(c: FormalConnection, f_series: MatrixSeries, t_exp: int = 2) -> bool:
    """[F, nabla_{t^k d/dt}] = 0 as matrix series, to the common window."""
    b = c.t2_frame().shift(t_exp - 2)
    lie = commutator(f_series, b) - f_series.derivative().shift(t_exp)
    return lie.is_zero()


@dataclass
class ShiftedBlockVerdict:
    leading_eigenvalue: Scalar   # eigenvalue of the block's A_0
    exponent: Scalar             # lambda = -leading eigenvalue (the E^{-lambda/t^2} exponent)
    rank: int
    verdict: NilpotencyVerdict


def shifted_block_pcurvature(split: SplittingResult, p: int, seed: int = 0):
    """Per-eigenvalue p-curvature shift test: F^lambda + lambda^p nilpotent.

    lambda is the exponential-type exponent (negative of the block's
    leading eigenvalue); the addition of lambda^p undoes the twist by
    E^{-lambda/t^2}.
    """
    out = []
    for a0_eig, block in zip(split.eigenvalues, split.blocks):
        f = block.field
        result = p_curvature(block, Derivation("t2_dt"), p, seed=seed)
        lam = f.neg(a0_eig.rep)
        shift = Matrix.identity(f, block.rank).scale(f.pow(lam, p))
        shifted = result.matrix + MatrixSeries.from_matrix(shift, result.matrix.order)
        out.append(ShiftedBlockVerdict(
            leading_eigenvalue=a0_eig,
            exponent=Scalar(f, lam),
            rank=block.rank,
            verdict=nilpotency_test(shifted, rank=block.rank),
        ))
    return out


# -- bigraded module and (q, t) series ----------------------------------

@dataclass(frozen=True)
class BigradedModule:
    """Free module over k[q,t] on a graded basis, truncated at (q^M, t^N).

    q and t both have degree 2; the grading shift enters through
    mu = (deg - n)/2 per basis class.
    """

    field: Field
    degrees: tuple
    dim_n: int
    q_order: int
    t_order: int

    @property
    def rank(self):
        return len(self.degrees)

    def mu_rep(self, i):
        f = self.field
        if self.degrees[i] is None:
            raise MissingDegree(f"basis class {i} has no degree")
        return f.div(f.from_int(self.degrees[i] - self.dim_n), f.from_int(2))

    def mu_matrix(self) -> Matrix:
        f = self.field
        return Matrix.diagonal(f, [self.mu_rep(i) for i in range(self.rank)])

    def deg_eigenvalue(self, i, mq, jt) -> int:
        if self.degrees[i] is None:
            raise MissingDegree(f"basis class {i} has no degree")
        return self.degrees[i] + 2 * mq + 2 * jt - self.dim_n

    def basis_vector(self, i, mq=0, jt=0) -> "BiMatrixSeries":
        f = self.field
        col = Matrix(f, [[f.one() if r == i else f.zero()] for r in range(self.rank)])
        return BiMatrixSeries(f, {(mq, jt): col}, self.q_order, self.t_order,
                              shape=(self.rank, 1))


class BiMatrixSeries:
    """Matrix coefficients indexed by (q-exponent, t-exponent), floors at zero."""

    __slots__ = ("field", "nrows", "ncols", "q_order", "t_order", "coeffs")

    def __init__(self, field, coeffs: dict, q_order: int, t_order: int, shape=None):
        self.field = field
        self.q_order = q_order
        self.t_order = t_order
        clean = {}
        for (m, j), mat in coeffs.items():
            if m < 0 or j < 0:
                raise ExptypeError("bigraded series have no negative exponents")
            if m < q_order and j < t_order and not mat.is_zero():
                clean[(m, j)] = mat
        if shape is None:
            if not clean:
                raise ExptypeError("shape needed for zero bigraded series")
            shape = next(iter(clean.values()))
            shape = (shape.nrows, shape.ncols)
        self.nrows, self.ncols = shape
        for mat in clean.values():
            if (mat.nrows, mat.ncols) != (self.nrows, self.ncols):
                raise DimensionMismatch("bigraded coefficient shapes differ")
        self.coeffs = clean

    @classmethod
    def zero(cls, field, shape, q_order, t_order):
        return cls(field, {}, q_order, t_order, shape=shape)

    @classmethod
    def from_matrix(cls, mat: Matrix, q_order, t_order):
        return cls(mat.field, {(0, 0): mat}, q_order, t_order, shape=(mat.nrows, mat.ncols))

    def coeff(self, m, j) -> Matrix:
        if m >= self.q_order or j >= self.t_order:
            raise TruncationTooSmall(f"(q^{m}, t^{j}) outside window "
                                     f"({self.q_order}, {self.t_order})")
        got = self.coeffs.get((m, j))
        return got if got is not None else Matrix.zeros(self.field, self.nrows, self.ncols)

    def window(self):
        return (self.q_order, self.t_order)

    def _check(self, other):
        if not isinstance(other, BiMatrixSeries) or other.field != self.field:
            raise ExptypeError("bigraded series mismatch")

    def _common(self, other):
        return min(self.q_order, other.q_order), min(self.t_order, other.t_order)

    def __add__(self, other):
        self._check(other)
        m_ord, t_ord = self._common(other)
        out = {}
        for key in set(self.coeffs) | set(other.coeffs):
            if key[0] < m_ord and key[1] < t_ord:
                a = self.coeffs.get(key)
                b = other.coeffs.get(key)
                out[key] = (a + b) if (a is not None and b is not None) else (a if b is None else b)
        return BiMatrixSeries(self.field, out, m_ord, t_ord, shape=(self.nrows, self.ncols))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BiMatrixSeries(self.field, {k: -v for k, v in self.coeffs.items()},
                              self.q_order, self.t_order, shape=(self.nrows, self.ncols))

    def __mul__(self, other):
        self._check(other)
        if self.ncols != other.nrows:
            raise DimensionMismatch("bigraded product shapes")
        m_ord, t_ord = self._common(other)
        out = {}
        for (m1, j1), a in self.coeffs.items():
            for (m2, j2), b in other.coeffs.items():
                key = (m1 + m2, j1 + j2)
                if key[0] >= m_ord or key[1] >= t_ord:
                    continue
                prod = a * b
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        return BiMatrixSeries(self.field, out, m_ord, t_ord, shape=(self.nrows, other.ncols))

    def scale(self, c):
        rep = self.field.coerce(c)
        return BiMatrixSeries(self.field, {k: v.scale(rep) for k, v in self.coeffs.items()},
                              self.q_order, self.t_order, shape=(self.nrows, self.ncols))

    def shift(self, dm, dj):
        out = {(m + dm, j + dj): v for (m, j), v in self.coeffs.items()
               if m + dm >= 0 and j + dj >= 0}
        return BiMatrixSeries(self.field, out, self.q_order + min(dm, 0), self.t_order + min(dj, 0),
                              shape=(self.nrows, self.ncols)) if (dm < 0 or dj < 0) else \
            BiMatrixSeries(self.field, out, self.q_order, self.t_order,
                           shape=(self.nrows, self.ncols))

    def is_zero(self):
        return not self.coeffs

    def first_nonzero(self):
        if not self.coeffs:
            return None
        key = min(self.coeffs, key=lambda k: (k[0] + k[1], k))
        mat = self.coeffs[key]
        f = self.field
        for r, row in enumerate(mat.rows):
            for c, x in enumerate(row):
                if not f.is_zero(x):
                    return key, (r, c, Scalar(f, x))
        return None

    def q0_part(self) -> MatrixSeries:
        mats = [self.coeff(0, j) for j in range(self.t_order)]
        return MatrixSeries(self.field, mats, low=0, order=self.t_order,
                            shape=(self.nrows, self.ncols))

    def t0_part(self):
        return {m: mat for (m, j), mat in self.coeffs.items() if j == 0}

    def collapse_q1(self, max_q_support: int) -> MatrixSeries:
        """Set q = 1, certified finite by an explicit q-support bound.

        ``max_q_support`` is the largest q-exponent the value can carry
        (from grading bounds); it must fit strictly inside the q-window,
        otherwise unknown coefficients could contribute.
        """
        if max_q_support >= self.q_order:
            raise CollapseNotFinite(
                f"q-support bound {max_q_support} not inside window {self.q_order}")
        for (m, j) in self.coeffs:
            if m > max_q_support:
                raise CollapseNotFinite(f"observed q^{m} beyond the declared bound")
        mats = []
        for j in range(self.t_order):
            acc = Matrix.zeros(self.field, self.nrows, self.ncols)
            for (m, jj), mat in self.coeffs.items():
                if jj == j:
                    acc = acc + mat
            mats.append(acc)
        return MatrixSeries(self.field, mats, low=0, order=self.t_order,
                            shape=(self.nrows, self.ncols))

    def __repr__(self):
        return (f"BiMatrixSeries({self.nrows}x{self.ncols}, window "
                f"(q^{self.q_order}, t^{self.t_order}), {len(self.coeffs)} terms)")


def bigraded_commutator_with_operator(op, sigma: BiMatrixSeries) -> BiMatrixSeries:
    """[sigma, op] for a k[q,t]-linear sigma and a first-order operator op.

    Computed columnwise: apply both composition orders to basis vectors.
    """
    module = op.module
    n = module.rank
    cols = []
    for i in range(n):
        e = module.basis_vector(i)
        left = _bi_apply_matrix(sigma, op.apply(e))
        right = op.apply(_bi_apply_matrix(sigma, e))
        cols.append(left - right)
    return _columns_to_bimatrix(cols, module)


def _bi_apply_matrix(mat: BiMatrixSeries, vec: BiMatrixSeries) -> BiMatrixSeries:
    return mat * vec


def _columns_to_bimatrix(cols, module) -> BiMatrixSeries:
    f = module.field
    n = module.rank
    q_ord = min(c.q_order for c in cols)
    t_ord = min(c.t_order for c in cols)
    out = {}
    for j, col in enumerate(cols):
        for (m, jt), mat in col.coeffs.items():
            if m >= q_ord or jt >= t_ord:
                continue
            if (m, jt) not in out:
                out[(m, jt)] = [[f.zero()] * n for _ in range(n)]
            for i in range(n):
                out[(m, jt)][i][j] = mat.rows[i][0]
    return BiMatrixSeries(f, {k: Matrix(f, v) for k, v in out.items()}, q_ord, t_ord,
                          shape=(n, n))


def p_curvature_bigraded(op, p: int, multiplier, seed: int = 0,
                         linearity_samples: int = 2) -> BiMatrixSeries:
    """p-curvature of a bigraded connection operator by p-fold composition.

    ``multiplier`` describes nabla_{D^p} = multiplier * nabla_D as a
    ((q-exp, t-exp), unit) pair or None; it comes from
    pth_power_multiplier, not from a closed form.
    """
    module = op.module
    f = module.field
    if f.char != p:
        raise ExptypeError("bigraded p-curvature needs matching characteristic")

    def full(v):
        out = v
        for _ in range(p):
            out = op.apply(out)
        if multiplier is not None:
            exps, unit = multiplier
            corr = op.apply(v)
            corr = BiMatrixSeries(f, {(m + exps[0], j + exps[1]): mat.scale(unit)
                                      for (m, j), mat in corr.coeffs.items()
                                      if m + exps[0] < corr.q_order and j + exps[1] < corr.t_order},
                                  corr.q_order, corr.t_order, shape=(corr.nrows, corr.ncols))
            out = out - corr
        return out

    cols = [full(module.basis_vector(i)) for i in range(module.rank)]
    f_mat = _columns_to_bimatrix(cols, module)

    rng = random.Random(seed)
    for _ in range(linearity_samples):
        i = rng.randrange(module.rank)
        mq, jt = rng.randint(0, 1), rng.randint(1, 2)
        v = module.basis_vector(i, mq, jt)
        direct = full(v)
        via = f_mat * v
        diff = direct - via
        if not diff.is_zero():
            raise ExptypeError("bigraded p-curvature failed function-linearity")
    return f_mat


@dataclass
class QTIdentityVerdict:
    holds: bool
    frame_identity_holds: bool
    q_order: int
    t_order: int
    witness: object = None

    def __bool__(self):
        return self.holds and self.frame_identity_holds


def check_q_t_identity(ring, p: int, orders, seed: int = 0) -> QTIdentityVerdict:
    """F_{t^2 d/dt} + F_{tq d/dq} = 0 on the bigraded module, entrywise.

    Also checks the frame identity nabla_{t^2 d/dt} = (t/2) Deg - nabla_{tq d/dq}
    on every basis monomial whose image stays inside the window.  Both
    p-curvatures are computed by independent operator composition.
    """
    from .quantum import build_q_connection, build_t_connection_bigraded

    m_ord, t_ord = orders
    if ring.field.char != p:
        raise ExptypeError("ring must live over a field of characteristic p")
    q_op = build_q_connection(ring, (m_ord, t_ord))
    t_op = build_t_connection_bigraded(ring, (m_ord, t_ord))
    module = q_op.module

    f_q = p_curvature_bigraded(q_op, p, pth_power_multiplier(Derivation("tq_dq"), p), seed=seed)
    f_t = p_curvature_bigraded(t_op, p, pth_power_multiplier(Derivation("t2_dt"), p), seed=seed)
    total = f_q + f_t
    holds = total.is_zero()

    frame_ok = True
    witness = None
    f = module.field
    half = f.inv(f.from_int(2))
    for i in range(module.rank):
        for mq in range(m_ord):
            for jt in range(t_ord - 1):
                v = module.basis_vector(i, mq, jt)
                lhs = t_op.apply(v)
                deg_v = v.scale(f.from_int(module.deg_eigenvalue(i, mq, jt)))
                half_t_deg = BiMatrixSeries(
                    f, {(m, j + 1): mat.scale(half) for (m, j), mat in deg_v.coeffs.items()
                        if j + 1 < t_ord},
                    m_ord, t_ord, shape=(module.rank, 1))
                rhs = half_t_deg - q_op.apply(v)
                if not (lhs - rhs).is_zero():
                    frame_ok = False
                    witness = witness or ("frame", i, mq, jt)
    if not holds:
        witness = total.first_nonzero()
    return QTIdentityVerdict(holds=holds, frame_identity_holds=frame_ok,
                             q_order=m_ord, t_order=t_ord, witness=witness)


@dataclass
class DegOperator:
    module: BigradedModule

    def eigenvalue(self, i, mq, jt) -> int:
        return self.module.deg_eigenvalue(i, mq, jt)

    def apply(self, v: BiMatrixSeries) -> BiMatrixSeries:
        f = self.module.field
        out = {}
        for (m, j), mat in v.coeffs.items():
            rows = []
            for i in range(mat.nrows):
                scale = f.from_int(self.module.deg_eigenvalue(i, m, j))
                rows.append([f.mul(x, scale) for x in mat.rows[i]])
            out[(m, j)] = Matrix(f, rows)
        return BiMatrixSeries(f, out, v.q_order, v.t_order, shape=(v.nrows, v.ncols))


def deg_operator(module: BigradedModule) -> DegOperator:
    """Total degree operator: diagonal with integer eigenvalues.

    Raising to the p-th power fixes it coefficientwise (Fermat), which is
    the fact the q/t p-curvature comparison rests on.
    """
    for i in range(module.rank):
        module.deg_eigenvalue(i, 0, 0)  # raises MissingDegree early
    return DegOperator(module)
