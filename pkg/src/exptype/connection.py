"""Formal connections with quadratic poles on free modules over k[[t]].

A connection is stored in the d/dt frame as the coefficient list of

    nabla = d/dt + A_0/t^2 + A_1/t + A_2 + A_3 t + ...

with coefficients known for indices below the truncation order.  The list
doubles as the polynomial part of the t^2 d/dt frame multiplier
B(t) = sum A_i t^i, which is where most computations happen.

The splitting machinery follows the inductive scheme: a gauge id + T_r t^r
with T_r off-block-diagonal removes the off-diagonal part of the order-r
coefficient, and the obstruction operator (lam - lam') + nilpotents is
inverted by a finite Neumann series.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import (
    Field,
    Matrix,
    MatrixSeries,
    Scalar,
    commutator,
    eigenvalues as matrix_eigenvalues,
    generalized_eigenspaces,
    spectral_projectors,
)
from .errors import (
    DimensionMismatch,
    EigenvalueDifferenceNotInvertible,
    ExptypeError,
    LeadingNotSingleEigenvalue,
    SameEigenvalue,
    TruncationTooSmall,
)


@dataclass(frozen=True)
class FormalConnection:
    field: Field
    rank: int
    coeffs: tuple  # Matrix A_0, A_1, ..., A_{order-1}
    order: int

    def __post_init__(self):
        if self.rank < 1:
            raise ExptypeError("connection rank must be positive")
        if self.order < 2:
            raise TruncationTooSmall("order below 2 cannot express a quadratic pole")
        if len(self.coeffs) != self.order:
            raise ExptypeError("coefficient count must equal the truncation order")
        for m in self.coeffs:
            if m.nrows != self.rank or m.ncols != self.rank or m.field != self.field:
                raise DimensionMismatch("connection coefficient shape/field mismatch")

    @classmethod
    def build(cls, field, coeffs, order=None):
        mats = [c if isinstance(c, Matrix) else Matrix(field, c) for c in coeffs]
        rank = mats[0].nrows
        order = len(mats) if order is None else order
        while len(mats) < order:
            mats.append(Matrix.zeros(field, rank))
        return cls(field, rank, tuple(mats[:order]), order)

    def leading(self) -> Matrix:
        return self.coeffs[0]

    def t2_frame(self) -> MatrixSeries:
        """Multiplier series B(t) with nabla_{t^2 d/dt} = t^2 d/dt + B."""
        return MatrixSeries(self.field, list(self.coeffs), low=0, order=self.order)

    def matrix_series(self) -> MatrixSeries:
        """The pole-bearing matrix A(t) = B(t)/t^2."""
        return self.t2_frame().shift(-2)

    def truncate(self, new_order):
        if new_order > self.order:
            raise TruncationTooSmall("cannot extend a connection's validity")
        return FormalConnection(self.field, self.rank, self.coeffs[:new_order], new_order)

    def map_entries(self, target_field, fn):
        return FormalConnection(
            target_field,
            self.rank,
            tuple(m.map_entries(target_field, fn) for m in self.coeffs),
            self.order,
        )

    def reduce(self, target_field, generator_image=None):
        """Entrywise reduction mod p of a characteristic-zero connection."""
        from .algebra import reduce_rep

        return self.map_entries(
            target_field, lambda c: reduce_rep(self.field, c, target_field, generator_image))

    def __eq__(self, other):
        return (
            isinstance(other, FormalConnection)
            and self.field == other.field
            and self.rank == other.rank
            and self.order == other.order
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )


def euler(field, lam, order, rank=1, nilpotent=None):
    """The connection d/dt - lam/t^2 (optionally with a nilpotent summand)."""
    a0 = Matrix.identity(field, rank).scale(field.neg(field.coerce(lam)))
    if nilpotent is not None:
        a0 = a0 + nilpotent
    return FormalConnection.build(field, [a0], order=order)


def direct_sum(*connections):
    field = connections[0].field
    order = min(c.order for c in connections)
    rank = sum(c.rank for c in connections)
    coeffs = []
    for i in range(order):
        rows = []
        offset = 0
        blocks = [c.coeffs[i] for c in connections]
        for b in blocks:
            for r in range(b.nrows):
                row = [field.zero()] * rank
                for cidx in range(b.ncols):
                    row[offset + cidx] = b.rows[r][cidx]
                rows.append(row)
            offset += b.nrows
        coeffs.append(Matrix(field, rows))
    return FormalConnection.build(field, coeffs, order=order)


class GaugeTransform:
    """Invertible matrix series P (P(0) invertible); inverse cached lazily."""

    def __init__(self, series: MatrixSeries):
        if series.low < 0:
            for k in range(series.low, 0):
                if not series.coeff(k).is_zero():
                    raise ExptypeError("gauge transforms have no pole part")
        if series.low != 0:
            series = MatrixSeries(series.field, [series.coeff(k) for k in range(0, series.order)],
                                  low=0, order=series.order, var=series.var,
                                  shape=(series.nrows, series.ncols))
        self.series = series
        series.coeff(0).inverse()  # raises if the constant term is singular
        self._inverse = None

    @classmethod
    def identity(cls, field, n, order):
        return cls(MatrixSeries.identity(field, n, order))

    @classmethod
    def from_matrices(cls, field, mats, order=None):
        mats = [m if isinstance(m, Matrix) else Matrix(field, m) for m in mats]
        return cls(MatrixSeries(field, mats, low=0, order=order or len(mats)))

    def inverse_series(self) -> MatrixSeries:
        if self._inverse is None:
            self._inverse = self.series.inverse()
        return self._inverse

    def then(self, other: "GaugeTransform") -> "GaugeTransform":
        """Composite gauge: apply self first, then other."""
        return GaugeTransform(self.series * other.series)


def gauge_apply(c: FormalConnection, g: GaugeTransform) -> FormalConnection:
    """Conjugate the connection operator by the basis change v = P w.

    The matrix transforms to P^-1 A P + P^-1 dP/dt, so that endomorphisms
    transform by plain conjugation and commutation with the connection
    operator is preserved.  Composition: gauging by g then h equals
    gauging by g.then(h).
    """
    p = g.series
    if p.nrows != c.rank:
        raise DimensionMismatch("gauge size does not match connection rank")
    pinv = g.inverse_series()
    b = c.t2_frame()
    t2dp = p.derivative().shift(2)  # t^2 dP/dt
    new_b = pinv * (b * p + t2dp)
    order = min(new_b.order, c.order)
    coeffs = [new_b.coeff(k) for k in range(order)]
    return FormalConnection.build(c.field, coeffs, order=order)


def _solve_shifted_sylvester(field, c_rep, n_left: Matrix, n_right: Matrix, rhs: Matrix) -> Matrix:
    """Solve c*X + n_left*X - X*n_right = rhs with c invertible, n_* nilpotent.

    Finite Neumann series: X = sum_j (-1/c)^(j+1) * (-L)^j ... terminates
    because L(X) = n_left X - X n_right is nilpotent.
    """
    if field.is_zero(c_rep):
        raise EigenvalueDifferenceNotInvertible("zero eigenvalue difference")
    c_inv = field.inv(c_rep)
    term = rhs.scale(c_inv)
    acc = term
    cap = 2 * (n_left.nrows + n_right.nrows) + 2
    for _ in range(cap):
        term = (n_left * term - term * n_right).scale(field.neg(c_inv))
        if term.is_zero():
            return acc
        acc = acc + term
    raise ExptypeError("Neumann series failed to terminate; operands not nilpotent")


def solve_block_sylvester(a0: Matrix, block_layout, r_mat: Matrix) -> Matrix:
    """Off-block-diagonal T with off-diagonal of R + [A_0, T] vanishing.

    ``block_layout`` is a list of (eigenvalue rep, offset, size) covering the
    basis; a0 must be block diagonal in that layout.
    """
    f = a0.field
    n = a0.nrows
    t_rows = [[f.zero()] * n for _ in range(n)]
    for (lam_i, off_i, size_i) in block_layout:
        for (lam_j, off_j, size_j) in block_layout:
            if f.eq(lam_i, lam_j):
                continue
            rows_i = range(off_i, off_i + size_i)
            cols_j = range(off_j, off_j + size_j)
            r_block = r_mat.submatrix(rows_i, cols_j)
            a_ii = a0.submatrix(rows_i, rows_i)
            a_jj = a0.submatrix(cols_j, cols_j)
            n_i = a_ii - Matrix.identity(f, size_i).scale(lam_i)
            n_j = a_jj - Matrix.identity(f, size_j).scale(lam_j)
            # want (A_0 T - T A_0)_IJ = -R_IJ, i.e.
            # (lam_i - lam_j) X + N_i X - X N_j = -R_IJ
            c = f.sub(lam_i, lam_j)
            x = _solve_shifted_sylvester(f, c, n_i, n_j, -r_block)
            for a, i in enumerate(rows_i):
                for b, j in enumerate(cols_j):
                    t_rows[i][j] = x.rows[a][b]
    return Matrix(f, t_rows)


@dataclass
class SplittingResult:
    eigenvalues: list          # Scalar eigenvalues of A_0, one per block
    multiplicities: list
    gauge: GaugeTransform      # full gauge (constant eigenbasis change included)
    blocks: list               # per-eigenvalue FormalConnection
    projectors: list           # per-eigenvalue MatrixSeries in the original basis
    order: int
    offsets: list = dc_field(default_factory=list)

    def block_for(self, lam: Scalar):
        for l, b in zip(self.eigenvalues, self.blocks):
            if l == lam:
                return b
        raise ExptypeError(f"no block for eigenvalue {lam}")

    def projector_for(self, lam: Scalar):
        for l, p in zip(self.eigenvalues, self.projectors):
            if l == lam:
                return p
        raise ExptypeError(f"no projector for eigenvalue {lam}")


def elementary_split(c: FormalConnection, eigenvalue_hints=None, eigenvalue_order=None,
                     seed: int = 0) -> SplittingResult:
    """Unique block decomposition refining the eigenspaces of the leading pole.

    Returns the gauge realizing the block basis, the per-eigenvalue blocks
    (leading matrices with a single eigenvalue each), and the projector
    series expressed in the original basis.  ``eigenvalue_order`` permutes
    the block layout; the projectors are independent of it (uniqueness),
    which the test suite exercises.
    """
    f = c.field
    n = c.rank
    big_n = c.order
    spaces = generalized_eigenspaces(c.leading(), hints=eigenvalue_hints, seed=seed)
    if eigenvalue_order is not None:
        def position(lam_scalar):
            for i, target in enumerate(eigenvalue_order):
                if lam_scalar == target:
                    return i
            raise ExptypeError("eigenvalue_order must list every eigenvalue")
        spaces = sorted(spaces, key=lambda s: position(s[0]))
    cols = [b.col_reps(0) for _, _, basis in spaces for b in basis]
    change = Matrix.from_columns(f, cols)
    change_inv = change.inverse()
    cur = [change_inv * a * change for a in c.coeffs]

    layout = []
    offset = 0
    for lam, mult, _ in spaces:
        layout.append((lam.rep, offset, mult))
        offset += mult

    gauge_series = MatrixSeries.identity(f, n, big_n)
    a0 = cur[0]
    for r in range(1, big_n):
        off_diag = _off_block_part(cur[r], layout, f)
        if off_diag.is_zero():
            continue
        t_r = solve_block_sylvester(a0, layout, cur[r])
        # apply P = I + T t^r:  B <- P^-1 (B P + t^2 P')
        d = list(cur)
        for m in range(big_n - 1, r - 1, -1):
            d[m] = d[m] + cur[m - r] * t_r
        if r + 1 < big_n:
            d[r + 1] = d[r + 1] + t_r.scale(f.from_int(r))
        new = list(d)
        neg_t_pow = t_r.scale(f.from_int(-1))
        j = 1
        while j * r < big_n:
            for m in range(j * r, big_n):
                new[m] = new[m] + neg_t_pow * d[m - j * r]
            j += 1
            neg_t_pow = neg_t_pow * t_r.scale(f.from_int(-1))
        cur = new
        # accumulate the gauge: G <- G * (I + T t^r)
        g_coeffs = [gauge_series.coeff(k) for k in range(big_n)]
        for m in range(big_n - 1, r - 1, -1):
            g_coeffs[m] = g_coeffs[m] + gauge_series.coeff(m - r) * t_r
        gauge_series = MatrixSeries(f, g_coeffs, low=0, order=big_n)

    for m in range(big_n):
        if not _off_block_part(cur[m], layout, f).is_zero():
            raise ExptypeError(f"splitting failed to clean order {m}")

    blocks = []
    for lam, off, size in layout:
        idx = range(off, off + size)
        blocks.append(FormalConnection.build(f, [cur[m].submatrix(idx, idx) for m in range(big_n)],
                                             order=big_n))

    total = GaugeTransform(MatrixSeries(
        f, [change * gauge_series.coeff(k) for k in range(big_n)], low=0, order=big_n))
    total_inv = total.inverse_series()
    projectors = []
    for lam, off, size in layout:
        indicator = Matrix(f, [[f.one() if (i == j and off <= i < off + size) else f.zero()
                                for j in range(n)] for i in range(n)])
        proj = total.series * MatrixSeries.from_matrix(indicator, big_n) * total_inv
        projectors.append(proj)

    return SplittingResult(
        eigenvalues=[Scalar(f, lam) for lam, _, _ in layout],
        multiplicities=[size for _, _, size in layout],
        gauge=total,
        blocks=blocks,
        projectors=projectors,
        order=big_n,
        offsets=[(off, size) for _, off, size in layout],
    )


def _off_block_part(m: Matrix, layout, f) -> Matrix:
    rows = [list(r) for r in m.rows]
    for (_, off, size) in layout:
        for i in range(off, off + size):
            for j in range(off, off + size):
                rows[i][j] = f.zero()
    return Matrix(f, rows)


def _single_eigenvalue(c: FormalConnection, hints=None):
    vals = matrix_eigenvalues(c.leading(), hints=hints)
    if len(vals) != 1 or vals[0][1] != c.rank:
        raise LeadingNotSingleEigenvalue(
            f"leading matrix has eigenvalues {[str(v) for v, _ in vals]}"
        )
    return vals[0][0]


def solve_intertwiner(c_a: FormalConnection, c_b: FormalConnection, order=None,
                      eigenvalue_a=None, eigenvalue_b=None):
    """The unique series morphism candidate intertwining two connections.

    Both leading matrices must have a single eigenvalue, and the difference
    of the two eigenvalues must be invertible; the recursion then has a
    unique solution at every order (which is the zero map).
    """
    f = c_a.field
    order = min(c_a.order, c_b.order) if order is None else order
    lam_a = f.coerce(eigenvalue_a) if eigenvalue_a is not None else _single_eigenvalue(c_a).rep
    lam_b = f.coerce(eigenvalue_b) if eigenvalue_b is not None else _single_eigenvalue(c_b).rep
    if f.eq(lam_a, lam_b):
        raise SameEigenvalue("rigidity requires distinct leading eigenvalues")
    n_a = c_a.leading() - Matrix.identity(f, c_a.rank).scale(lam_a)
    n_b = c_b.leading() - Matrix.identity(f, c_b.rank).scale(lam_b)
    c_diff = f.sub(lam_a, lam_b)
    fs = []
    for r in range(order):
        rhs = Matrix.zeros(f, c_b.rank, c_a.rank)
        if r >= 1:
            rhs = rhs + fs[r - 1].scale(f.from_int(r - 1))
        for i in range(r):
            j = r - i
            if j < c_a.order:
                rhs = rhs - fs[i] * c_a.coeffs[j]
            if j < c_b.order:
                rhs = rhs + c_b.coeffs[j] * fs[i]
        # solve f_r A_0 - A'_0 f_r = rhs:
        # (lam_a - lam_b) X + X N_a - N_b X = rhs
        x = _solve_shifted_sylvester(f, c_diff, -n_b, -n_a, rhs)
        fs.append(x)
    return MatrixSeries(f, fs, low=0, order=order)


@dataclass
class RigidityReport:
    zero_to_order: bool
    order: int
    trials_passed: int
    witness: object = None


def verify_morphism_rigidity(c_a: FormalConnection, c_b: FormalConnection,
                             trials: int = 10, order: int = None,
                             seed: int = 0, eigenvalue_a=None, eigenvalue_b=None) -> RigidityReport:
    """Check that the only intertwiner between distinct-eigenvalue blocks is zero.

    The recursion is solved order by order; ``trials`` randomized probes
    additionally confirm injectivity of the order-r obstruction map by
    applying it to random matrices and solving back.
    """
    import random

    f = c_a.field
    order = min(c_a.order, c_b.order) if order is None else order
    series = solve_intertwiner(c_a, c_b, order=order,
                               eigenvalue_a=eigenvalue_a, eigenvalue_b=eigenvalue_b)
    ok = series.is_zero()
    witness = None if ok else series.first_nonzero()
    lam_a = f.coerce(eigenvalue_a) if eigenvalue_a is not None else _single_eigenvalue(c_a).rep
    lam_b = f.coerce(eigenvalue_b) if eigenvalue_b is not None else _single_eigenvalue(c_b).rep
    n_a = c_a.leading() - Matrix.identity(f, c_a.rank).scale(lam_a)
    n_b = c_b.leading() - Matrix.identity(f, c_b.rank).scale(lam_b)
    rng = random.Random(seed)
    passed = 0
    for _ in range(trials):
        x = Matrix(f, [[f.random_rep(rng) for _ in range(c_a.rank)] for _ in range(c_b.rank)])
        image = x * c_a.leading() - c_b.leading() * x
        back = _solve_shifted_sylvester(f, f.sub(lam_a, lam_b), -n_b, -n_a, image)
        if back == x:
            passed += 1
    return RigidityReport(zero_to_order=ok, order=order, trials_passed=passed, witness=witness)


@dataclass
class ProjectorFamilyVerdict:
    accepted: bool
    failed_condition: str = None
    witness: object = None

    def __bool__(self):
        return self.accepted


def verify_projector_family(c: FormalConnection, family, order=None,
                            eigenvalue_hints=None) -> ProjectorFamilyVerdict:
    """Check a claimed projector family against the splitting characterization.

    ``family`` is a list of (eigenvalue Scalar, MatrixSeries).  Conditions,
    in reporting order: covariant constancy, idempotence, mutual
    orthogonality, sum = id, t=0 spectral projectors, and entrywise
    equality with the projectors produced by the splitting algorithm.
    """
    f = c.field
    order = c.order if order is None else order
    b = c.t2_frame().truncate(order)
    for lam, series in family:
        cc = series.derivative().shift(2) + commutator(b, series.truncate(min(order, series.order)))
        if not cc.is_zero():
            return ProjectorFamilyVerdict(False, "covariant constancy",
                                          (str(lam), cc.first_nonzero()))
    for lam, series in family:
        diff = series * series - series
        if not diff.is_zero():
            return ProjectorFamilyVerdict(False, "idempotence", (str(lam), diff.first_nonzero()))
    for lam_i, s_i in family:
        for lam_j, s_j in family:
            if lam_i == lam_j:
                continue
            prod = s_i * s_j
            if not prod.is_zero():
                return ProjectorFamilyVerdict(False, "orthogonality",
                                              (str(lam_i), str(lam_j), prod.first_nonzero()))
    total = family[0][1]
    for _, series in family[1:]:
        total = total + series
    ident = MatrixSeries.identity(f, c.rank, order)
    if not (total - ident).is_zero():
        return ProjectorFamilyVerdict(False, "sum to identity", (total - ident).first_nonzero())
    spectral = dict()
    for lam, proj in spectral_projectors(c.leading(), hints=eigenvalue_hints):
        spectral[tuple(lam.sort_key())] = proj
    for lam, series in family:
        key = tuple(lam.sort_key())
        if key not in spectral:
            return ProjectorFamilyVerdict(False, "t=0 spectral projector",
                                          (str(lam), "not an eigenvalue of the leading matrix"))
        if not (series.coeff(0) - spectral[key]).is_zero():
            return ProjectorFamilyVerdict(False, "t=0 spectral projector", (str(lam),))
    split = elementary_split(c, eigenvalue_hints=eigenvalue_hints)
    for lam, series in family:
        ref = split.projector_for(lam)
        common = min(series.order, ref.order, order)
        if not (series.truncate(common) - ref.truncate(common)).is_zero():
            return ProjectorFamilyVerdict(False, "equality with split projectors", (str(lam),))
    return ProjectorFamilyVerdict(True)


@dataclass
class ResidualConnection:
    exponent: Scalar          # lambda with the block = E^{-lambda/t^2} twist of this
    connection: FormalConnection
    nilpotent_part: Matrix

    @property
    def rank(self):
        return self.connection.rank


def residual_connection(block: FormalConnection, eigenvalue=None, hints=None) -> ResidualConnection:
    """Remove the scalar part of the quadratic pole of a single-eigenvalue block.

    The reported exponent is the negative of the leading eigenvalue, so the
    original block is the E^{-exponent/t^2} twist of the returned
    connection.  The remaining leading coefficient must be nilpotent; this
    is asserted.
    """
    f = block.field
    if eigenvalue is not None:
        a = f.coerce(eigenvalue)
        shifted = block.leading() - Matrix.identity(f, block.rank).scale(a)
        if shifted.nilpotency_index() is None:
            raise LeadingNotSingleEigenvalue("given eigenvalue does not exhaust the leading matrix")
    else:
        a = _single_eigenvalue(block, hints=hints).rep
    new_a0 = block.leading() - Matrix.identity(f, block.rank).scale(a)
    index = new_a0.nilpotency_index()
    if index is None:
        raise LeadingNotSingleEigenvalue("residual leading coefficient is not nilpotent")
    coeffs = [new_a0] + [block.coeffs[i] for i in range(1, block.order)]
    return ResidualConnection(
        exponent=Scalar(f, f.neg(a)),
        connection=FormalConnection.build(f, coeffs, order=block.order),
        nilpotent_part=-new_a0,
    )
