"""Dense exact matrices and matrix-valued truncated series.

Everything here is exact: Gaussian elimination over a field, Berkowitz's
division-free characteristic polynomial (safe in small characteristic),
generalized eigen-decompositions, and matrix series with the same validity
bookkeeping as scalar series.
"""

from __future__ import annotations

from ..errors import (
    CharPolyDoesNotSplit,
    DimensionMismatch,
    ExptypeError,
    NonSquareMatrix,
    NoSolution,
    TruncationTooSmall,
)
from .fields import Field, Scalar
from .poly import Poly, char_zero_roots, roots_over_finite_field
from .series import TruncSeries


class Matrix:
    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows):
        self.field = field
        data = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ExptypeError("matrices must be nonempty")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise DimensionMismatch("ragged rows")
        self.rows = data
        self.nrows = len(data)
        self.ncols = width

    # -- constructors --------------------------------------------------
    @classmethod
    def identity(cls, field, n):
        return cls(field, [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, r, c=None):
        c = r if c is None else c
        z = field.zero()
        return cls(field, [[z] * c for _ in range(r)])

    @classmethod
    def diagonal(cls, field, entries):
        entries = [field.coerce(e) for e in entries]
        n = len(entries)
        z = field.zero()
        return cls(field, [[entries[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, field, entries):
        return cls(field, [[e] for e in entries])

    @classmethod
    def from_columns(cls, field, cols):
        n = len(cols[0])
        return cls(field, [[col[i] for col in cols] for i in range(n)])

    # -- access ----------------------------------------------------------
    def entry(self, i, j) -> Scalar:
        return Scalar(self.field, self.rows[i][j])

    def col_reps(self, j):
        return [self.rows[i][j] for i in range(self.nrows)]

    def is_square(self):
        return self.nrows == self.ncols

    def _require_square(self):
        if not self.is_square():
            raise NonSquareMatrix(f"{self.nrows}x{self.ncols}")

    # -- arithmetic --------------------------------------------------------
    def _check(self, other, same_shape=True):
        if not isinstance(other, Matrix) or other.field != self.field:
            raise ExptypeError("matrix field mismatch")
        if same_shape and (other.nrows != self.nrows or other.ncols != self.ncols):
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}")

    def __add__(self, other):
        self._check(other)
        f = self.field
        return Matrix(f, [[f.add(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        f = self.field
        return Matrix(f, [[f.sub(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        f = self.field
        return Matrix(f, [[f.neg(a) for a in row] for row in self.rows])

    def __mul__(self, other):
        self._check(other, same_shape=False)
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} * {other.nrows}x{other.ncols}")
        f = self.field
        add, mul, zero, is_zero = f.add, f.mul, f.zero(), f.is_zero
        bt = list(zip(*other.rows))
        out = []
        for row in self.rows:
            out_row = []
            for col in bt:
                acc = zero
                for a, b in zip(row, col):
                    if not is_zero(a):
                        acc = add(acc, mul(a, b))
                out_row.append(acc)
            out.append(out_row)
        return Matrix(f, out)

    def scale(self, c):
        rep = self.field.coerce(c)
        f = self.field
        return Matrix(f, [[f.mul(a, rep) for a in row] for row in self.rows])

    def __pow__(self, n: int):
        self._require_square()
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def transpose(self):
        return Matrix(self.field, list(zip(*self.rows)))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.field != self.field or other.nrows != self.nrows or other.ncols != self.ncols:
            return False
        f = self.field
        return all(f.eq(a, b) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def is_zero(self):
        f = self.field
        return all(f.is_zero(a) for row in self.rows for a in row)

    def map_entries(self, target_field, fn):
        return Matrix(target_field, [[fn(a) for a in row] for row in self.rows])

    def submatrix(self, row_idx, col_idx):
        return Matrix(self.field, [[self.rows[i][j] for j in col_idx] for i in row_idx])

    def augment(self, other):
        self._check(other, same_shape=False)
        if other.nrows != self.nrows:
            raise DimensionMismatch("augment needs equal row counts")
        return Matrix(self.field, [r1 + r2 for r1, r2 in zip(self.rows, other.rows)])

    def __repr__(self):
        f = self.field
        return "[" + "; ".join(" ".join(f.to_str(a) for a in row) for row in self.rows) + "]"

    # -- elimination ---------------------------------------------------
    def _echelon(self):
        """Row echelon form; returns (rows, pivot column list)."""
        f = self.field
        rows = [list(r) for r in self.rows]
        pivots = []
        pr = 0
        for pc in range(self.ncols):
            pivot_row = None
            for i in range(pr, len(rows)):
                if not f.is_zero(rows[i][pc]):
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
            inv = f.inv(rows[pr][pc])
            rows[pr] = [f.mul(x, inv) for x in rows[pr]]
            for i in range(len(rows)):
                if i != pr and not f.is_zero(rows[i][pc]):
                    c = rows[i][pc]
                    rows[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(rows[i], rows[pr])]
            pivots.append(pc)
            pr += 1
            if pr == len(rows):
                break
        return rows, pivots

    def rank(self):
        return len(self._echelon()[1])

    def kernel_basis(self):
        """Basis of the right kernel, as column matrices."""
        f = self.field
        rows, pivots = self._echelon()
        free = [j for j in range(self.ncols) if j not in pivots]
        basis = []
        for fc in free:
            vec = [f.zero()] * self.ncols
            vec[fc] = f.one()
            for r, pc in enumerate(pivots):
                vec[pc] = f.neg(rows[r][fc])
            basis.append(Matrix.column(f, vec))
        return basis

    def solve(self, b: "Matrix"):
        """Particular solution of self * x = b plus a kernel basis.

        Raises NoSolution for inconsistent systems.
        """
        self._check(b, same_shape=False)
        if b.nrows != self.nrows:
            raise DimensionMismatch("rhs rows mismatch")
        f = self.field
        aug = self.augment(b)
        rows, pivots = aug._echelon()
        n = self.ncols
        for r in range(len(rows)):
            lead = next((j for j in range(aug.ncols) if not f.is_zero(rows[r][j])), None)
            if lead is not None and lead >= n:
                raise NoSolution("inconsistent linear system")
        sol = [[f.zero()] * b.ncols for _ in range(n)]
        for r, pc in enumerate(pivots):
            if pc < n:
                for k in range(b.ncols):
                    sol[pc][k] = rows[r][n + k]
        return Matrix(f, sol), self.kernel_basis()

    def inverse(self):
        self._require_square()
        sol, kernel = self.solve(Matrix.identity(self.field, self.nrows))
        if kernel:
            raise NoSolution("matrix is singular")
        return sol

    def det(self) -> Scalar:
        self._require_square()
        f = self.field
        rows = [list(r) for r in self.rows]
        n = self.nrows
        det = f.one()
        for pc in range(n):
            pivot_row = None
            for i in range(pc, n):
                if not f.is_zero(rows[i][pc]):
                    pivot_row = i
                    break
            if pivot_row is None:
                return Scalar(f, f.zero())
            if pivot_row != pc:
                rows[pc], rows[pivot_row] = rows[pivot_row], rows[pc]
                det = f.neg(det)
            det = f.mul(det, rows[pc][pc])
            inv = f.inv(rows[pc][pc])
            for i in range(pc + 1, n):
                if not f.is_zero(rows[i][pc]):
                    c = f.mul(rows[i][pc], inv)
                    rows[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(rows[i], rows[pc])]
        return Scalar(f, det)

    # -- characteristic polynomial (Berkowitz, division-free) ------------
    def char_poly(self, var="x") -> Poly:
        """Monic characteristic polynomial det(x*I - M).

        Division-free, so it works verbatim over fields of small
        characteristic where d! may vanish.
        """
        self._require_square()
        f = self.field
        n = self.nrows
        M = self.rows
        # p: coefficients in descending powers, p[0] = 1
        p = [f.one(), f.neg(M[0][0])]
        for r in range(2, n + 1):
            sub = [row[: r - 1] for row in M[: r - 1]]
            R = M[r - 1][: r - 1]
            S = [M[i][r - 1] for i in range(r - 1)]
            a = M[r - 1][r - 1]
            c = [f.one(), f.neg(a)]
            vec = S
            for _ in range(r - 1):
                c.append(f.neg(_dot(f, R, vec)))
                vec = _matvec(f, sub, vec)
            newp = []
            for i in range(r + 1):
                acc = f.zero()
                for j in range(len(p)):
                    k = i - j
                    if 0 <= k < len(c):
                        acc = f.add(acc, f.mul(c[k], p[j]))
                newp.append(acc)
            p = newp
        return Poly.from_dense(f, var, list(reversed(p)))

    def evaluate_poly(self, poly: Poly) -> "Matrix":
        """Evaluate a univariate polynomial at this matrix."""
        self._require_square()
        f = self.field
        acc = Matrix.zeros(f, self.nrows)
        for c in reversed(poly.to_dense()):
            acc = acc * self + Matrix.identity(f, self.nrows).scale(c)
        return acc

    def nilpotency_index(self):
        """Smallest e with M^e = 0, or None if M is not nilpotent."""
        self._require_square()
        power = Matrix.identity(self.field, self.nrows)
        for e in range(self.nrows + 1):
            if power.is_zero():
                return e
            power = power * self
        if power.is_zero():
            return self.nrows
        return None


def _dot(f, a, b):
    acc = f.zero()
    for x, y in zip(a, b):
        acc = f.add(acc, f.mul(x, y))
    return acc


def _matvec(f, rows, v):
    return [_dot(f, row, v) for row in rows]


def solve_linear(a: Matrix, b: Matrix):
    """Exact solution representative plus kernel basis, or NoSolution."""
    return a.solve(b)


# -- eigen machinery ---------------------------------------------------

def eigenvalues(m: Matrix, hints=None, seed: int = 0):
    """Eigenvalues with algebraic multiplicities over m's field.

    Over finite fields the characteristic polynomial is factored; over
    characteristic zero, exact rational roots are combined with optional
    ``hints`` (field elements to test).  Raises CharPolyDoesNotSplit with
    the stubborn factor when the polynomial does not split.
    """
    m._require_square()
    f = m.field
    chi = m.char_poly()
    n = m.nrows
    if f.char != 0:
        pairs = roots_over_finite_field(chi, f, seed=seed)
        if sum(mult for _, mult in pairs) != n:
            from .poly import factor_over_finite_field

            bad = next(g for g, _ in factor_over_finite_field(chi, f, seed=seed) if g.total_degree() > 1)
            raise CharPolyDoesNotSplit(bad)
        return _sorted_pairs(pairs)
    pairs, remainder = char_zero_roots(chi, hints=hints)
    if sum(mult for _, mult in pairs) != n:
        raise CharPolyDoesNotSplit(remainder)
    return _sorted_pairs(pairs)


def _sorted_pairs(pairs):
    return sorted(pairs, key=lambda sm: sm[0].sort_key())


def generalized_eigenspaces(m: Matrix, hints=None, seed: int = 0):
    """List of (eigenvalue, multiplicity, basis columns) for a split matrix.

    The concatenated bases form a basis of the full space; each block is
    invariant under m.  Both facts are verified.
    """
    f = m.field
    n = m.nrows
    out = []
    for lam, mult in eigenvalues(m, hints=hints, seed=seed):
        shifted = m - Matrix.identity(f, n).scale(lam.rep)
        power = shifted ** mult
        basis = power.kernel_basis()
        if len(basis) != mult:
            raise ExptypeError(
                f"generalized eigenspace dimension {len(basis)} != multiplicity {mult}"
            )
        out.append((lam, mult, basis))
    cols = [b.col_reps(0) for _, _, basis in out for b in basis]
    change = Matrix.from_columns(f, cols)
    change.inverse()  # raises NoSolution if the blocks fail to span
    for lam, mult, basis in out:
        shifted = m - Matrix.identity(f, n).scale(lam.rep)
        killer = shifted ** mult
        for b in basis:
            if not (killer * b).is_zero():
                raise ExptypeError("generalized eigenvector not killed by (m - lambda)^k")
    return out


def spectral_projectors(m: Matrix, eigenspaces=None, hints=None, seed: int = 0):
    """Projections onto the generalized eigenspaces, in the original basis."""
    f = m.field
    spaces = eigenspaces if eigenspaces is not None else generalized_eigenspaces(m, hints=hints, seed=seed)
    cols = [b.col_reps(0) for _, _, basis in spaces for b in basis]
    change = Matrix.from_columns(f, cols)
    inv = change.inverse()
    out = []
    offset = 0
    n = m.nrows
    for lam, mult, _ in spaces:
        indicator = Matrix(
            f,
            [[f.one() if (i == j and offset <= i < offset + mult) else f.zero() for j in range(n)] for i in range(n)],
        )
        out.append((lam, change * indicator * inv))
        offset += mult
    return out


class MatrixSeries:
    """Matrix-coefficient truncated Laurent series (same windows as TruncSeries)."""

    __slots__ = ("field", "nrows", "ncols", "var", "low", "order", "coeffs")

    def __init__(self, field, coeffs, low=0, order=None, var="t", shape=None):
        self.field = field
        self.var = var
        self.low = low
        mats = list(coeffs)
        if shape is None:
            if not mats:
                raise ExptypeError("shape needed for empty matrix series")
            shape = (mats[0].nrows, mats[0].ncols)
        self.nrows, self.ncols = shape
        if order is None:
            order = low + len(mats)
        if order < low:
            raise TruncationTooSmall(f"order {order} below floor {low}")
        mats = mats[: order - low]
        while len(mats) < order - low:
            mats.append(Matrix.zeros(field, self.nrows, self.ncols))
        for m in mats:
            if (m.nrows, m.ncols) != (self.nrows, self.ncols):
                raise DimensionMismatch("inconsistent coefficient shapes")
        self.order = order
        self.coeffs = tuple(mats)

    @classmethod
    def zero(cls, field, shape, order, low=0, var="t"):
        return cls(field, [], low=low, order=order, var=var, shape=shape)

    @classmethod
    def from_matrix(cls, m: Matrix, order, var="t"):
        return cls(m.field, [m], low=0, order=order, var=var)

    @classmethod
    def identity(cls, field, n, order, var="t"):
        return cls.from_matrix(Matrix.identity(field, n), order, var=var)

    def coeff(self, k) -> Matrix:
        if k < self.low:
            return Matrix.zeros(self.field, self.nrows, self.ncols)
        if k >= self.order:
            raise TruncationTooSmall(f"coefficient t^{k} beyond validity order {self.order}")
        return self.coeffs[k - self.low]

    def entry(self, i, j) -> TruncSeries:
        return TruncSeries(self.field, [m.rows[i][j] for m in self.coeffs],
                           low=self.low, order=self.order, var=self.var)

    def column(self, j) -> "MatrixSeries":
        return MatrixSeries(self.field, [Matrix.column(self.field, m.col_reps(j)) for m in self.coeffs],
                            low=self.low, order=self.order, var=self.var, shape=(self.nrows, 1))

    def is_zero(self):
        return all(m.is_zero() for m in self.coeffs)

    def _check(self, other):
        if not isinstance(other, MatrixSeries) or other.field != self.field or other.var != self.var:
            raise ExptypeError("matrix series mismatch")

    def __add__(self, other):
        self._check(other)
        low = min(self.low, other.low)
        order = min(self.order, other.order)
        out = [self.coeff(k) + other.coeff(k) for k in range(low, order)]
        return MatrixSeries(self.field, out, low=low, order=order, var=self.var,
                            shape=(self.nrows, self.ncols))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MatrixSeries(self.field, [-m for m in self.coeffs], low=self.low,
                            order=self.order, var=self.var, shape=(self.nrows, self.ncols))

    def __mul__(self, other):
        self._check(other)
        if self.ncols != other.nrows:
            raise DimensionMismatch("matrix series product shapes")
        low = self.low + other.low
        order = min(self.order + other.low, other.order + self.low)
        n = order - low
        shape = (self.nrows, other.ncols)
        out = [Matrix.zeros(self.field, *shape) for _ in range(n)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= n:
                    break
                out[k] = out[k] + a * b
        return MatrixSeries(self.field, out, low=low, order=order, var=self.var, shape=shape)

    def scale(self, c):
        rep = self.field.coerce(c)
        return MatrixSeries(self.field, [m.scale(rep) for m in self.coeffs], low=self.low,
                            order=self.order, var=self.var, shape=(self.nrows, self.ncols))

    def mul_scalar_series(self, s: TruncSeries):
        low = self.low + s.low
        order = min(self.order + s.low, s.order + self.low)
        n = order - low
        out = [Matrix.zeros(self.field, self.nrows, self.ncols) for _ in range(n)]
        for i, c in enumerate(s.coeffs):
            if self.field.is_zero(c):
                continue
            for j, m in enumerate(self.coeffs):
                k = i + j
                if k >= n:
                    break
                out[k] = out[k] + m.scale(c)
        return MatrixSeries(self.field, out, low=low, order=order, var=self.var,
                            shape=(self.nrows, self.ncols))

    def shift(self, k: int):
        return MatrixSeries(self.field, self.coeffs, low=self.low + k, order=self.order + k,
                            var=self.var, shape=(self.nrows, self.ncols))

    def derivative(self):
        f = self.field
        low, order = self.low - 1, self.order - 1
        out = [Matrix.zeros(f, self.nrows, self.ncols) for _ in range(order - low)]
        for i, m in enumerate(self.coeffs):
            e = self.low + i
            if e == 0:
                continue
            if low <= e - 1 < order:
                out[e - 1 - low] = m.scale(f.from_int(e))
        return MatrixSeries(f, out, low=low, order=order, var=self.var,
                            shape=(self.nrows, self.ncols))

    def truncate(self, new_order):
        if new_order > self.order:
            raise TruncationTooSmall(f"cannot extend validity {self.order} -> {new_order}")
        return MatrixSeries(self.field, self.coeffs[: new_order - self.low], low=self.low,
                            order=new_order, var=self.var, shape=(self.nrows, self.ncols))

    def inverse(self):
        """Inverse of a unit series: floor 0 with invertible constant term."""
        if self.low > 0:
            raise ExptypeError("inverse implemented for floor-0 unit series")
        if self.nrows != self.ncols:
            raise NonSquareMatrix("series inverse needs square coefficients")
        head = self.coeff(0)
        head_inv = head.inverse()
        n = self.order
        out = [head_inv]
        for k in range(1, n):
            acc = Matrix.zeros(self.field, self.nrows, self.ncols)
            for j in range(k):
                acc = acc + self.coeff(k - j) * out[j]
            out.append((-head_inv) * acc)
        return MatrixSeries(self.field, out, low=0, order=n, var=self.var,
                            shape=(self.nrows, self.ncols))

    def eq_window(self, other):
        return (self - other).is_zero()

    def map_entries(self, target_field, fn):
        return MatrixSeries(target_field, [m.map_entries(target_field, fn) for m in self.coeffs],
                            low=self.low, order=self.order, var=self.var,
                            shape=(self.nrows, self.ncols))

    def first_nonzero(self):
        """(exponent, monomial witness) of the first nonzero coefficient, or None."""
        for i, m in enumerate(self.coeffs):
            if not m.is_zero():
                f = self.field
                for r, row in enumerate(m.rows):
                    for c, x in enumerate(row):
                        if not f.is_zero(x):
                            return self.low + i, (r, c, Scalar(f, x))
        return None

    def __repr__(self):
        return (f"MatrixSeries({self.nrows}x{self.ncols}, window [{self.low},{self.order}), "
                f"var {self.var})")


def commutator(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    return a * b - b * a
