"""Quantum cohomology ring presentations and the connections built from them.

Rings arrive as structure-constant tables over R[q] and are never computed
from geometry; the checkable axioms (associativity, the q-grading rule,
unitality, graded commutativity) are enforced on construction.  q carries
degree 2 and the exponent of q in a structure constant is the Chern pairing
of the contributing curve class, so the grading rule reads

    deg(x0) + deg(x1) = deg(xout) + 2 * (q-exponent).

For projective space this makes h * h^n = q^(n+1) * 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    Field,
    Matrix,
    Scalar,
    generalized_eigenspaces,
    parse_scalar,
    spectral_projectors,
)
from .connection import FormalConnection
from .errors import (
    AssociativityFailure,
    DegreeMismatch,
    ExptypeError,
    GradingFailure,
    RingAxiomFailure,
    UnitFailure,
)
from .pcurvature import BigradedModule, BiMatrixSeries, deg_operator


class QHRing:
    """Graded basis + structure constants over k[q] + unit + first Chern class.

    ``products[(i, j)]`` maps a q-exponent to the coefficient vector of the
    q^m-part of x_i * x_j.  All invariants are verified by ``validate``,
    which runs on construction.
    """

    def __init__(self, field: Field, basis, degrees, unit_index, c1, products,
                 dim_n=None, validate=True):
        self.field = field
        self.basis = tuple(basis)
        self.degrees = tuple(degrees)
        self.unit_index = unit_index
        self.c1 = tuple(field.coerce(c) for c in c1)
        self.dim_n = max(degrees) // 2 if dim_n is None else dim_n
        clean = {}
        for (i, j), table in products.items():
            entry = {}
            for m, vec in table.items():
                reps = tuple(field.coerce(c) for c in vec)
                if any(not field.is_zero(c) for c in reps):
                    entry[m] = reps
            clean[(i, j)] = entry
        self.products = clean
        if validate:
            self.validate()

    @property
    def rank(self):
        return len(self.basis)

    # -- products --------------------------------------------------------
    def product_table(self, i, j):
        if (i, j) in self.products:
            return self.products[(i, j)]
        raise ExptypeError(f"missing structure constants for ({self.basis[i]}, {self.basis[j]})")

    def mult_vectors_q(self, x, y):
        """Product of two q-polynomial vectors; inputs/outputs are dicts m -> rep tuple."""
        f = self.field
        out = {}
        n = self.rank
        for mx, vx in x.items():
            for my, vy in y.items():
                for i in range(n):
                    if f.is_zero(vx[i]):
                        continue
                    for j in range(n):
                        if f.is_zero(vy[j]):
                            continue
                        c = f.mul(vx[i], vy[j])
                        for m, vec in self.product_table(i, j).items():
                            key = mx + my + m
                            acc = out.get(key)
                            if acc is None:
                                acc = [f.zero()] * n
                                out[key] = acc
                            for k in range(n):
                                if not f.is_zero(vec[k]):
                                    acc[k] = f.add(acc[k], f.mul(c, vec[k]))
        return {m: tuple(v) for m, v in out.items() if any(not f.is_zero(c) for c in v)}

    def mult_vectors_q1(self, x, y):
        """Product of two plain vectors with q set to 1."""
        out = self.mult_vectors_q({0: tuple(x)}, {0: tuple(y)})
        f = self.field
        acc = [f.zero()] * self.rank
        for vec in out.values():
            for k in range(self.rank):
                acc[k] = f.add(acc[k], vec[k])
        return tuple(acc)

    def mult_matrix_q1(self, vec) -> Matrix:
        """Matrix of (vec * -) at q = 1."""
        cols = []
        f = self.field
        for j in range(self.rank):
            e_j = tuple(f.one() if k == j else f.zero() for k in range(self.rank))
            cols.append(list(self.mult_vectors_q1(vec, e_j)))
        return Matrix.from_columns(f, cols)

    def mult_matrix_q(self, vec):
        """Graded multiplication operator: q-exponent -> Matrix."""
        f = self.field
        pieces = {}
        for j in range(self.rank):
            e_j = tuple(f.one() if k == j else f.zero() for k in range(self.rank))
            prod = self.mult_vectors_q({0: tuple(vec)}, {0: e_j})
            for m, v in prod.items():
                rows = pieces.setdefault(m, [[f.zero()] * self.rank for _ in range(self.rank)])
                for i in range(self.rank):
                    rows[i][j] = v[i]
        return {m: Matrix(f, rows) for m, rows in pieces.items()}

    def star_power_q1(self, vec, k):
        f = self.field
        acc = tuple(f.one() if i == self.unit_index else f.zero() for i in range(self.rank))
        for _ in range(k):
            acc = self.mult_vectors_q1(acc, vec)
        return acc

    def unit_vector(self):
        f = self.field
        return tuple(f.one() if i == self.unit_index else f.zero() for i in range(self.rank))

    def q_degree_cap(self):
        return max((m for table in self.products.values() for m in table), default=0)

    # -- validation --------------------------------------------------------
    def validate(self):
        f = self.field
        n = self.rank
        if len(self.degrees) != n or len(self.c1) != n:
            raise ExptypeError("basis, degrees, and c1 lengths must agree")
        if self.degrees[self.unit_index] != 0:
            raise UnitFailure(self.basis[self.unit_index])
        # unit law
        for i in range(n):
            table = self.product_table(self.unit_index, i)
            expected = {0: tuple(f.one() if k == i else f.zero() for k in range(n))}
            if set(table) != {0} or any(not f.eq(table[0][k], expected[0][k]) for k in range(n)):
                raise UnitFailure((self.basis[self.unit_index], self.basis[i]))
        # grading rule: deg_i + deg_j = deg_k + 2m, with |q| = 2
        for (i, j), table in self.products.items():
            for m, vec in table.items():
                for k in range(n):
                    if not f.is_zero(vec[k]):
                        if self.degrees[i] + self.degrees[j] != self.degrees[k] + 2 * m:
                            raise GradingFailure((self.basis[i], self.basis[j], m, self.basis[k]))
        # graded commutativity
        for i in range(n):
            for j in range(n):
                sign = -1 if (self.degrees[i] % 2) and (self.degrees[j] % 2) else 1
                tij = self.product_table(i, j)
                tji = self.product_table(j, i)
                keys = set(tij) | set(tji)
                for m in keys:
                    vi = tij.get(m, tuple(f.zero() for _ in range(n)))
                    vj = tji.get(m, tuple(f.zero() for _ in range(n)))
                    for k in range(n):
                        lhs = vi[k]
                        rhs = vj[k] if sign == 1 else f.neg(vj[k])
                        if not f.eq(lhs, rhs):
                            raise RingAxiomFailure((self.basis[i], self.basis[j]),
                                                   "product is not graded commutative")
        # associativity on all basis triples
        for i in range(n):
            e_i = {0: tuple(f.one() if k == i else f.zero() for k in range(n))}
            for j in range(n):
                e_j = {0: tuple(f.one() if k == j else f.zero() for k in range(n))}
                ij = self.mult_vectors_q(e_i, e_j)
                for k in range(n):
                    e_k = {0: tuple(f.one() if l == k else f.zero() for l in range(n))}
                    left = self.mult_vectors_q(ij, e_k)
                    right = self.mult_vectors_q(e_i, self.mult_vectors_q(e_j, e_k))
                    if set(left) != set(right) or any(
                        not f.eq(left[m][l], right[m][l]) for m in left for l in range(n)
                    ):
                        raise AssociativityFailure((self.basis[i], self.basis[j], self.basis[k]))

    def reduce(self, target_field, generator_image=None):
        """Base change a characteristic-zero ring to a finite field."""
        from .algebra import reduce_rep

        fn = lambda c: reduce_rep(self.field, c, target_field, generator_image)
        products = {key: {m: tuple(fn(c) for c in vec) for m, vec in table.items()}
                    for key, table in self.products.items()}
        return QHRing(target_field, self.basis, self.degrees, self.unit_index,
                      [fn(c) for c in self.c1], products, dim_n=self.dim_n)

    def __repr__(self):
        return f"QHRing({', '.join(self.basis)}; dim_n={self.dim_n}; over {self.field})"


def cp_n_ring(n: int, field: Field) -> QHRing:
    """Small quantum cohomology of complex projective n-space.

    Basis 1, h, ..., h^n; h^i * h^j = h^(i+j) below the fold and
    q^(n+1) h^(i+j-n-1) above it (the line class pairs to n+1 with the
    first Chern class); c1 = (n+1) h.
    """
    if n < 1:
        raise ExptypeError("cp_n_ring needs n >= 1")
    f = field
    basis = ["1"] + [f"h^{i}" if i > 1 else "h" for i in range(1, n + 1)]
    degrees = [2 * i for i in range(n + 1)]
    products = {}
    for i in range(n + 1):
        for j in range(n + 1):
            s = i + j
            if s <= n:
                vec = tuple(f.one() if k == s else f.zero() for k in range(n + 1))
                products[(i, j)] = {0: vec}
            else:
                vec = tuple(f.one() if k == s - n - 1 else f.zero() for k in range(n + 1))
                products[(i, j)] = {n + 1: vec}
    c1 = [f.zero()] * (n + 1)
    c1[1] = f.from_int(n + 1)
    return QHRing(f, basis, degrees, 0, c1, products, dim_n=n)


def ring_from_manifest(section: dict, field: Field) -> QHRing:
    """Build and fully validate a ring from a manifest table."""
    if "builtin" in section:
        name = section["builtin"]
        if name != "cp_n":
            raise ExptypeError(f"unknown builtin ring {name!r}")
        return cp_n_ring(int(section["n"]), field)
    basis = list(section["basis"])
    degrees = [int(d) for d in section["degrees"]]
    unit = section.get("unit", basis[0])
    unit_index = basis.index(unit) if isinstance(unit, str) else int(unit)
    c1 = [parse_scalar(field, c).rep for c in section["c1"]]
    index = {name: i for i, name in enumerate(basis)}
    products = {}
    for entry in section.get("products", []):
        i, j = index[entry["x0"]], index[entry["x1"]]
        table = {}
        for term in entry["terms"]:
            m = int(term.get("q", 0))
            table[m] = tuple(parse_scalar(field, c).rep for c in term["coeffs"])
        products[(i, j)] = table
    n = len(basis)
    f = field
    # fill unit products and symmetric partners (even-degree case keeps signs trivial)
    for i in range(n):
        products.setdefault((unit_index, i),
                            {0: tuple(f.one() if k == i else f.zero() for k in range(n))})
        products.setdefault((i, unit_index),
                            {0: tuple(f.one() if k == i else f.zero() for k in range(n))})
    for (i, j) in list(products):
        if (j, i) not in products:
            sign = -1 if (degrees[i] % 2) and (degrees[j] % 2) else 1
            products[(j, i)] = {m: tuple(f.neg(c) if sign < 0 else c for c in vec)
                                for m, vec in products[(i, j)].items()}
    for i in range(n):
        for j in range(n):
            if (i, j) not in products:
                raise ExptypeError(f"missing product ({basis[i]}, {basis[j]}) in manifest")
    return QHRing(field, basis, degrees, unit_index, c1, products,
                  dim_n=section.get("dimension"))


def mu_matrix(ring: QHRing) -> Matrix:
    """Grading operator: (deg - n)/2 on each basis class (half-integers)."""
    f = ring.field
    two_inv = f.inv(f.from_int(2))
    return Matrix.diagonal(
        f, [f.mul(f.from_int(ring.degrees[i] - ring.dim_n), two_inv) for i in range(ring.rank)])


def build_t_connection(ring: QHRing, t_order: int) -> FormalConnection:
    """Quantum t-connection at q = 1: d/dt + mu/t - (c1*)/t^2."""
    a0 = -ring.mult_matrix_q1(ring.c1)
    a1 = mu_matrix(ring)
    return FormalConnection.build(ring.field, [a0, a1], order=t_order)


def bigraded_module(ring: QHRing, orders) -> BigradedModule:
    m_ord, t_ord = orders
    return BigradedModule(field=ring.field, degrees=ring.degrees, dim_n=ring.dim_n,
                          q_order=m_ord, t_order=t_ord)


@dataclass
class BigradedQConnection:
    """tq d/dq + c1 *_q acting on the bigraded module."""

    module: BigradedModule
    mult: dict  # q-exponent -> Matrix for c1 *_q

    def apply(self, v: BiMatrixSeries) -> BiMatrixSeries:
        f = self.module.field
        m_ord, t_ord = v.q_order, v.t_order
        out = {}

        def bump(key, mat):
            if key[0] < m_ord and key[1] < t_ord and not mat.is_zero():
                out[key] = out[key] + mat if key in out else mat

        for (m, j), mat in v.coeffs.items():
            if m and j + 1 < t_ord:
                bump((m, j + 1), mat.scale(f.from_int(m)))
            for dm, op in self.mult.items():
                bump((m + dm, j), op * mat)
        return BiMatrixSeries(f, out, m_ord, t_ord, shape=(v.nrows, v.ncols))


@dataclass
class BigradedTConnection:
    """t^2 d/dt + t mu - c1 *_q on the bigraded module."""

    module: BigradedModule
    mult: dict
    mu: Matrix

    def apply(self, v: BiMatrixSeries) -> BiMatrixSeries:
        f = self.module.field
        m_ord, t_ord = v.q_order, v.t_order
        out = {}

        def bump(key, mat):
            if key[0] < m_ord and key[1] < t_ord and not mat.is_zero():
                out[key] = out[key] + mat if key in out else mat

        for (m, j), mat in v.coeffs.items():
            if j and j + 1 < t_ord:
                bump((m, j + 1), mat.scale(f.from_int(j)))
            if j + 1 < t_ord:
                bump((m, j + 1), self.mu * mat)
            for dm, op in self.mult.items():
                bump((m + dm, j), (-op) * mat)
        return BiMatrixSeries(f, out, m_ord, t_ord, shape=(v.nrows, v.ncols))


def build_q_connection(ring: QHRing, orders) -> BigradedQConnection:
    """Quantum q-connection; verified to raise total degree by exactly 2."""
    module = bigraded_module(ring, orders)
    op = BigradedQConnection(module=module, mult=ring.mult_matrix_q(ring.c1))
    _verify_degree_shift(op, expected_shift=2)
    return op


def build_t_connection_bigraded(ring: QHRing, orders) -> BigradedTConnection:
    module = bigraded_module(ring, orders)
    op = BigradedTConnection(module=module, mult=ring.mult_matrix_q(ring.c1),
                             mu=mu_matrix(ring))
    _verify_degree_shift(op, expected_shift=2)
    return op


def _verify_degree_shift(op, expected_shift: int):
    """[Deg, op] = shift * op, checked on basis monomials inside the window."""
    module = op.module
    deg = deg_operator(module)
    f = module.field
    for i in range(module.rank):
        for mq in range(0, min(module.q_order, 3)):
            for jt in range(0, min(module.t_order - 1, 3)):
                v = module.basis_vector(i, mq, jt)
                image = op.apply(v)
                lhs = deg.apply(image) - op.apply(deg.apply(v))
                rhs = image.scale(f.from_int(expected_shift))
                if not (lhs - rhs).is_zero():
                    raise DegreeMismatch(
                        f"operator does not shift total degree by {expected_shift}")


@dataclass
class EigenData:
    eigenvalues: list      # Scalar eigenvalues of c1* at q = 1
    multiplicities: list
    idempotents: list      # coefficient vectors e_lambda
    nilpotents: list       # c1^lambda - lambda e_lambda
    projectors: list       # spectral projector matrices

    def idempotent_for(self, lam: Scalar):
        for l, e in zip(self.eigenvalues, self.idempotents):
            if l == lam:
                return e
        raise ExptypeError(f"no idempotent for eigenvalue {lam}")


def eigendata_c1(ring: QHRing, hints=None, seed: int = 0) -> EigenData:
    """Eigenvalues and idempotents of multiplication by c1 at q = 1.

    The idempotents are the spectral projections of the unit; all the
    algebraic identities (partition of unity, orthogonality, nilpotency of
    the shifted projections) are verified exactly.
    """
    f = ring.field
    m = ring.mult_matrix_q1(ring.c1)
    projs = spectral_projectors(m, hints=hints, seed=seed)
    spaces = generalized_eigenspaces(m, hints=hints, seed=seed)
    unit = Matrix.column(f, list(ring.unit_vector()))
    c1_col = Matrix.column(f, list(ring.c1))
    eigenvalues, mults, idempotents, nilpotents, proj_mats = [], [], [], [], []
    for (lam, proj), (lam2, mult, _) in zip(projs, spaces):
        assert lam == lam2
        e_lam = tuple((proj * unit).col_reps(0))
        c1_lam = tuple((proj * c1_col).col_reps(0))
        nil = tuple(f.sub(a, f.mul(lam.rep, b)) for a, b in zip(c1_lam, e_lam))
        eigenvalues.append(lam)
        mults.append(mult)
        idempotents.append(e_lam)
        nilpotents.append(nil)
        proj_mats.append(proj)
    # partition of unity and orthogonality
    total = [f.zero()] * ring.rank
    for e in idempotents:
        total = [f.add(a, b) for a, b in zip(total, e)]
    if any(not f.eq(a, b) for a, b in zip(total, ring.unit_vector())):
        raise ExptypeError("idempotents do not sum to the unit")
    for i, e_i in enumerate(idempotents):
        for j, e_j in enumerate(idempotents):
            prod = ring.mult_vectors_q1(e_i, e_j)
            target = e_i if i == j else tuple(f.zero() for _ in range(ring.rank))
            if any(not f.eq(a, b) for a, b in zip(prod, target)):
                raise ExptypeError("idempotents are not orthogonal idempotents")
    # nilpotency of the shifted projections
    for nil, mult in zip(nilpotents, mults):
        power = ring.unit_vector()
        for _ in range(mult):
            power = ring.mult_vectors_q1(power, nil)
        if any(not f.is_zero(c) for c in power):
            raise ExptypeError("projected c1 shift is not nilpotent at its multiplicity")
    return EigenData(eigenvalues, mults, idempotents, nilpotents, proj_mats)
