"""Multivariate polynomials and univariate factorization over finite fields.

Polynomials are finitely supported maps from exponent vectors to field
representations; no explicit zeros are stored.  Univariate algorithms
(division, gcd, squarefree decomposition, distinct-degree and randomized
equal-degree splitting) run on dense coefficient lists internally.

Factorization over characteristic zero is deliberately unsupported; the
rational-root search in :func:`rational_roots` is exact and is the only
root-finding offered on that side.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import CharacteristicZero, ExptypeError
from .fields import (
    ExtensionField,
    Field,
    PrimeField,
    Scalar,
    _is_irreducible_mod,
    _poly_divmod,
    _poly_gcd,
    _poly_powmod,
    _trim,
    _zip_pad,
)


class Poly:
    __slots__ = ("field", "vars", "terms")

    def __init__(self, field: Field, variables, terms):
        self.field = field
        self.vars = tuple(variables)
        clean = {}
        for exps, c in terms.items():
            rep = field.coerce(c)
            if not field.is_zero(rep):
                clean[tuple(exps)] = rep
        self.terms = clean

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, field, variables):
        return cls(field, variables, {})

    @classmethod
    def constant(cls, field, variables, c):
        return cls(field, variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, field, variables, name):
        idx = tuple(variables).index(name)
        exps = [0] * len(variables)
        exps[idx] = 1
        return cls(field, variables, {tuple(exps): field.one()})

    @classmethod
    def from_dense(cls, field, var, coeffs):
        """Univariate from a constant-first coefficient list."""
        return cls(field, (var,), {(i,): c for i, c in enumerate(coeffs)})

    def to_dense(self):
        if len(self.vars) != 1:
            raise ExptypeError("dense form requires a univariate polynomial")
        if not self.terms:
            return []
        deg = max(e[0] for e in self.terms)
        out = [self.field.zero()] * (deg + 1)
        for e, c in self.terms.items():
            out[e[0]] = c
        return out

    # -- queries -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name):
        if not self.terms:
            return -1
        idx = self.vars.index(name)
        return max(e[idx] for e in self.terms)

    def coefficient(self, exps) -> Scalar:
        return Scalar(self.field, self.terms.get(tuple(exps), self.field.zero()))

    def constant_term(self) -> Scalar:
        return self.coefficient((0,) * len(self.vars))

    def is_monic_univariate(self):
        d = self.to_dense()
        return bool(d) and self.field.eq(d[-1], self.field.one())

    # -- arithmetic ----------------------------------------------------
    def _check(self, other):
        if self.field != other.field or self.vars != other.vars:
            raise ExptypeError("polynomials over different rings")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        f = self.field
        for e, c in other.terms.items():
            out[e] = f.add(out.get(e, f.zero()), c)
        return Poly(f, self.vars, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly(self.field, self.vars, {e: self.field.neg(c) for e, c in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        f = self.field
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = f.add(out.get(e, f.zero()), f.mul(c1, c2))
        return Poly(f, self.vars, out)

    def scale(self, c):
        rep = self.field.coerce(c)
        return Poly(self.field, self.vars, {e: self.field.mul(v, rep) for e, v in self.terms.items()})

    def __pow__(self, n: int):
        result = Poly.constant(self.field, self.vars, self.field.one())
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms))))

    def derivative(self, name):
        idx = self.vars.index(name)
        f = self.field
        out = {}
        for e, c in self.terms.items():
            if e[idx] == 0:
                continue
            ne = list(e)
            ne[idx] -= 1
            out[tuple(ne)] = f.add(out.get(tuple(ne), f.zero()), f.mul(c, f.from_int(e[idx])))
        return Poly(f, self.vars, out)

    def eval(self, values: dict):
        """Evaluate at raw reps / Scalars, fully substituting every variable."""
        f = self.field
        reps = [f.coerce(values[v]) for v in self.vars]
        acc = f.zero()
        for e, c in self.terms.items():
            t = c
            for ei, r in zip(e, reps):
                if ei:
                    t = f.mul(t, f.pow(r, ei))
            acc = f.add(acc, t)
        return Scalar(f, acc)

    def map_coefficients(self, target_field, fn):
        return Poly(target_field, self.vars, {e: fn(c) for e, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            cs = self.field.to_str(c)
            bits.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(bits)


# -- univariate division / gcd on Poly --------------------------------

def poly_divmod(a: Poly, b: Poly):
    a._check(b)
    q, r = _poly_divmod(a.field, a.to_dense(), b.to_dense())
    var = a.vars[0]
    return Poly.from_dense(a.field, var, q), Poly.from_dense(a.field, var, r)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a._check(b)
    g = _poly_gcd(a.field, a.to_dense(), b.to_dense())
    return Poly.from_dense(a.field, a.vars[0], g)


# -- factorization over finite fields ----------------------------------

def _pth_root_dense(field, f):
    p = field.char
    if isinstance(field, PrimeField):
        root = lambda c: c  # Frobenius is the identity on F_p
    else:
        k = field.degree
        e = p ** (k - 1)
        root = lambda c: field.pow(c, e)
    return [root(f[i]) for i in range(0, len(f), p)]


def _deriv_dense(field, f):
    return _trim(field, [field.mul(f[i], field.from_int(i)) for i in range(1, len(f))])


def _squarefree_parts(field, f, mult=1):
    """Monic squarefree decomposition in characteristic p."""
    out = []
    df = _deriv_dense(field, f)
    if not df:
        return _squarefree_parts(field, _pth_root_dense(field, f), mult * field.char)
    c = _poly_gcd(field, f, df)
    w = _poly_divmod(field, f, c)[0]
    i = 1
    while len(w) > 1:
        y = _poly_gcd(field, w, c)
        z = _poly_divmod(field, w, y)[0]
        if len(z) > 1:
            out.append((z, i * mult))
        w = y
        c = _poly_divmod(field, c, y)[0]
        i += 1
    if len(c) > 1:
        # c collects the factors with p-divisible multiplicity; it has zero
        # derivative, so the branch above takes the p-th root exactly once.
        out.extend(_squarefree_parts(field, c, mult))
    return out


def _distinct_degree(field, f):
    """Split a monic squarefree f into products of equal-degree factors."""
    q = field.size
    out = []
    x = [field.zero(), field.one()]
    h = x
    d = 1
    while len(f) - 1 >= 2 * d:
        h = _poly_powmod(field, h, q, f)
        diff = _trim(field, [field.sub(a, b) for a, b in _zip_pad(field, h, x)])
        g = _poly_gcd(field, diff, f)
        if len(g) > 1:
            out.append((g, d))
            f = _poly_divmod(field, f, g)[0]
            h = _poly_divmod(field, h, f)[1]
        d += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _equal_degree_split(field, f, d, rng):
    """Cantor-Zassenhaus: f is monic squarefree, all factors of degree d."""
    n = len(f) - 1
    if n == d:
        return [f]
    q = field.size
    exp = (q ** d - 1) // 2
    while True:
        a = [field.random_rep(rng) for _ in range(n)]
        a = _trim(field, a)
        if len(a) <= 1:
            continue
        g = _poly_gcd(field, a, f)
        if 1 < len(g) < len(f):
            left, right = g, _poly_divmod(field, f, g)[0]
        else:
            b = _poly_powmod(field, a, exp, f)
            b = _trim(field, [field.sub(x, y) for x, y in _zip_pad(field, b, [field.one()])])
            g = _poly_gcd(field, b, f)
            if not (1 < len(g) < len(f)):
                continue
            left, right = g, _poly_divmod(field, f, g)[0]
        return _equal_degree_split(field, left, d, rng) + _equal_degree_split(field, right, d, rng)


def factor_over_finite_field(f: Poly, field: Field, seed: int = 0):
    """Factor a univariate polynomial over F_p or F_{p^k}.

    Returns a list of (monic irreducible Poly, multiplicity); the product
    of the factors times the leading coefficient of ``f`` reproduces ``f``.
    """
    import random

    if field.char == 0:
        raise CharacteristicZero("factorization over characteristic zero is unsupported")
    if f.field != field:
        raise ExptypeError("polynomial is not over the requested field")
    dense = f.to_dense()
    if len(dense) <= 1:
        return []
    lead_inv = field.inv(dense[-1])
    dense = [field.mul(c, lead_inv) for c in dense]
    rng = random.Random(seed)
    var = f.vars[0]
    out = []
    for squarefree, mult in _squarefree_parts(field, dense):
        for prod, d in _distinct_degree(field, squarefree):
            for irr in _equal_degree_split(field, prod, d, rng):
                out.append((Poly.from_dense(field, var, irr), mult))
    out.sort(key=lambda fm: (len(fm[0].to_dense()), [field.sort_key(c) for c in fm[0].to_dense()]))
    return out


def find_irreducible(field: PrimeField, degree: int, seed: int = 0) -> Poly:
    """Seeded search for a monic irreducible of the given degree over F_p."""
    import random

    rng = random.Random((seed, field.p, degree).__hash__())
    if degree == 1:
        return Poly.from_dense(field, "x", [field.zero(), field.one()])
    while True:
        coeffs = [field.random_rep(rng) for _ in range(degree)] + [field.one()]
        if _is_irreducible_mod(field, coeffs):
            return Poly.from_dense(field, "x", coeffs)


def splitting_field(f: Poly, p: int, seed: int = 0) -> Field:
    """Smallest F_{p^k} over which the univariate f splits completely.

    The result is verified by re-factoring f over it.
    """
    import math

    base = PrimeField(p)
    if f.field != base:
        f = f.map_coefficients(base, lambda c: c)
    factors = factor_over_finite_field(f, base, seed=seed)
    k = 1
    for g, _ in factors:
        k = math.lcm(k, g.total_degree())
    if k == 1:
        return base
    minpoly = find_irreducible(base, k, seed=seed)
    ext = ExtensionField(base, minpoly.to_dense())
    lifted = f.map_coefficients(ext, ext.embed_base)
    for g, _ in factor_over_finite_field(lifted, ext, seed=seed):
        if g.total_degree() != 1:
            raise ExptypeError("splitting-field verification failed")
    return ext


def roots_over_finite_field(f: Poly, field: Field, seed: int = 0):
    """Roots with multiplicity; raises nothing, ignores nonlinear factors."""
    out = []
    for g, mult in factor_over_finite_field(f, field, seed=seed):
        dense = g.to_dense()
        if len(dense) == 2:
            out.append((Scalar(field, field.neg(dense[0])), mult))
    return out


def rational_roots(f: Poly):
    """All rational roots (with multiplicity) of a univariate f over Q.

    Exact: clears denominators and applies the rational-root theorem,
    deflating as roots are found.  The returned remainder polynomial has
    no rational roots.
    """
    from math import gcd

    field = f.field
    if field.char != 0:
        raise ExptypeError("rational_roots runs over characteristic zero")
    dense = f.to_dense()
    if len(dense) <= 1:
        return [], f
    roots = []
    var = f.vars[0]
    while len(dense) > 1:
        fracs = [c if isinstance(c, Fraction) else Fraction(c) for c in dense]
        den = 1
        for c in fracs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in fracs]
        while ints and ints[0] == 0:
            roots.append(Fraction(0))
            dense = dense[1:]
            ints = ints[1:]
        if len(ints) <= 1:
            break
        found = None
        divisors = lambda n: [d for d in range(1, abs(n) + 1) if n % d == 0]
        for s in divisors(ints[-1]):
            for r in divisors(ints[0]):
                for num in (r, -r):
                    cand = Fraction(num, s)
                    val = Fraction(0)
                    for c in reversed(fracs):
                        val = val * cand + c
                    if val == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        # synthetic division by (x - found)
        quot = [Fraction(0)] * (len(fracs) - 1)
        carry = Fraction(0)
        for i in range(len(fracs) - 1, 0, -1):
            carry = fracs[i] + carry * found
            quot[i - 1] = carry
        dense = quot
    grouped = []
    for r in sorted(set(roots)):
        grouped.append((Scalar(f.field, f.field.from_fraction(r)), roots.count(r)))
    remainder = Poly.from_dense(f.field, var, [f.field.from_fraction(c if isinstance(c, Fraction) else Fraction(c)) for c in dense])
    return grouped, remainder


def char_zero_roots(f: Poly, hints=None):
    """Exact roots of a univariate f over Q or an extension of Q.

    Finds every rational root (over an extension, rational roots are the
    common roots of the coordinate polynomials, located by projecting and
    taking a gcd), then tries the supplied hint elements.  Returns
    (sorted (Scalar, multiplicity) pairs, remainder Poly with none of the
    found roots).  No factorization over Q is attempted: roots beyond the
    rational ones must arrive as hints.
    """
    from .fields import ExtensionField, QQ as _QQ

    field = f.field
    if field.char != 0:
        raise ExptypeError("char_zero_roots runs over characteristic zero")
    candidates = []
    if isinstance(field, ExtensionField):
        dense = f.to_dense()
        coord_polys = []
        for j in range(field.degree):
            coords = [c[j] for c in dense]
            coord_polys.append(Poly.from_dense(_QQ, f.vars[0], coords))
        g = coord_polys[0]
        for h in coord_polys[1:]:
            g = poly_gcd(g, h)
        if g.total_degree() >= 1:
            for root, _ in rational_roots(g)[0]:
                candidates.append(field.from_fraction(root.rep))
    else:
        for root, _ in rational_roots(f)[0]:
            candidates.append(root.rep)
    for h in hints or []:
        candidates.append(field.coerce(h))
    pairs = []
    dense = f.to_dense()
    seen = []
    for cand in candidates:
        if any(field.eq(cand, s) for s in seen):
            continue
        seen.append(cand)
        mult = 0
        while len(dense) > 1:
            val = field.zero()
            for c in reversed(dense):
                val = field.add(field.mul(val, cand), c)
            if not field.is_zero(val):
                break
            mult += 1
            quot = [field.zero()] * (len(dense) - 1)
            carry = field.zero()
            for i in range(len(dense) - 1, 0, -1):
                carry = field.add(dense[i], field.mul(carry, cand))
                quot[i - 1] = carry
            dense = quot
        if mult:
            pairs.append((Scalar(field, cand), mult))
    pairs.sort(key=lambda sm: sm[0].sort_key())
    return pairs, Poly.from_dense(field, f.vars[0], dense)


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+/\d+|\d+|\^|\*|\+|-)")


def parse_poly(text: str, variables, field: Field) -> Poly:
    """Parse sums of monomials like ``"z^3 + w^3"`` or ``"1/2*x^2 - 3"``."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ExptypeError(f"cannot parse polynomial at: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    result = Poly.zero(field, variables)
    i = 0
    sign = 1
    nvars = len(variables)
    var_index = {v: k for k, v in enumerate(variables)}
    while i < len(tokens):
        if tokens[i] == "+":
            sign = 1
            i += 1
            continue
        if tokens[i] == "-":
            sign = -1
            i += 1
            continue
        coeff = Fraction(sign)
        exps = [0] * nvars
        expect_factor = True
        while i < len(tokens) and tokens[i] not in ("+", "-"):
            tok = tokens[i]
            if tok == "*":
                i += 1
                expect_factor = True
                continue
            if not expect_factor:
                raise ExptypeError(f"missing operator before {tok!r} in {text!r}")
            if tok in var_index:
                power = 1
                if i + 1 < len(tokens) and tokens[i + 1] == "^":
                    if i + 2 >= len(tokens):
                        raise ExptypeError(f"dangling '^' in {text!r}")
                    power = int(tokens[i + 2])
                    i += 2
                exps[var_index[tok]] += power
            else:
                try:
                    coeff *= Fraction(tok)
                except ValueError:
                    raise ExptypeError(f"unexpected token {tok!r} in {text!r}") from None
            expect_factor = False
            i += 1
        term = Poly(field, variables, {tuple(exps): field.from_fraction(coeff)})
        result = result + term
        sign = 1
    return result
