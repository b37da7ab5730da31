"""Exact scalar arithmetic over the four supported coefficient fields.

Supported kinds: the rationals, a single algebraic extension of the
rationals, an odd prime field, and a single extension of an odd prime
field.  Field objects implement arithmetic on *raw representations*
(``Fraction``, ``int`` in ``[0, p)``, or tuples of those for extensions);
the :class:`Scalar` wrapper carries a field reference and overloads the
usual operators.  All arithmetic is exact and zero tests are decidable.

Field towers are depth one by design: one extension over the rationals or
over a prime field, never an extension of an extension.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import (
    DenominatorDivisibleByP,
    ExptypeError,
    IrreducibilityUnverified,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """Base class; subclasses implement arithmetic on raw representations."""

    kind = None
    char = 0
    degree = 1  # over the base field

    # -- queries -----------------------------------------------------
    @property
    def size(self):
        """Number of elements, or None in characteristic zero."""
        return None

    def scalar(self, x) -> "Scalar":
        return Scalar(self, self.coerce(x))

    def coerce(self, x):
        if isinstance(x, Scalar):
            if x.field != self:
                raise ExptypeError(f"scalar from {x.field} used in {self}")
            return x.rep
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        return self.validate_rep(x)

    def from_fraction(self, q: Fraction):
        num = self.from_int(q.numerator)
        den = self.from_int(q.denominator)
        return self.mul(num, self.inv(den))

    # subclasses: zero, one, from_int, validate_rep, add, neg, mul, inv,
    # is_zero, to_str, sort_key, random_rep

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def sum(self, items):
        acc = self.zero()
        for x in items:
            acc = self.add(acc, x)
        return acc

    def __ne__(self, other):
        return not self.__eq__(other)


class RationalField(Field):
    kind = "rationals"
    char = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def validate_rep(self, x):
        if isinstance(x, Fraction):
            return x
        raise ExptypeError(f"not a rational representation: {x!r}")

    def from_fraction(self, q):
        return q

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def to_str(self, a):
        return str(a)

    def sort_key(self, a):
        return (a,)

    def random_rep(self, rng):
        return Fraction(rng.randint(-12, 12), rng.randint(1, 8))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    kind = "prime"

    def __init__(self, p: int):
        if not is_prime(p) or p == 2:
            raise ExptypeError(f"characteristic must be an odd prime, got {p}")
        self.p = p
        self.char = p

    @property
    def size(self):
        return self.p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def validate_rep(self, x):
        if isinstance(x, int):
            return x % self.p
        raise ExptypeError(f"not a prime-field representation: {x!r}")

    def from_fraction(self, q):
        if q.denominator % self.p == 0:
            raise DenominatorDivisibleByP(q.denominator, self.p)
        return (q.numerator * pow(q.denominator, -1, self.p)) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def to_str(self, a):
        return str(a % self.p)

    def sort_key(self, a):
        return (a % self.p,)

    def random_rep(self, rng):
        return rng.randrange(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return f"GF({self.p})"


# -- dense univariate helpers over a base field (internal) -------------

def _trim(base, coeffs):
    c = list(coeffs)
    while c and base.is_zero(c[-1]):
        c.pop()
    return c


def _poly_mul(base, a, b):
    if not a or not b:
        return []
    out = [base.zero()] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if base.is_zero(ai):
            continue
        for j, bj in enumerate(b):
            out[i + j] = base.add(out[i + j], base.mul(ai, bj))
    return _trim(base, out)


def _poly_divmod(base, a, b):
    """Division with remainder; b need not be monic."""
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    if db < 0:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = base.inv(b[-1])
    q = [base.zero()] * max(da - db + 1, 0)
    while len(a) - 1 >= db and _trim(base, a):
        da = len(a) - 1
        coef = base.mul(a[-1], inv_lead)
        q[da - db] = coef
        for j in range(db + 1):
            a[da - db + j] = base.sub(a[da - db + j], base.mul(coef, b[j]))
        a = a[:-1]
        while a and base.is_zero(a[-1]):
            a.pop()
    return _trim(base, q), _trim(base, a)


def _poly_gcd(base, a, b):
    a, b = _trim(base, a), _trim(base, b)
    while b:
        a, b = b, _poly_divmod(base, a, b)[1]
    if a:
        lead_inv = base.inv(a[-1])
        a = [base.mul(c, lead_inv) for c in a]
    return a


def _poly_ext_gcd(base, a, b):
    """Returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = _trim(base, a), _trim(base, b)
    s0, s1 = [base.one()], []
    t0, t1 = [], [base.one()]
    while r1:
        q, r = _poly_divmod(base, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _trim(base, [base.sub(x, y) for x, y in _zip_pad(base, s0, _poly_mul(base, q, s1))])
        t0, t1 = t1, _trim(base, [base.sub(x, y) for x, y in _zip_pad(base, t0, _poly_mul(base, q, t1))])
    if r0:
        c = base.inv(r0[-1])
        r0 = [base.mul(x, c) for x in r0]
        s0 = [base.mul(x, c) for x in s0]
        t0 = [base.mul(x, c) for x in t0]
    return r0, s0, t0


def _zip_pad(base, a, b):
    n = max(len(a), len(b))
    z = base.zero()
    return [(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)]


def _poly_powmod(base, a, n, mod):
    result = [base.one()]
    a = _poly_divmod(base, a, mod)[1]
    while n:
        if n & 1:
            result = _poly_divmod(base, _poly_mul(base, result, a), mod)[1]
        a = _poly_divmod(base, _poly_mul(base, a, a), mod)[1]
        n >>= 1
    return result


def _is_irreducible_mod(base, f):
    """Rabin test over a finite prime field (base must have finite size)."""
    q = base.size
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [base.zero(), base.one()]
    # x^(q^n) == x mod f
    h = x
    for _ in range(n):
        h = _poly_powmod(base, h, q, f)
    diff = _trim(base, [base.sub(a, b) for a, b in _zip_pad(base, h, x)])
    if diff:
        return False
    for ell in {d for d in range(2, n + 1) if n % d == 0 and is_prime(d)}:
        h = x
        for _ in range(n // ell):
            h = _poly_powmod(base, h, q, f)
        diff = _trim(base, [base.sub(a, b) for a, b in _zip_pad(base, h, x)])
        g = _poly_gcd(base, diff, f)
        if len(g) - 1 != 0:
            return False
    return True


def _rational_roots_exist(coeffs):
    """Exact rational-root test for a monic polynomial over Q."""
    from math import gcd

    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    lead, const = ints[-1], ints[0]
    if const == 0:
        return True
    divs = lambda n: {d for d in range(1, abs(n) + 1) if n % d == 0}
    for r in divs(const):
        for s in divs(lead):
            for num in (r, -r):
                cand = Fraction(num, s)
                val = Fraction(0)
                for c in reversed(coeffs):
                    val = val * cand + c
                if val == 0:
                    return True
    return False


def _verify_irreducible_over_q(coeffs):
    """Certify irreducibility of a monic polynomial over Q.

    Uses reduction mod small primes (a single irreducible reduction
    certifies) and the exact rational-root test for degrees up to 3.
    Degrees above 3 with no modular certificate are rejected rather than
    accepted unverified.
    """
    deg = len(coeffs) - 1
    if deg == 1:
        return
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if any(c.denominator % p == 0 for c in coeffs):
            continue
        gf = PrimeField(p)
        try:
            reduced = [gf.from_fraction(c) for c in coeffs]
        except DenominatorDivisibleByP:
            continue
        if _is_irreducible_mod(gf, reduced):
            return
    if deg <= 3:
        if not _rational_roots_exist(coeffs):
            return
        raise IrreducibilityUnverified(f"polynomial has a rational root: {coeffs}")
    raise IrreducibilityUnverified(
        f"could not certify irreducibility over Q for degree {deg}; "
        "supply a polynomial that is irreducible modulo a small prime"
    )


class ExtensionField(Field):
    """Depth-one extension of the rationals or of an odd prime field.

    Elements are coordinate tuples in the power basis of a root of the
    monic minimal polynomial (stored constant-first, including the
    leading 1).
    """

    def __init__(self, base: Field, minpoly):
        if isinstance(base, ExtensionField):
            raise ExptypeError("field towers are depth one only")
        self.base = base
        mp = [base.coerce(c) for c in minpoly]
        mp = _trim(base, mp)
        if len(mp) < 2:
            raise ExptypeError("minimal polynomial must have degree >= 1")
        if not base.eq(mp[-1], base.one()):
            raise ExptypeError("minimal polynomial must be monic")
        if base.char == 0:
            _verify_irreducible_over_q(mp)
            self.kind = "rational_extension"
        else:
            if not _is_irreducible_mod(base, mp):
                raise ExptypeError(f"minimal polynomial {mp} is reducible over {base}")
            self.kind = "prime_extension"
        self.minpoly = tuple(mp)
        self.degree = len(mp) - 1
        self.char = base.char
        # reduction table: x^(degree+i) expressed in the power basis
        e = self.degree
        red = []
        cur = [base.neg(c) for c in mp[:-1]]  # x^e
        red.append(list(cur))
        for _ in range(e - 2):
            top = cur[-1]
            shifted = [base.zero()] + cur[:-1]
            cur = [base.add(shifted[k], base.mul(top, red[0][k])) for k in range(e)]
            red.append(list(cur))
        self._reduction = red

    @property
    def size(self):
        if self.char == 0:
            return None
        return self.base.size ** self.degree

    def zero(self):
        return tuple([self.base.zero()] * self.degree)

    def one(self):
        return self.embed_base(self.base.one())

    def generator(self) -> "Scalar":
        if self.degree == 1:
            return Scalar(self, self.embed_base(self.base.neg(self.minpoly[0])))
        coords = [self.base.zero()] * self.degree
        coords[1] = self.base.one()
        return Scalar(self, tuple(coords))

    def embed_base(self, b):
        coords = [self.base.zero()] * self.degree
        coords[0] = b
        return tuple(coords)

    def from_int(self, n):
        return self.embed_base(self.base.from_int(n))

    def from_fraction(self, q):
        return self.embed_base(self.base.from_fraction(q))

    def validate_rep(self, x):
        if isinstance(x, (tuple, list)) and len(x) == self.degree:
            return tuple(self.base.coerce(c) for c in x)
        if self.degree == 1 or isinstance(x, (int, Fraction)):
            return self.embed_base(self.base.coerce(x))
        raise ExptypeError(f"not an extension representation of degree {self.degree}: {x!r}")

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        base, e = self.base, self.degree
        if e == 1:
            return (base.mul(a[0], b[0]),)
        prod = [base.zero()] * (2 * e - 1)
        for i, ai in enumerate(a):
            if base.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                prod[i + j] = base.add(prod[i + j], base.mul(ai, bj))
        out = list(prod[:e])
        for i in range(e, 2 * e - 1):
            c = prod[i]
            if base.is_zero(c):
                continue
            row = self._reduction[i - e]
            for k in range(e):
                out[k] = base.add(out[k], base.mul(c, row[k]))
        return tuple(out)

    def inv(self, a):
        base = self.base
        rep = _trim(base, list(a))
        if not rep:
            raise ZeroDivisionError("inverse of zero")
        g, u, _ = _poly_ext_gcd(base, rep, list(self.minpoly))
        if len(g) - 1 != 0:
            raise ExptypeError("minimal polynomial not irreducible (gcd found)")
        u = _poly_mul(base, u, [base.inv(g[0])])
        u = (u + [base.zero()] * self.degree)[: self.degree]
        return tuple(u)

    def is_zero(self, a):
        return all(self.base.is_zero(x) for x in a)

    def to_str(self, a):
        return "[" + ",".join(self.base.to_str(x) for x in a) + "]"

    def sort_key(self, a):
        key = ()
        for x in a:
            key = key + self.base.sort_key(x)
        return key

    def random_rep(self, rng):
        return tuple(self.base.random_rep(rng) for _ in range(self.degree))

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.base == self.base
            and other.minpoly == self.minpoly
        )

    def __hash__(self):
        return hash((self.kind, self.base, self.minpoly))

    def __repr__(self):
        mp = ",".join(self.base.to_str(c) for c in self.minpoly)
        return f"{self.base}[x]/({mp})"


QQ = RationalField()


def rational_extension(minpoly) -> ExtensionField:
    return ExtensionField(QQ, [Fraction(c) if not isinstance(c, Fraction) else c for c in minpoly])


def prime_extension(p: int, minpoly) -> ExtensionField:
    return ExtensionField(PrimeField(p), minpoly)


class Scalar:
    """Field element: a field reference plus a canonical raw representation."""

    __slots__ = ("field", "rep")

    def __init__(self, field: Field, rep):
        self.field = field
        self.rep = rep

    def _coerce_other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise ExptypeError("scalars from different fields")
            return other.rep
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.rep, self._coerce_other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.rep, self._coerce_other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._coerce_other(other), self.rep))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.rep, self._coerce_other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.rep, self._coerce_other(other)))

    def __rtruediv__(self, other):
        return Scalar(self.field, self.field.div(self._coerce_other(other), self.rep))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.rep))

    def __pow__(self, n):
        return Scalar(self.field, self.field.pow(self.rep, n))

    def __eq__(self, other):
        try:
            return self.field.eq(self.rep, self._coerce_other(other))
        except ExptypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.field.sort_key(self.rep)))

    def is_zero(self):
        return self.field.is_zero(self.rep)

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.rep))

    def sort_key(self):
        return self.field.sort_key(self.rep)

    def __repr__(self):
        return self.field.to_str(self.rep)


def reduce_rep(src: Field, rep, target: Field, generator_image=None):
    """Reduce a raw representation from a characteristic-zero field mod p.

    ``generator_image`` is the image of the extension generator in the
    target (a raw rep), required when the source is a rational extension
    and the value has nonzero higher coordinates.
    """
    if src.char != 0:
        raise ExptypeError("reduce_mod_p expects a characteristic-zero source")
    if target.char == 0:
        raise ExptypeError("reduce_mod_p expects a positive-characteristic target")
    if isinstance(src, RationalField):
        return target.from_fraction(rep)
    # rational extension source
    coords = list(rep)
    if all(c == 0 for c in coords[1:]):
        return target.from_fraction(coords[0])
    if generator_image is None:
        raise ExptypeError(
            "reduction of a non-rational extension element needs the image of the generator"
        )
    img = target.coerce(generator_image)
    acc = target.zero()
    for c in reversed(coords):
        acc = target.add(target.mul(acc, img), target.from_fraction(c))
    return acc


def parse_scalar(field: Field, value) -> "Scalar":
    """Parse a manifest scalar: int, "3/2"-style string, or coordinate list."""
    if isinstance(value, Scalar):
        return field.scalar(value)
    if isinstance(value, bool):
        raise ExptypeError(f"boolean is not a scalar: {value!r}")
    if isinstance(value, int):
        return field.scalar(value)
    if isinstance(value, str):
        return field.scalar(field.from_fraction(Fraction(value)))
    if isinstance(value, (list, tuple)):
        if not isinstance(field, ExtensionField):
            raise ExptypeError("coordinate lists need an extension field")
        coords = []
        for c in value:
            if isinstance(c, str):
                coords.append(field.base.from_fraction(Fraction(c)))
            else:
                coords.append(field.base.coerce(c))
        while len(coords) < field.degree:
            coords.append(field.base.zero())
        return Scalar(field, tuple(coords[: field.degree]))
    raise ExptypeError(f"cannot parse scalar {value!r}")


def check_generator_image(src: ExtensionField, target: Field, image) -> bool:
    """True when ``image`` is a root of the reduced minimal polynomial."""
    img = target.coerce(image)
    acc = target.zero()
    for c in reversed(src.minpoly):
        acc = target.add(target.mul(acc, img), target.from_fraction(c))
    return target.is_zero(acc)
