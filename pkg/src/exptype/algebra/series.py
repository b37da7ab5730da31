"""Truncated Laurent series with explicit validity windows.

A series value is ``sum(coeffs[i] * t^(low+i)) + O(t^order)``.  The floor
``low`` is part of the value (there are no terms below it); the ceiling
``order`` is the knowledge boundary.  Every arithmetic result carries the
sound validity window derived from its operands: sums keep the minimum
order, products use ``min(o1 + low2, o2 + low1)``, and inverses of a
series with exact valuation ``v`` are valid to ``order - 2v``.  Truncation
is never implicit.
"""

from __future__ import annotations

from ..errors import ExptypeError, TruncationTooSmall
from .fields import Field, Scalar


class TruncSeries:
    __slots__ = ("field", "var", "low", "order", "coeffs")

    def __init__(self, field: Field, coeffs, low: int = 0, order: int = None, var: str = "t"):
        self.field = field
        self.var = var
        self.low = low
        reps = [field.coerce(c) for c in coeffs]
        if order is None:
            order = low + len(reps)
        if order < low:
            raise TruncationTooSmall(f"order {order} below floor {low}")
        reps = reps[: order - low]
        while len(reps) < order - low:
            reps.append(field.zero())
        self.order = order
        self.coeffs = tuple(reps)

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, field, order, low=0, var="t"):
        return cls(field, [], low=low, order=order, var=var)

    @classmethod
    def from_scalar(cls, field, c, order, var="t"):
        return cls(field, [field.coerce(c)], low=0, order=order, var=var)

    @classmethod
    def one(cls, field, order, var="t"):
        return cls.from_scalar(field, field.one(), order, var=var)

    @classmethod
    def monomial(cls, field, c, k, order, var="t"):
        return cls(field, [field.coerce(c)], low=k, order=order, var=var)

    # -- access ----------------------------------------------------------
    def coeff(self, k):
        """Raw representation of the t^k coefficient (exact zero below low)."""
        if k < self.low:
            return self.field.zero()
        if k >= self.order:
            raise TruncationTooSmall(f"coefficient t^{k} beyond validity order {self.order}")
        return self.coeffs[k - self.low]

    def coeff_scalar(self, k) -> Scalar:
        return Scalar(self.field, self.coeff(k))

    def window(self):
        return (self.low, self.order)

    def is_zero(self):
        """All known coefficients vanish (a truncation-qualified statement)."""
        return all(self.field.is_zero(c) for c in self.coeffs)

    def valuation(self):
        """(exact valuation or None, lower bound).

        None means every known coefficient vanishes; the true valuation is
        then >= the returned bound.
        """
        for i, c in enumerate(self.coeffs):
            if not self.field.is_zero(c):
                return self.low + i, self.low + i
        return None, self.order

    def compressed(self):
        """Raise the floor past known-zero leading coefficients."""
        v, bound = self.valuation()
        start = bound if v is None else v
        return TruncSeries(self.field, self.coeffs[start - self.low:], low=start,
                           order=self.order, var=self.var)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, TruncSeries) or other.field != self.field or other.var != self.var:
            raise ExptypeError("series mismatch")

    def __add__(self, other):
        self._check(other)
        low = min(self.low, other.low)
        order = min(self.order, other.order)
        f = self.field
        out = []
        for k in range(low, order):
            a = self.coeff(k) if k < self.order else f.zero()
            b = other.coeff(k) if k < other.order else f.zero()
            out.append(f.add(a, b))
        return TruncSeries(f, out, low=low, order=order, var=self.var)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TruncSeries(self.field, [self.field.neg(c) for c in self.coeffs],
                           low=self.low, order=self.order, var=self.var)

    def __mul__(self, other):
        self._check(other)
        f = self.field
        low = self.low + other.low
        order = min(self.order + other.low, other.order + self.low)
        n = order - low
        out = [f.zero()] * n
        for i, a in enumerate(self.coeffs):
            if f.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= n:
                    break
                out[k] = f.add(out[k], f.mul(a, b))
        return TruncSeries(f, out, low=low, order=order, var=self.var)

    def scale(self, c):
        rep = self.field.coerce(c)
        return TruncSeries(self.field, [self.field.mul(x, rep) for x in self.coeffs],
                           low=self.low, order=self.order, var=self.var)

    def shift(self, k: int):
        """Multiply by t^k."""
        return TruncSeries(self.field, self.coeffs, low=self.low + k,
                           order=self.order + k, var=self.var)

    def derivative(self):
        f = self.field
        out = []
        for i, c in enumerate(self.coeffs):
            e = self.low + i
            if e == 0:
                continue
            out.append((e - 1, f.mul(c, f.from_int(e))))
        low = self.low - 1
        order = self.order - 1
        dense = [f.zero()] * (order - low)
        for e, c in out:
            if low <= e < order:
                dense[e - low] = c
        return TruncSeries(f, dense, low=low, order=order, var=self.var)

    def inverse(self):
        v, bound = self.valuation()
        if v is None:
            raise ExptypeError(f"cannot invert: no nonzero coefficient up to order {bound}")
        f = self.field
        unit = self.coeffs[v - self.low:]
        n = len(unit)
        lead_inv = f.inv(unit[0])
        out = [f.zero()] * n
        out[0] = lead_inv
        for k in range(1, n):
            acc = f.zero()
            for j in range(k):
                acc = f.add(acc, f.mul(unit[k - j], out[j]))
            out[k] = f.neg(f.mul(acc, lead_inv))
        return TruncSeries(f, out, low=-v, order=self.order - 2 * v, var=self.var)

    def truncate(self, new_order: int):
        if new_order > self.order:
            raise TruncationTooSmall(f"cannot extend validity {self.order} -> {new_order}")
        return TruncSeries(self.field, self.coeffs[: new_order - self.low],
                           low=self.low, order=new_order, var=self.var)

    def eq_window(self, other):
        """Equality of all coefficients on the common validity window."""
        self._check(other)
        return (self - other).is_zero()

    def map_coefficients(self, target_field, fn):
        return TruncSeries(target_field, [fn(c) for c in self.coeffs],
                           low=self.low, order=self.order, var=self.var)

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.field == other.field
            and self.var == other.var
            and self.low == other.low
            and self.order == other.order
            and all(self.field.eq(a, b) for a, b in zip(self.coeffs, other.coeffs))
        )

    def __repr__(self):
        f = self.field
        bits = []
        for i, c in enumerate(self.coeffs):
            if f.is_zero(c):
                continue
            e = self.low + i
            cs = f.to_str(c)
            if e == 0:
                bits.append(cs)
            else:
                bits.append(f"{cs}*{self.var}^{e}")
        body = " + ".join(bits) if bits else "0"
        return f"{body} + O({self.var}^{self.order})"
