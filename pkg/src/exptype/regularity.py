"""Characteristic-zero regularity certification and certificate assembly.

The route is cyclic vector -> scalar operator in the t d/dt frame ->
Newton polygon (regular singular iff no coefficient has a pole once the
leading coefficient is normalized) -> indicial roots by exact rational
search.  Verdicts degrade to "inconclusive" whenever a valuation
comparison could flip beyond the truncation; nothing is guessed.

The exponential-type certificate glues the characteristic-zero data
(eigenvalues, per-eigenvalue residual regularity and quasi-unipotence)
with per-prime p-curvature nilpotency evidence.  Both sides are reported
independently; neither is inferred from the other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    ExtensionField,
    Field,
    Matrix,
    MatrixSeries,
    Poly,
    PrimeField,
    Scalar,
    TruncSeries,
    char_zero_roots,
    splitting_field,
)
from .connection import (
    FormalConnection,
    GaugeTransform,
    elementary_split,
    residual_connection,
)
from .errors import CyclicSearchFailed, ExptypeError, ScaleExceeded, TruncationTooSmall
from .pcurvature import shifted_block_pcurvature


@dataclass
class ScalarOperator:
    """sum a_i(t) (t d/dt)^i with a_d = 1; coefficients carry exact windows."""

    coeffs: list  # TruncSeries a_0 ... a_d
    frame: str = "t_dt"

    @property
    def degree(self):
        return len(self.coeffs) - 1


def _apply_t_dt(c: FormalConnection, v: MatrixSeries) -> MatrixSeries:
    return v.derivative().shift(1) + c.t2_frame().shift(-1) * v


def _series_matrix_det(columns, field):
    """Determinant of a square matrix of truncated Laurent series.

    Cofactor expansion; fine at cohomology ranks, guarded above that.
    """
    d = len(columns)
    if d > 6:
        raise ScaleExceeded("cyclic-vector determinants capped at rank 6")
    order = min(col.order for col in columns)

    def entry(i, j):
        return columns[j].entry(i, 0)

    def det(rows, cols):
        if len(rows) == 1:
            return entry(rows[0], cols[0])
        acc = None
        for k, r in enumerate(rows):
            minor = det([x for x in rows if x != r], cols[1:])
            term = entry(r, cols[0]) * minor
            if k % 2 == 1:
                term = -term
            acc = term if acc is None else acc + term
        return acc

    return det(list(range(d)), list(range(d)))


def _cyclic_candidates(field, d, tries, rng):
    """Two deterministic candidates, then seeded random polynomial vectors."""
    one, zero = field.one(), field.zero()
    yield [[one] + [zero] * d for _ in range(d)]
    yield [[one if k == i else zero for k in range(d + 1)] for i in range(d)]
    for _ in range(max(tries - 2, 0)):
        yield [[field.from_int(rng.randint(-3, 3)) for _ in range(d + 1)] for _ in range(d)]


def find_cyclic_vector(c: FormalConnection, seed: int = 0, tries: int = 12):
    """Polynomial vector cyclic for the t d/dt iteration.

    Verifies that v, nabla v, ..., nabla^(d-1) v have a nonzero series
    determinant (valuation computed exactly), then expresses nabla^d v in
    that basis.  Candidates are scanned for the smallest determinant
    valuation: at valuation zero the cyclic basis spans the same lattice,
    which pins the indicial roots (otherwise they are canonical only up to
    integer shifts).  Raises CyclicSearchFailed with the persistent
    obstruction.
    """
    f = c.field
    d = c.rank
    if c.order < d + 2:
        raise TruncationTooSmall(f"cyclic search needs order >= rank + 2 = {d + 2}")
    rng = random.Random(seed)
    best = None
    last_obstruction = None
    for col in _cyclic_candidates(f, d, tries, rng):
        coeffs = [Matrix(f, [[col[i][k]] for i in range(d)]) for k in range(d + 1)]
        v = MatrixSeries(f, coeffs, low=0, order=c.order, shape=(d, 1))
        basis = [v]
        for _ in range(d):
            basis.append(_apply_t_dt(c, basis[-1]))
        det = _series_matrix_det(basis[:d], f)
        val, bound = det.valuation()
        if val is None:
            last_obstruction = f"determinant vanishes to order {bound}"
            continue
        if best is None or val < best[0]:
            best = (val, v, basis, det)
        if val <= 0:
            break
    if best is None:
        raise CyclicSearchFailed(tries, last_obstruction or "no candidate tried")
    _, v, basis, det = best
    det_inv = det.inverse()
    x = []
    for i in range(d):
        replaced = basis[:i] + [basis[d]] + basis[i + 1:d]
        x.append(_series_matrix_det(replaced, f) * det_inv)
    residual_order = min(s.order for s in x)
    coeffs_out = [-s for s in x] + [TruncSeries.one(f, residual_order)]
    return v, ScalarOperator(coeffs=coeffs_out)


@dataclass
class FuchsReport:
    verdict: str                 # "regular_singular" | "irregular" | "inconclusive"
    slopes: list                 # Fractions; [0] for regular singular
    points: list                 # known Newton-polygon points (i, valuation)
    detail: str = ""

    def __bool__(self):
        return self.verdict == "regular_singular"


def fuchs_test(op: ScalarOperator) -> FuchsReport:
    """Regular singular iff every coefficient valuation is >= the leading one.

    In the t d/dt frame with a_d = 1 that means no coefficient has a pole.
    A positive Newton-polygon slope certifies irregularity; windows that
    cannot decide a sign yield "inconclusive", never a guess.
    """
    d = op.degree
    points = [(d, 0)]
    positive_slopes = []
    inconclusive = None
    for i in range(d):
        series = op.coeffs[i]
        val, bound = series.valuation()
        if val is None:
            if bound <= 0:
                inconclusive = f"a_{i} unknown below t^0 (window ends at {bound})"
            continue
        points.append((i, val))
        if val < 0:
            positive_slopes.append(Fraction(-val, d - i))
    if positive_slopes:
        return FuchsReport(verdict="irregular", slopes=sorted(set(positive_slopes)),
                           points=sorted(points))
    if inconclusive:
        return FuchsReport(verdict="inconclusive", slopes=[], points=sorted(points),
                           detail=inconclusive)
    return FuchsReport(verdict="regular_singular", slopes=[Fraction(0)], points=sorted(points))


@dataclass
class IndicialReport:
    roots: list                     # (Scalar, multiplicity) pairs found exactly
    quasi_unipotent: str            # "yes" | "no" | "inconclusive"
    denominator: int = None         # lcm of denominators when "yes"
    bound: int = 64
    witness: object = None
    indicial_poly: object = None


def indicial_roots(op: ScalarOperator, field: Field = None, bound: int = 64) -> IndicialReport:
    """Roots of the indicial polynomial with a certification-oriented verdict.

    Rational roots are found exactly; "yes" needs every root rational with
    denominator at most the bound.  An exact irrational root (a linear
    factor left over the working extension) refutes; anything else is
    inconclusive with the bound echoed.
    """
    field = field or op.coeffs[-1].field
    d = op.degree
    dense = []
    for i in range(d + 1):
        try:
            dense.append(op.coeffs[i].coeff(0))
        except TruncationTooSmall:
            return IndicialReport(roots=[], quasi_unipotent="inconclusive", bound=bound,
                                  witness=f"a_{i}(0) beyond truncation")
    chi = Poly.from_dense(field, "x", dense)
    pairs, remainder = char_zero_roots(chi)
    found = sum(m for _, m in pairs)
    if found == d:
        dens = []
        for root, _ in pairs:
            rep = root.rep
            frac = rep if isinstance(rep, Fraction) else rep[0]
            dens.append(frac.denominator)
        if all(dn <= bound for dn in dens):
            lcm = 1
            for dn in dens:
                from math import gcd
                lcm = lcm * dn // gcd(lcm, dn)
            return IndicialReport(roots=pairs, quasi_unipotent="yes", denominator=lcm,
                                  bound=bound, indicial_poly=chi)
        return IndicialReport(roots=pairs, quasi_unipotent="inconclusive", bound=bound,
                              witness="rational root denominator exceeds the bound",
                              indicial_poly=chi)
    if remainder.total_degree() == 1:
        rem = remainder.to_dense()
        root = Scalar(field, field.neg(field.div(rem[0], rem[1])))
        return IndicialReport(roots=pairs + [(root, 1)], quasi_unipotent="no", bound=bound,
                              witness=str(root), indicial_poly=chi)
    return IndicialReport(roots=pairs, quasi_unipotent="inconclusive", bound=bound,
                          witness=f"unresolved factor of degree {remainder.total_degree()}",
                          indicial_poly=chi)


def base_change_operator(op: ScalarOperator, a: int, field: Field) -> ScalarOperator:
    """Substitute t -> t^a: coefficients spread out, t d/dt rescales by 1/a.

    Exploration utility; the main pipeline never needs it for regular cases.
    """
    if a < 1:
        raise ExptypeError("base change exponent must be positive")
    inv_a = field.inv(field.from_int(a))
    out = []
    for i, series in enumerate(op.coeffs):
        spread = {}
        for k in range(series.low, series.order):
            spread[k * a] = series.coeff(k)
        low = series.low * a
        order = (series.order - 1) * a + 1
        dense = [spread.get(e, field.zero()) for e in range(low, order)]
        scaled = TruncSeries(field, dense, low=low, order=order).scale(field.pow(inv_a, i))
        out.append(scaled)
    return ScalarOperator(coeffs=out)


def field_label(field: Field) -> str:
    if isinstance(field, PrimeField):
        return f"GF({field.p})"
    if isinstance(field, ExtensionField) and field.char:
        mp = ",".join(field.base.to_str(c) for c in field.minpoly)
        return f"GF({field.char}^{field.degree}) minpoly [{mp}]"
    if isinstance(field, ExtensionField):
        mp = ",".join(field.base.to_str(c) for c in field.minpoly)
        return f"Q[x]/[{mp}]"
    return "Q"


@dataclass
class ResidualReport:
    exponent: str
    rank: int
    verdict: str
    slopes: list
    indicial_roots: list
    quasi_unipotent: str
    denominator: int = None
    error: str = None

    def to_jsonable(self):
        return {
            "lambda": self.exponent,
            "rank": self.rank,
            "verdict": self.verdict,
            "slopes": [str(s) for s in self.slopes],
            "indicial_roots": self.indicial_roots,
            "quasi_unipotent": self.quasi_unipotent,
            "denominator": self.denominator,
            "error": self.error,
        }


@dataclass
class PrimeBlockReport:
    exponent_mod_p: str
    rank: int
    nilpotent: bool
    index: int
    order: int

    def to_jsonable(self):
        return {
            "lambda_mod_p": self.exponent_mod_p,
            "rank": self.rank,
            "nilpotent": self.nilpotent,
            "index": self.index,
            "order": self.order,
        }


@dataclass
class PrimeReport:
    p: int
    field: str
    blocks: list
    error: str = None

    def to_jsonable(self):
        return {
            "p": self.p,
            "field": self.field,
            "blocks": [b.to_jsonable() for b in self.blocks],
            "error": self.error,
        }


@dataclass
class ExponentialTypeCertificate:
    lambdas: list                # exponent strings, char-0 side
    residuals: list              # ResidualReport
    primes: list                 # PrimeReport
    meta: dict
    passed: bool = False
    inconclusive: bool = False
    failed: bool = False         # a definite (witnessed) mathematical failure

    def to_jsonable(self):
        return {
            "lambdas": self.lambdas,
            "residuals": [r.to_jsonable() for r in self.residuals],
            "primes": [p.to_jsonable() for p in self.primes],
            "meta": self.meta,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "failed": self.failed,
        }


def assemble_certificate(connection: FormalConnection, primes, seed: int = 0,
                         root_bound: int = 64, eigenvalue_hints=None,
                         mod_p_order=None) -> ExponentialTypeCertificate:
    """Run the full two-sided pipeline on a characteristic-zero connection.

    Characteristic-zero side: split, per-eigenvalue residual connection,
    cyclic vector, Fuchs test, indicial roots.  Mod-p side, per prime:
    reduce, split over the splitting field of the leading matrix, and test
    the shifted p-curvature of every block.  Stage errors are recorded
    per-eigenvalue / per-prime without aborting the sweep.
    """
    f = connection.field
    if f.char != 0:
        raise ExptypeError("certificates start from a characteristic-zero connection")
    split = elementary_split(connection, eigenvalue_hints=eigenvalue_hints, seed=seed)
    lambdas = []
    residuals = []
    all_regular = True
    any_inconclusive = False
    for a0_eig, block in zip(split.eigenvalues, split.blocks):
        res = residual_connection(block, eigenvalue=a0_eig)
        exponent = str(res.exponent)
        lambdas.append(exponent)
        try:
            _, op = find_cyclic_vector(res.connection, seed=seed)
            fuchs = fuchs_test(op)
            if fuchs.verdict == "regular_singular":
                ind = indicial_roots(op, bound=root_bound)
                residuals.append(ResidualReport(
                    exponent=exponent, rank=block.rank, verdict=fuchs.verdict,
                    slopes=fuchs.slopes,
                    indicial_roots=[[str(r), m] for r, m in ind.roots],
                    quasi_unipotent=ind.quasi_unipotent,
                    denominator=ind.denominator,
                ))
                if ind.quasi_unipotent == "no":
                    all_regular = False
                elif ind.quasi_unipotent == "inconclusive":
                    any_inconclusive = True
            else:
                residuals.append(ResidualReport(
                    exponent=exponent, rank=block.rank, verdict=fuchs.verdict,
                    slopes=fuchs.slopes, indicial_roots=[], quasi_unipotent="n/a"))
                if fuchs.verdict == "irregular":
                    all_regular = False
                else:
                    any_inconclusive = True
        except ExptypeError as exc:
            residuals.append(ResidualReport(
                exponent=exponent, rank=block.rank, verdict="error", slopes=[],
                indicial_roots=[], quasi_unipotent="n/a", error=str(exc)))
            any_inconclusive = True

    prime_reports = []
    all_nilpotent = True
    for p in sorted(primes):
        try:
            target_order = mod_p_order or max(2 * p + 4, 24)
            if connection.order < target_order:
                raise TruncationTooSmall(
                    f"connection order {connection.order} below {target_order} needed for p={p}")
            base = PrimeField(p)
            reduced = connection.truncate(target_order).reduce(base)
            chi = reduced.leading().char_poly()
            work_field = splitting_field(chi, p, seed=seed)
            if work_field != base:
                lifted = reduced.map_entries(work_field, work_field.embed_base)
            else:
                lifted = reduced
            mod_split = elementary_split(lifted, seed=seed)
            blocks = []
            for verdict in shifted_block_pcurvature(mod_split, p, seed=seed):
                blocks.append(PrimeBlockReport(
                    exponent_mod_p=str(verdict.exponent),
                    rank=verdict.rank,
                    nilpotent=verdict.verdict.nilpotent,
                    index=verdict.verdict.index,
                    order=verdict.verdict.order,
                ))
                if not verdict.verdict.nilpotent:
                    all_nilpotent = False
            prime_reports.append(PrimeReport(p=p, field=field_label(work_field), blocks=blocks))
        except ExptypeError as exc:
            prime_reports.append(PrimeReport(p=p, field="", blocks=[], error=str(exc)))
            any_inconclusive = True

    from . import __version__

    meta = {
        "t_order": connection.order,
        "mod_p_order": mod_p_order or "max(2p+4, 24)",
        "seed": seed,
        "root_bound": root_bound,
        "base_field": field_label(f),
        "version": __version__,
    }
    cert = ExponentialTypeCertificate(
        lambdas=lambdas, residuals=residuals, primes=prime_reports, meta=meta)
    cert.failed = (not all_regular) or (not all_nilpotent)
    cert.passed = all_regular and all_nilpotent and not any_inconclusive
    cert.inconclusive = any_inconclusive and not cert.failed
    return cert


def random_unit_gauge(c: FormalConnection, seed: int = 0) -> GaugeTransform:
    """Seeded random gauge with invertible constant term (for invariance tests)."""
    f = c.field
    d = c.rank
    rng = random.Random(seed)
    for _ in range(50):
        mats = []
        for k in range(c.order):
            m = Matrix(f, [[f.from_int(rng.randint(-2, 2)) for _ in range(d)] for _ in range(d)])
            if k == 0:
                m = m + Matrix.identity(f, d).scale(f.from_int(4))
            mats.append(m)
        series = MatrixSeries(f, mats, low=0, order=c.order)
        if not series.coeff(0).det().is_zero():
            return GaugeTransform(series)
    raise ExptypeError("could not draw an invertible gauge head")
