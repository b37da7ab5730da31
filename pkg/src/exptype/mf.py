"""Potentials with isolated singularities and their twisted de Rham data.

Small-scale graded-lex Buchberger with cofactor tracking drives everything:
Milnor rings come from the staircase of the Jacobian ideal, Nullstellensatz
certificates from normal forms of powers of the potential with their
division cofactors re-expanded and verified, and the identification of
twisted cohomology classes from the rewriting rule

    [g * dW_i * vol] = t * [d_i g * vol]

iterated until the degree drops below the staircase (each bounce costs one
power of t and at least two degrees, so the chain terminates for any
potential with an isolated critical point).

For quasi-homogeneous potentials the twisted complex splits into finite
weight pieces and cohomology is computed exactly piece by piece; the
general path solves on a degree/order-capped window with a stability probe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import Field, Matrix, MatrixSeries, Poly, QQ, solve_linear
from .connection import FormalConnection
from .errors import (
    ExptypeError,
    MismatchWitness,
    NoCertificateWithinCap,
    NotACoboundary,
    NotIsolated,
    RankUnstable,
    ScaleExceeded,
)
from .pcurvature import Derivation, NilpotencyVerdict, nilpotency_test, p_curvature


def _grlex_key(exps):
    return (sum(exps), exps)


def _leading(poly: Poly):
    if poly.is_zero():
        return None
    e = max(poly.terms, key=_grlex_key)
    return e, poly.terms[e]


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


def _monomial(field, variables, exps, coeff=None):
    return Poly(field, variables, {tuple(exps): coeff if coeff is not None else field.one()})


class GroebnerBasis:
    """Reduced graded-lex basis with division tracked back to the generators."""

    def __init__(self, generators, degree_cap=24, basis_cap=64):
        if not generators:
            raise ExptypeError("no generators")
        self.field = generators[0].field
        self.vars = generators[0].vars
        if len(self.vars) > 3:
            raise ScaleExceeded("Buchberger capped at 3 variables")
        self.generators = list(generators)
        self.degree_cap = degree_cap
        self.basis_cap = basis_cap
        self._compute()

    def _compute(self):
        f = self.field
        zero_cof = lambda: [Poly.zero(f, self.vars) for _ in self.generators]
        basis = []
        transforms = []
        for k, g in enumerate(self.generators):
            if g.is_zero():
                continue
            cof = zero_cof()
            cof[k] = Poly.constant(f, self.vars, f.one())
            basis.append(g)
            transforms.append(cof)
        pairs = list(itertools.combinations(range(len(basis)), 2))
        while pairs:
            i, j = pairs.pop(0)
            ei, ci = _leading(basis[i])
            ej, cj = _leading(basis[j])
            lcm = tuple(max(a, b) for a, b in zip(ei, ej))
            mi = _monomial(f, self.vars, [a - b for a, b in zip(lcm, ei)], f.inv(ci))
            mj = _monomial(f, self.vars, [a - b for a, b in zip(lcm, ej)], f.inv(cj))
            s_poly = basis[i] * mi - basis[j] * mj
            s_cof = [a * mi - b * mj for a, b in zip(transforms[i], transforms[j])]
            nf, qs = self._divide(s_poly, basis)
            if nf.is_zero():
                continue
            if nf.total_degree() > self.degree_cap:
                raise ScaleExceeded(f"S-polynomial degree {nf.total_degree()} beyond cap")
            nf_cof = list(s_cof)
            for q, cof in zip(qs, transforms):
                for k in range(len(nf_cof)):
                    nf_cof[k] = nf_cof[k] - q * cof[k]
            lead_e, lead_c = _leading(nf)
            inv = f.inv(lead_c)
            nf = nf.scale(inv)
            nf_cof = [c.scale(inv) for c in nf_cof]
            new_idx = len(basis)
            basis.append(nf)
            transforms.append(nf_cof)
            if len(basis) > self.basis_cap:
                raise ScaleExceeded("Groebner basis size beyond cap")
            pairs.extend((k, new_idx) for k in range(new_idx))
        # inter-reduce for canonical normal forms
        reduced, reduced_cof = [], []
        for i in range(len(basis)):
            others = [basis[k] for k in range(len(basis)) if k != i]
            nf, qs = self._divide(basis[i], others)
            if nf.is_zero():
                continue
            cof = list(transforms[i])
            other_cofs = [transforms[k] for k in range(len(basis)) if k != i]
            for q, ocof in zip(qs, other_cofs):
                for k in range(len(cof)):
                    cof[k] = cof[k] - q * ocof[k]
            lead_e, lead_c = _leading(nf)
            inv = f.inv(lead_c)
            reduced.append(nf.scale(inv))
            reduced_cof.append([c.scale(inv) for c in cof])
        order = sorted(range(len(reduced)), key=lambda k: _grlex_key(_leading(reduced[k])[0]))
        self.basis = [reduced[k] for k in order]
        self.transforms = [reduced_cof[k] for k in order]

    def _divide(self, poly: Poly, divisors):
        """Multivariate division; returns (remainder, quotients by divisor)."""
        f = self.field
        qs = [Poly.zero(f, self.vars) for _ in divisors]
        rem = Poly.zero(f, self.vars)
        work = poly
        leads = [_leading(g) for g in divisors]
        while not work.is_zero():
            e, c = _leading(work)
            hit = None
            for k, lead in enumerate(leads):
                if lead is not None and _divides(lead[0], e):
                    hit = k
                    break
            if hit is None:
                mono = _monomial(f, self.vars, e, c)
                rem = rem + mono
                work = work - mono
            else:
                le, lc = leads[hit]
                factor = _monomial(f, self.vars, [a - b for a, b in zip(e, le)],
                                   f.div(c, lc))
                qs[hit] = qs[hit] + factor
                work = work - divisors[hit] * factor
        return rem, qs

    def normal_form(self, poly: Poly) -> Poly:
        return self._divide(poly, self.basis)[0]

    def normal_form_with_cofactors(self, poly: Poly):
        """(nf, gs) with poly = nf + sum gs[k] * generators[k], verified exactly."""
        nf, qs = self._divide(poly, self.basis)
        gs = [Poly.zero(self.field, self.vars) for _ in self.generators]
        for q, cof in zip(qs, self.transforms):
            for k in range(len(gs)):
                gs[k] = gs[k] + q * cof[k]
        check = nf
        for g, gen in zip(gs, self.generators):
            check = check + g * gen
        if not (check - poly).is_zero():
            raise ExptypeError("division cofactors failed re-expansion")
        return nf, gs

    def contains(self, poly: Poly) -> bool:
        return self.normal_form(poly).is_zero()

    def leading_exponents(self):
        return [_leading(g)[0] for g in self.basis]


@dataclass
class Potential:
    field: Field
    variables: tuple
    w: Poly

    def __post_init__(self):
        if not self.w.constant_term().is_zero():
            raise ExptypeError("potential must vanish at the origin")
        for v in self.variables:
            if not self.w.derivative(v).constant_term().is_zero():
                raise ExptypeError("potential must have a critical point at the origin")
        if self.w.is_zero():
            raise NotIsolated("the zero potential has no isolated critical point")

    @classmethod
    def build(cls, field, variables, w: Poly):
        return cls(field=field, variables=tuple(variables), w=w)

    def partials(self):
        return [self.w.derivative(v) for v in self.variables]


class MilnorRing:
    """Quotient by the Jacobian ideal with a monomial normal-form basis."""

    def __init__(self, potential: Potential, degree_cap=24):
        self.potential = potential
        self.field = potential.field
        self.vars = potential.variables
        self.gb = GroebnerBasis(potential.partials(), degree_cap=degree_cap)
        leads = self.gb.leading_exponents()
        nvars = len(self.vars)
        bounds = []
        for i in range(nvars):
            pure = [e[i] for e in leads if all(e[j] == 0 for j in range(nvars) if j != i)]
            if not pure:
                raise NotIsolated(
                    f"no pure power of {self.vars[i]} in the leading ideal: "
                    "the Milnor ring is infinite dimensional")
            bounds.append(min(pure))
        monomials = []
        for exps in itertools.product(*[range(b) for b in bounds]):
            if not any(_divides(le, exps) for le in leads):
                monomials.append(tuple(exps))
        monomials.sort(key=_grlex_key)
        self.monomials = monomials
        self.mu = len(monomials)

    def normal_form(self, poly: Poly) -> Poly:
        return self.gb.normal_form(poly)

    def coordinates(self, poly: Poly):
        """Coefficient vector of NF(poly) over the monomial basis."""
        nf = self.normal_form(poly)
        f = self.field
        coords = [f.zero()] * self.mu
        index = {m: i for i, m in enumerate(self.monomials)}
        for e, c in nf.terms.items():
            if e not in index:
                raise ExptypeError("normal form escaped the monomial basis")
            coords[index[e]] = c
        return coords


@dataclass
class NullstellensatzCertificate:
    exponent: int
    cofactors: list

    def to_jsonable(self):
        return {"N": self.exponent, "cofactors": [repr(g) for g in self.cofactors]}


def nullstellensatz_certificate(potential: Potential, cap: int = 8,
                                milnor: MilnorRing = None) -> NullstellensatzCertificate:
    """Least N with W^N in the Jacobian ideal, with verified cofactors."""
    ring = milnor or MilnorRing(potential)
    power = Poly.constant(potential.field, potential.variables, potential.field.one())
    for n in range(1, cap + 1):
        power = power * potential.w
        nf, gs = ring.gb.normal_form_with_cofactors(power)
        if nf.is_zero():
            check = Poly.zero(potential.field, potential.variables)
            for g, gen in zip(gs, potential.partials()):
                check = check + g * gen
            if not (check - power).is_zero():
                raise ExptypeError("certificate re-expansion failed")
            return NullstellensatzCertificate(exponent=n, cofactors=gs)
    raise NoCertificateWithinCap(cap)


# -- twisted complex ------------------------------------------------------

def _wedge_sign(subset, i):
    """dz_i wedge dz_subset = sign * dz_{subset + i}."""
    return -1 if sum(1 for s in subset if s < i) % 2 else 1


class TwistedForm:
    """Polynomial coefficients per (form component, t-exponent)."""

    def __init__(self, field, variables):
        self.field = field
        self.vars = tuple(variables)
        self.parts = {}  # (frozenset, t_exp) -> Poly

    def add_part(self, subset, t_exp, poly: Poly):
        if poly.is_zero():
            return self
        key = (frozenset(subset), t_exp)
        if key in self.parts:
            combined = self.parts[key] + poly
            if combined.is_zero():
                del self.parts[key]
            else:
                self.parts[key] = combined
        else:
            self.parts[key] = poly
        return self

    def is_zero(self):
        return not self.parts


def twisted_differential(potential: Potential, form: TwistedForm, t_cap: int) -> TwistedForm:
    """(-dW + t d) applied componentwise, truncated at t^t_cap."""
    out = TwistedForm(potential.field, potential.variables)
    partials = potential.partials()
    nvars = len(potential.variables)
    for (subset, j), poly in form.parts.items():
        for i in range(nvars):
            if i in subset:
                continue
            sign = _wedge_sign(subset, i)
            target = subset | {i}
            minus_dw = (partials[i] * poly).scale(potential.field.from_int(-sign))
            out.add_part(target, j, minus_dw)
            if j + 1 < t_cap:
                d_part = poly.derivative(potential.variables[i]).scale(
                    potential.field.from_int(sign))
                out.add_part(target, j + 1, d_part)
    return out


def reduce_top_form(milnor: MilnorRing, pieces: dict, t_order: int):
    """Reduce a top-form sum(f_j t^j vol) to Milnor-basis coordinates.

    Uses [g dW_i vol] = t [d_i g vol] repeatedly; returns {t_exp: coords}.
    """
    f = milnor.field
    variables = milnor.vars
    out = {j: [f.zero()] * milnor.mu for j in range(t_order)}
    work = {j: p for j, p in pieces.items() if j < t_order and not p.is_zero()}
    guard = 0
    while work:
        guard += 1
        if guard > 10000:
            raise ExptypeError("reduction chain failed to terminate")
        j = min(work)
        poly = work.pop(j)
        nf, gs = milnor.gb.normal_form_with_cofactors(poly)
        if not nf.is_zero():
            index = {m: i for i, m in enumerate(milnor.monomials)}
            for e, c in nf.terms.items():
                out[j][index[e]] = f.add(out[j][index[e]], c)
        if j + 1 < t_order:
            bounce = Poly.zero(f, variables)
            for g, v in zip(gs, variables):
                bounce = bounce + g.derivative(v)
            if not bounce.is_zero():
                if j + 1 in work:
                    work[j + 1] = work[j + 1] + bounce
                    if work[j + 1].is_zero():
                        del work[j + 1]
                else:
                    work[j + 1] = bounce
    return out


def _quasi_homogeneous_weights(potential: Potential):
    """Scaled integer weights (w_1..w_n, w_t) or None."""
    exps = list(potential.w.terms.keys())
    nvars = len(potential.variables)
    rows = [[Fraction(e[i]) for i in range(nvars)] for e in exps]
    target = Matrix.column(QQ, [Fraction(1)] * len(exps))
    try:
        sol, kernel = Matrix(QQ, rows).solve(target)
    except ExptypeError:
        return None
    if kernel:
        return None
    weights = [sol.rows[i][0] for i in range(nvars)]
    if any(w <= 0 for w in weights):
        return None
    denom = 1
    for w in weights:
        denom = denom * w.denominator // __import__("math").gcd(denom, w.denominator)
    scaled = [int(w * denom) for w in weights]
    return scaled, denom


def _monomials_of_weight(weights, total):
    """Exponent tuples with sum e_i w_i == total (weights positive)."""
    n = len(weights)

    def rec(i, remaining):
        if i == n:
            if remaining == 0:
                yield ()
            return
        w = weights[i]
        for e in range(remaining // w + 1):
            for rest in rec(i + 1, remaining - e * w):
                yield (e,) + rest

    return list(rec(0, total))


@dataclass
class TwistedCohomology:
    potential: Potential
    milnor: MilnorRing
    mu: int
    quasi_homogeneous: bool
    weights: tuple = None        # scaled variable weights
    t_weight: int = None
    weight_checked_up_to: int = None
    caps: dict = dc_field(default_factory=dict)

    def reduce(self, pieces: dict, t_order: int):
        return reduce_top_form(self.milnor, pieces, t_order)

    def basis_labels(self):
        names = []
        for m in self.milnor.monomials:
            mono = "*".join(f"{v}^{e}" if e > 1 else v
                            for v, e in zip(self.potential.variables, m) if e) or "1"
            names.append(mono)
        return names


def _weight_piece_bases(potential, weights, t_weight, total, sizes):
    """Per form-degree bases [(exps, t_exp, subset)] of one weight piece."""
    nvars = len(potential.variables)
    out = {k: [] for k in range(nvars + 1)}
    for k in range(nvars + 1):
        for subset in itertools.combinations(range(nvars), k):
            sub_weight = sum(weights[i] for i in subset)
            for t_exp in range(0, (total - sub_weight) // t_weight + 1 if t_weight else 1):
                rem = total - sub_weight - t_exp * t_weight
                if rem < 0:
                    continue
                for exps in _monomials_of_weight(weights, rem):
                    out[k].append((exps, t_exp, frozenset(subset)))
    return out


def _weight_piece_matrix(potential, src_basis, dst_basis, t_cap):
    """Matrix of -dW + t d between weight-piece bases (None if either empty)."""
    f = potential.field
    if not src_basis or not dst_basis:
        return None
    dst_index = {key: i for i, key in enumerate(dst_basis)}
    cols = []
    for (exps, t_exp, subset) in src_basis:
        form = TwistedForm(f, potential.variables)
        form.add_part(subset, t_exp, _monomial(f, potential.variables, exps))
        image = twisted_differential(potential, form, t_cap)
        col = [f.zero()] * len(dst_basis)
        for (sub, j), poly in image.parts.items():
            for e, c in poly.terms.items():
                key = (e, j, sub)
                if key in dst_index:
                    col[dst_index[key]] = f.add(col[dst_index[key]], c)
                elif not f.is_zero(c):
                    raise ExptypeError("differential left the weight piece")
        cols.append(col)
    return Matrix.from_columns(f, cols)


def _piece_rank(potential, src_basis, dst_basis, t_cap):
    mat = _weight_piece_matrix(potential, src_basis, dst_basis, t_cap)
    return 0 if mat is None else mat.rank()


def twisted_cohomology(potential: Potential, p: int, caps=None) -> TwistedCohomology:
    """Top cohomology of (Omega, -dW + t d) with the Milnor identification.

    Quasi-homogeneous potentials are verified weight piece by weight piece
    (each piece is a finite exact complex): the top cohomology dimensions
    must match the Milnor-basis prediction and the next-lower cohomology
    must vanish.  The general path compares capped windows and raises
    RankUnstable when the estimate moves under the probe step.
    """
    if potential.field.char != p:
        raise ExptypeError("twisted cohomology is computed over F_p here")
    caps = dict(caps or {})
    milnor = MilnorRing(potential, degree_cap=caps.get("groebner_degree", 24))
    qh = _quasi_homogeneous_weights(potential)
    nvars = len(potential.variables)
    if qh is not None:
        weights, denom = qh
        t_weight = denom  # W has scaled weight equal to the common denominator
        vol_weight = sum(weights)
        class_weights = sorted(sum(e * w for e, w in zip(m, weights)) + vol_weight
                               for m in milnor.monomials)
        s_cap = caps.get("weight_cap", max(class_weights) + 2 * t_weight)
        t_cap = s_cap // t_weight + 3

        def pieces(s):
            if s < 0:
                return {k: [] for k in range(nvars + 1)}
            return _weight_piece_bases(potential, weights, t_weight, s, None)

        for s in range(0, s_cap + 1):
            here = pieces(s)
            below = pieces(s - t_weight)
            top = here[nvars]
            predicted = sum(1 for w in class_weights
                            if w <= s and (s - w) % t_weight == 0)
            if not top:
                if predicted:
                    raise RankUnstable(caps, "missing weight piece for a predicted class")
                continue
            rank = _piece_rank(potential, below[nvars - 1], top, t_cap)
            coker = len(top) - rank
            if coker != predicted:
                raise RankUnstable(
                    caps, f"weight {s}: top cohomology {coker} != predicted {predicted}")
            # vanishing one step below the top degree, at this weight
            if nvars >= 2:
                mid_here = here[nvars - 1]
                if mid_here:
                    above = pieces(s + t_weight)
                    up_rank = _piece_rank(potential, mid_here, above[nvars], t_cap)
                    ker = len(mid_here) - up_rank
                    drank = _piece_rank(potential, below[nvars - 2], mid_here, t_cap)
                    if ker != drank:
                        raise RankUnstable(
                            caps, f"weight {s}: H^{nvars-1} does not vanish")
        return TwistedCohomology(potential=potential, milnor=milnor, mu=milnor.mu,
                                 quasi_homogeneous=True, weights=tuple(weights),
                                 t_weight=t_weight, weight_checked_up_to=s_cap, caps=caps)
    # general path: capped window, probe for stability
    d_cap = caps.get("z_degree_cap", 2 * milnor.mu + potential.w.total_degree())
    n_cap = caps.get("t_order_cap", milnor.mu + 2)
    step = caps.get("probe_step", 2)
    est = _truncated_top_rank(potential, d_cap, n_cap)
    probe = _truncated_top_rank(potential, d_cap + step, n_cap + 1)
    if est != milnor.mu * n_cap or probe != milnor.mu * (n_cap + 1):
        raise RankUnstable({"z_degree_cap": d_cap, "t_order_cap": n_cap},
                           f"windowed rank {est}/{probe} vs mu*N {milnor.mu * n_cap}")
    return TwistedCohomology(potential=potential, milnor=milnor, mu=milnor.mu,
                             quasi_homogeneous=False, caps={"z_degree_cap": d_cap,
                                                            "t_order_cap": n_cap})


def _truncated_top_rank(potential: Potential, d_cap: int, n_cap: int) -> int:
    """dim_k of the truncated top cohomology on the (degree, t-order) window."""
    f = potential.field
    nvars = len(potential.variables)
    top_monos = [e for e in itertools.product(range(d_cap + 1), repeat=nvars)
                 if sum(e) <= d_cap]
    top_basis = [(e, j) for e in top_monos for j in range(n_cap)]
    top_index = {key: i for i, key in enumerate(top_basis)}
    full = frozenset(range(nvars))
    shave = potential.w.total_degree() - 1
    src_monos = [e for e in top_monos if sum(e) <= d_cap - shave]
    cols = []
    for i in range(nvars):
        subset = full - {i}
        for e in src_monos:
            for j in range(n_cap):
                form = TwistedForm(f, potential.variables)
                form.add_part(subset, j, _monomial(f, potential.variables, e))
                image = twisted_differential(potential, form, n_cap)
                col = [f.zero()] * len(top_basis)
                ok = True
                for (sub, jj), poly in image.parts.items():
                    if sub != full:
                        continue
                    for ee, c in poly.terms.items():
                        key = (ee, jj)
                        if key in top_index:
                            col[top_index[key]] = f.add(col[top_index[key]], c)
                        else:
                            ok = False
                if ok:
                    cols.append(col)
    if not cols:
        return len(top_basis)
    mat = Matrix.from_columns(f, cols)
    return len(top_basis) - mat.rank()


def build_w_connection(potential: Potential, p: int, t_order: int,
                       cohomology: TwistedCohomology = None):
    """Matrix of d/dt + W/t^2 + Gamma'/t on the Milnor-basis classes.

    Gamma' is -n/2 on top-degree representatives; the W-multiplication
    matrix comes from the reduction chain.  Returns (FormalConnection,
    TwistedCohomology).
    """
    coh = cohomology or twisted_cohomology(potential, p)
    f = potential.field
    mu = coh.mu
    columns = []
    for m in coh.milnor.monomials:
        rep = _monomial(f, potential.variables, m) * potential.w
        columns.append(coh.reduce({0: rep}, t_order))
    c_mats = []
    for j in range(t_order):
        c_mats.append(Matrix(f, [[columns[i][j][k] for i in range(mu)] for k in range(mu)]))
    nvars = len(potential.variables)
    gamma = f.neg(f.div(f.from_int(nvars), f.from_int(2)))
    coeffs = list(c_mats)
    coeffs[1] = coeffs[1] + Matrix.identity(f, mu).scale(gamma)
    return FormalConnection.build(f, coeffs, order=t_order), coh


@dataclass
class MfCurvatureReport:
    p: int
    mu: int
    matrices_agree: bool
    operator_verdict: NilpotencyVerdict
    multiplication_verdict: NilpotencyVerdict
    nullstellensatz_exponent: int
    ok: bool

    def to_jsonable(self):
        return {
            "p": self.p,
            "mu": self.mu,
            "matrices_agree": self.matrices_agree,
            "operator_nilpotent": self.operator_verdict.nilpotent,
            "operator_index": self.operator_verdict.index,
            "multiplication_nilpotent": self.multiplication_verdict.nilpotent,
            "multiplication_index": self.multiplication_verdict.index,
            "nullstellensatz_N": self.nullstellensatz_exponent,
            "ok": self.ok,
        }


def mf_p_curvature(potential: Potential, p: int, t_order: int = None,
                   caps=None, seed: int = 0) -> MfCurvatureReport:
    """Two independent p-curvature computations compared, then nilpotency.

    (a) operator-power p-curvature of the built connection along t^2 d/dt;
    (b) the matrix of multiplication by W^p on twisted cohomology via the
    reduction chain.  They must agree entrywise to the common window.
    """
    t_order = t_order or max(2 * p + 4, 12)
    conn, coh = build_w_connection(potential, p, t_order,
                                   cohomology=twisted_cohomology(potential, p, caps))
    result = p_curvature(conn, Derivation("t2_dt"), p, seed=seed)
    f = potential.field
    mu = coh.mu
    w_p = potential.w ** p
    columns = []
    for m in coh.milnor.monomials:
        rep = _monomial(f, potential.variables, m) * w_p
        columns.append(coh.reduce({0: rep}, t_order))
    mats = [Matrix(f, [[columns[i][j][k] for i in range(mu)] for k in range(mu)])
            for j in range(t_order)]
    mult_series = MatrixSeries(f, mats, low=0, order=t_order, shape=(mu, mu))
    common = min(result.matrix.order, mult_series.order)
    diff = result.matrix.truncate(common) - mult_series.truncate(common)
    agree = diff.is_zero()
    if not agree:
        raise MismatchWitness(diff.first_nonzero(),
                              "operator-power and W^p-multiplication p-curvatures differ")
    cert = nullstellensatz_certificate(potential, milnor=coh.milnor)
    op_verdict = nilpotency_test(result.matrix, rank=mu)
    mult_verdict = nilpotency_test(mult_series, rank=mu)
    ok = agree and op_verdict.nilpotent and mult_verdict.nilpotent
    return MfCurvatureReport(p=p, mu=mu, matrices_agree=agree,
                             operator_verdict=op_verdict,
                             multiplication_verdict=mult_verdict,
                             nullstellensatz_exponent=cert.exponent, ok=ok)


def act_frobenius(coh: TwistedCohomology, f_poly: Poly, coords, p: int, t_order: int):
    """Act_[f]([alpha]) = [f^p alpha] on Milnor-basis coordinates.

    ``coords`` is {t_exp: coefficient vector}; the result is the same shape.
    """
    field = coh.potential.field
    fp = f_poly ** p
    out = {j: [field.zero()] * coh.mu for j in range(t_order)}
    for j, vec in coords.items():
        pieces = Poly.zero(field, coh.potential.variables)
        for k, c in enumerate(vec):
            if not field.is_zero(field.coerce(c)):
                pieces = pieces + _monomial(field, coh.potential.variables,
                                            coh.milnor.monomials[k], field.coerce(c))
        reduced = coh.reduce({j: pieces * fp}, t_order)
        for jj, v in reduced.items():
            for k in range(coh.mu):
                out[jj][k] = field.add(out[jj][k], v[k])
    return out


def act_matrix(coh: TwistedCohomology, f_poly: Poly, p: int, t_order: int) -> MatrixSeries:
    """Matrix series of Act_[f] over the Milnor basis."""
    field = coh.potential.field
    mu = coh.mu
    cols = []
    for k in range(mu):
        unit = {0: [field.one() if i == k else field.zero() for i in range(mu)]}
        cols.append(act_frobenius(coh, f_poly, unit, p, t_order))
    mats = [Matrix(field, [[cols[c][j][r] for c in range(mu)] for r in range(mu)])
            for j in range(t_order)]
    return MatrixSeries(field, mats, low=0, order=t_order, shape=(mu, mu))


@dataclass
class CoboundaryWitness:
    solved: bool
    generator: str
    class_label: str


def verify_act_well_defined(coh: TwistedCohomology, p: int, t_order: int = None):
    """Jacobian generators act by zero: D(W)^p alpha is solved as a coboundary.

    For each partial derivative g and Milnor basis class alpha the equation
    (-dW + t d) beta = g^p alpha is solved by exact linear algebra (per
    weight piece in the quasi-homogeneous case); failure raises
    NotACoboundary with the witness.
    """
    potential = coh.potential
    f = potential.field
    nvars = len(potential.variables)
    full = frozenset(range(nvars))
    t_order = t_order or (coh.milnor.mu + potential.w.total_degree() * p)
    witnesses = []
    if not coh.quasi_homogeneous:
        raise ScaleExceeded("coboundary solving is implemented on the weight-graded path")
    weights, t_weight = list(coh.weights), coh.t_weight
    vol_weight = sum(weights)
    for gi, v in enumerate(potential.variables):
        g = potential.w.derivative(v)
        gp = g ** p
        for k, m in enumerate(coh.milnor.monomials):
            target_poly = gp * _monomial(f, potential.variables, m)
            s = sum(e * w for e, w in zip(m, weights)) + vol_weight \
                + (t_weight - weights[gi]) * p
            src = _weight_piece_bases(potential, weights, t_weight, s - t_weight, None)[nvars - 1]
            dst = _weight_piece_bases(potential, weights, t_weight, s, None)[nvars]
            dst_index = {key: i for i, key in enumerate(dst)}
            rhs = [f.zero()] * len(dst)
            for e, c in target_poly.terms.items():
                key = (e, 0, full)
                if key not in dst_index:
                    raise ExptypeError("target escaped its weight piece")
                rhs[dst_index[key]] = c
            if all(f.is_zero(c) for c in rhs):
                witnesses.append(CoboundaryWitness(True, str(potential.variables[gi]),
                                                   coh.basis_labels()[k]))
                continue
            mat = _weight_piece_matrix(potential, src, dst, s // t_weight + 3)
            if mat is None:
                raise NotACoboundary((potential.variables[gi], coh.basis_labels()[k]))
            try:
                solve_linear(mat, Matrix.column(f, rhs))
            except ExptypeError:
                raise NotACoboundary((potential.variables[gi], coh.basis_labels()[k]))
            witnesses.append(CoboundaryWitness(True, str(potential.variables[gi]),
                                               coh.basis_labels()[k]))
    return witnesses
