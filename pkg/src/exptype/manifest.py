"""Manifest ingestion: a single TOML file describing field, ring, and runs.

Schema (sections all optional except where a command needs them):

    [field]       kind = "rationals" | "rational_extension" | "prime" |
                  "prime_extension"; p; minpoly (constant-first strings)
    [ring]        builtin = "cp_n" + n, or explicit basis/degrees/unit/c1/
                  dimension/products; optional eigenvalues (char-0 hints)
    [connection]  rank, coeffs (list of matrices of scalar strings),
                  optional eigenvalues
    [steenrod]    source = "canonical" | "classical" | "explicit",
                  q_order, t_order, operators, checks
    [mf]          variables, potential (polynomial string), caps
    [run]         primes, t_order, q_order, seed, root_bound, caps

Strict mode rejects unknown keys; lenient mode collects warnings.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dc_field

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .algebra import (
    ExtensionField,
    Field,
    Matrix,
    PrimeField,
    QQ,
    parse_scalar,
    prime_extension,
    rational_extension,
)
from .connection import FormalConnection
from .errors import ExptypeError, ManifestError

_SCHEMA = {
    "field": {"kind", "p", "minpoly"},
    "ring": {"builtin", "n", "basis", "degrees", "unit", "c1", "dimension",
             "products", "eigenvalues"},
    "connection": {"rank", "coeffs", "eigenvalues"},
    "steenrod": {"source", "q_order", "t_order", "operators", "checks"},
    "mf": {"variables", "potential", "caps"},
    "run": {"primes", "t_order", "q_order", "seed", "root_bound", "caps",
            "allow_inconclusive"},
}

_NESTED = {
    ("ring", "products"): {"x0", "x1", "terms"},
    ("ring", "products", "terms"): {"q", "coeffs"},
    ("steenrod", "operators"): {"class", "terms", "theta_terms"},
    ("steenrod", "operators", "terms"): {"q", "t", "matrix"},
    ("steenrod", "operators", "theta_terms"): {"q", "t", "matrix"},
}


@dataclass
class Manifest:
    data: dict
    path: str
    sha256: str
    warnings: list = dc_field(default_factory=list)

    def section(self, name, required=False):
        if name not in self.data and required:
            raise ManifestError(f"manifest is missing the [{name}] section")
        return self.data.get(name)

    def run_params(self, overrides=None):
        run = dict(self.data.get("run", {}))
        for key, value in (overrides or {}).items():
            if value is not None:
                run[key] = value
        primes = [int(p) for p in run.get("primes", [3, 5, 7, 11, 13])]
        return {
            "primes": primes,
            "t_order": int(run["t_order"]) if "t_order" in run else None,
            "q_order": int(run["q_order"]) if "q_order" in run else None,
            "seed": int(run.get("seed", 0)),
            "root_bound": int(run.get("root_bound", 64)),
            "caps": dict(run.get("caps", {})),
            "allow_inconclusive": bool(run.get("allow_inconclusive", False)),
        }


def _check_keys(data, strict, warnings):
    for section, keys in data.items():
        if section not in _SCHEMA:
            msg = f"unknown manifest section [{section}]"
            if strict:
                raise ManifestError(msg)
            warnings.append(msg)
            continue
        if not isinstance(keys, dict):
            raise ManifestError(f"section [{section}] must be a table")
        for key, value in keys.items():
            if key not in _SCHEMA[section]:
                msg = f"unknown key {key!r} in [{section}]"
                if strict:
                    raise ManifestError(msg)
                warnings.append(msg)
            _check_nested((section, key), value, strict, warnings)


def _check_nested(path, value, strict, warnings):
    allowed = _NESTED.get(path)
    if allowed is None or not isinstance(value, list):
        return
    for entry in value:
        if not isinstance(entry, dict):
            continue
        for key, sub in entry.items():
            if key not in allowed:
                msg = f"unknown key {key!r} in {'.'.join(path)} entries"
                if strict:
                    raise ManifestError(msg)
                warnings.append(msg)
            _check_nested(path + (key,), sub, strict, warnings)


def load_manifest(path: str, strict: bool = False) -> Manifest:
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}")
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"manifest is not valid TOML: {exc}")
    warnings = []
    _check_keys(data, strict, warnings)
    return Manifest(data=data, path=path, sha256=hashlib.sha256(raw).hexdigest(),
                    warnings=warnings)


def build_field(section) -> Field:
    if section is None:
        return QQ
    kind = section.get("kind", "rationals")
    try:
        if kind == "rationals":
            return QQ
        if kind == "rational_extension":
            return rational_extension([_fraction(c) for c in section["minpoly"]])
        if kind == "prime":
            return PrimeField(int(section["p"]))
        if kind == "prime_extension":
            p = int(section["p"])
            base = PrimeField(p)
            return prime_extension(p, [parse_scalar(base, c).rep for c in section["minpoly"]])
    except (KeyError, ExptypeError, ValueError) as exc:
        raise ManifestError(f"bad [field] section: {exc}")
    raise ManifestError(f"unknown field kind {kind!r}")


def _fraction(c):
    from fractions import Fraction

    return Fraction(c) if not isinstance(c, Fraction) else c


def build_connection(section, field: Field) -> FormalConnection:
    try:
        rank = int(section["rank"])
        mats = []
        for mat in section["coeffs"]:
            mats.append(Matrix(field, [[parse_scalar(field, x).rep for x in row]
                                       for row in mat]))
        return FormalConnection.build(field, mats, order=max(len(mats), 2))
    except (KeyError, ExptypeError, ValueError) as exc:
        raise ManifestError(f"bad [connection] section: {exc}")


def eigenvalue_hints(section, field: Field, ring=None):
    """Hints for char-0 eigenvalue searches.

    Explicit `eigenvalues` from the manifest win; builtin rings over an
    extension also try scalar multiples of generator powers, which covers
    the cyclotomic eigenvalues of the projective-space catalogue.
    """
    hints = []
    if section and "eigenvalues" in section:
        hints.extend(parse_scalar(field, v) for v in section["eigenvalues"])
    if ring is not None and isinstance(field, ExtensionField) and field.char == 0:
        gen = field.generator()
        power = field.scalar(1)
        for _ in range(2 * field.degree + 1):
            for c in range(1, ring.rank + 2):
                hints.append(power * c)
                hints.append(-(power * c))
            power = power * gen
    return hints
