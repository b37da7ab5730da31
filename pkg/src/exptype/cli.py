"""Command surface: certify, split, steenrod-verify, mf.

Every command ingests one manifest, emits canonicalized JSON (sorted keys,
exact rational strings, no floats or timestamps, so reruns with the same
seed are byte-identical), and exits 0 on a full pass, 1 on a witnessed
mathematical failure, 2 when something was inconclusive at the chosen
truncations, and 3 on input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import PrimeField, parse_poly, splitting_field
from .connection import elementary_split
from .errors import (
    CharPolyDoesNotSplit,
    ExptypeError,
    ManifestError,
    NoCertificateWithinCap,
    NotIsolated,
    RankUnstable,
)
from .manifest import (
    Manifest,
    build_connection,
    build_field,
    eigenvalue_hints,
    load_manifest,
)
from .mf import (
    Potential,
    mf_p_curvature,
    nullstellensatz_certificate,
    twisted_cohomology,
    verify_act_well_defined,
)
from .quantum import build_t_connection, ring_from_manifest
from .regularity import assemble_certificate, field_label
from .steenrod import (
    action_from_manifest,
    canonical_action,
    classical_steenrod_action,
    verify_axioms,
    verify_covariant_constancy,
    verify_eigenblock_nilpotency,
    verify_idempotent_projection,
    verify_orthogonal_vanishing,
    verify_sum_nilpotent,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(report: dict, json_path=None):
    text = canonical_json(report)
    if json_path:
        with open(json_path, "w") as handle:
            handle.write(text)
    sys.stdout.write(text)


def _connection_from_manifest(manifest: Manifest, field, t_order):
    ring_section = manifest.section("ring")
    conn_section = manifest.section("connection")
    if ring_section is not None:
        ring = ring_from_manifest(ring_section, field)
        conn = build_t_connection(ring, t_order)
        hints = [h.rep for h in eigenvalue_hints(ring_section, field, ring)]
        return conn, hints, ring
    if conn_section is not None:
        conn = build_connection(conn_section, field)
        if conn.order < t_order:
            # manifest coefficient lists are exact polynomial data
            from .algebra import Matrix
            from .connection import FormalConnection

            pad = list(conn.coeffs) + [Matrix.zeros(field, conn.rank)] * (t_order - conn.order)
            conn = FormalConnection.build(field, pad, order=t_order)
        hints = [h.rep for h in eigenvalue_hints(conn_section, field)]
        return conn, hints, None
    raise ManifestError("need a [ring] or [connection] section")


def cmd_certify(manifest: Manifest, params, json_path=None):
    field = build_field(manifest.section("field"))
    if field.char != 0:
        raise ManifestError("certify starts from a characteristic-zero field")
    primes = params["primes"]
    needed = max([max(2 * p + 4, 24) for p in primes] + [params["t_order"] or 24])
    conn, hints, _ = _connection_from_manifest(manifest, field, needed)
    cert = assemble_certificate(conn, primes, seed=params["seed"],
                                root_bound=params["root_bound"],
                                eigenvalue_hints=hints or None)
    report = {
        "command": "certify",
        "manifest_sha256": manifest.sha256,
        "tool_version": __version__,
        "params": {"primes": primes, "seed": params["seed"],
                   "root_bound": params["root_bound"], "t_order": needed},
        "warnings": manifest.warnings,
        "certificate": cert.to_jsonable(),
    }
    if cert.passed:
        code = EXIT_PASS
    elif cert.failed:
        code = EXIT_FAIL
    elif params.get("allow_inconclusive"):
        code = EXIT_PASS  # inconclusives explicitly expected by the manifest
    else:
        code = EXIT_INCONCLUSIVE
    report["exit_code"] = code
    _emit(report, json_path)
    return code


def cmd_split(manifest: Manifest, params, json_path=None):
    field = build_field(manifest.section("field"))
    t_order = params["t_order"] or 16
    conn, hints, _ = _connection_from_manifest(manifest, field, t_order)
    try:
        split = elementary_split(conn, eigenvalue_hints=hints or None, seed=params["seed"])
    except CharPolyDoesNotSplit as exc:
        suggestion = None
        if field.char:
            ext = splitting_field(conn.leading().char_poly(), field.char,
                                  seed=params["seed"])
            suggestion = field_label(ext)
        report = {
            "command": "split",
            "manifest_sha256": manifest.sha256,
            "tool_version": __version__,
            "error": str(exc),
            "suggested_field": suggestion,
            "exit_code": EXIT_FAIL,
        }
        _emit(report, json_path)
        return EXIT_FAIL
    blocks = []
    for eig, mult, proj in zip(split.eigenvalues, split.multiplicities, split.projectors):
        head = proj.coeff(0)
        blocks.append({
            "leading_eigenvalue": str(eig),
            "exponent": str(-eig),
            "rank": mult,
            "projector_t0": [[field.to_str(x) for x in row] for row in head.rows],
        })
    report = {
        "command": "split",
        "manifest_sha256": manifest.sha256,
        "tool_version": __version__,
        "params": {"seed": params["seed"], "t_order": t_order},
        "warnings": manifest.warnings,
        "blocks": blocks,
        "exit_code": EXIT_PASS,
    }
    _emit(report, json_path)
    return EXIT_PASS


_STEENROD_CHECKS = ("axioms", "covariant_constancy", "sum_nilpotency",
                    "idempotent_projection", "orthogonal_vanishing",
                    "eigenblock_nilpotency")


def cmd_steenrod_verify(manifest: Manifest, params, json_path=None):
    section = manifest.section("steenrod")
    if section is None:
        raise ManifestError("steenrod-verify needs a [steenrod] section")
    field = build_field(manifest.section("field"))
    if field.char == 0:
        raise ManifestError("steenrod data lives over odd characteristic")
    p = field.char
    ring_section = manifest.section("ring", required=True)
    ring = ring_from_manifest(ring_section, field)
    t_order = params["t_order"] or int(section.get("t_order", 2 * p + 4))
    q_order = params["q_order"] or int(section.get("q_order", 2 * p + 2))
    source = section.get("source", "canonical")
    if source == "canonical":
        action = canonical_action(ring, p, (q_order, t_order), mode="bigraded")
        checks = section.get("checks", list(_STEENROD_CHECKS))
    elif source == "classical":
        action = classical_steenrod_action(ring, p, t_order)
        checks = section.get("checks", ["axioms", "covariant_constancy"])
    elif source == "explicit":
        action = action_from_manifest(ring, section, p)
        checks = section.get("checks", list(_STEENROD_CHECKS))
    else:
        raise ManifestError(f"unknown steenrod source {source!r}")
    results = {}
    all_ok = True
    seed = params["seed"]
    for check in checks:
        if check == "axioms":
            rep = verify_axioms(action, seed=seed)
            results[check] = rep.as_dict()
            ok = rep.all_ok()
        elif check == "covariant_constancy":
            rep = verify_covariant_constancy(action)
            results[check] = {"ok": rep.ok, "witnesses": [repr(w) for w in rep.witnesses]}
            ok = rep.ok
        elif check == "sum_nilpotency":
            rep = verify_sum_nilpotent(action, seed=seed)
            results[check] = {
                "ok": rep.ok,
                "nilpotent": rep.sum_nilpotent.nilpotent if rep.sum_nilpotent else None,
                "index": rep.sum_nilpotent.index if rep.sum_nilpotent else None,
                "low_q_vanishes": rep.low_q_vanishes,
                "t0_vanishes": rep.t0_vanishes,
            }
            ok = rep.ok
        elif check == "idempotent_projection":
            rep = verify_idempotent_projection(action, seed=seed)
            results[check] = {"ok": rep.accepted, "detail": repr(rep.detail) if rep.detail else None}
            ok = rep.accepted
        elif check == "orthogonal_vanishing":
            rep = verify_orthogonal_vanishing(action, seed=seed)
            results[check] = {"ok": bool(rep), "witnesses": [repr(w) for w in rep.witnesses]}
            ok = bool(rep)
        elif check == "eigenblock_nilpotency":
            rep = verify_eigenblock_nilpotency(action, seed=seed)
            results[check] = {
                "ok": rep.ok,
                "blocks": [{"eigenvalue": b["eigenvalue"],
                            "operator_nilpotent": b["operator_route"].nilpotent,
                            "operator_index": b["operator_route"].index,
                            "algebra_route_zero": b["algebra_route_zero"],
                            "routes_agree": b["routes_agree"]} for b in rep.per_block],
            }
            ok = rep.ok
        else:
            raise ManifestError(f"unknown steenrod check {check!r}")
        all_ok = all_ok and ok
    report = {
        "command": "steenrod-verify",
        "manifest_sha256": manifest.sha256,
        "tool_version": __version__,
        "params": {"p": p, "q_order": q_order, "t_order": t_order,
                   "source": source, "seed": seed},
        "warnings": manifest.warnings,
        "results": results,
        "exit_code": EXIT_PASS if all_ok else EXIT_FAIL,
    }
    _emit(report, json_path)
    return report["exit_code"]


def cmd_mf(manifest: Manifest, params, json_path=None):
    section = manifest.section("mf")
    if section is None:
        raise ManifestError("mf needs an [mf] section")
    variables = tuple(section["variables"])
    caps = dict(section.get("caps", {}))
    caps.update(params.get("caps", {}))
    results = []
    worst = EXIT_PASS
    for p in sorted(params["primes"]):
        entry = {"p": p}
        try:
            field = PrimeField(p)
            w = Potential.build(field, variables,
                                parse_poly(section["potential"], variables, field))
            coh = twisted_cohomology(w, p, caps=caps)
            cert = nullstellensatz_certificate(w, cap=caps.get("nullstellensatz_cap", 8),
                                               milnor=coh.milnor)
            curvature = mf_p_curvature(w, p, caps=caps, seed=params["seed"])
            entry.update({
                "mu": coh.mu,
                "quasi_homogeneous": coh.quasi_homogeneous,
                "basis": coh.basis_labels(),
                "nullstellensatz": cert.to_jsonable(),
                "p_curvature": curvature.to_jsonable(),
            })
            if coh.quasi_homogeneous:
                witnesses = verify_act_well_defined(coh, p)
                entry["act_well_defined"] = all(wit.solved for wit in witnesses)
            if not curvature.ok:
                worst = max(worst, EXIT_FAIL)
        except (NotIsolated, NoCertificateWithinCap) as exc:
            entry["error"] = str(exc)
            worst = max(worst, EXIT_FAIL)
        except RankUnstable as exc:
            entry["error"] = str(exc)
            worst = max(worst, EXIT_INCONCLUSIVE) if worst != EXIT_FAIL else worst
        except ExptypeError as exc:
            entry["error"] = str(exc)
            worst = max(worst, EXIT_FAIL)
        results.append(entry)
    report = {
        "command": "mf",
        "manifest_sha256": manifest.sha256,
        "tool_version": __version__,
        "params": {"primes": sorted(params["primes"]), "seed": params["seed"]},
        "warnings": manifest.warnings,
        "results": results,
        "exit_code": worst,
    }
    _emit(report, json_path)
    return worst


def build_parser():
    parser = argparse.ArgumentParser(
        prog="exptype",
        description="Exact certification of exponential type for formal connections "
                    "with quadratic poles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("certify", "split", "steenrod-verify", "mf"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--manifest", required=True)
        cmd.add_argument("--primes", help="comma separated, overrides the manifest")
        cmd.add_argument("--t-order", type=int, dest="t_order")
        cmd.add_argument("--q-order", type=int, dest="q_order")
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--root-bound", type=int, dest="root_bound")
        cmd.add_argument("--json", dest="json_path")
        cmd.add_argument("--strict", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "primes": [int(p) for p in args.primes.split(",")] if args.primes else None,
        "t_order": args.t_order,
        "q_order": args.q_order,
        "seed": args.seed,
        "root_bound": args.root_bound,
    }
    try:
        manifest = load_manifest(args.manifest, strict=args.strict)
        params = manifest.run_params(overrides)
        handler = {
            "certify": cmd_certify,
            "split": cmd_split,
            "steenrod-verify": cmd_steenrod_verify,
            "mf": cmd_mf,
        }[args.command]
        return handler(manifest, params, json_path=args.json_path)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExptypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
