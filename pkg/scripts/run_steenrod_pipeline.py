#!/usr/bin/env python3
"""Full verification pipeline for the canonical Frobenius-action datum.

For each (n, p) the c1 slot is set to the negated t-connection p-curvature
and every verifier runs: axioms (bigraded), covariant constancy, idempotent
projection onto the splitting, orthogonal vanishing, and blockwise
nilpotency through both routes.
"""

import argparse
import time

from exptype.algebra import PrimeField
from exptype.quantum import cp_n_ring
from exptype.steenrod import (
    canonical_action,
    verify_axioms,
    verify_covariant_constancy,
    verify_eigenblock_nilpotency,
    verify_idempotent_projection,
    verify_orthogonal_vanishing,
    verify_sum_nilpotent,
)

CASES = [(1, 3), (1, 5), (1, 7), (2, 7), (2, 13)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for n, p in CASES:
        start = time.monotonic()
        field = PrimeField(p)
        ring = cp_n_ring(n, field)
        bigraded = canonical_action(ring, p, (2 * p + 2, 2 * p + 4), mode="bigraded")
        collapsed = canonical_action(ring, p, (None, 2 * p + 4), mode="collapsed")
        checks = {
            "axioms": verify_axioms(bigraded, seed=args.seed).all_ok(),
            "constancy": verify_covariant_constancy(collapsed).ok,
            "sum": verify_sum_nilpotent(bigraded, seed=args.seed).ok,
            "projection": verify_idempotent_projection(collapsed, seed=args.seed).accepted,
            "vanishing": bool(verify_orthogonal_vanishing(collapsed, seed=args.seed)),
            "blocks": verify_eigenblock_nilpotency(collapsed, seed=args.seed).ok,
        }
        elapsed = time.monotonic() - start
        status = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
        print(f"CP^{n} p={p:2d}: {status}  ({elapsed:.1f}s)")


if __name__ == "__main__":
    main()
