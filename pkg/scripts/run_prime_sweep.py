#!/usr/bin/env python3
"""Shifted p-curvature sweep for CP^n quantum t-connections.

Splits the connection mod every odd prime up to the bound (over the
splitting field of the leading matrix when needed) and prints the
per-eigenvalue nilpotency indices of F^lambda + lambda^p.
"""

import argparse
import time

from exptype.algebra import PrimeField, is_prime, splitting_field
from exptype.connection import elementary_split
from exptype.pcurvature import shifted_block_pcurvature
from exptype.quantum import build_t_connection, cp_n_ring
from exptype.regularity import field_label


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=1, help="projective space dimension")
    parser.add_argument("--max-prime", type=int, default=13)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    primes = [p for p in range(3, args.max_prime + 1) if is_prime(p)]
    for p in primes:
        start = time.monotonic()
        base = PrimeField(p)
        ring = cp_n_ring(args.n, base)
        conn = build_t_connection(ring, max(2 * p + 4, 24))
        chi = conn.leading().char_poly()
        work = splitting_field(chi, p, seed=args.seed)
        if work != base:
            conn = conn.map_entries(work, work.embed_base)
        split = elementary_split(conn, seed=args.seed)
        verdicts = shifted_block_pcurvature(split, p, seed=args.seed)
        bits = ", ".join(
            f"lam={v.exponent} rank={v.rank} "
            f"{'nilpotent idx ' + str(v.verdict.index) if v.verdict.nilpotent else 'NOT NILPOTENT'}"
            for v in verdicts)
        elapsed = time.monotonic() - start
        print(f"p={p:3d} over {field_label(work):24s} {bits}  ({elapsed:.2f}s)")


if __name__ == "__main__":
    main()
