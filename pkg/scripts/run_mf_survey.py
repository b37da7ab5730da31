#!/usr/bin/env python3
"""Survey of twisted de Rham p-curvature over a few potentials and primes."""

import time

from exptype.algebra import PrimeField, parse_poly
from exptype.errors import ExptypeError
from exptype.mf import Potential, mf_p_curvature

CASES = [
    ("z^2", ("z",), [5, 7]),
    ("z^3", ("z",), [5, 7, 11]),
    ("z^4", ("z",), [5, 7]),
    ("z^5", ("z",), [3, 5, 7]),       # p = 5 kills dW: rejected as non-isolated
    ("z^2 + w^2", ("z", "w"), [5]),
    ("z^3 + w^3", ("z", "w"), [7, 13]),
    # second critical point with nonzero critical value: no global
    # Nullstellensatz certificate exists, and W^p-multiplication is honestly
    # not nilpotent (the connection has a genuine exponential part there)
    ("z^3 + z^4", ("z",), [7]),
]


def main():
    for text, variables, primes in CASES:
        for p in primes:
            start = time.monotonic()
            try:
                field = PrimeField(p)
                w = Potential.build(field, variables, parse_poly(text, variables, field))
                report = mf_p_curvature(w, p)
                elapsed = time.monotonic() - start
                print(f"W = {text:12s} p={p:3d}: mu={report.mu} N={report.nullstellensatz_exponent} "
                      f"agree={report.matrices_agree} "
                      f"nilpotent(idx {report.operator_verdict.index}) "
                      f"({elapsed:.2f}s)")
            except ExptypeError as exc:
                print(f"W = {text:12s} p={p:3d}: rejected ({exc})")


if __name__ == "__main__":
    main()
