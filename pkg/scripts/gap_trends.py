#!/usr/bin/env python3
"""Tail classification of the scaled gap sequence for several weights.

The fractional order s decides the fate of 2s*M_n: above 1/2 the scaled
reciprocal gaps shrink to zero, at 1/2 they settle at one, below 1/2 they
diverge. Pass a custom n_max as the only positional argument.
"""

import sys

sys.path.insert(0, "src")

import mpmath

from fdjacobi import OperatorParams, PrecisionContext, gap_limit_trend, spectral_gap_M

CASES = (
    ("3/4", ("1/2", "0")),
    ("3/4", ("-1/8", "-1/2")),
    ("3/4", ("0", "0")),
    ("1/2", ("0", "0")),
    ("1/4", ("0", "0")),
)


def main(argv=None):
    n_max = int(argv[0]) if argv else 200
    ctx = PrecisionContext(digits=30, verify_digits=60)
    with ctx.workdps():
        for s, (alpha, beta) in CASES:
            params = OperatorParams(alpha, beta, s)
            trend = gap_limit_trend(params, n_max, ctx)
            samples = ", ".join(
                f"M_{n}={mpmath.nstr(spectral_gap_M(n, params, ctx), 6)}"
                for n in (0, 10, n_max))
            print(f"alpha={alpha:>4} beta={beta:>4} s={s}: "
                  f"2s*M_n {trend}   [{samples}]")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
