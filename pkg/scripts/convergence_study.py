#!/usr/bin/env python3
"""Per-step corrections next to the a-priori majorant bounds.

Prints |lambda^(j)| and the unit-scale coefficient norms side by side with
the per-step bounds, then the rank-m tail bounds. Indices whose sufficient
ratio fails (r_n >= 1) still get the raw decay table; the bound columns are
blanked because the majorant series diverges there.
"""

import argparse
import sys

sys.path.insert(0, "src")

import mpmath

from fdjacobi import (
    OperatorParams,
    PolynomialPotential,
    PrecisionContext,
    convergence_report,
    correction_bound,
    norm_bound,
    run,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="1/2")
    ap.add_argument("--beta", default="0")
    ap.add_argument("--s", default="3/4")
    ap.add_argument("--poly", default="0,0,0,1/4")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--rank", type=int, default=20)
    ap.add_argument("--digits", type=int, default=50)
    args = ap.parse_args(argv)

    params = OperatorParams(args.alpha, args.beta, args.s)
    q = PolynomialPotential.from_spec(args.poly)
    ctx = PrecisionContext(digits=args.digits, verify_digits=2 * args.digits)
    approx = run(args.n, args.rank, params, q, ctx, normalization="normalized")
    report = convergence_report(args.n, params, q, ctx)
    with ctx.workdps():
        base = approx.correction_norms[0]
        print(f"n={args.n}  r_n={mpmath.nstr(report.r_n, 6)}  "
              f"converges={report.converges}")
        print(f"{'j':>3} {'|lam^(j)|':>12} {'bound':>12} "
              f"{'norm/norm0':>12} {'bound':>12}")
        for j in range(args.rank + 1):
            lam = mpmath.nstr(abs(approx.lambdas[j]), 4)
            nrm = mpmath.nstr(approx.correction_norms[j] / base, 4)
            lb = nb = "-"
            if report.converges:
                nb = mpmath.nstr(norm_bound(j, report.r_n, ctx), 4)
                if j >= 1:
                    lb = mpmath.nstr(
                        correction_bound(j, report.r_n, report.q_inf, ctx), 4)
            print(f"{j:>3} {lam:>12} {lb:>12} {nrm:>12} {nb:>12}")
        if report.converges:
            print(f"tail bounds at rank {args.rank}: "
                  f"eig={mpmath.nstr(report.eig_bound(args.rank), 4)} "
                  f"fun={mpmath.nstr(report.fun_bound(args.rank), 4)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
