#!/usr/bin/env python3
"""Sweep the squeeze family and watch the verdicts flip.

As eps grows the waist tightens: the slope bound fails first, then the
spectral tests start firing.  Prints one row per eps; pass --csv to get
machine-readable output instead of the aligned table.
"""

import argparse
import sys

from revspec import full_report, squeeze_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="0,0.25,0.5,1,2,4,9",
                    help="comma-separated squeeze strengths")
    ap.add_argument("--n", type=int, default=18,
                    help="half the waist sharpness exponent")
    ap.add_argument("--csv", action="store_true")
    args = ap.parse_args()

    eps_values = [float(tok) for tok in args.eps.split(",") if tok.strip()]
    header = ("eps", "max_slope", "lambda01", "mults",
              "slope_verdict", "spectral_verdict")
    if args.csv:
        print(",".join(header))
    else:
        print(f"{'eps':>6} {'max_slope':>10} {'lambda01':>10} {'mults':>10}"
              f" {'slope':>14} {'spectral':>28}")

    for eps in eps_values:
        p = squeeze_profile(eps, n=2 * args.n)
        rep = full_report(p)
        mults = ";".join(str(m)
                         for m in rep.even_multiplicity_test.multiplicities)
        slope_verdict = ("embeddable" if rep.sup_test.embeddable
                         else "not_embeddable")
        row = (f"{eps:g}", f"{rep.sup_test.max_slope:.6g}",
               f"{rep.spectral_test.lambda01:.6g}", mults,
               slope_verdict, rep.spectral_verdict)
        if args.csv:
            print(",".join(row))
        else:
            print(f"{row[0]:>6} {row[1]:>10} {row[2]:>10} {row[3]:>10}"
                  f" {row[4]:>14} {row[5]:>28}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
