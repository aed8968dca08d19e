"""Table of the n = 1 Levi-Civita lift against the closed form, for a range of units d."""

import argparse

from arithlc.solver import MetricTuple, closed_form_n1, solve_for


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--dmax", type=int, default=12)
    args = ap.parse_args()
    print(f"{'d':>4} {'Lambda':>10} {'closed form':>12} match")
    for d in range(1, args.dmax + 1):
        if d % args.p == 0:
            continue
        lam = solve_for(MetricTuple.constant(((d,),)), args.p, args.N).lams[0][0, 0].evaluate([1])
        cf = closed_form_n1(d, args.p, args.N)
        print(f"{d:>4} {lam.coeffs[0]:>10} {cf.coeffs[0]:>12} {lam == cf}")


if __name__ == "__main__":
    main()
