"""Residue of Phi_12 at the identity for q = d * 1 on GL_2, against the predicted value."""

import argparse

from arithlc.coordring import reduce_mod_p_and_x1
from arithlc.curvature import curvature, phi12_residue_expected
from arithlc.solver import MetricTuple, solve_for


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="3,5")
    ap.add_argument("--dmax", type=int, default=6)
    args = ap.parse_args()
    print(f"{'p':>3} {'d':>3} {'Phi_12 residue':>24} {'predicted r^p':>14}")
    for p in map(int, args.primes.split(",")):
        for d in range(1, args.dmax + 1):
            if d % p == 0:
                continue
            conn = solve_for(MetricTuple.constant(((d, 0), (0, d))), p, 2)
            ct = curvature(conn)
            res = [[reduce_mod_p_and_x1(ct.Phi[(0, 1)][i, j]).coeffs[0] for j in range(2)] for i in range(2)]
            print(f"{p:>3} {d:>3} {str(res):>24} {phi12_residue_expected(d, p).coeffs[0]:>14}")


if __name__ == "__main__":
    main()
