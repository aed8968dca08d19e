"""Wall time and output size of the symbolic solver as p and N grow (n = 2, q = diag(1, 2))."""

import argparse
import time

from arithlc.solver import MetricTuple, solve_for


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="3,5,7")
    ap.add_argument("--precisions", default="2,3")
    ap.add_argument("--verify", action="store_true", help="also check the fixed-point equations")
    args = ap.parse_args()
    metric = MetricTuple.constant(((1, 0), (0, 2)))
    print(f"{'p':>3} {'N':>3} {'terms':>8} {'solve s':>9} ok")
    for p in map(int, args.primes.split(",")):
        for N in map(int, args.precisions.split(",")):
            start = time.perf_counter()
            conn = solve_for(metric, p, N)
            elapsed = time.perf_counter() - start
            terms = sum(e.nterms() for L in conn.lams for e in L.entries())
            ok = conn.verify_metric() and conn.verify_torsion() if args.verify else "-"
            print(f"{p:>3} {N:>3} {terms:>8} {elapsed:>9.2f} {ok}")


if __name__ == "__main__":
    main()
