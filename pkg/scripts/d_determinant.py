"""D(1, ..., 1) for small n, with its odd part, by FLINT and by fraction-free elimination."""

import argparse

from arithlc.mixed import d_determinant, identity_y, odd_part


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=3)
    ap.add_argument("--literal", action="store_true", help="do not halve the diagonal equations")
    args = ap.parse_args()
    for n in range(2, args.nmax + 1):
        y = identity_y(n)
        a = d_determinant(n, y, normalized=not args.literal)
        b = d_determinant(n, y, method="bareiss", normalized=not args.literal)
        print(f"n={n}  D={a}  bareiss={b}  odd part={odd_part(a)}")


if __name__ == "__main__":
    main()
