"""Compare the star-product wedge of the deformed 2-form with the Moyal residual.

For each random potential series the theta^2 difference is printed next to
-S/12, where S is the third-order (pb, qb) contraction of Omega_p and Omega_q.
"""
import argparse
import random
from fractions import Fraction

from moyal_kahler import heavenly, ratpoly
from moyal_kahler.moyal import ThetaSeries
from moyal_kahler.ratpoly import ONE, P, Q, ZERO, d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--terms", type=int, default=10)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for i in range(args.count):
        polys = [ratpoly.random_poly(rng, 4, args.terms) for _ in range(3)]
        oh = heavenly.potential_series(*polys, order=2)
        w = heavenly.wedge_self(heavenly.build_two_form(oh), 2).at(2) or ThetaSeries.scalar(ZERO, 2)
        diff = w - (heavenly.deformed_bracket(oh, 2) - ThetaSeries.scalar(ONE, 2))
        s = ratpoly.bidifferential(d(polys[0], P), d(polys[0], Q), 3) * Fraction(-1, 12)
        print(f"{i:3d}  theta^0,1 agree: {diff.coeff(0)[0].is_zero() and diff.coeff(1)[0].is_zero()}"
              f"  theta^2 gap: {diff.coeff(2)[0]}  -S/12: {s}")


if __name__ == "__main__":
    main()
