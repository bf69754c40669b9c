"""Export Atiyah-Hitchin metric data on a (k, theta, psi) lattice."""
import argparse

from moyal_kahler import ah


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-k", type=int, default=10)
    ap.add_argument("--n-angle", type=int, default=8)
    ap.add_argument("--k-min", type=float, default=0.2)
    ap.add_argument("--k-max", type=float, default=0.8)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--out", default="ah_sweep.csv")
    args = ap.parse_args()
    lattice = ah.default_lattice(args.n_k, args.n_angle, args.n_angle, (args.k_min, args.k_max))
    rows = ah.ah_sweep(*lattice)
    ah.write_sweep(rows, args.out, args.format)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
