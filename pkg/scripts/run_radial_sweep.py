"""Mode-1 Neumann values on the ball (n=3) as the weight concentrates, with the
fitted convergence rate toward the Steklov value 1."""

import argparse

from neumann_steklov.experiments import SweepConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a-count", type=int, default=6)
    ap.add_argument("--out", default="results/radial_n3")
    args = ap.parse_args()
    rep = run_sweep(SweepConfig(n=3, a_count=args.a_count, out=args.out))
    for r in rep.records:
        print(f"a={r['a']:<8.5g} lambda_N={r['lambda_n']:.10f}  |C_N - C_St|={r['error']:.4e}")
    print(f"slope {rep.slope:.4f}  rms residual {rep.fit_residual:.3g}  -> {rep.verdict}")
    print(f"wrote {args.out}.csv, {args.out}.json, {args.out}_plot.csv")


if __name__ == "__main__":
    main()
