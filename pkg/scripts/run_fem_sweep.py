"""Planar FEM concentration sweep driven by a JSON config (see configs/)."""

import argparse

from neumann_steklov.experiments import SweepConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", help="JSON file with SweepConfig fields")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = SweepConfig.from_json(args.config)
    if args.out:
        cfg.out = args.out
    rep = run_sweep(cfg)
    if rep.label:
        print(f"# {rep.label}")
    print(f"lambda_St = {rep.lambda_st:.10g}")
    for r in rep.records:
        extra = f"  refined {r['lambda_n_refined']:.10g}" if "lambda_n_refined" in r else ""
        print(f"a={r['a']:<8.5g} lambda_N={r['lambda_n']:.10g}  error={r['error']:.4e}"
              f"  iters={r['iterations']}  residual={r['residual']:.1e}{extra}")
    print(f"verdict: {rep.verdict}")
    for f in rep.failures:
        print("FAILED:", f)


if __name__ == "__main__":
    main()
