"""Command line entry point: ``nts <subcommand> [flags]``."""

import argparse
import json
import sys
from dataclasses import fields

from . import radial
from .eigen import minimize_quotient, solve_linear
from .errors import ParameterDomainError, SolverError
from .experiments import (SweepConfig, _fem_forms, quotient_checks, run_lemma_checks,
                          run_minimizer_sweep, run_quotient_comparison, run_sweep)
from .weights import ConcentratingWeight, constant_alpha

_FLAG_FIELDS = {
    "n": int, "p": float, "q": float, "alpha": str, "map": str,
    "a_start": float, "a_ratio": float, "a_count": int, "mesh_h": float,
    "layer_factor": float, "method": str, "tol": float, "max_iter": int,
    "restarts": int, "seed": int, "workers": int, "out": str, "dump_mesh": str,
}


def _parser():
    ap = argparse.ArgumentParser(prog="nts", description="Weighted Neumann-to-Steklov concentration experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("sweep", "minimizers", "quotient-compare", "lemma-checks", "oracle", "steklov", "neumann"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file mirroring SweepConfig")
        for key, typ in _FLAG_FIELDS.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None)
        sp.add_argument("--refine-check", dest="refine_check", action="store_true", default=None)
        sp.add_argument("--outside-hypotheses", dest="outside_hypotheses", action="store_true", default=None)
        if name == "neumann":
            sp.add_argument("--a", dest="a", type=float, default=None)
        if name == "oracle":
            sp.add_argument("--k", dest="k", type=int, default=1)
    return ap


def build_config(args):
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(SweepConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterDomainError(f"unknown config keys: {', '.join(unknown)}")
    for f in fields(SweepConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            data[f.name] = val
    if args.command in ("steklov", "neumann", "quotient-compare") and "n" not in data:
        data["n"] = 2
    return SweepConfig.from_dict(data)


def _print_checks(checks):
    for c in checks:
        print(c.line())
    bad = sum(not c.passed for c in checks)
    print(f"{len(checks) - bad}/{len(checks)} checks passed")
    return 0 if bad == 0 else 1


def _cmd_sweep(cfg):
    rep = run_sweep(cfg)
    if rep.label:
        print(f"# {rep.label}")
    print(f"lambda_St = {rep.lambda_st:.10g}   C_St = {rep.c_st:.10g}")
    print(f"{'a':>10} {'lambda_N':>14} {'C_N':>14} {'|C_N-C_St|':>14} {'iters':>6} {'residual':>10}  fit")
    for r in rep.records:
        print(f"{r['a']:10.5g} {r['lambda_n']:14.10g} {r['c_n']:14.10g} {r['error']:14.6e} "
              f"{r['iterations']:6d} {r['residual']:10.2e}  {'yes' if r['in_fit'] else 'no'}  {r['status']}")
    if rep.slope is not None:
        print(f"fitted slope {rep.slope:.4f} (rms log residual {rep.fit_residual:.3g}, "
              f"{rep.fit_points} points; empirical constant {rep.fit_constant:.4g})")
    print(f"verdict: {rep.verdict}")
    for f in rep.failures:
        print(f"FAILED: {f}")
    return 0 if rep.ok else 1


def _cmd_minimizers(cfg):
    rows = run_minimizer_sweep(cfg)
    if cfg.label:
        print(f"# {cfg.label}")
    for r in rows:
        print(f"a = {r['a']:10.5g}   distance = {r['distance']:.8g}")
    d = [r["distance"] for r in rows]
    ok = len(d) < 2 or d[-1] < d[0]
    print("distances decrease from the largest to the smallest a" if ok else "FAILED: distance did not decrease")
    return 0 if ok else 1


def _cmd_quotient(cfg):
    rows = run_quotient_comparison(cfg)
    for r in rows:
        print(f"{r['field']:>14} a={r['a']:<9.5g} bulk={r['bulk']:.8g} boundary={r['boundary']:.8g} "
              f"gap={r['gap']:.4e} normalized={r['normalized']:.4g}")
    return _print_checks(quotient_checks(rows))


def _cmd_oracle(cfg, k):
    if cfg.n not in (2, 3):
        raise ParameterDomainError("oracle supports n = 2 or 3")
    code = 0
    print(f"mode {k}, n = {cfg.n}; Steklov value {radial.mode_steklov(cfg.n, k)[0]:g}")
    for a in cfg.a_values:
        w = ConcentratingWeight(constant_alpha(1.0, cfg.n), float(a), cfg.n)
        fe = radial.mode_neumann(cfg.n, k, w)
        sh = radial.shooting_eigenvalue(cfg.n, k, w)
        ok = abs(fe - sh) <= 1e-6
        code |= not ok
        print(f"a = {a:10.5g}  elements {fe:.12g}  shooting {sh:.12g}  {'agree' if ok else 'DISAGREE'}")
    return int(code)


def _cmd_single(cfg, which, a):
    if cfg.n != 2:
        raise ParameterDomainError("single solves run on the planar FEM path")
    a = float(cfg.a_values[-1] if a is None else a)
    forms = _fem_forms(cfg, a)
    if cfg.dump_mesh:
        with open(cfg.dump_mesh, "w") as fh:
            fh.write(forms.mesh.to_text())
    if (cfg.p, cfg.q) == (2.0, 2.0):
        res = solve_linear(forms, which)
    else:
        res = minimize_quotient(forms, cfg.p, cfg.q, which, options=cfg.options())
    if cfg.label:
        print(f"# {cfg.label}")
    if which == "neumann":
        print(f"a = {a:g}")
    print(f"lambda = {res.lam:.12g}   sharp constant = {res.sharp_constant:.12g}")
    print(f"weak residual = {res.weak_residual:.3e}   iterations = {res.iterations}"
          f"   degenerate pair: {'yes' if res.degenerate_pair is not None else 'no'}")
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "lemma-checks":
            return _print_checks(run_lemma_checks())
        cfg = build_config(args)
        if args.command == "sweep":
            return _cmd_sweep(cfg)
        if args.command == "minimizers":
            return _cmd_minimizers(cfg)
        if args.command == "quotient-compare":
            return _cmd_quotient(cfg)
        if args.command == "oracle":
            return _cmd_oracle(cfg, args.k)
        return _cmd_single(cfg, args.command, getattr(args, "a", None))
    except (ParameterDomainError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
