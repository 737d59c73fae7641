"""Concentration sweeps, minimizer sweeps, quotient comparisons and the
lemma-check suite, with CSV/JSON reporting."""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from . import circle, radial
from .eigen import (MinimizeOptions, discrete_w1p_norm, minimize_quotient, q_center,
                    solve_linear)
from .errors import ParameterDomainError, SolverError
from .fem import assemble, build_disk_mesh, layer_width_for, problem_weights
from .maps import (ConformalQuadraticMap, IdentityMap, RadialPowerMap, change_of_variables_check,
                   induce_weights, mass_chain, parse_map, pullback_energy_weight,
                   unweighted_boundary_alpha)
from .quadrature import circle_rule, concentrating_radial_rule, gauss_on
from .weights import (ConcentratingWeight, ExponentBundle, a_grid, beta_moment,
                      constant_alpha, delta_pq, in_hypotheses, layer_sup, parse_alpha, radial_mass)

SANITY_LABEL = "outside hypotheses 1<p<n, 1<q<p(n-1)/(n-p) (sanity run)"
INCONCLUSIVE = "rate inconclusive"
FIT_RESIDUAL_MAX = 0.2
FLOOR_FRACTION = 0.25
GAP_SLOPE_MIN = 0.45


@dataclass
class SweepConfig:
    n: int = 3
    p: float = 2.0
    q: float = 2.0
    alpha: str = "constant:1"
    map: str = "identity"
    a_start: float = 0.4
    a_ratio: float = 0.5
    a_count: int = 6
    mesh_h: float = 0.02
    layer_factor: float = 1.0
    method: str = "auto"
    tol: float = 1e-10
    max_iter: int = 100_000
    restarts: int = 4
    seed: int = 0
    refine_check: bool = False
    outside_hypotheses: bool = False
    workers: int = 1
    out: Optional[str] = None
    dump_mesh: Optional[str] = None

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ParameterDomainError(f"n must be 2 or 3, got {self.n}")
        if self.method not in ("auto", "fem", "radial"):
            raise ParameterDomainError(f"unknown method {self.method!r}")
        if self.a_count < 1 or not (0 < self.a_start <= 1) or not (0 < self.a_ratio < 1):
            raise ParameterDomainError("invalid a-grid")
        if not in_hypotheses(self.p, self.q, self.n):
            if not self.outside_hypotheses:
                raise ParameterDomainError(
                    f"(p, q, n) = ({self.p}, {self.q}, {self.n}) violates 1<p<n, 1<q<p(n-1)/(n-p); "
                    "set outside_hypotheses to run it as a sanity check")
            if self.p <= 1 or self.q <= 1:
                raise ParameterDomainError("need p > 1 and q > 1")
        else:
            ExponentBundle(self.p, self.q, self.n)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterDomainError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    @property
    def a_values(self):
        return a_grid(self.a_start, self.a_ratio, self.a_count)

    @property
    def resolved_method(self):
        if self.method != "auto":
            return self.method
        return "radial" if self.n == 3 else "fem"

    @property
    def label(self):
        return "" if in_hypotheses(self.p, self.q, self.n) else SANITY_LABEL

    def tmap(self):
        return parse_map(self.map, self.n)

    def alpha_spec(self):
        if self.alpha.strip() == "unweighted":
            return unweighted_boundary_alpha(self.tmap())
        return parse_alpha(self.alpha, self.n)

    def options(self):
        return MinimizeOptions(self.tol, self.max_iter, self.restarts, self.seed)


@dataclass
class SweepReport:
    config: dict
    records: list
    lambda_st: float
    c_st: float
    slope: Optional[float] = None
    fit_residual: Optional[float] = None
    fit_constant: Optional[float] = None
    fit_points: int = 0
    verdict: str = ""
    label: str = ""
    failures: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def errors(self):
        return np.array([r["error"] for r in self.records])

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        d = asdict(self)
        d["constants_note"] = "fit constant is an empirical least-squares intercept"
        return d


# -- solves ------------------------------------------------------------------

def _radial_check(cfg):
    spec = cfg.alpha_spec()
    if not spec.is_radial or not isinstance(cfg.tmap(), IdentityMap) or (cfg.p, cfg.q) != (2.0, 2.0):
        raise ParameterDomainError("radial path needs p = q = 2, constant alpha and the identity map")
    return float(spec.data[0])


def _mesh_for(cfg, a, h=None):
    h = cfg.mesh_h if h is None else h
    return build_disk_mesh(h, layer_width_for(a, cfg.n, h, cfg.layer_factor))


def _fem_forms(cfg, a, h=None):
    w = ConcentratingWeight(cfg.alpha_spec(), float(a), cfg.n)
    bulk, bnd, tmap = problem_weights(cfg.tmap(), w)
    return assemble(_mesh_for(cfg, a, h), bulk, bnd, tmap, cfg.p)


def _fem_solve(cfg, forms, which):
    if (cfg.p, cfg.q) == (2.0, 2.0):
        return solve_linear(forms, which)
    return minimize_quotient(forms, cfg.p, cfg.q, which, options=cfg.options())


def steklov_value(cfg, h=None):
    """(lambda_St, iterations, residual) for the configured boundary weight."""
    if cfg.resolved_method == "radial":
        c = _radial_check(cfg)
        return radial.mode_steklov(cfg.n, 1)[0] / c, 0, 0.0
    if cfg.n != 2:
        raise ParameterDomainError("the FEM path is planar")
    a_min = float(cfg.a_values[-1])
    res = _fem_solve(cfg, _fem_forms(cfg, a_min, h), "steklov")
    return res.lam, res.iterations, res.weak_residual


def neumann_point(cfg, a):
    """Per-a record: lambda_N, iterations, residual and refinement delta."""
    a = float(a)
    t0 = time.perf_counter()
    try:
        if cfg.resolved_method == "radial":
            c = _radial_check(cfg)
            w = ConcentratingWeight(constant_alpha(1.0, cfg.n), a, cfg.n)
            lam = radial.mode_neumann(cfg.n, 1, w) / c
            rec = dict(a=a, lambda_n=lam, iterations=0, residual=0.0,
                       refine_delta=radial.richardson_delta(cfg.n, 1, w) / c, status="ok")
        else:
            if cfg.n != 2:
                raise ParameterDomainError("the FEM path is planar")
            res = _fem_solve(cfg, _fem_forms(cfg, a), "neumann")
            rec = dict(a=a, lambda_n=res.lam, iterations=res.iterations, residual=res.weak_residual,
                       refine_delta=None, status="ok")
            if cfg.refine_check:
                fine = _fem_solve(cfg, _fem_forms(cfg, a, cfg.mesh_h / 2), "neumann")
                rec["refine_delta"] = abs(fine.lam - res.lam)
                rec["lambda_n_refined"] = fine.lam
    except (SolverError, ParameterDomainError, np.linalg.LinAlgError) as exc:
        rec = dict(a=a, lambda_n=float("nan"), iterations=0, residual=float("nan"),
                   refine_delta=None, status=f"failed: {exc}")
    rec["seconds"] = time.perf_counter() - t0
    return rec


def _map_points(cfg, func, values):
    if cfg.workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(func, [cfg] * len(values), values))
    return [func(cfg, v) for v in values]


def fit_rate(a, err, count=None):
    """Least-squares slope of log err against log a on the last max(4, count-1)
    points; returns (slope, rms log residual, constant, points used) or Nones
    when fewer than 4 points are usable."""
    a, err = np.asarray(a, float), np.asarray(err, float)
    count = len(a) if count is None else count
    take = max(4, count - 1)
    a, err = a[-take:], err[-take:]
    ok = np.isfinite(err) & (err > 0)
    a, err = a[ok], err[ok]
    if a.size < 4:
        return None, None, None, int(a.size)
    x, y = np.log(a), np.log(err)
    slope, icept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icept)) ** 2)))
    return float(slope), resid, float(np.exp(icept)), int(a.size)


def run_sweep(cfg):
    lam_st, _, _ = steklov_value(cfg)
    c_st = lam_st ** (-1.0 / cfg.p)
    records = _map_points(cfg, neumann_point, list(cfg.a_values))
    failures = []
    for r in records:
        if r["status"] != "ok":
            failures.append(f"a={r['a']:.6g}: {r['status']}")
            r.update(c_n=float("nan"), error=float("nan"), in_fit=False)
            continue
        r["c_n"] = r["lambda_n"] ** (-1.0 / cfg.p)
        r["error"] = abs(r["c_n"] - c_st)
        # do not fit mesh error as a concentration rate
        delta = r["refine_delta"]
        if delta is not None:
            delta_c = abs(delta) * r["c_n"] / (cfg.p * r["lambda_n"])
            r["in_fit"] = bool(delta_c <= FLOOR_FRACTION * r["error"])
        else:
            r["in_fit"] = True
    fit_a = [r["a"] if r["in_fit"] else math.nan for r in records]
    fit_e = [r["error"] if r["in_fit"] else math.nan for r in records]
    slope, resid, const, used = fit_rate(fit_a, fit_e, cfg.a_count)
    if slope is None:
        verdict = f"no fit ({used} usable points; at least 4 required)"
    elif resid > FIT_RESIDUAL_MAX:
        verdict = INCONCLUSIVE
    else:
        verdict = f"rate a^{slope:.3f}"
    errs = [r["error"] for r in records if np.isfinite(r["error"])]
    if len(errs) >= 2 and not errs[-1] < errs[0]:
        failures.append("error at the smallest a is not below the error at the largest a")
    env = dict(method=cfg.resolved_method, mesh_h=cfg.mesh_h, layer_factor=cfg.layer_factor,
               tol=cfg.tol, max_iter=cfg.max_iter, restarts=cfg.restarts, seed=cfg.seed)
    report = SweepReport(asdict(cfg), records, lam_st, c_st, slope, resid, const, used, verdict,
                         cfg.label, failures, env)
    if cfg.out:
        write_sweep(report, cfg.out)
    if cfg.dump_mesh and cfg.resolved_method == "fem":
        Path(cfg.dump_mesh).write_text(_mesh_for(cfg, cfg.a_values[-1]).to_text())
    return report


SWEEP_COLUMNS = ["a", "lambda_n", "c_n", "error", "iterations", "residual", "refine_delta", "in_fit", "status"]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_sweep(report, out):
    out = Path(out)
    base = out.with_suffix("") if out.suffix else out
    base.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{base}.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(SWEEP_COLUMNS)
        for r in report.records:
            wr.writerow([_fmt(r.get(c)) for c in SWEEP_COLUMNS])
    with open(f"{base}_plot.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["log_a", "log_error"])
        for r in report.records:
            if np.isfinite(r["error"]) and r["error"] > 0:
                wr.writerow([repr(math.log(r["a"])), repr(math.log(r["error"]))])
    summary = report.summary()
    for r in summary["records"]:
        r.pop("seconds", None)  # keep the JSON reproducible
    Path(f"{base}.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


# -- minimizer sweep ------------------------------------------------------------

def eigenspace_distance(forms, u, basis, p, boundary_forms=None):
    """min over unit-boundary-norm elements s of span(basis) (and sign) of
    the discrete W^{1,p} norm of u - s."""
    meas = (boundary_forms or forms).boundary
    if basis.shape[1] == 1:
        return min(discrete_w1p_norm(forms, u - s * basis[:, 0], p) for s in (1.0, -1.0))
    b1, b2 = basis[:, 0], basis[:, 1]
    G = np.array([[np.dot(meas.w, (meas.E @ x) * (meas.E @ y)) for y in (b1, b2)] for x in (b1, b2)])
    L = np.linalg.cholesky(G)
    Q = np.linalg.solve(L, np.stack([b1, b2])).T  # boundary-orthonormal basis

    def dist(phi):
        return discrete_w1p_norm(forms, u - np.cos(phi) * Q[:, 0] - np.sin(phi) * Q[:, 1], p)

    grid = np.linspace(0, 2 * np.pi, 73)[:-1]
    vals = [dist(t) for t in grid]
    t0 = grid[int(np.argmin(vals))]
    res = minimize_scalar(dist, bounds=(t0 - np.pi / 36, t0 + np.pi / 36), method="bounded",
                          options={"xatol": 1e-10})
    return float(min(res.fun, min(vals)))


def minimizer_point(cfg, a):
    a = float(a)
    if cfg.resolved_method == "radial":
        _radial_check(cfg)
        w = ConcentratingWeight(constant_alpha(1.0, cfg.n), a, cfg.n)
        return dict(a=a, distance=radial.mode_minimizer_distance(cfg.n, 1, w))
    forms = _fem_forms(cfg, a)
    neu = _fem_solve(cfg, forms, "neumann")
    ste = _fem_solve(cfg, forms, "steklov")
    # Steklov eigenfunctions normalized in the boundary norm; the Neumann
    # minimizer in its bulk norm (both q-centered)
    return dict(a=a, distance=eigenspace_distance(forms, neu.minimizer, ste.eigenspace(), cfg.p),
                lambda_n=neu.lam, lambda_st=ste.lam)


def run_minimizer_sweep(cfg):
    rows = _map_points(cfg, minimizer_point, list(cfg.a_values))
    if cfg.out:
        base = Path(cfg.out).with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        with open(f"{base}.csv", "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["a", "distance"])
            for r in rows:
                wr.writerow([repr(r["a"]), repr(r["distance"])])
    return rows


# -- quotient seminorm comparison -------------------------------------------------

def _sample_fields():
    return {
        "constant": (lambda x: np.full(x.shape[0], 3.0), lambda x: np.zeros_like(x)),
        "x1": (lambda x: x[:, 0], lambda x: np.stack([np.ones(x.shape[0]), np.zeros(x.shape[0])], 1)),
        "poisson-cos2": (lambda x: x[:, 0] ** 2 - x[:, 1] ** 2,
                         lambda x: np.stack([2 * x[:, 0], -2 * x[:, 1]], 1)),
    }


def centered_seminorms(u, w, q, tmap=None, m=512):
    """(inf_c ||u - c||_{L^q(mu_a)}, inf_c ||Tu - c||_{L^q(alpha)}) by polar
    quadrature on the disk; for maps with an energy pullback these equal the
    seminorms of u o phi^-1 on the image with (gamma_a, beta)."""
    r, wr = concentrating_radial_rule(w.a, 2)
    th, wt = circle_rule(m)
    pts = np.stack([np.outer(r, np.cos(th)).ravel(), np.outer(r, np.sin(th)).ravel()], 1)
    wb = np.outer(wr, wt * w.alpha(th)).ravel()
    vb = u(pts)
    cb = q_center(vb, wb, q)
    bulk = float(np.dot(wb, np.abs(vb - cb) ** q)) ** (1 / q)
    bpts = np.stack([np.cos(th), np.sin(th)], 1)
    ws = wt * w.alpha(th)
    vs = u(bpts)
    cs = q_center(vs, ws, q)
    bnd = float(np.dot(ws, np.abs(vs - cs) ** q)) ** (1 / q)
    return bulk, bnd


def gradient_lp(grad, p, tmap=None, m=512):
    r, wr = gauss_on(np.linspace(0, 1, 33), 10)
    th, wt = circle_rule(m)
    pts = np.stack([np.outer(r, np.cos(th)).ravel(), np.outer(r, np.sin(th)).ravel()], 1)
    wgt = np.outer(wr * r, wt).ravel()
    if tmap is not None and not isinstance(tmap, IdentityMap):
        wgt = wgt * pullback_energy_weight(tmap, p)(pts)
    g = grad(pts)
    return float(np.dot(wgt, np.sum(g * g, 1) ** (p / 2))) ** (1 / p)


def run_quotient_comparison(cfg, sample_fields=None):
    if cfg.n != 2:
        raise ParameterDomainError("quotient comparison is planar")
    tmap = cfg.tmap()
    if isinstance(tmap, RadialPowerMap):
        raise ParameterDomainError("quotient comparison needs a map with an energy pullback")
    s = 0.9 * delta_pq(cfg.p, cfg.q, cfg.n)
    fields_ = sample_fields or _sample_fields()
    rows = []
    for name, (u, grad) in fields_.items():
        gnorm = gradient_lp(grad, cfg.p, tmap)
        for a in cfg.a_values:
            w = ConcentratingWeight(cfg.alpha_spec(), float(a), 2)
            bulk, bnd = centered_seminorms(u, w, cfg.q, tmap)
            gap = abs(bulk - bnd)
            norm = gap / (a ** s * gnorm) if gnorm > 0 else 0.0
            rows.append(dict(field=name, a=float(a), bulk=bulk, boundary=bnd, gap=gap,
                             grad_norm=gnorm, s=s, normalized=norm))
    return rows


def quotient_checks(rows):
    out = []
    for name in dict.fromkeys(r["field"] for r in rows):
        sub = [r for r in rows if r["field"] == name]
        if all(r["grad_norm"] == 0 for r in sub):
            out.append(Check(f"{name}: gap vanishes", max(r["gap"] for r in sub), 0.0, 1e-12,
                             all(r["gap"] <= 1e-12 for r in sub)))
            continue
        first = sub[0]["normalized"]
        worst = max(r["normalized"] for r in sub)
        out.append(Check(f"{name}: normalized gap bounded by 2x first", worst, 2 * first, 0.0,
                         worst <= 2 * first))
        slope, _, _, used = fit_rate([r["a"] for r in sub], [r["gap"] for r in sub])
        if slope is not None:
            out.append(Check(f"{name}: gap decay slope ({used} points)", slope, GAP_SLOPE_MIN, 0.0,
                             slope >= GAP_SLOPE_MIN))
    return out


# -- lemma checks ---------------------------------------------------------------

@dataclass
class Check:
    name: str
    observed: float
    expected: float
    tol: float
    passed: bool

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: observed {self.observed:.10g}, expected {self.expected:.10g} (tol {self.tol:.1g})"


def _close(name, obs, exp, tol, rel=False):
    err = abs(obs - exp) / (abs(exp) if rel and exp else 1.0)
    return Check(name, float(obs), float(exp), tol, bool(err <= tol))


def _weight_checks(grid):
    out = []
    for n in (2, 3):
        alpha = constant_alpha(1.0, n)
        for a in grid:
            w = ConcentratingWeight(alpha, a, n)
            r, wr = concentrating_radial_rule(a, n)
            out.append(_close(f"radial mass n={n} a={a:.4g}", wr.sum(), 1.0, 1e-12))
            val, _ = quad(lambda t: w.rho(t) * t ** (n - 1), 0, 1, limit=200, points=[1 - a / n])
            out.append(_close(f"radial mass by adaptive quadrature n={n} a={a:.4g}", val, 1.0, 1e-8))
            out.append(_close(f"radial mass closed form n={n} a={a:.4g}", radial_mass(w), 1.0, 1e-14))
            for m in (0.5, 1.0, 2.0):
                sup, r_a = layer_sup(w, m)
                if a < 1:
                    e = n / a - n
                    out.append(_close(f"layer sup argmax n={n} a={a:.4g} m={m}", r_a, e / (e + m), 1e-4))
                    rr = np.linspace(0, 1, 200001)[1:-1]
                    probe = np.max((1 - rr) ** m * w.rho(rr))
                    out.append(_close(f"layer sup value n={n} a={a:.4g} m={m}", sup, probe, 1e-5, rel=True))
            out.append(_close(f"beta moment sq=1 n={n} a={a:.4g}", beta_moment(w, 0.5, 2), a / (n + a), 1e-12))
            val, _ = quad(lambda t: (1 - t) ** 1.3 * (n / a) * t ** (n / a - 1), 0, 1, epsabs=0, epsrel=1e-13, limit=200)
            out.append(_close(f"beta moment vs quadrature n={n} a={a:.4g}", beta_moment(w, 0.65, 2), val, 1e-10))
    w = ConcentratingWeight(constant_alpha(1.0, 2), 1.0, 2)
    out.append(_close("beta moment (1-r)^2 at a=1, n=2", beta_moment(w, 1.0, 2), 1 / 6, 1e-12))
    for p, q, n in [(1.5, 2.0, 2), (2.0, 2.0, 3), (2.5, 3.0, 3), (1.2, 1.1, 3)]:
        b = ExponentBundle(p, q, n)
        if p < q:
            out.append(_close(f"delta identity p={p} q={q} n={n}", (p * b.theta - 1) / q, b.delta, 1e-12))
    out.append(_close("delta_{2,2} at n=2", delta_pq(2, 2, 2), 0.5, 0))
    out.append(_close("delta_{2,2} at n=3", delta_pq(2, 2, 3), 0.5, 0))
    for n in (2, 3):
        for m in (0.5, 2.0):
            limit = n ** (1 - m) * (m / math.e) ** m
            scaled = [layer_sup(ConcentratingWeight(constant_alpha(1.0, n), a, n), m)[0] * a ** (1 - m)
                      for a in grid if a < 1]
            worst = max(abs(v / limit - 1) for v in scaled)
            out.append(Check(f"layer sup * a^(1-m) stays within 2x of its limit n={n} m={m}", worst, 0.0, 1.0,
                             worst <= 1.0))
    return out


def _circle_checks(grid):
    out = []
    rng = np.random.default_rng(7)
    g = circle.CircleFunction.from_trig(cos={1: 1.0})
    gr = circle.CircleFunction.from_trig(a0=0.2, cos={k: rng.standard_normal() / k ** 2 for k in range(1, 9)},
                                         sin={k: rng.standard_normal() / k ** 2 for k in range(1, 9)})
    out.append(_close("Poisson semigroup P_0.3 P_0.6 = P_0.18",
                      np.max(np.abs(circle.poisson_extend(circle.poisson_extend(gr, 0.6), 0.3).coeffs
                                    - circle.poisson_extend(gr, 0.18).coeffs)), 0.0, 1e-15))
    one = ConcentratingWeight(constant_alpha(1.0, 2), 1.0, 2)
    out.append(_close("Poisson-radial gap cos, a=1", circle.poisson_radial_gap(g, one, 2), math.sqrt(math.pi / 6), 1e-8))
    gaps = []
    for a in grid:
        w = ConcentratingWeight(constant_alpha(1.0, 2), a, 2)
        b = 2 / a
        gap = circle.poisson_radial_gap(g, w, 2)
        gaps.append(gap)
        out.append(_close(f"Poisson-radial gap closed form a={a:.4g}", gap,
                          math.sqrt(2 * math.pi / ((b + 1) * (b + 2))), 1e-10, rel=True))
        iso = circle.lq_norm_mu(circle.radial_extend(g), w, 2)
        out.append(_close(f"radial extension isometry a={a:.4g}", iso, g.lq_norm(2), 1e-10))
    slope = np.polyfit(np.log(grid), np.log(gaps), 1)[0]
    out.append(Check("Poisson-radial gap slope >= 0.9", slope, 0.9, 0, slope >= 0.9))
    for s in (0.3, 0.5, 0.8):
        out.append(_close(f"Slobodeckij norm vs Fourier multiplier s={s}",
                          circle.slobodeckij_norm(gr, s, 2), circle.slobodeckij_norm_fourier(gr, s), 1e-4, rel=True))
    # zero-trace boundary layer probe: u = (1 - r) cos(theta)
    layer = circle.SeparableField([(1, "cos", lambda r: 1 - r, lambda r: -np.ones_like(r))])
    ratios = []
    for a in grid:
        w = ConcentratingWeight(constant_alpha(1.0, 2), a, 2)
        gap = circle.radial_trace_gap(layer, w, 2)
        exact = math.sqrt(math.pi * beta_moment(w, 1.0, 2))
        out.append(_close(f"zero-trace layer norm a={a:.4g}", gap, exact, 1e-8, rel=True))
        ratios.append(gap / layer.gradient_norm(2))
    out.append(Check("zero-trace layer ratio decreasing", ratios[-1], ratios[0], 0, bool(np.all(np.diff(ratios) < 0))))
    # trace gap for the harmonic field r cos(theta)
    u = circle.harmonic_field(g)
    tg = [circle.radial_trace_gap(u, ConcentratingWeight(constant_alpha(1.0, 2), a, 2), 2) / u.gradient_norm(2)
          for a in grid]
    slope = np.polyfit(np.log(grid), np.log(tg), 1)[0]
    out.append(Check("radial trace gap slope >= 0.45", slope, 0.45, 0, slope >= 0.45))
    # ball concentration of moments for u = P[cos]
    for a in grid:
        w = ConcentratingWeight(constant_alpha(1.0, 2), a, 2)
        b = 2 / a
        m2 = circle.lq_norm_mu(lambda r, t: r * np.cos(t), w, 2) ** 2
        out.append(_close(f"second moment of P[cos] a={a:.4g}", m2, math.pi * b / (b + 2), 1e-10, rel=True))
        r, wr = concentrating_radial_rule(a, 2)
        th, wt = circle_rule(256)
        m1 = float(wr @ (np.outer(r, np.cos(th))) @ wt)
        out.append(_close(f"signed moment of P[cos] a={a:.4g}", m1, 0.0, 1e-12))
    return out


def _map_checks(grid):
    out = []
    maps = [IdentityMap(2), IdentityMap(3), RadialPowerMap(0.75, 2), RadialPowerMap(0.6, 3),
            ConformalQuadraticMap(0.2), ConformalQuadraticMap(0.45)]
    rng = np.random.default_rng(11)
    for tm in maps:
        x = rng.standard_normal((200, tm.n))
        x *= (rng.uniform(0.05, 0.999, 200) / np.linalg.norm(x, axis=1))[:, None]
        rt = np.max(np.abs(tm.inverse(tm.forward(x)) - x))
        out.append(_close(f"round trip {tm.spec()}", rt, 0.0, 1e-10))
        out.append(Check(f"positive Jacobian {tm.spec()}", float(np.min(tm.jacobian_det(x))), 0.0, 0,
                         bool(np.all(tm.jacobian_det(x) > 0))))
        d = tm.distortion(x, 1.5)
        out.append(Check(f"finite distortion {tm.spec()}", float(np.max(d)), 0.0, 0, bool(np.all(np.isfinite(d)))))
        for a in (grid[0], grid[-1]):
            w = ConcentratingWeight(constant_alpha(1.0, tm.n), a, tm.n)
            chain = mass_chain(tm, w)
            out.append(_close(f"mass chain {tm.spec()} a={a:.4g}", max(abs(c - chain[-1]) for c in chain), 0.0, 1e-6))
            for fname, f in (("y1", lambda y: y[..., 0]), ("|y|^2", lambda y: np.sum(y * y, -1))):
                bg, sg = change_of_variables_check(tm, w, f)
                out.append(_close(f"change of variables {tm.spec()} a={a:.4g} f={fname}", max(bg, sg), 0.0, 1e-6))
    tm = ConformalQuadraticMap(0.25)
    w = ConcentratingWeight(unweighted_boundary_alpha(tm), 0.5, 2)
    ind = induce_weights(tm, w)
    th = np.linspace(0, 2 * np.pi, 1000, endpoint=False)
    dev = np.max(np.abs(ind.beta_at_angle(th) - 1.0))
    out.append(_close("unweighted boundary weight: beta == 1 (c=0.25)", dev, 0.0, 1e-10))
    return out


def run_lemma_checks(grid=None):
    """Fixed-seed invariant suite over weights, circle toolkit and maps."""
    grid = a_grid() if grid is None else np.asarray(grid)
    return _weight_checks(list(grid) + [1.0]) + _circle_checks(list(grid)) + _map_checks(list(grid))
