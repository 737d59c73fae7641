import json

import numpy as np
import pytest

from neumann_steklov.errors import ParameterDomainError
from neumann_steklov.experiments import (INCONCLUSIVE, SANITY_LABEL, SweepConfig, fit_rate, quotient_checks,
                                         run_lemma_checks, run_minimizer_sweep, run_quotient_comparison,
                                         run_sweep)


def test_config_defaults_and_grid():
    cfg = SweepConfig()
    assert cfg.resolved_method == "radial" and cfg.label == ""
    assert np.allclose(cfg.a_values, [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125])


def test_config_requires_acknowledgment():
    with pytest.raises(ParameterDomainError):
        SweepConfig(n=2, p=2, q=2)
    cfg = SweepConfig(n=2, p=2, q=2, outside_hypotheses=True)
    assert cfg.label == SANITY_LABEL
    assert SweepConfig(n=2, p=1.5, q=2).label == ""


def test_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ParameterDomainError, match="bogus"):
        SweepConfig.from_dict({"n": 3, "bogus": 1})
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 3, "a_count": 4}))
    assert SweepConfig.from_json(path).a_count == 4


@pytest.mark.parametrize("bad", [dict(n=4), dict(method="spectral"), dict(a_ratio=1.5), dict(a_start=0.0)])
def test_config_validation(bad):
    with pytest.raises(ParameterDomainError):
        SweepConfig(**bad)


def test_fit_rate_exact_power():
    a = 0.4 * 0.5 ** np.arange(6)
    slope, resid, const, used = fit_rate(a, 3 * a ** 0.7)
    assert slope == pytest.approx(0.7, abs=1e-12) and resid < 1e-12
    assert const == pytest.approx(3.0) and used == 5
    assert fit_rate(a[:3], a[:3])[0] is None


def test_radial_sweep_n3(tmp_path):
    cfg = SweepConfig(out=str(tmp_path / "sweep"))
    rep = run_sweep(cfg)
    assert rep.ok and rep.lambda_st == 1.0
    lam_err = np.array([r["lambda_n"] for r in rep.records]) - 1
    assert np.all(np.diff(lam_err) < 0)
    assert rep.slope >= 0.45 and rep.fit_residual <= 0.2 and rep.fit_points >= 4
    for suffix in (".csv", ".json", "_plot.csv"):
        assert (tmp_path / f"sweep{suffix}").exists()
    summary = json.loads((tmp_path / "sweep.json").read_text())
    assert summary["config"]["n"] == 3 and "environment" in summary


def test_short_grid_refuses_fit():
    rep = run_sweep(SweepConfig(a_count=3))
    assert rep.slope is None and "no fit" in rep.verdict
    assert len(rep.records) == 3 and np.all(np.isfinite(rep.errors))


def test_inconclusive_verdict(monkeypatch):
    import neumann_steklov.experiments as ex
    noisy = iter([0.5, 0.01, 0.3, 0.002, 0.2, 0.0001])

    def fake_point(cfg, a):
        return dict(a=float(a), lambda_n=(1 - next(noisy)) ** -2, iterations=0, residual=0.0,
                    refine_delta=None, status="ok")

    monkeypatch.setattr(ex, "neumann_point", fake_point)
    rep = ex.run_sweep(SweepConfig())
    assert rep.slope is not None and rep.fit_residual > 0.2
    assert rep.verdict == INCONCLUSIVE


def test_failed_point_is_reported(monkeypatch):
    import neumann_steklov.experiments as ex
    real = ex.neumann_point

    def flaky(cfg, a):
        if a < 0.05:
            return dict(a=float(a), lambda_n=float("nan"), iterations=0, residual=float("nan"),
                        refine_delta=None, status="failed: injected")
        return real(cfg, a)

    monkeypatch.setattr(ex, "neumann_point", flaky)
    rep = ex.run_sweep(SweepConfig())
    assert not rep.ok and any("injected" in f for f in rep.failures)


def test_sweep_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        run_sweep(SweepConfig(n=2, p=2, q=2, outside_hypotheses=True, a_count=4, mesh_h=0.1,
                              out=str(tmp_path / "run")))
        outs.append([(tmp_path / f"run{s}").read_bytes() for s in (".csv", ".json", "_plot.csv")])
    assert outs[0] == outs[1]


def test_fem_sweep_n2_reaches_steklov():
    rep = run_sweep(SweepConfig(n=2, p=2, q=2, outside_hypotheses=True))
    assert rep.ok and abs(rep.lambda_st - 1) <= 0.01
    last = rep.records[-1]
    assert last["a"] == pytest.approx(0.0125) and abs(last["lambda_n"] - rep.lambda_st) < 0.05


def test_minimizer_sweep_radial_and_repeatable():
    rows = run_minimizer_sweep(SweepConfig())
    d = [r["distance"] for r in rows]
    assert all(y < x for x, y in zip(d, d[1:]))
    assert rows == run_minimizer_sweep(SweepConfig())


def test_quotient_comparison_rows():
    rows = run_quotient_comparison(SweepConfig(n=2, p=2, q=2, outside_hypotheses=True))
    const = [r for r in rows if r["field"] == "constant"]
    assert all(r["gap"] == 0.0 for r in const)
    x1 = [r for r in rows if r["field"] == "x1"]
    assert all(r["boundary"] == pytest.approx(np.sqrt(np.pi), rel=1e-12) for r in x1)
    assert all(c.passed for c in quotient_checks(rows))


def test_quotient_comparison_planar_only():
    with pytest.raises(ParameterDomainError):
        run_quotient_comparison(SweepConfig())


def test_lemma_checks_all_pass():
    import time
    t0 = time.perf_counter()
    checks = run_lemma_checks()
    assert time.perf_counter() - t0 < 60
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, failed
    names = " ".join(c.name for c in checks)
    assert "moment" in names
