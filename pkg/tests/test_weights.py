import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from neumann_steklov.errors import ParameterDomainError
from neumann_steklov.weights import (BoundaryWeightSpec, ConcentratingWeight, ExponentBundle, a_grid,
                                     beta_moment, constant_alpha, delta_exponent, delta_pq, layer_sup,
                                     mu_total_mass, parse_alpha, radial_mass, rho)
from neumann_steklov.quadrature import circle_rule, concentrating_radial_rule


def cw(a, n=2, alpha=None):
    return ConcentratingWeight(alpha or constant_alpha(1.0, n), a, n)


def test_rho_examples():
    assert rho(cw(1.0), 0.5) == 2.0
    assert rho(cw(0.5), 1.0) == 4.0
    assert rho(cw(0.5), 0.5) == pytest.approx(1.0, abs=1e-15)


def test_rho_origin_convention():
    assert rho(cw(0.5), 0.0) == 0.0
    assert rho(cw(1.0, 3), 0.0) == 3.0


def test_rho_rejects_bad_inputs():
    with pytest.raises(ParameterDomainError):
        ConcentratingWeight(constant_alpha(), 1.5, 2)
    with pytest.raises(ParameterDomainError):
        ConcentratingWeight(constant_alpha(), 0.0, 2)
    with pytest.raises(ParameterDomainError):
        rho(cw(0.5), 1.2)


@given(st.floats(0.01, 1.0), st.sampled_from([2, 3]))
def test_rho_nondecreasing(a, n):
    r = np.linspace(0, 1, 200)
    assert np.all(np.diff(rho(cw(a, n), r)) >= -1e-12)


@pytest.mark.parametrize("a,n", [(1.0, 2), (0.3, 3), (0.05, 2)])
def test_radial_mass_examples(a, n):
    assert radial_mass(cw(a, n)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3])
def test_radial_mass_log_grid(n):
    for j in range(11):
        w = cw(2.0 ** -j, n)
        assert abs(radial_mass(w) - 1.0) < 1e-14
        _, wr = concentrating_radial_rule(w.a, n)
        assert abs(wr.sum() - 1.0) < 1e-12


def test_mu_total_mass_examples():
    assert mu_total_mass(cw(0.3)) == pytest.approx(2 * math.pi, rel=1e-15)
    assert mu_total_mass(cw(0.3, alpha=parse_alpha("fourier:1,1,0"))) == pytest.approx(2 * math.pi, rel=1e-15)
    alpha = BoundaryWeightSpec("fourier", (1, 0, 0, 0, 0, 0, 0.5))
    assert mu_total_mass(cw(0.3, alpha=alpha)) == pytest.approx(2 * math.pi, rel=1e-15)


def test_mu_total_mass_against_bulk_quadrature():
    # polar quadrature of int_B mu_a with the sin(3 theta) profile
    alpha = BoundaryWeightSpec("fourier", (1, 0, 0, 0, 0, 0, 0.5))
    for a in (0.7, 0.2, 0.05):
        w = cw(a, alpha=alpha)
        inner = lambda r: quad(lambda t: w.mu(np.array([r * np.cos(t), r * np.sin(t)])), 0, 2 * np.pi,
                               epsabs=1e-13)[0] * r
        bulk = quad(inner, 0, 1, points=[1 - a / 2], epsabs=1e-12, limit=200)[0]
        assert abs(bulk - mu_total_mass(w)) <= 1e-8


@given(st.floats(0.02, 1.0), st.floats(0.02, 1.0))
def test_mu_total_mass_independent_of_a(a1, a2):
    alpha = parse_alpha("fourier:2,0.5,-0.3")
    assert mu_total_mass(cw(a1, alpha=alpha)) == mu_total_mass(cw(a2, alpha=alpha))


def test_boundary_weight_validation():
    with pytest.raises(ParameterDomainError):
        parse_alpha("fourier:0.5,1,0")  # negative somewhere
    with pytest.raises(ParameterDomainError):
        parse_alpha("constant:0")
    with pytest.raises(ParameterDomainError):
        BoundaryWeightSpec("fourier", (1.0,) + (0.0,) * 130)
    with pytest.raises(ParameterDomainError):
        BoundaryWeightSpec("fourier", (1.0, 0.5), 3)
    with pytest.raises(ParameterDomainError):
        parse_alpha("spline:1,2")


def test_table_weight_interpolates():
    alpha = parse_alpha("pointwise-table:1,2,3,2")
    th = np.array([0.0, np.pi / 4, np.pi / 2])
    assert np.allclose(alpha(th), [1.0, 1.5, 2.0])
    assert alpha.total_mass() == pytest.approx(2 * np.pi * 2.0)
    assert alpha.sup() == 3.0


def test_layer_sup_examples():
    assert layer_sup(cw(1.0), 2.0) == (2.0, 0.0)
    val, r = layer_sup(cw(0.5), 2.0)
    assert r == pytest.approx(0.5) and val == pytest.approx(0.25)
    assert layer_sup(cw(0.25), 2.0)[1] == pytest.approx(0.75)


@pytest.mark.parametrize("a", [0.5, 0.25, 0.1])
def test_layer_sup_matches_grid_search(a):
    # 1D grid search at step 1e-5
    w = cw(a)
    r = np.arange(1, 100000) * 1e-5
    vals = (1 - r) ** 2 * rho(w, r)
    i = int(np.argmax(vals))
    sup, ra = layer_sup(w, 2.0)
    assert abs(r[i] - ra) <= 1e-5
    assert sup == pytest.approx(vals[i], rel=1e-8)


@given(st.floats(0.005, 0.99), st.floats(0.1, 4.0), st.sampled_from([2, 3]))
def test_layer_sup_argmax_formula(a, m, n):
    w = cw(a, n)
    e = n / a - n
    assert layer_sup(w, m)[1] == pytest.approx(e / (e + m), abs=1e-12)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 3.0])
def test_layer_sup_scaled_bounded(m):
    scaled = [layer_sup(cw(a), m)[0] * a ** (1 - m) for a in 2.0 ** -np.arange(1, 12)]
    limit = 2 ** (1 - m) * (m / math.e) ** m
    assert max(scaled) < 2 * limit
    assert abs(scaled[-1] / limit - 1) < 0.01


def test_beta_moment_examples():
    assert beta_moment(cw(1.0), 1.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert beta_moment(cw(1.0), 1.0, 2.0) == pytest.approx(1 / 6, abs=1e-12)
    w = cw(0.2, 3)
    ref = quad(lambda r: (1 - r) ** 1.7 * 15 * r ** 14, 0, 1, epsabs=0, epsrel=1e-13)[0]
    assert abs(beta_moment(w, 0.85, 2.0) - ref) <= 1e-10


@given(st.floats(0.01, 1.0), st.sampled_from([2, 3]))
def test_beta_moment_sq_one(a, n):
    assert beta_moment(cw(a, n), 0.5, 2.0) == pytest.approx(a / (n + a), abs=1e-12)


def test_beta_moment_rate_bounded():
    for sq in (0.5, 1.0, 1.7):
        ratios = [beta_moment(cw(a), sq, 1.0) / a ** sq for a in a_grid(0.4, 0.5, 10)]
        assert max(ratios) < 2 * ratios[0] + 1


def test_beta_moment_small_a_no_overflow():
    v = beta_moment(cw(1e-4, 3), 0.5, 3.0)
    assert np.isfinite(v) and v > 0


def test_delta_examples():
    assert delta_exponent(ExponentBundle(2, 2, 3)) == pytest.approx(0.5)
    assert delta_exponent(ExponentBundle(2, 3, 3)) == pytest.approx(1 / 6)
    assert delta_exponent(ExponentBundle(1.5, 2, 2)) == pytest.approx(1 / 6)
    with pytest.raises(ParameterDomainError):
        ExponentBundle(2, 2, 2)
    with pytest.raises(ParameterDomainError):
        ExponentBundle(2, 4.5, 3)


@given(st.sampled_from([2, 3]), st.floats(0.0, 1.0), st.floats(0.001, 0.999))
def test_delta_identity(n, u, v):
    p = 1.05 + u * (n - 1.1)
    q_max = p * (n - 1) / (n - p)
    q = p + v * (q_max - p)
    if not (p < q < q_max):
        return
    b = ExponentBundle(p, q, n)
    assert (p * b.theta - 1) / q == pytest.approx(b.delta, abs=1e-12)
    assert b.delta == delta_pq(p, q, n)


def test_a_grid_default():
    assert np.allclose(a_grid(), [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125])


def test_sphere_weights():
    w = cw(0.3, 3)
    assert mu_total_mass(w) == pytest.approx(4 * math.pi)
    x = np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0]])
    assert w.mu(x)[1] == 0.0
    assert w.mu(x)[0] == pytest.approx(10 * 0.5 ** 7)


def test_circle_rule_sums():
    _, w = circle_rule(7)
    assert w.sum() == pytest.approx(2 * np.pi)
