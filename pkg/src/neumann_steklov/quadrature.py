"""Quadrature rules used throughout: graded Gauss rules on [0, 1], circle and
sphere rules, and the degree-4 triangle rule."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _gauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_on(breaks, order=10):
    """Composite Gauss-Legendre rule on consecutive intervals of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _gauss(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (1.0 + x)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def graded_breaks(levels=40, ratio=0.5, both_ends=True, smallest=1e-14):
    """Breakpoints in [0, 1] refined geometrically toward 1 (and 0 if
    ``both_ends``), stopping once panel widths drop below ``smallest``."""
    half = 0.5 if both_ends else 1.0
    widths = half * ratio ** np.arange(1, levels + 1)
    widths = widths[widths >= smallest]
    upper = 1.0 - widths[::-1]
    upper = np.concatenate(([half], upper[upper > half], [1.0]))
    if not both_ends:
        return np.concatenate(([0.0], upper[upper > 0]))
    lower = widths
    return np.unique(np.concatenate(([0.0], lower, upper)))


def graded_unit_rule(order=10, levels=40, ratio=0.5, both_ends=True):
    return gauss_on(graded_breaks(levels, ratio, both_ends), order)


def concentrating_radial_rule(a, n, order=10, levels=48):
    """Nodes/weights with sum w_i F(r_i) ~= int_0^1 F(r) (n/a) r^(n/a-1) dr.

    Uses t = r^(n/a), under which the weighted radial measure becomes the
    uniform measure on [0, 1]; the t-rule is graded at both ends.
    """
    t, w = graded_unit_rule(order, levels, 0.5, True)
    r = t ** (a / n)
    return r, w


def circle_rule(m):
    """Periodic trapezoid rule on [0, 2pi)."""
    theta = 2.0 * np.pi * np.arange(m) / m
    return theta, np.full(m, 2.0 * np.pi / m)


def sphere_rule(m):
    """Product rule on S^2: Gauss-Legendre in cos(polar) x trapezoid in azimuth.

    Returns unit vectors (k, 3) and weights summing to 4 pi.
    """
    z, wz = _gauss(m)
    phi, wphi = circle_rule(2 * m)
    s = np.sqrt(1.0 - z ** 2)
    pts = np.stack(
        [np.outer(s, np.cos(phi)).ravel(), np.outer(s, np.sin(phi)).ravel(),
         np.repeat(z, phi.size)], axis=1)
    return pts, np.outer(wz, wphi).ravel()


def unit_sphere_rule(n, m):
    """Points on the unit sphere of R^n with weights (n = 2 or 3)."""
    if n == 2:
        th, w = circle_rule(m)
        return np.stack([np.cos(th), np.sin(th)], axis=1), w
    if n == 3:
        return sphere_rule(m)
    raise ValueError(f"unsupported dimension {n}")


def sphere_area(n):
    return 2.0 * np.pi if n == 2 else 4.0 * np.pi


# Degree-4, 6-point symmetric rule on the reference triangle (barycentric).
_A, _B = 0.445948490915965, 0.091576213509771
TRIANGLE_BARY = np.array([
    [_A, _A, 1 - 2 * _A], [_A, 1 - 2 * _A, _A], [1 - 2 * _A, _A, _A],
    [_B, _B, 1 - 2 * _B], [_B, 1 - 2 * _B, _B], [1 - 2 * _B, _B, _B],
])
TRIANGLE_WEIGHTS = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)
