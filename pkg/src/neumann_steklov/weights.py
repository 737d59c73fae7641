"""Concentrating radial densities, boundary weight profiles and the exponent
bookkeeping for the (p, q) problems.

The bulk density ``rho_a(x) = (n/a)|x|^(n/a - n)`` has unit mass in the radial
variable, so ``mu_a = alpha~ * rho_a`` carries the total mass of the boundary
profile ``alpha`` for every ``a`` while concentrating on the sphere as a -> 0.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import betaln

from .errors import ParameterDomainError
from .quadrature import circle_rule, sphere_area

MAX_FOURIER_DEGREE = 64
_SAMPLES = 4096


@dataclass(frozen=True)
class BoundaryWeightSpec:
    """Bounded nonnegative weight ``alpha`` on the unit circle or sphere.

    kind
        ``"constant"``: ``data = (c,)``.
        ``"fourier"``: ``data = (a0, a1, b1, a2, b2, ...)`` meaning
        ``a0 + sum a_k cos(k t) + b_k sin(k t)`` (circle only).
        ``"table"``: samples at ``2 pi j / m``, periodic piecewise-linear.
        ``"function"``: vectorized callable of the angle (circle only).
    """

    kind: str
    data: tuple = (1.0,)
    n: int = 2
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ParameterDomainError(f"dimension must be 2 or 3, got {self.n}")
        if self.kind not in ("constant", "fourier", "table", "function"):
            raise ParameterDomainError(f"unknown boundary weight kind {self.kind!r}")
        if self.kind != "constant" and self.n != 2:
            raise ParameterDomainError("non-constant boundary weights are only supported on the circle")
        if self.kind == "fourier" and (len(self.data) - 1) // 2 > MAX_FOURIER_DEGREE:
            raise ParameterDomainError(f"Fourier degree above {MAX_FOURIER_DEGREE}")
        if self.kind == "fourier" and len(self.data) % 2 == 0:
            raise ParameterDomainError("Fourier data must be (a0, a1, b1, ..., ak, bk)")
        if self.kind == "function" and self.func is None:
            raise ParameterDomainError("function weight needs a callable")
        if self.kind == "table" and len(self.data) < 3:
            raise ParameterDomainError("table weight needs at least 3 samples")
        vals = self._probe()
        if not np.all(np.isfinite(vals)):
            raise ParameterDomainError("boundary weight is not finite")
        if vals.min() < -1e-12:
            raise ParameterDomainError(f"boundary weight is negative (min {vals.min():.3g})")
        if self.total_mass() <= 0:
            raise ParameterDomainError("boundary weight has zero total mass")

    def _probe(self):
        if self.kind == "constant":
            return np.array([float(self.data[0])])
        if self.kind == "table":
            return np.asarray(self.data, dtype=float)
        theta, _ = circle_rule(_SAMPLES)
        return self(theta)

    def __call__(self, theta):
        """Evaluate at angles (circle) -- for the sphere use :meth:`at`."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "constant":
            return np.full(theta.shape, float(self.data[0]))
        if self.kind == "fourier":
            c = np.asarray(self.data, dtype=float)
            out = np.full(theta.shape, c[0])
            for k in range(1, (len(c) - 1) // 2 + 1):
                out = out + c[2 * k - 1] * np.cos(k * theta) + c[2 * k] * np.sin(k * theta)
            return out
        if self.kind == "table":
            v = np.asarray(self.data, dtype=float)
            m = v.size
            s = np.mod(theta, 2 * np.pi) * m / (2 * np.pi)
            j = np.floor(s).astype(int) % m
            frac = s - np.floor(s)
            return (1 - frac) * v[j] + frac * v[(j + 1) % m]
        return np.asarray(self.func(theta), dtype=float)

    def at(self, x):
        """Evaluate at points of R^n through their direction x/|x|."""
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape[:-1], float(self.data[0]))
        return self(np.arctan2(x[..., 1], x[..., 0]))

    def total_mass(self):
        """A_alpha = integral of alpha over the sphere."""
        if self.kind == "constant":
            return float(self.data[0]) * sphere_area(self.n)
        if self.kind == "fourier":
            return 2 * np.pi * float(self.data[0])
        if self.kind == "table":
            return 2 * np.pi * float(np.mean(self.data))
        theta, w = circle_rule(_SAMPLES)
        return float(np.dot(w, self(theta)))

    def sup(self):
        return float(np.max(self._probe()))

    @property
    def is_radial(self):
        return self.kind == "constant"


def constant_alpha(c=1.0, n=2):
    return BoundaryWeightSpec("constant", (float(c),), n)


def parse_alpha(text, n=2):
    """Parse ``constant:1``, ``fourier:a0,a1,b1,...`` or ``table:v0,v1,...``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "pointwise-table":
        kind = "table"
    if kind not in ("constant", "fourier", "table"):
        raise ParameterDomainError(f"cannot parse boundary weight {text!r}")
    vals = tuple(float(v) for v in rest.split(",")) if rest else (1.0,)
    return BoundaryWeightSpec(kind, vals, n)


@dataclass(frozen=True)
class ConcentratingWeight:
    alpha: BoundaryWeightSpec
    a: float
    n: int = 2

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise ParameterDomainError(f"a must lie in (0, 1], got {self.a}")
        if self.n != self.alpha.n:
            raise ParameterDomainError("alpha and weight dimensions differ")

    @property
    def b(self):
        """Exponent n/a of the radial antiderivative."""
        return self.n / self.a

    def rho(self, r):
        return rho(self, r)

    def mu(self, x):
        """mu_a(x) = alpha(x/|x|) rho_a(|x|) at points x of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        out = self.alpha.at(x) * rho(self, np.minimum(r, 1.0))
        return np.where(r > 0, out, 0.0)


def rho(w, r):
    """Radial density (n/a) r^(n/a - n); the r = 0 value is the continuous limit."""
    if not (0.0 < w.a <= 1.0):
        raise ParameterDomainError(f"a must lie in (0, 1], got {w.a}")
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1 + 1e-12)):
        raise ParameterDomainError("rho is defined for 0 <= r <= 1")
    r = np.minimum(r, 1.0)
    out = (w.n / w.a) * r ** (w.n / w.a - w.n)
    return out if out.ndim else float(out)


def radial_mass(w):
    """int_0^1 rho_a(r) r^(n-1) dr from the antiderivative r^(n/a)."""
    b = w.n / w.a
    return (w.n / w.a) * (1.0 ** b - 0.0 ** b) / b


def mu_total_mass(w):
    return w.alpha.total_mass()


def layer_sup(w, m):
    """sup over 0 < r < 1 of (1 - r)^m rho_a(r) and the maximizing radius.

    For a < 1 the maximizer is (n/a - n)/(n/a - n + m); the value is assembled
    in log form since n/a is large for small a.
    """
    if m <= 0:
        raise ParameterDomainError("m must be positive")
    n, a = w.n, w.a
    if a == 1.0:
        return float(n), 0.0
    e = n / a - n
    r_a = e / (e + m)
    log_val = np.log(n / a) + m * np.log(m / (e + m)) + e * np.log(r_a)
    return float(np.exp(log_val)), float(r_a)


def beta_moment(w, s, q):
    """Polar moment int_0^1 (1 - r)^(sq) (n/a) r^(n/a - 1) dr = (n/a) B(sq+1, n/a)."""
    if s <= 0 or q < 1:
        raise ParameterDomainError("need s > 0 and q >= 1")
    b = w.n / w.a
    return float(np.exp(np.log(b) + betaln(s * q + 1.0, b)))


def delta_pq(p, q, n):
    """min{1 - 1/p, 1 - n/p + (n-1)/q}, without range validation."""
    return min(1.0 - 1.0 / p, 1.0 - n / p + (n - 1) / q)


@dataclass(frozen=True)
class ExponentBundle:
    p: float
    q: float
    n: int

    def __post_init__(self):
        if not (1.0 < self.p < self.n):
            raise ParameterDomainError(f"need 1 < p < n, got p={self.p}, n={self.n}")
        if not (1.0 < self.q < self.q_max):
            raise ParameterDomainError(
                f"need 1 < q < p(n-1)/(n-p) = {self.q_max:.6g}, got q={self.q}")

    @property
    def q_max(self):
        return self.p * (self.n - 1) / (self.n - self.p)

    @property
    def p_star(self):
        return self.n * self.p / (self.n - self.p)

    @property
    def theta(self):
        return (self.p_star - self.q) / (self.p_star - self.p)

    @property
    def delta(self):
        return delta_pq(self.p, self.q, self.n)


def delta_exponent(b):
    return b.delta


def in_hypotheses(p, q, n):
    return 1.0 < p < n and 1.0 < q < p * (n - 1) / (n - p)


def a_grid(start=0.4, ratio=0.5, count=6):
    """Geometric grid start * ratio^j, j = 0..count-1."""
    return start * ratio ** np.arange(count)
