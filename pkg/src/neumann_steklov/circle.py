"""Fourier toolkit on the unit circle: Poisson semigroup, radial extension,
Slobodeckij norms, and the Poisson-vs-radial and radial-trace gaps measured in
the concentrating measures mu_a (planar case)."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ParameterDomainError, TraceUndefinedError
from .quadrature import circle_rule, concentrating_radial_rule, gauss_on

MAX_DEGREE = 256


@dataclass(frozen=True)
class CircleFunction:
    """Real function on the circle stored as coefficients c_k, k = -K..K."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ParameterDomainError("coefficients must have odd length 2K+1")
        if (c.size - 1) // 2 > MAX_DEGREE:
            raise ParameterDomainError(f"degree above {MAX_DEGREE}")
        c = 0.5 * (c + np.conj(c[::-1]))  # enforce c_{-k} = conj(c_k)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self):
        return (self.coeffs.size - 1) // 2

    @property
    def k(self):
        return np.arange(-self.K, self.K + 1)

    def coeff(self, k):
        return self.coeffs[k + self.K] if abs(k) <= self.K else 0.0

    @classmethod
    def from_trig(cls, a0=0.0, cos=None, sin=None):
        """a0 + sum_k cos[k] cos(k t) + sin[k] sin(k t)."""
        cos, sin = cos or {}, sin or {}
        K = max([0, *cos, *sin])
        c = np.zeros(2 * K + 1, dtype=complex)
        c[K] = a0
        for k, v in cos.items():
            c[K + k] += 0.5 * v
            c[K - k] += 0.5 * v
        for k, v in sin.items():
            c[K + k] += -0.5j * v
            c[K - k] += 0.5j * v
        return cls(c)

    @classmethod
    def from_samples(cls, values, K=None):
        values = np.asarray(values, dtype=float)
        m = values.size
        K = (m - 1) // 2 if K is None else K
        if 2 * K + 1 > m:
            raise ParameterDomainError("not enough samples for the requested degree")
        f = np.fft.fft(values) / m
        c = np.concatenate((f[m - K:], f[:K + 1]))
        if m % 2 == 0 and K == m // 2:
            c[0] *= 0.5
            c[-1] *= 0.5
        return cls(c)

    @classmethod
    def from_function(cls, func, K):
        theta, _ = circle_rule(4 * K + 4)
        return cls.from_samples(func(theta), K)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.real(np.exp(1j * np.multiply.outer(theta, self.k)) @ self.coeffs)

    def samples(self, m):
        """Values at 2 pi j / m (m > 2K) via the inverse FFT."""
        if m <= 2 * self.K:
            raise ParameterDomainError("need more samples than 2K")
        buf = np.zeros(m, dtype=complex)
        buf[:self.K + 1] = self.coeffs[self.K:]
        if self.K:
            buf[m - self.K:] = self.coeffs[:self.K]
        return np.real(np.fft.ifft(buf) * m)

    def shifted(self, tau):
        """theta -> g(theta + tau)."""
        return CircleFunction(self.coeffs * np.exp(1j * self.k * tau))

    def scaled(self, factor):
        return CircleFunction(self.coeffs * factor)

    def _grid(self, m):
        return max(m, 4 * self.K + 4)

    def lq_norm(self, q, alpha=None, m=1024):
        m = self._grid(m)
        theta, w = circle_rule(m)
        vals = np.abs(self.samples(m)) ** q
        if alpha is not None:
            vals = vals * alpha(theta)
        return float(np.dot(w, vals)) ** (1.0 / q)

    def l2_norm_parseval(self):
        return float(np.sqrt(2 * np.pi * np.sum(np.abs(self.coeffs) ** 2)))

    def derivative(self):
        return CircleFunction(1j * self.k * self.coeffs)


def poisson_extend(g, r):
    """P_r g: multiplies mode k by r^|k| (harmonic extension at radius r)."""
    if not (0.0 <= r < 1.0):
        raise ParameterDomainError(f"Poisson semigroup needs 0 <= r < 1, got {r}")
    return CircleFunction(g.coeffs * float(r) ** np.abs(g.k))


def poisson_value(g, r, theta):
    """P[g](r, theta) for arrays r, theta of equal shape (r <= 1 allowed)."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    k = g.k
    terms = (r[..., None] ** np.abs(k)) * np.exp(1j * theta[..., None] * k)
    return np.real(terms @ g.coeffs)


def radial_extend(g):
    """R[g](r, theta) = g(theta)."""
    def extension(r, theta):
        return np.broadcast_to(g(theta), np.broadcast(np.asarray(r), np.asarray(theta)).shape)
    return extension


def lq_norm_mu(F, w, q, m=1024, order=10):
    """||F||_{L^q(B, mu_a)} for a planar bulk function F(r, theta)."""
    if w.n != 2:
        raise ParameterDomainError("circle toolkit is planar")
    r, wr = concentrating_radial_rule(w.a, 2, order)
    theta, wt = circle_rule(m)
    R, T = np.meshgrid(r, theta, indexing="ij")
    vals = np.abs(F(R, T)) ** q * w.alpha(theta)[None, :]
    return float(wr @ vals @ wt) ** (1.0 / q)


def _tau_rule(tau_min=1e-6, panels=64, order=8):
    breaks = np.geomspace(tau_min, np.pi, panels + 1)
    return gauss_on(breaks, order)


def slobodeckij_seminorm_q(g, s, q, tau_min=1e-6, panels=64, order=8, m=None):
    """int int |g(x) - g(y)|^q / |x - y|^(1 + s q) over the circle (chord distance).

    Computed as int_0^{2pi} D(tau) |2 sin(tau/2)|^{-1-sq} d tau with
    D(tau) = int |g(x + tau) - g(x)|^q dx; the tau-grid is geometric toward 0
    and the piece below tau_min uses the leading-order behaviour of D.
    """
    if not (0.0 < s < 1.0) or q < 1:
        raise ParameterDomainError("need 0 < s < 1 and q >= 1")
    m = m or max(512, 8 * g.K + 8)
    theta, wt = circle_rule(m)
    base = g.samples(m)
    tau, wtau = _tau_rule(tau_min, panels, order)
    D = np.empty(tau.size)
    for i, t in enumerate(tau):
        D[i] = np.dot(wt, np.abs(g.shifted(t).samples(m) - base) ** q)
    kern = np.abs(2.0 * np.sin(0.5 * tau)) ** (-1.0 - s * q)
    total = np.dot(wtau, D * kern)
    dg = np.dot(wt, np.abs(g.derivative().samples(m)) ** q)
    total += dg * tau_min ** (q * (1 - s)) / (q * (1 - s))
    return float(2.0 * total)


def slobodeckij_norm(g, s, q, **kw):
    """(||g||_q^q + Gagliardo seminorm)^(1/q) on the circle."""
    return (g.lq_norm(q) ** q + slobodeckij_seminorm_q(g, s, q, **kw)) ** (1.0 / q)


def fractional_multiplier(k, s):
    """w_s(k) = 2 pi int_0^{2pi} 4 sin^2(k tau/2) / |2 sin(tau/2)|^(1+2s) d tau."""
    k = abs(int(k))
    if k == 0:
        return 0.0
    f = lambda t: 4.0 * np.sin(0.5 * k * t) ** 2 / (2.0 * np.sin(0.5 * t)) ** (1.0 + 2.0 * s)
    pts = np.linspace(0, np.pi, 2 * k + 2)[1:-1]
    val, _ = quad(f, 0.0, np.pi, points=pts, limit=400, epsabs=0, epsrel=1e-13)
    return 2 * np.pi * 2 * val


def slobodeckij_norm_fourier(g, s):
    """q = 2 norm from the Fourier multiplier (independent of the tau quadrature)."""
    semi = sum(abs(g.coeff(k)) ** 2 * fractional_multiplier(k, s) for k in g.k)
    return float(np.sqrt(g.l2_norm_parseval() ** 2 + semi))


def poisson_radial_gap(g, w, q, m=512, order=10):
    """||P[g] - R[g]||_{L^q(B, mu_a)} = (int ||P_r g - g||^q_{L^q(alpha)} rho_a r dr)^(1/q)."""
    if w.n != 2:
        raise ParameterDomainError("poisson_radial_gap is planar")
    r, wr = concentrating_radial_rule(w.a, 2, order)
    m = max(m, 4 * g.K + 4)
    theta, wt = circle_rule(m)
    alpha = w.alpha(theta)
    base = g.samples(m)
    rk = r[:, None] ** np.abs(g.k)[None, :]
    buf = np.zeros((r.size, m), dtype=complex)
    buf[:, :g.K + 1] = rk[:, g.K:] * g.coeffs[g.K:]
    if g.K:
        buf[:, m - g.K:] = rk[:, :g.K] * g.coeffs[:g.K]
    pr = np.real(np.fft.ifft(buf, axis=1) * m)
    inner = (np.abs(pr - base) ** q * alpha) @ wt
    return float(np.dot(wr, inner)) ** (1.0 / q)


@dataclass
class SeparableField:
    """u(r, theta) = sum f(r) cos(k theta) or f(r) sin(k theta).

    ``modes`` holds tuples (k, "cos" | "sin", f, df) with vectorized radial
    profiles ``f`` and their derivatives ``df``.
    """

    modes: list

    def __call__(self, r, theta):
        out = 0.0
        for k, kind, f, _ in self.modes:
            trig = np.cos(k * theta) if kind == "cos" else np.sin(k * theta)
            out = out + f(r) * trig
        return out

    def gradient_sq(self, r, theta):
        ur, ut = 0.0, 0.0
        for k, kind, f, df in self.modes:
            c, s_ = np.cos(k * theta), np.sin(k * theta)
            if kind == "cos":
                ur = ur + df(r) * c
                ut = ut - k * f(r) * s_
            else:
                ur = ur + df(r) * s_
                ut = ut + k * f(r) * c
        with np.errstate(divide="ignore", invalid="ignore"):
            tang = np.where(r > 0, ut / r, 0.0)
        return ur ** 2 + tang ** 2

    def trace(self, K=None):
        for k, _, f, _ in self.modes:
            f1 = np.asarray(f(np.array([1.0 - 1e-9, 1.0])), dtype=float)
            if not np.all(np.isfinite(f1)) or abs(f1[1] - f1[0]) > 1e-6 * (1 + abs(f1[1])):
                raise TraceUndefinedError(f"mode {k} profile is not continuous at r = 1")
        K = K or max(k for k, *_ in self.modes)
        return CircleFunction.from_function(lambda th: self(np.ones_like(th), th), max(K, 1))

    def gradient_norm(self, p, m=256, order=10):
        """||grad u||_{L^p(B)} on the unit disk."""
        r, wr = gauss_on(np.linspace(0, 1, 17), order)
        theta, wt = circle_rule(m)
        R, T = np.meshgrid(r, theta, indexing="ij")
        vals = self.gradient_sq(R, T) ** (p / 2)
        return float((wr * r) @ vals @ wt) ** (1.0 / p)


def harmonic_field(g):
    """P[g] as a SeparableField (profiles r^k)."""
    modes = []
    a0 = np.real(g.coeff(0))
    if a0:
        modes.append((0, "cos", lambda r, a0=a0: a0 * np.ones_like(r), lambda r: np.zeros_like(r)))
    for k in range(1, g.K + 1):
        ck = g.coeff(k)
        a, b = 2 * np.real(ck), -2 * np.imag(ck)
        if a:
            modes.append((k, "cos", lambda r, k=k, a=a: a * r ** k, lambda r, k=k, a=a: a * k * r ** (k - 1)))
        if b:
            modes.append((k, "sin", lambda r, k=k, b=b: b * r ** k, lambda r, k=k, b=b: b * k * r ** (k - 1)))
    return SeparableField(modes)


def radial_trace_gap(u, w, q, m=1024):
    """||u - R[Tu]||_{L^q(B, mu_a)}."""
    g = u.trace()
    return lq_norm_mu(lambda r, th: u(r, th) - g(th), w, q, m)
