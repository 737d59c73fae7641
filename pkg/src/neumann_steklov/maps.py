"""Transfer maps B -> Omega with their Jacobians and boundary volume
derivatives, the weights they induce, and change-of-variables checks.

Catalog: identity, radial power ``|x|^(sigma-1) x`` (0 < sigma <= 1, any n)
and the conformal quadratic ``z + c z^2`` (|c| < 1/2, planar only).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ParameterDomainError, UnsupportedMapError
from .quadrature import concentrating_radial_rule, gauss_on, graded_breaks, unit_sphere_rule
from .weights import BoundaryWeightSpec, ConcentratingWeight


def _norm(x):
    return np.linalg.norm(x, axis=-1)


class TransferMap:
    """Base class; points are arrays of shape (..., n)."""

    kind = "abstract"
    n = 2

    def forward(self, x):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def jacobian_matrix(self, x):
        raise NotImplementedError

    def jacobian_det(self, x):
        return np.linalg.det(self.jacobian_matrix(x))

    def inverse_jacobian(self, y):
        """Volume derivative J_{phi^-1}(y) = 1 / J_phi(phi^-1(y))."""
        return 1.0 / self.jacobian_det(self.inverse(y))

    def boundary_map(self, s):
        """phi restricted to the unit sphere (s: unit vectors)."""
        return self.forward(s)

    def boundary_volume_derivative(self, t):
        """J^d_{phi^-1}(t) for points t on the image boundary."""
        raise NotImplementedError

    def distortion(self, x, p):
        """|D phi(x)| / J_phi(x)^(1/p) with the operator norm."""
        D = self.jacobian_matrix(x)
        return np.linalg.norm(D, ord=2, axis=(-2, -1)) / self.jacobian_det(x) ** (1.0 / p)

    # planar helpers
    def boundary_point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.boundary_map(np.stack([np.cos(theta), np.sin(theta)], axis=-1))

    def boundary_tangent(self, theta):
        """d/dtheta of the boundary curve theta -> phi(e^{i theta})."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)

    def boundary_speed(self, theta):
        """|d/dtheta phi(e^{i theta})|, the arclength density along the image."""
        return _norm(self.boundary_tangent(theta))

    def spec(self):
        return self.kind


class IdentityMap(TransferMap):
    kind = "identity"

    def __init__(self, n=2):
        self.n = n

    def forward(self, x):
        return np.array(x, dtype=float)

    def inverse(self, y):
        return np.array(y, dtype=float)

    def jacobian_matrix(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.eye(self.n), x.shape + (self.n,)).copy()

    def jacobian_det(self, x):
        return np.ones(np.shape(x)[:-1])

    def boundary_volume_derivative(self, t):
        return np.ones(np.shape(t)[:-1])


class RadialPowerMap(TransferMap):
    """phi(x) = |x|^(sigma - 1) x; maps B onto itself, singular at 0 for sigma < 1."""

    kind = "radial-power"

    def __init__(self, sigma, n=2):
        if not (0.0 < sigma <= 1.0):
            raise ParameterDomainError(f"radial-power needs 0 < sigma <= 1, got {sigma}")
        self.sigma = float(sigma)
        self.n = n

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        r = _norm(x)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** (self.sigma - 1.0) * x, 0.0)
        return out

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        r = _norm(y)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** (1.0 / self.sigma - 1.0) * y, 0.0)
        return out

    def jacobian_matrix(self, x):
        x = np.asarray(x, dtype=float)
        r = _norm(x)
        u = x / r[..., None]
        eye = np.eye(self.n)
        return r[..., None, None] ** (self.sigma - 1.0) * (
            eye + (self.sigma - 1.0) * u[..., :, None] * u[..., None, :])

    def jacobian_det(self, x):
        r = _norm(np.asarray(x, dtype=float))
        return self.sigma * r ** (self.n * (self.sigma - 1.0))

    def boundary_volume_derivative(self, t):
        return np.ones(np.shape(t)[:-1])

    def spec(self):
        return f"radial-power:{self.sigma:g}"


class ConformalQuadraticMap(TransferMap):
    """phi(z) = z + c z^2 on the closed unit disk, univalent for |c| < 1/2."""

    kind = "conformal"
    n = 2

    def __init__(self, c, newton_tol=1e-13, max_newton=30):
        c = float(c)
        if not abs(c) < 0.5:
            raise ParameterDomainError(f"conformal map needs |c| < 1/2, got {c}")
        self.c = c
        self.newton_tol = newton_tol
        self.max_newton = max_newton

    @staticmethod
    def _z(x):
        x = np.asarray(x, dtype=float)
        return x[..., 0] + 1j * x[..., 1]

    @staticmethod
    def _xy(z):
        return np.stack([z.real, z.imag], axis=-1)

    def derivative(self, x):
        """Complex derivative phi'(z) = 1 + 2 c z."""
        return 1.0 + 2.0 * self.c * self._z(x)

    def forward(self, x):
        z = self._z(x)
        return self._xy(z + self.c * z * z)

    def inverse(self, y):
        w = self._z(y)
        if self.c == 0.0:
            return self._xy(w)
        # the root with Re(1 + 2cz) > 0 is the principal-branch one
        z = 2.0 * w / (1.0 + np.sqrt(1.0 + 4.0 * self.c * w))
        res = z + self.c * z * z - w
        for _ in range(self.max_newton):
            if np.all(np.abs(res) <= self.newton_tol * np.maximum(1.0, np.abs(w))):
                break
            step = res / (1.0 + 2.0 * self.c * z)
            t = np.ones(z.shape)
            for _ in range(20):
                z_new = z - t * step
                res_new = z_new + self.c * z_new * z_new - w
                bad = np.abs(res_new) > np.abs(res)
                if not np.any(bad):
                    break
                t = np.where(bad, 0.5 * t, t)
            z, res = z_new, res_new
        return self._xy(z)

    def jacobian_matrix(self, x):
        d = self.derivative(x)
        return np.stack([np.stack([d.real, -d.imag], -1),
                         np.stack([d.imag, d.real], -1)], -2)

    def jacobian_det(self, x):
        return np.abs(self.derivative(x)) ** 2

    def boundary_volume_derivative(self, t):
        return 1.0 / np.abs(self.derivative(self.inverse(t)))

    def boundary_tangent(self, theta):
        e = np.exp(1j * np.asarray(theta, dtype=float))
        return self._xy(1j * e * (1.0 + 2.0 * self.c * e))

    def spec(self):
        return f"conformal:{self.c:g}"


def parse_map(text, n=2):
    """``identity``, ``radial-power:S`` or ``conformal:C``."""
    kind, _, arg = text.strip().partition(":")
    if kind == "identity":
        return IdentityMap(n)
    if kind == "radial-power":
        return RadialPowerMap(float(arg), n)
    if kind == "conformal":
        if n != 2:
            raise DimensionMismatchError("conformal maps are planar")
        return ConformalQuadraticMap(float(arg))
    raise ParameterDomainError(f"unknown map {text!r}")


@dataclass(frozen=True)
class InducedWeights:
    """gamma_a on Omega and beta on the boundary of Omega."""

    map: TransferMap
    weight: ConcentratingWeight

    def gamma(self, y):
        x = self.map.inverse(y)
        return self.weight.mu(x) * self.map.inverse_jacobian(y)

    def beta(self, t):
        s = self.map.inverse(t)
        s = s / _norm(s)[..., None]
        return self.weight.alpha.at(s) * self.map.boundary_volume_derivative(t)

    def beta_at_angle(self, theta):
        """beta(phi(e^{i theta})) in the boundary parameter of the disk."""
        return self.beta(self.map.boundary_point(theta))


def induce_weights(tmap, w):
    if tmap.n != w.n:
        raise DimensionMismatchError(f"map is {tmap.n}-dimensional, weight is {w.n}-dimensional")
    return InducedWeights(tmap, w)


def unweighted_boundary_alpha(tmap):
    """alpha(s) = 1 / J^d_{phi^-1}(phi(s)), which makes the induced beta == 1."""
    if tmap.n != 2:
        return BoundaryWeightSpec("constant", (1.0,), tmap.n)
    if isinstance(tmap, ConformalQuadraticMap):
        c = tmap.c
        return BoundaryWeightSpec("function", (), 2, func=lambda th: np.abs(1.0 + 2.0 * c * np.exp(1j * th)))
    return BoundaryWeightSpec("function", (), 2, func=tmap.boundary_speed)


def pullback_energy_weight(tmap, p):
    """omega_p(x) = |phi'(x)|^(2-p), so that the p-energy of u on Omega equals
    the omega_p-weighted p-energy of u o phi on the disk."""
    if isinstance(tmap, IdentityMap):
        return lambda x: np.ones(np.shape(x)[:-1])
    if isinstance(tmap, ConformalQuadraticMap):
        if p == 2:
            return lambda x: np.ones(np.shape(x)[:-1])
        return lambda x: np.abs(tmap.derivative(x)) ** (2.0 - p)
    raise UnsupportedMapError(f"no energy pullback for {tmap.spec()}")


# -- quadratures on B and Omega ---------------------------------------------

def _ball_rule(w, n_sphere=256, order=10):
    """Points/weights for int_B F mu_a dx in polar form (concentrating radial rule)."""
    r, wr = concentrating_radial_rule(w.a, w.n, order)
    s, ws = unit_sphere_rule(w.n, n_sphere if w.n == 2 else 24)
    x = r[:, None, None] * s[None, :, :]
    weights = wr[:, None] * ws[None, :] * w.alpha.at(s)[None, :]
    return x.reshape(-1, w.n), weights.ravel()


def _omega_rule_planar(tmap, n_theta=256, order=12):
    """int_Omega F dy through y = s * Gamma(t), Gamma the boundary curve."""
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    g = tmap.boundary_point(t)
    dg = tmap.boundary_tangent(t)
    cross = g[:, 0] * dg[:, 1] - g[:, 1] * dg[:, 0]
    s, ws = gauss_on(graded_breaks(44, 0.5, True), order)
    y = s[:, None, None] * g[None, :, :]
    weights = (ws * s)[:, None] * (cross * 2 * np.pi / n_theta)[None, :]
    return y.reshape(-1, 2), weights.ravel()


def _omega_rule_ball(n, order=12):
    """Omega = B for the radial maps: polar rule in the unweighted radius."""
    r, wr = gauss_on(graded_breaks(44, 0.5, True), order)
    s, ws = unit_sphere_rule(n, 256 if n == 2 else 24)
    y = r[:, None, None] * s[None, :, :]
    weights = (wr * r ** (n - 1))[:, None] * ws[None, :]
    return y.reshape(-1, n), weights.ravel()


def omega_integral(tmap, F):
    """int_Omega F(y) dy by quadrature on the image domain."""
    if isinstance(tmap, ConformalQuadraticMap):
        y, wq = _omega_rule_planar(tmap)
    else:
        y, wq = _omega_rule_ball(tmap.n)
    return float(np.dot(wq, F(y)))


def boundary_integral(tmap, F, m=512):
    """int_{d Omega} F(t) dS, parametrized by the boundary curve itself."""
    if tmap.n == 2:
        theta = 2 * np.pi * np.arange(m) / m
        t = tmap.boundary_point(theta)
        return float(np.sum(F(t) * tmap.boundary_speed(theta)) * 2 * np.pi / m)
    s, ws = unit_sphere_rule(tmap.n, 24)
    return float(np.dot(ws, F(tmap.boundary_map(s))))


def change_of_variables_check(tmap, w, f):
    """Gaps |int_Omega f gamma_a - int_B (f o phi) mu_a| and
    |int_{dOmega} f beta dS - int_{dB} (f o phi) alpha dsigma|."""
    iw = induce_weights(tmap, w)
    bulk_omega = omega_integral(tmap, lambda y: f(y) * iw.gamma(y))
    x, wq = _ball_rule(w)
    bulk_ball = float(np.dot(wq, f(tmap.forward(x))))
    bnd_omega = boundary_integral(tmap, lambda t: f(t) * iw.beta(t))
    s, ws = unit_sphere_rule(w.n, 512 if w.n == 2 else 24)
    bnd_ball = float(np.dot(ws, f(tmap.boundary_map(s)) * w.alpha.at(s)))
    return abs(bulk_omega - bulk_ball), abs(bnd_omega - bnd_ball)


def mass_chain(tmap, w):
    """(int_B mu_a, int_Omega gamma_a, int_{dOmega} beta, int_{dB} alpha)."""
    iw = induce_weights(tmap, w)
    x, wq = _ball_rule(w)
    ball = float(np.sum(wq))
    omega = omega_integral(tmap, iw.gamma)
    bnd = boundary_integral(tmap, iw.beta)
    return ball, omega, bnd, w.alpha.total_mass()
