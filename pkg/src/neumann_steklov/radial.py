"""Mode-by-mode radial eigenvalue oracle for p = q = 2 and constant alpha.

Separating variables reduces the Neumann problem with weight mu_a to

    minimize  int (f'^2 + kappa f^2 / r^2) r^(n-1) dr / int f^2 rho_a r^(n-1) dr,

kappa = k^2 (n = 2) or l(l+1) (n = 3), f(0) = 0.  It is solved with P1
elements on a grid graded toward r = 1 and cross-checked by shooting.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ParameterDomainError
from .quadrature import _gauss
from .weights import ConcentratingWeight, constant_alpha


def kappa(n, k):
    if n == 2:
        return float(k * k)
    if n == 3:
        return float(k * (k + 1))
    raise ParameterDomainError(f"dimension must be 2 or 3, got {n}")


def radial_grid(a, n, h_min=None, h_max=0.004, ratio=1.1):
    """Nodes 0 = r_0 < ... < r_N = 1; widths grow geometrically from ``h_min``
    at r = 1 up to ``h_max``.  The default h_min is a quarter of
    min(a/(2n), h_max)."""
    limit = a / (2 * n)
    h_min = 0.25 * min(limit, h_max) if h_min is None else h_min
    if h_min > limit + 1e-15:
        raise ParameterDomainError(f"grid too coarse: h_min={h_min} > a/(2n)={limit}")
    widths, total, w = [], 0.0, h_min
    while total < 1.0:
        widths.append(w)
        total += w
        w = min(w * ratio, h_max)
    nodes = 1.0 - np.concatenate(([0.0], np.cumsum(widths)))
    nodes[-1] = 0.0
    if nodes[-2] < 0.25 * widths[-2]:  # avoid a sliver cell at the origin
        nodes = np.delete(nodes, -2)
    return nodes[::-1].copy()


def bisect_grid(grid):
    mid = 0.5 * (grid[:-1] + grid[1:])
    out = np.empty(2 * grid.size - 1)
    out[0::2], out[1::2] = grid, mid
    return out


@dataclass
class RadialMode:
    n: int
    k: int
    grid: np.ndarray
    profile: np.ndarray
    lam: float


def _assemble(n, k, grid, rho=None, order=10):
    """Stiffness and (optional) weighted mass on the interior+right nodes."""
    x, wg = _gauss(order)
    lo, hi = grid[:-1], grid[1:]
    hlen = hi - lo
    r = lo[:, None] + 0.5 * hlen[:, None] * (1 + x[None, :])
    wq = 0.5 * hlen[:, None] * wg[None, :]
    phi_r = (r - lo[:, None]) / hlen[:, None]
    phi_l = 1.0 - phi_r
    dphi = np.stack([-1.0 / hlen, 1.0 / hlen], 1)
    kap = kappa(n, k)
    meas = wq * r ** (n - 1)
    N = grid.size
    K = np.zeros((N, N))
    M = np.zeros((N, N))
    phis = (phi_l, phi_r)
    dens = None if rho is None else rho(r)
    for i in range(2):
        for j in range(2):
            kij = dphi[:, i] * dphi[:, j] * meas.sum(1) + kap * np.sum(meas * phis[i] * phis[j] / r ** 2, 1)
            np.add.at(K, (np.arange(N - 1) + i, np.arange(N - 1) + j), kij)
            if dens is not None:
                mij = np.sum(meas * dens * phis[i] * phis[j], 1)
                np.add.at(M, (np.arange(N - 1) + i, np.arange(N - 1) + j), mij)
    return K[1:, 1:], M[1:, 1:]


def _rho_func(w):
    b = w.n / w.a
    return lambda r: b * r ** (b - w.n)


def _fe_eigen(n, k, w, grid):
    K, M = _assemble(n, k, grid, _rho_func(w))
    # K is SPD (f(0) = 0); the largest 1/lam of M f = (1/lam) K f is the answer
    vals, vecs = sla.eigh(M, K, subset_by_index=[K.shape[0] - 1, K.shape[0] - 1])
    f = np.concatenate(([0.0], vecs[:, 0]))
    return 1.0 / vals[0], f


def mode_neumann(n, k, w, grid=None, extrapolate=True, return_mode=False):
    """Smallest Neumann eigenvalue in angular mode k for the radial weight mu_a."""
    if k < 1:
        raise ParameterDomainError("mode index must be >= 1")
    if not w.alpha.is_radial:
        raise ParameterDomainError("radial oracle needs a constant boundary weight")
    grid = radial_grid(w.a, n) if grid is None else np.asarray(grid, dtype=float)
    if np.diff(grid)[-1] > w.a / (2 * n) + 1e-15:
        raise ParameterDomainError("grid too coarse for the boundary layer")
    lam1, f1 = _fe_eigen(n, k, w, grid)
    lam = lam1
    if extrapolate:
        lam2, f2 = _fe_eigen(n, k, w, bisect_grid(grid))
        lam = (4.0 * lam2 - lam1) / 3.0
    if return_mode:
        return lam, RadialMode(n, k, grid, f1, lam1)
    return lam


def richardson_delta(n, k, w, grid=None):
    """|extrapolated - fine-grid value|: the oracle's own discretization delta."""
    grid = radial_grid(w.a, n) if grid is None else grid
    lam1, _ = _fe_eigen(n, k, w, grid)
    lam2, _ = _fe_eigen(n, k, w, bisect_grid(grid))
    return abs((4.0 * lam2 - lam1) / 3.0 - lam2)


def mode_steklov(n, k, nodes=2000):
    """(exact continuum value, value of the 1D discretization).  The minimizer
    of the energy with f(1) = 1 is r^k and the quotient equals k (n = 2) or l
    (n = 3)."""
    if k < 1:
        raise ParameterDomainError("mode index must be >= 1")
    kappa(n, k)
    grid = np.linspace(0.0, 1.0, nodes)
    K, _ = _assemble(n, k, grid)
    e = np.zeros(K.shape[0])
    e[-1] = 1.0
    x = sla.solve(K, e, assume_a="pos")
    return float(k), 1.0 / float(x[-1])


def shooting_eigenvalue(n, k, w, r0=1e-3, lam_max=200.0, rtol=1e-13):
    """First root lam of r^(n-1) f'(1) = 0 for the mode ODE
    -(r^(n-1) f')' + kappa r^(n-3) f = lam rho_a r^(n-1) f, started from the
    regular series f = r^nu (1 + c r^m)."""
    kap = kappa(n, k)
    nu = float(k)
    b = n / w.a
    m = b - n + 2

    def flux_at_one(lam):
        c = -lam * b / (m * (2 * nu + m + n - 2))
        f0 = r0 ** nu * (1 + c * r0 ** m)
        df0 = nu * r0 ** (nu - 1) + c * (nu + m) * r0 ** (nu + m - 1)

        def rhs(r, y):
            f, P = y
            return [P / r ** (n - 1), kap * r ** (n - 3) * f - lam * b * r ** (b - 1) * f]

        sol = solve_ivp(rhs, (r0, 1.0), [f0, r0 ** (n - 1) * df0], method="DOP853",
                        rtol=rtol, atol=1e-300)
        return sol.y[1, -1] / max(abs(sol.y[0, -1]), 1e-300)

    lam_lo, g_lo = 1e-3, flux_at_one(1e-3)
    lam = lam_lo
    while lam < lam_max:
        lam_hi = lam * 1.1
        g_hi = flux_at_one(lam_hi)
        if np.sign(g_hi) != np.sign(g_lo):
            return brentq(flux_at_one, lam, lam_hi, xtol=1e-14, rtol=1e-14)
        lam, g_lo = lam_hi, g_hi
    raise ParameterDomainError("no eigenvalue found below lam_max")


def mode_minimizer_distance(n, k, w, grid=None):
    """H^1(r^(n-1) dr) distance (with the kappa/r^2 term) between the mode-k
    Neumann minimizer normalized by int f^2 rho_a r^(n-1) = 1 and r^k
    normalized by its boundary value, sign aligned so that f(1) > 0."""
    _, mode = mode_neumann(n, k, w, grid, extrapolate=False, return_mode=True)
    grid, f = mode.grid, mode.profile
    x, wg = _gauss(10)
    lo, hi = grid[:-1], grid[1:]
    hlen = hi - lo
    r = lo[:, None] + 0.5 * hlen[:, None] * (1 + x[None, :])
    wq = 0.5 * hlen[:, None] * wg[None, :] * r ** (n - 1)
    t = (r - lo[:, None]) / hlen[:, None]
    fv = f[:-1, None] * (1 - t) + f[1:, None] * t
    df = ((f[1:] - f[:-1]) / hlen)[:, None]
    rho = _rho_func(w)(r)
    norm = np.sqrt(np.sum(wq * rho * fv ** 2))
    if f[-1] < 0:
        norm = -norm
    fv, df = fv / norm, df / norm
    g, dg = r ** k, k * r ** (k - 1)
    kap = kappa(n, k)
    e, de = fv - g, df - dg
    return float(np.sqrt(np.sum(wq * (de ** 2 + kap * e ** 2 / r ** 2 + e ** 2))))


def oracle_sweep(n, a_values, k=1):
    """Mode-k Neumann values over a grid of a (alpha = 1)."""
    alpha = constant_alpha(1.0, n)
    return np.array([mode_neumann(n, k, ConcentratingWeight(alpha, float(a), n)) for a in a_values])
