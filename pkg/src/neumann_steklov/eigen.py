"""First nontrivial Neumann and Steklov eigenpairs on assembled forms.

Linear path (p = q = 2): generalized symmetric eigensolves, with a boundary
Schur complement for Steklov.  Nonlinear path: minimization of the quotient
int |grad u|^p / inf_c ||u - c||_q^p, where the infimum is realized by the
q-center and the gradient follows from the envelope theorem.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .errors import ParameterDomainError, SolverError

DEGENERACY_GAP = 1e-6
STALL_TOL = 1e-10
STALL_STEPS = 5
MAX_ITER = 100_000
PRECOND_REFRESH = 5
CONSTANT_SPREAD = 1e-12
PRECOND_FLOOR = 1e-3


def phi_q(t, q):
    """|t|^(q-2) t."""
    return np.sign(t) * np.abs(t) ** (q - 1.0)


def q_center(values, weights, q, tol=1e-12):
    """Root c of sum w |v - c|^(q-2) (v - c) = 0, bracketed by [min v, max v].

    The map c -> sum w phi_q(v - c) is strictly decreasing, so the bracketed
    root is unique; Brent's method keeps the bisection guarantee while needing
    far fewer sweeps over the samples.
    """
    if q <= 1:
        raise ParameterDomainError("q-center needs q > 1")
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi - lo == 0:
        return lo
    if q == 2:
        return float(np.dot(weights, values) / weights.sum())
    f = lambda c: float(np.dot(weights, phi_q(values - c, q)))
    flo, fhi = f(lo), f(hi)
    if flo <= 0:
        return lo
    if fhi >= 0:
        return hi
    return float(brentq(f, lo, hi, xtol=tol * max(1.0, hi - lo), rtol=4 * np.finfo(float).eps))


def centered_norm(measure, u, q):
    """(||u - c*||_q, c*) for a discrete measure."""
    v = measure.values(u)
    c = q_center(v, measure.w, q)
    return float(np.dot(measure.w, np.abs(v - c) ** q)) ** (1.0 / q), c


def _check_nonconstant(v):
    # samples of a constant field differ only by roundoff in the interpolation
    if not np.ptp(v) > CONSTANT_SPREAD * np.max(np.abs(v)):
        raise ParameterDomainError("quotient undefined for a constant field")


def quotient(forms, u, p, q, which="neumann"):
    """int |grad u|^p omega / ||u - c*(u)||_q^p."""
    u = np.asarray(u, dtype=float)
    meas = forms.measure(which)
    _check_nonconstant(meas.values(u))
    N, _ = centered_norm(meas, u, q)
    return forms.energy.value(u, p) / N ** p


def quotient_and_gradient(forms, u, p, q, which="neumann"):
    meas = forms.measure(which)
    v = meas.values(u)
    _check_nonconstant(v)
    c = q_center(v, meas.w, q)
    r = v - c
    N = float(np.dot(meas.w, np.abs(r) ** q)) ** (1.0 / q)
    E, dE = forms.energy.value_and_gradient(u, p)
    dN = meas.E.T @ (meas.w * phi_q(r, q))  # = N^(q-1) dN/du
    Q = E / N ** p
    grad = dE / N ** p - E * p * N ** (-p - q) * dN
    return Q, grad


@dataclass
class EigenResult:
    lam: float
    minimizer: np.ndarray
    kind: str
    p: float = 2.0
    q: float = 2.0
    sharp_constant: float = 0.0
    weak_residual: float = 0.0
    iterations: int = 0
    normalization: float = 1.0
    degenerate_pair: Optional[np.ndarray] = None
    history: list = field(default_factory=list, repr=False)
    spectrum: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise SolverError(f"nonpositive eigenvalue {self.lam}")
        self.sharp_constant = self.lam ** (-1.0 / self.p)

    def eigenspace(self):
        if self.degenerate_pair is None:
            return self.minimizer[:, None]
        return np.stack([self.minimizer, self.degenerate_pair], 1)


def _normalize(measure, u, q=2.0):
    N, c = centered_norm(measure, u, q)
    return (u - c) / N


def _sign_align(u, measure):
    """Deterministic sign: make the largest-magnitude sample positive."""
    v = measure.values(u)
    return -u if v[np.argmax(np.abs(v))] < 0 else u


def _neumann_linear(forms, n_eigs=6):
    K, M = forms.K, forms.M
    nv = K.shape[0]
    v0 = np.cos(np.arange(nv) * 0.7) + 1.0
    vals, vecs = spla.eigsh(K, k=min(n_eigs, nv - 2), M=M, sigma=-1.0, which="LM", v0=v0, tol=1e-13)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def _steklov_linear(forms, block=128):
    K, Bm = forms.K.tocsr(), forms.B.tocsr()
    bnd = np.unique(forms.mesh.boundary_edges.ravel())
    mask = np.ones(K.shape[0], dtype=bool)
    mask[bnd] = False
    inner = np.flatnonzero(mask)
    Kii = K[inner][:, inner].tocsc()
    Kib = K[inner][:, bnd].toarray()
    Kbb = K[bnd][:, bnd].toarray()
    lu = spla.splu(Kii)
    X = np.empty_like(Kib)
    for s in range(0, Kib.shape[1], block):
        X[:, s:s + block] = lu.solve(Kib[:, s:s + block])
    S = Kbb - Kib.T @ X
    S = 0.5 * (S + S.T)
    Bbb = Bm[bnd][:, bnd].toarray()
    vals, vb = sla.eigh(S, Bbb)
    full = np.zeros((K.shape[0], vb.shape[1]))
    full[bnd] = vb
    full[inner] = -X @ vb
    return vals, full


def solve_linear(forms, which="neumann"):
    """Smallest nonzero eigenvalue of K u = lam M u (neumann) or of the
    discrete Dirichlet-to-Neumann problem (steklov)."""
    if which not in ("neumann", "steklov"):
        raise ParameterDomainError(f"unknown problem {which!r}")
    meas = forms.measure(which)
    if meas.total() <= 0:
        raise ParameterDomainError("weight has zero mass")
    vals, vecs = _neumann_linear(forms) if which == "neumann" else _steklov_linear(forms)
    # drop the constant mode: eigenvalue ~ 0 relative to the rest
    scale = max(abs(vals[-1]), 1.0)
    keep = np.flatnonzero(vals > 1e-9 * scale)
    if keep.size == 0:
        raise SolverError("no nonzero eigenvalue found")
    i0 = keep[0]
    lam = float(vals[i0])
    u = _sign_align(_normalize(meas, vecs[:, i0]), meas)
    pair = None
    if i0 + 1 < len(vals) and vals[i0 + 1] - lam < DEGENERACY_GAP * lam:
        w2 = vecs[:, i0 + 1]
        Mm = forms.mass(which)
        w2 = w2 - (u @ (Mm @ w2)) * u  # M-orthogonal complement within the pair
        pair = _normalize(meas, w2)
    res = EigenResult(lam, u, which, 2.0, 2.0, degenerate_pair=pair, spectrum=vals[keep])
    res.weak_residual = weak_residual(res, forms)
    return res


def _smooth_seed(mesh, rng, degree=3):
    x, y = mesh.vertices[:, 0], mesh.vertices[:, 1]
    out = np.zeros(mesh.n_vertices)
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            if i + j:
                out += rng.standard_normal() * x ** i * y ** j
    return out


def default_seeds(mesh, seed=0):
    rng = np.random.default_rng(seed)
    x, y = mesh.vertices[:, 0], mesh.vertices[:, 1]
    return [x.copy(), y.copy(), _smooth_seed(mesh, rng), _smooth_seed(mesh, rng)]


@dataclass
class MinimizeOptions:
    tol: float = STALL_TOL
    max_iter: int = MAX_ITER
    restarts: int = 4
    seed: int = 0
    armijo: float = 1e-4


def _lagged_preconditioner(forms, u, p, which, floor=PRECOND_FLOOR):
    """LU of G^T diag(omega |grad u|^(p-2)) G + mass: the p-Laplacian frozen at
    u, with |grad u| floored at ``floor`` times its rms so p != 2 stays definite."""
    en = forms.energy
    gx, gy = en.gradients(u)
    mag = np.sqrt(gx * gx + gy * gy)
    rms = np.sqrt(np.dot(en.tri_weight, mag * mag) / en.tri_weight.sum())
    c = sp.diags(en.tri_weight * np.maximum(mag, floor * rms) ** (p - 2.0))
    A = en.Gx.T @ c @ en.Gx + en.Gy.T @ c @ en.Gy + forms.mass(which)
    return spla.splu(A.tocsc())


def _descend(forms, u, p, q, which, opts):
    """Preconditioned descent with Armijo backtracking.  The preconditioner is
    the lagged p-Laplacian, refreshed every few steps; the unit step is refined
    once by a parabola through Q(0), Q'(0) and Q(1), and u is recentered and
    renormalized after every accepted step."""
    meas = forms.measure(which)
    u = _normalize(meas, u, q)
    Q, g = quotient_and_gradient(forms, u, p, q, which)
    history = [Q]

    def value(t):
        try:
            return quotient(forms, u + t * d, p, q, which)
        except ParameterDomainError:
            return np.inf

    P_lu = None
    for it in range(1, opts.max_iter + 1):
        if P_lu is None or it % PRECOND_REFRESH == 0:
            P_lu = _lagged_preconditioner(forms, u, p, which)
        d = -P_lu.solve(g) / p
        slope = float(np.dot(g, d))
        if not slope < 0:
            return u, Q, it, history
        t, Qt = 1.0, value(1.0)
        curv = Qt - Q - slope
        if np.isfinite(Qt) and curv > 0:
            t2 = min(max(-0.5 * slope / curv, 1e-3), 8.0)
            Q2 = value(t2)
            if Q2 < Qt:
                t, Qt = t2, Q2
        while Qt > Q + opts.armijo * t * slope and t >= 1e-12:
            t *= 0.5
            Qt = value(t)
        if not Qt < Q:  # no decrease at machine precision
            return u, Q, it, history
        u = _normalize(meas, u + t * d, q)
        Q, g = quotient_and_gradient(forms, u, p, q, which)
        history.append(Q)
        # stop once the cumulative relative decrease over the last steps stalls
        if len(history) > STALL_STEPS and history[-1 - STALL_STEPS] - Q < opts.tol * Q:
            return u, Q, it, history
    raise SolverError(f"no convergence in {opts.max_iter} iterations")


def minimize_quotient(forms, p, q, which="neumann", init=None, options=None):
    """Descent on the quotient from ``init`` (or the default four seeds);
    returns the best stationary point."""
    opts = options or MinimizeOptions()
    if p <= 1 or q <= 1:
        raise ParameterDomainError("need p > 1 and q > 1")
    seeds = [np.asarray(init, dtype=float)] if init is not None else default_seeds(forms.mesh, opts.seed)[:opts.restarts]
    best, failures = None, []
    for s in seeds:
        try:
            u, Q, its, hist = _descend(forms, s, p, q, which, opts)
        except (SolverError, ParameterDomainError) as exc:
            failures.append(str(exc))
            continue
        if best is None or Q < best[1]:
            best = (u, Q, its, hist)
    if best is None:
        raise SolverError("all restarts failed: " + "; ".join(failures))
    u, Q, its, hist = best
    meas = forms.measure(which)
    u = _sign_align(u, meas)
    res = EigenResult(Q, u, which, p, q, iterations=its, history=hist)
    res.weak_residual = weak_residual(res, forms)
    return res


def probe_fields(mesh, count=32, seed=12345):
    rng = np.random.default_rng(seed)
    return [_smooth_seed(mesh, rng) + rng.standard_normal() for _ in range(count)]


def discrete_w1p_norm(forms, v, p):
    """(int |grad v|^p + int |v|^p)^(1/p), the bulk term by vertex-averaged
    values on each triangle."""
    m = forms.mesh
    area = np.abs(m.signed_areas())
    lp = float(np.dot(area, np.abs(v[m.triangles]).mean(axis=1) ** p))
    return (forms.energy.value(v, p) + lp) ** (1.0 / p)


def weak_residual(result, forms, fields=None):
    """max_v |<|grad u|^(p-2) grad u, grad v> - lam ||u||^(p-q) <phi_q(u), v>| / ||v||_{W^{1,p}}."""
    p, q = result.p, result.q
    meas = forms.measure(result.kind)
    u = result.minimizer
    _, dE = forms.energy.value_and_gradient(u, p)
    r = meas.values(u)
    N = float(np.dot(meas.w, np.abs(r) ** q)) ** (1.0 / q)
    rhs = meas.E.T @ (meas.w * phi_q(r, q))
    lhs = dE / p
    scale = result.lam * N ** (p - q)
    fields = probe_fields(forms.mesh) if fields is None else fields
    worst = 0.0
    for v in fields:
        num = abs(float(np.dot(lhs, v)) - scale * float(np.dot(rhs, v)))
        worst = max(worst, num / discrete_w1p_norm(forms, v, p))
    return worst
