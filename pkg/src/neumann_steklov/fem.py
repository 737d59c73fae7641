"""P1 finite elements on a graded polar mesh of the unit disk.

The mesh is structured in rings: geometric layers toward r = 1 followed by a
uniform core, with the angular count halved inward through transition rings
and a fan at the center.  Bulk weights that live on the exact disk are
evaluated through the radial stretch taking the outer polygon onto the
circle, and boundary integrals are parametrized by angle, so masses are not
lost in the thin slivers between chords and arcs.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import MeshBudgetError, ParameterDomainError
from .maps import IdentityMap, pullback_energy_weight
from .quadrature import TRIANGLE_BARY, TRIANGLE_WEIGHTS, _gauss
from .weights import BoundaryWeightSpec, ConcentratingWeight

VERTEX_BUDGET = 500_000
LAYER_RATIO = 1.3


@dataclass
class DiskMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    radii: np.ndarray = field(repr=False)
    h: float = 0.1
    h_min: float = 0.1
    layer_ratio: float = LAYER_RATIO
    curved: bool = True  # True: stands for the exact disk (stretch + arc boundary)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_boundary(self):
        return self.boundary_edges.shape[0]

    @property
    def boundary_vertices(self):
        return self.boundary_edges[:, 0]

    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def area(self):
        return float(self.signed_areas().sum())

    def mapped(self, tmap):
        """Mesh of the image domain: vertices pushed forward, straight edges."""
        return replace(self, vertices=tmap.forward(self.vertices), curved=False)

    def to_text(self):
        lines = [f"{self.n_vertices} vertices {len(self.triangles)} triangles {self.n_boundary} boundary-edges"]
        lines += [f"{x:.17g} {y:.17g}" for x, y in self.vertices]
        lines += [f"{i} {j} {k}" for i, j, k in self.triangles]
        lines += [f"{i} {j}" for i, j in self.boundary_edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = text.strip().splitlines()
        head = rows[0].split()
        nv, nt, nb = int(head[0]), int(head[2]), int(head[4])
        body = rows[1:]
        verts = np.array([list(map(float, r.split())) for r in body[:nv]])
        tris = np.array([list(map(int, r.split())) for r in body[nv:nv + nt]], dtype=int)
        edges = np.array([list(map(int, r.split())) for r in body[nv + nt:nv + nt + nb]], dtype=int)
        radii = np.unique(np.round(np.linalg.norm(verts, axis=1), 14))[::-1]
        return cls(verts, tris, edges, radii)


def _ring_radii(h, layer):
    radii = [1.0]
    width = layer
    while width < h:
        radii.append(radii[-1] - width)
        width *= LAYER_RATIO
    r = radii[-1]
    steps = max(int(np.floor(r / h)), 0)
    if steps:
        core = np.linspace(r, 0.0, steps + 1)[1:-1]
        radii.extend(core.tolist())
    return np.array([x for x in radii if x > 0.5 * h or x == 1.0])


def build_disk_mesh(h, boundary_layer_width=None):
    """Graded polar mesh with characteristic size ``h`` and outermost radial
    layer of width ``boundary_layer_width``."""
    layer = h if boundary_layer_width is None else boundary_layer_width
    if not (0.0 < h <= 0.2):
        raise ParameterDomainError(f"need 0 < h <= 0.2, got {h}")
    if not (0.0 < layer <= h):
        raise ParameterDomainError(f"need 0 < layer width <= h, got {layer}")
    radii = _ring_radii(h, layer)
    n_out = 8 * 2 ** int(np.ceil(np.log2(2 * np.pi / (8 * h))))
    counts = [n_out]
    for r in radii[1:]:
        n = counts[-1]
        if n // 2 >= 8 and (n // 2) >= 2 * np.pi * r / h:
            n //= 2
        counts.append(n)
    total = sum(counts) + 1
    if total > VERTEX_BUDGET:
        raise MeshBudgetError(f"mesh would need {total} vertices (budget {VERTEX_BUDGET})")

    verts, offsets = [], []
    off = 0
    for r, n in zip(radii, counts):
        th = 2 * np.pi * np.arange(n) / n
        verts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=1))
        offsets.append(off)
        off += n
    verts.append(np.zeros((1, 2)))
    center = off
    verts = np.concatenate(verts)

    tris = []
    for i in range(len(radii) - 1):
        no, ni = counts[i], counts[i + 1]
        o, q = offsets[i], offsets[i + 1]
        j = np.arange(ni)
        if no == ni:
            a, b = o + j, o + (j + 1) % no
            c, d = q + j, q + (j + 1) % ni
            tris += [np.stack([c, a, b], 1), np.stack([c, b, d], 1)]
        else:
            a, b, e = o + 2 * j, o + 2 * j + 1, o + (2 * j + 2) % no
            c, d = q + j, q + (j + 1) % ni
            tris += [np.stack([c, a, b], 1), np.stack([c, b, d], 1), np.stack([d, b, e], 1)]
    n_last, o = counts[-1], offsets[-1]
    j = np.arange(n_last)
    tris.append(np.stack([np.full(n_last, center), o + j, o + (j + 1) % n_last], 1))
    tris = np.concatenate(tris).astype(int)

    mesh = DiskMesh(verts, tris, np.stack([np.arange(n_out), (np.arange(n_out) + 1) % n_out], 1),
                    radii, h, float(layer))
    neg = mesh.signed_areas() < 0
    mesh.triangles[neg] = mesh.triangles[neg][:, [0, 2, 1]]
    return mesh


def layer_width_for(a, n=2, h=0.05, factor=1.0):
    """Outer layer width resolving the concentration scale a/(2n)."""
    return min(h, factor * a / (2 * n))


# -- quadrature points --------------------------------------------------------

def _polygon_stretch(mesh, x):
    """Scale factor s(theta) mapping the outer polygon radially onto the circle."""
    n_out = mesh.n_boundary
    delta = 2 * np.pi / n_out
    th = np.mod(np.arctan2(x[:, 1], x[:, 0]), 2 * np.pi)
    local = np.mod(th, delta)
    return np.cos(local - 0.5 * delta) / np.cos(0.5 * delta)


@dataclass
class WeightedMeasure:
    """Discrete measure: values at quadrature points are E @ u, weights w."""

    E: sp.csr_matrix
    w: np.ndarray

    def total(self):
        return float(self.w.sum())

    def matrix(self):
        return (self.E.T @ sp.diags(self.w) @ self.E).tocsr()

    def values(self, u):
        return self.E @ u

    def integral(self, f_values):
        return float(np.dot(self.w, f_values))

    def lq_norm(self, u, q):
        return float(np.dot(self.w, np.abs(self.E @ u) ** q)) ** (1.0 / q)


def _check_weight(vals, pts, what):
    bad = np.flatnonzero(~(vals >= 0))
    if bad.size:
        i = bad[0]
        raise ValueError(f"{what} weight is {vals[i]:.3g} at point ({pts[i, 0]:.6g}, {pts[i, 1]:.6g})")


def _as_bulk(weight):
    if weight is None:
        return lambda x: np.ones(x.shape[0])
    if isinstance(weight, ConcentratingWeight):
        return weight.mu
    return weight


def _as_boundary(weight):
    if weight is None:
        return lambda x: np.ones(x.shape[0])
    if isinstance(weight, BoundaryWeightSpec):
        return weight.at
    return weight


def bulk_measure(mesh, weight=None):
    """Order-4 triangle quadrature of ``weight`` against P1 functions."""
    f = _as_bulk(weight)
    T = mesh.triangles
    nt, nq = T.shape[0], TRIANGLE_WEIGHTS.size
    pts = np.einsum("qk,tkd->tqd", TRIANGLE_BARY, mesh.vertices[T]).reshape(-1, 2)
    w = (np.abs(mesh.signed_areas())[:, None] * TRIANGLE_WEIGHTS[None, :]).ravel()
    if mesh.curved:
        s = _polygon_stretch(mesh, pts)
        pts = pts * s[:, None]
        w = w * s ** 2
    vals = np.asarray(f(pts), dtype=float)
    _check_weight(vals, pts, "bulk")
    rows = np.repeat(np.arange(nt * nq), 3)
    cols = np.repeat(T, nq, axis=0).ravel()
    data = np.tile(TRIANGLE_BARY, (nt, 1)).ravel()
    E = sp.csr_matrix((data, (rows, cols)), shape=(nt * nq, mesh.n_vertices))
    return WeightedMeasure(E, w * vals)


def boundary_measure(mesh, weight=None, order=4):
    """Gauss rule per boundary edge.  On a curved mesh each edge is the arc
    between its endpoint angles and hat functions are linear in angle; on a
    straight mesh the chord itself carries arclength."""
    f = _as_boundary(weight)
    x, wg = _gauss(order)
    t = 0.5 * (1 + x)
    ed = mesh.boundary_edges
    nb = ed.shape[0]
    p0, p1 = mesh.vertices[ed[:, 0]], mesh.vertices[ed[:, 1]]
    if mesh.curved:
        th0 = np.arctan2(p0[:, 1], p0[:, 0])
        dth = np.mod(np.arctan2(p1[:, 1], p1[:, 0]) - th0, 2 * np.pi)
        th = th0[:, None] + dth[:, None] * t[None, :]
        pts = np.stack([np.cos(th), np.sin(th)], -1).reshape(-1, 2)
        w = (0.5 * dth[:, None] * wg[None, :]).ravel()
    else:
        pts = (p0[:, None, :] * (1 - t)[None, :, None] + p1[:, None, :] * t[None, :, None]).reshape(-1, 2)
        length = np.linalg.norm(p1 - p0, axis=1)
        w = (0.5 * length[:, None] * wg[None, :]).ravel()
    vals = np.asarray(f(pts), dtype=float)
    _check_weight(vals, pts, "boundary")
    rows = np.repeat(np.arange(nb * order), 2)
    cols = np.repeat(ed, order, axis=0).ravel()
    data = np.stack([np.tile(1 - t, nb), np.tile(t, nb)], 1).ravel()
    E = sp.csr_matrix((data, (rows, cols)), shape=(nb * order, mesh.n_vertices))
    return WeightedMeasure(E, w * vals)


@dataclass
class EnergyForm:
    """Piecewise-constant gradients Gx u, Gy u with per-triangle weights
    tri_weight = int_T omega_p."""

    Gx: sp.csr_matrix
    Gy: sp.csr_matrix
    tri_weight: np.ndarray
    triangles: Optional[np.ndarray] = field(default=None, repr=False)
    edge_coeffs: Optional[np.ndarray] = field(default=None, repr=False)

    def gradients(self, u):
        if self.triangles is None:
            return self.Gx @ u, self.Gy @ u
        # difference form: exactly zero on constants, which matters for p < 2
        T, c = self.triangles, self.edge_coeffs
        d1, d2 = u[T[:, 1]] - u[T[:, 0]], u[T[:, 2]] - u[T[:, 0]]
        return c[:, 0] * d1 + c[:, 1] * d2, c[:, 2] * d1 + c[:, 3] * d2

    def value(self, u, p):
        gx, gy = self.gradients(u)
        return float(np.dot(self.tri_weight, (gx * gx + gy * gy) ** (0.5 * p)))

    def value_and_gradient(self, u, p):
        gx, gy = self.gradients(u)
        mag2 = gx * gx + gy * gy
        val = float(np.dot(self.tri_weight, mag2 ** (0.5 * p)))
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(mag2 > 0, mag2 ** (0.5 * p - 1.0), 0.0)
        c = p * self.tri_weight * scale
        grad = self.Gx.T @ (c * gx) + self.Gy.T @ (c * gy)
        return val, grad

    def stiffness(self):
        W = sp.diags(self.tri_weight)
        return (self.Gx.T @ W @ self.Gx + self.Gy.T @ W @ self.Gy).tocsr()


def energy_form(mesh, omega=None):
    T = mesh.triangles
    P = mesh.vertices[T]
    area2 = 2.0 * mesh.signed_areas()
    # gradient of the barycentric coordinate of vertex k: rot90(opposite edge) / 2A
    ex = np.stack([P[:, 1, 1] - P[:, 2, 1], P[:, 2, 1] - P[:, 0, 1], P[:, 0, 1] - P[:, 1, 1]], 1) / area2[:, None]
    ey = np.stack([P[:, 2, 0] - P[:, 1, 0], P[:, 0, 0] - P[:, 2, 0], P[:, 1, 0] - P[:, 0, 0]], 1) / area2[:, None]
    nt = T.shape[0]
    rows = np.repeat(np.arange(nt), 3)
    Gx = sp.csr_matrix((ex.ravel(), (rows, T.ravel())), shape=(nt, mesh.n_vertices))
    Gy = sp.csr_matrix((ey.ravel(), (rows, T.ravel())), shape=(nt, mesh.n_vertices))
    area = 0.5 * np.abs(area2)
    if omega is None:
        tw = area
    else:
        pts = np.einsum("qk,tkd->tqd", TRIANGLE_BARY, P).reshape(-1, 2)
        vals = np.asarray(omega(pts), dtype=float).reshape(nt, -1)
        tw = area * (vals @ TRIANGLE_WEIGHTS)
    coeffs = np.stack([ex[:, 1], ex[:, 2], ey[:, 1], ey[:, 2]], 1)
    return EnergyForm(Gx, Gy, tw, T, coeffs)


@dataclass
class AssembledForms:
    mesh: DiskMesh
    energy: EnergyForm
    bulk: WeightedMeasure
    boundary: WeightedMeasure
    p: float = 2.0
    K: Optional[sp.csr_matrix] = None
    M: Optional[sp.csr_matrix] = None
    B: Optional[sp.csr_matrix] = None

    def __post_init__(self):
        self.K = self.energy.stiffness()
        self.M = self.bulk.matrix()
        self.B = self.boundary.matrix()

    def measure(self, which):
        return self.bulk if which == "neumann" else self.boundary

    def mass(self, which):
        return self.M if which == "neumann" else self.B


def assemble(mesh, bulk_weight=None, boundary_weight=None, tmap=None, p=2.0):
    """Stiffness (with the energy pullback weight for conformal maps), bulk and
    boundary weighted mass matrices on ``mesh``."""
    omega = None
    if tmap is not None and not isinstance(tmap, IdentityMap):
        omega = pullback_energy_weight(tmap, p)
    return AssembledForms(mesh, energy_form(mesh, omega), bulk_measure(mesh, bulk_weight),
                          boundary_measure(mesh, boundary_weight), p)


def p_energy(mesh_or_form, u, p, tmap=None):
    """(int |grad u|^p omega_p, gradient wrt the vertex coefficients)."""
    if p <= 1:
        raise ParameterDomainError("p must exceed 1")
    form = mesh_or_form
    if isinstance(mesh_or_form, DiskMesh):
        omega = None if tmap is None or isinstance(tmap, IdentityMap) else pullback_energy_weight(tmap, p)
        form = energy_form(mesh_or_form, omega)
    return form.value_and_gradient(np.asarray(u, dtype=float), p)


def problem_weights(tmap, w):
    """Bulk weight, boundary weight and map to hand to :func:`assemble` when
    solving the problem on the image of ``tmap`` by working on the disk.

    Identity and conformal maps pull back (mu_a, alpha) with the energy weight;
    the radial-power map keeps Omega = B and uses (gamma_a, alpha) directly.
    """
    from .maps import ConformalQuadraticMap, RadialPowerMap, induce_weights
    if tmap is None or isinstance(tmap, (IdentityMap, ConformalQuadraticMap)):
        return w.mu, w.alpha.at, tmap
    if isinstance(tmap, RadialPowerMap):
        ind = induce_weights(tmap, w)
        return ind.gamma, w.alpha.at, None
    raise ParameterDomainError(f"unsupported map {tmap!r}")
