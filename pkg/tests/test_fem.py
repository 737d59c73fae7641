import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from neumann_steklov.errors import MeshBudgetError, ParameterDomainError
from neumann_steklov.fem import (DiskMesh, assemble, boundary_measure, build_disk_mesh, bulk_measure,
                                 energy_form, layer_width_for, p_energy)
from neumann_steklov.maps import ConformalQuadraticMap
from neumann_steklov.weights import ConcentratingWeight, constant_alpha, mu_total_mass, parse_alpha


@pytest.fixture(scope="module")
def mesh05():
    return build_disk_mesh(0.05)


def boundary_cycle_ok(mesh):
    e = mesh.boundary_edges
    if not np.array_equal(e[:-1, 1], e[1:, 0]) or e[-1, 1] != e[0, 0]:
        return False
    th = np.arctan2(mesh.vertices[e[:, 0], 1], mesh.vertices[e[:, 0], 0])
    return np.allclose(np.linalg.norm(mesh.vertices[e[:, 0]], axis=1), 1.0) and \
        abs(np.sum(np.mod(np.diff(np.append(th, th[0])), 2 * np.pi)) - 2 * np.pi) < 1e-9


@pytest.mark.parametrize("h,layer", [(0.2, None), (0.1, 0.1), (0.05, 0.005), (0.03, 0.002)])
def test_mesh_invariants(h, layer):
    m = build_disk_mesh(h, layer)
    assert np.all(m.signed_areas() > 0)
    assert boundary_cycle_ok(m)
    used = np.zeros(m.n_vertices, bool)
    used[m.triangles.ravel()] = True
    assert used.all()
    # every interior edge is shared by exactly two triangles, boundary edges by one
    edges = np.sort(np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]]), 1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    assert set(counts) <= {1, 2} and np.sum(counts == 1) == m.n_boundary


def test_area_deficit_example():
    m = build_disk_mesh(0.1, 0.1)
    assert 0 < np.pi - m.area() < 0.05


def test_area_deficit_refinement_ratio():
    d1 = np.pi - build_disk_mesh(0.1).area()
    d2 = np.pi - build_disk_mesh(0.05).area()
    assert 3 <= d1 / d2 <= 5


def test_boundary_layer_grading():
    m = build_disk_mesh(0.05, 0.005)
    widths = -np.diff(np.sort(m.radii)[::-1])
    assert np.sum(widths < 0.02) >= 3
    assert widths.min() <= 0.005 + 1e-15


def test_mesh_preconditions():
    with pytest.raises(ParameterDomainError):
        build_disk_mesh(0.3)
    with pytest.raises(ParameterDomainError):
        build_disk_mesh(0.0)
    with pytest.raises(ParameterDomainError):
        build_disk_mesh(0.05, 0.1)
    with pytest.raises(MeshBudgetError):
        build_disk_mesh(0.001)


def test_layer_width_rule():
    assert layer_width_for(0.2, 2, 0.05) == pytest.approx(0.05)
    assert layer_width_for(0.05, 2, 0.05) == pytest.approx(0.0125)


def test_mesh_text_round_trip(tmp_path):
    m = build_disk_mesh(0.1, 0.02)
    text = m.to_text()
    head = text.splitlines()[0].split()
    assert head[1] == "vertices" and head[3] == "triangles" and head[5] == "boundary-edges"
    path = tmp_path / "mesh.txt"
    path.write_text(text)
    back = DiskMesh.from_text(path.read_text())
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.triangles, m.triangles)
    assert np.array_equal(back.boundary_edges, m.boundary_edges)


def test_stiffness_kernel_and_symmetry(mesh05):
    f = assemble(mesh05, ConcentratingWeight(constant_alpha(), 0.3, 2), parse_alpha("fourier:1,0.5,0"))
    one = np.ones(mesh05.n_vertices)
    assert np.max(np.abs(f.K @ one)) <= 1e-12
    for A in (f.K, f.M, f.B):
        assert abs(A - A.T).max() <= 1e-14
    rng = np.random.default_rng(0)
    for _ in range(5):
        v = rng.standard_normal(mesh05.n_vertices)
        assert v @ (f.K @ v) >= 0 and v @ (f.M @ v) > 0 and v @ (f.B @ v) >= 0


def test_unit_weight_masses(mesh05):
    f = assemble(mesh05)
    assert f.M.sum() == pytest.approx(np.pi, rel=0.01)
    assert abs(f.B.sum() - 2 * np.pi) <= 1e-12


def test_concentrating_mass_example():
    w = ConcentratingWeight(constant_alpha(), 0.2, 2)
    m = build_disk_mesh(0.05, 0.01)
    total = bulk_measure(m, w).total()
    assert abs(total - mu_total_mass(w)) <= 0.005 * mu_total_mass(w)


def test_concentrating_mass_refines():
    w = ConcentratingWeight(parse_alpha("fourier:1,0.3,0.2"), 0.1, 2)
    errs = []
    for h in (0.1, 0.05, 0.025):
        m = build_disk_mesh(h, layer_width_for(w.a, 2, h))
        errs.append(abs(bulk_measure(m, w).total() - mu_total_mass(w)))
    assert errs[2] < errs[1] < errs[0] or max(errs) < 1e-10


def test_boundary_measure_matches_weight_mass(mesh05):
    alpha = parse_alpha("fourier:1,0.3,-0.4")
    assert boundary_measure(mesh05, alpha).total() == pytest.approx(alpha.total_mass(), rel=1e-10)


def test_negative_weight_names_point(mesh05):
    with pytest.raises(ValueError, match="point"):
        bulk_measure(mesh05, lambda x: x[:, 0])
    with pytest.raises(ValueError, match="point"):
        boundary_measure(mesh05, lambda x: x[:, 1])


def test_p_energy_examples(mesh05):
    x = mesh05.vertices[:, 0]
    val, _ = p_energy(mesh05, x, 2.0)
    assert val == pytest.approx(np.pi, rel=0.01)
    val, grad = p_energy(mesh05, np.full(mesh05.n_vertices, 3.0), 1.5)
    assert val <= 1e-18 and np.max(np.abs(grad)) <= 1e-12
    with pytest.raises(ParameterDomainError):
        p_energy(mesh05, x, 1.0)


def test_galerkin_consistency(mesh05):
    f = assemble(mesh05)
    u = np.random.default_rng(3).standard_normal(mesh05.n_vertices)
    assert p_energy(f.energy, u, 2.0)[0] == pytest.approx(u @ (f.K @ u), rel=1e-10)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_p_energy_gradient_finite_differences(p):
    m = build_disk_mesh(0.2)
    form = energy_form(m)
    rng = np.random.default_rng(7)
    u = rng.standard_normal(m.n_vertices)
    _, g = p_energy(form, u, p)
    eps = 1e-6
    fd = np.empty(20)
    idx = rng.choice(m.n_vertices, 20, replace=False)
    for j, i in enumerate(idx):
        e = np.zeros(m.n_vertices)
        e[i] = eps
        fd[j] = (form.value(u + e, p) - form.value(u - e, p)) / (2 * eps)
    assert np.max(np.abs(fd - g[idx])) <= 1e-5 * np.max(np.abs(g[idx]))


def test_mapped_mesh_consistency(mesh05):
    tmap = ConformalQuadraticMap(0.3)
    f_disk = assemble(mesh05, tmap=tmap, p=2.0)
    f_image = assemble(mesh05.mapped(tmap))
    y = mesh05.mapped(tmap).vertices
    for u in (y[:, 0], y[:, 0] * y[:, 1], np.exp(y[:, 1])):
        a, b = u @ (f_disk.K @ u), u @ (f_image.K @ u)
        assert abs(a - b) <= 0.01 * b


@given(st.integers(0, 1000), st.floats(0.1, 10.0))
def test_mass_positive_on_random_vectors(seed, scale):
    m = build_disk_mesh(0.2)
    M = assemble(m, lambda x: 1 + x[:, 0] ** 2).M
    v = scale * np.random.default_rng(seed).standard_normal(m.n_vertices)
    assert v @ (M @ v) > 0
