import numpy as np
import pytest

from matfp.errors import MeshDegenerate, NewtonDivergence, RegimeError
from matfp.fem import Assembler, LoadProgram, NewtonSettings, dump_fields, reaction_sign_convention, solve, \
    solve_dirichlet
from matfp.mesh import Mesh, PlateGeometry, build_mesh, check_jacobians, square_mesh
from matfp.models import MaterialModel, Regime, piola_stress

C = Regime.COMPRESSIBLE
NH = MaterialModel("NeoHooke", (1.0, 1.0), regime=C)

# one compressible model per family
FAMILY_MODELS = [
    MaterialModel("BlatzKo", (2.0, 1.0), regime=C),
    MaterialModel("Demiray", (1.0, 1.0), (3.0,), C),
    MaterialModel("Gent", (1.0, 1.0), (0.5,), C),
    MaterialModel("Holzapfel", (1.0, 1.0), (2.0,), C),
    MaterialModel("MooneyRivlin", (3.0, 1.0, 0.5), regime=C),
    MaterialModel("NeoHooke", (1.0, 1.0), regime=C),
    MaterialModel("Ogden", (1.0, 1.0), (3.0,), C),
]


def smooth_field(mesh):
    """A smooth, non-affine displacement field that keeps every element valid."""
    x, y = mesh.nodes.T
    return 0.05 * np.stack([np.sin(3 * x + y), np.cos(2 * y - x) - 1], axis=1).ravel()


@pytest.fixture(scope="module")
def coarse():
    return build_mesh(refinement_level=1)


# -- mesh

@pytest.mark.parametrize("level", [1, 2, 3])
def test_mesh_jacobians_positive(level):
    mesh = build_mesh(refinement_level=level)
    assert np.all(check_jacobians(mesh) > 0)


def test_probe_positions(coarse):
    g = PlateGeometry()
    assert np.allclose(coarse.probe_angles, np.arange(0, 91, 9), atol=1e-12)
    phi = np.radians(coarse.probe_angles)
    expect = g.halfwidth + g.hole_radius * np.stack([-np.cos(phi), -np.sin(phi)], axis=1)
    assert np.max(np.abs(coarse.nodes[coarse.probes] - expect)) <= 1e-10
    r = np.linalg.norm(coarse.nodes[coarse.probes] - g.halfwidth, axis=1)
    assert np.allclose(r, g.hole_radius, atol=1e-12)


def test_element_count_grows_fourfold():
    counts = [build_mesh(refinement_level=k).n_elements for k in (1, 2, 3)]
    assert counts[1] == 4 * counts[0] and counts[2] == 4 * counts[1]


def test_boundary_tags(coarse):
    x, y = coarse.nodes.T
    b = coarse.boundary
    assert np.allclose(x[b["left"]], 0.0) and np.allclose(y[b["bottom"]], 0.0)
    assert np.allclose(y[b["top_symmetry"]], 0.5) and np.allclose(x[b["right_symmetry"]], 0.5)
    assert set(b) == {"bottom", "left", "top_symmetry", "right_symmetry", "hole_arc"}


def test_mesh_area(coarse):
    dets = check_jacobians(coarse)
    area = dets.sum()  # 2x2 Gauss weights are one
    exact = 0.25 - np.pi * 0.25**2 / 4
    assert area == pytest.approx(exact, rel=2e-2)


def test_degenerate_mesh_detected():
    mesh = Mesh(np.array([[0, 0], [1, 0], [0, 1], [1, 1.0]]), np.array([[0, 1, 2, 3]]))
    with pytest.raises(MeshDegenerate):
        check_jacobians(mesh)


def test_invalid_geometry():
    with pytest.raises(ValueError):
        PlateGeometry(0.5, 0.6)
    with pytest.raises(ValueError):
        build_mesh(refinement_level=0)


# -- solver

def test_zero_load(coarse):
    sol = solve(NH, coarse, deltas=[0.0, 0.0])
    assert np.all(sol.displacements == 0) and np.all(sol.reactions == 0)
    r1, r2 = reaction_sign_convention(sol)
    assert np.all(r1 == 0) and np.all(r2 == 0)


def test_incompressible_model_rejected(coarse):
    with pytest.raises(RegimeError):
        solve(MaterialModel("NeoHooke", 1.0), coarse)


@pytest.mark.parametrize("model", FAMILY_MODELS[::3], ids=lambda m: m.family.value)
@pytest.mark.parametrize("distortion", [0.0, 0.25])
def test_patch_test(model, distortion):
    mesh = square_mesh(3, 3, distortion=distortion, seed=2) if distortion else square_mesh(1, 1)
    F2 = np.array([[1.12, 0.07], [-0.04, 0.93]])
    X = mesh.nodes
    u_exact = X @ (F2 - np.eye(2)).T
    edge = mesh.boundary["edge"]
    dofs = np.sort(np.concatenate([2 * edge, 2 * edge + 1]))
    asm = Assembler(mesh)
    u, _, _ = solve_dirichlet(asm, model, dofs, u_exact.ravel()[dofs])
    assert np.max(np.abs(u - u_exact.ravel())) <= 1e-9
    F = np.eye(3)
    F[:2, :2] = F2
    P = asm.stress(model, u)
    P_exact = piola_stress(model, F)
    assert np.max(np.abs(P - P_exact)) <= 1e-9 * np.max(np.abs(P_exact))


@pytest.mark.parametrize("model", FAMILY_MODELS, ids=lambda m: m.family.value)
def test_internal_force_is_energy_gradient(coarse, model):
    asm = Assembler(coarse)
    u = smooth_field(coarse)
    r = asm.internal_force(model, u)
    h = 1e-6
    eye = np.eye(asm.n_dofs)
    g = np.array([(asm.energy(model, u + h * e) - asm.energy(model, u - h * e)) / (2 * h) for e in eye])
    assert np.linalg.norm(g - r) <= 1e-5 * np.linalg.norm(r)
    # random directions, measured against the size of the force
    rng = np.random.default_rng(3)
    for _ in range(3):
        d = rng.normal(size=asm.n_dofs)
        fd = (asm.energy(model, u + h * d) - asm.energy(model, u - h * d)) / (2 * h)
        assert abs(fd - r @ d) <= 1e-5 * np.linalg.norm(r) * np.linalg.norm(d)


def test_tangent_is_force_derivative(coarse):
    asm = Assembler(coarse)
    model = FAMILY_MODELS[4]
    rng = np.random.default_rng(4)
    u = smooth_field(coarse)
    d = rng.normal(size=asm.n_dofs)
    h = 1e-6
    fd = (asm.internal_force(model, u + h * d) - asm.internal_force(model, u - h * d)) / (2 * h)
    Kd = asm.tangent(model, u) @ d
    assert np.linalg.norm(Kd - fd) <= 1e-6 * np.linalg.norm(fd)


@pytest.mark.parametrize("model", FAMILY_MODELS, ids=lambda m: m.family.value)
def test_theta_scaling(coarse, model):
    asm = Assembler(coarse)
    a = solve(model, coarse, assembler=asm)
    b = solve(model.scaled(10.0), coarse, assembler=asm)
    assert np.max(np.abs(b.reactions - 10 * a.reactions)) <= 1e-8 * np.max(np.abs(10 * a.reactions))
    u_scale = np.max(np.abs(a.probe_displacements))
    assert np.max(np.abs(b.probe_displacements - a.probe_displacements)) <= 1e-8 * u_scale


def test_reactions_positive_and_increasing(coarse):
    sol = solve(NH, coarse)
    r1, r2 = reaction_sign_convention(sol)
    assert np.all(np.diff(r2) > 0) and np.all(np.diff(r1) > 0)
    assert r1[0] > 0 and r2[0] > 0
    doubled = solve(NH.scaled(2.0), coarse)
    assert np.allclose(doubled.reactions, 2 * sol.reactions, rtol=1e-9)


def test_converged_residuals(coarse):
    sol = solve(FAMILY_MODELS[1], coarse)
    assert max(sol.residuals) <= 1e-9
    assert len(sol.deltas) == 10 and sol.deltas[-1] == pytest.approx(0.3)


def test_mesh_convergence():
    finals = [solve(NH, build_mesh(refinement_level=k)).reactions[-1, 1] for k in (2, 3)]
    assert abs(finals[1] - finals[0]) / abs(finals[1]) < 0.01


def test_diagonal_symmetry(coarse):
    sol = solve(NH, coarse, LoadProgram(n_steps=3, delta_max=0.2, left_ratio=1.0))
    u = sol.probe_displacements[-1]
    assert np.allclose(u[0], u[1][::-1], rtol=0, atol=1e-9 * np.max(np.abs(u)))
    assert sol.reactions[-1, 0] == pytest.approx(sol.reactions[-1, 1], rel=1e-9)


def test_newton_divergence_reported(coarse):
    with pytest.raises(NewtonDivergence):
        solve(NH, coarse, settings=NewtonSettings(max_iterations=0, max_bisections=0))


def test_bisection_recovers(coarse):
    # a single large step must be split to converge with few iterations
    settings = NewtonSettings(max_iterations=3, max_bisections=4)
    sol = solve(FAMILY_MODELS[1], coarse, LoadProgram(n_steps=1, delta_max=0.3), settings)
    ref = solve(FAMILY_MODELS[1], coarse, LoadProgram(n_steps=1, delta_max=0.3))
    assert np.allclose(sol.reactions, ref.reactions, rtol=1e-8)


def test_dump_fields(coarse, tmp_path):
    sol = solve(NH, coarse, LoadProgram(n_steps=2))
    p = dump_fields(sol, coarse, tmp_path / "f.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "step,delta,node,x,y,ux,uy"
    assert len(lines) == 1 + 2 * coarse.n_nodes
