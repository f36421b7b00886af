"""Structured quadrilateral meshes for the quarter plate with a hole."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshDegenerate

N_PROBES = 11


@dataclass(frozen=True)
class PlateGeometry:
    """Quarter of a square plate with a centred circular hole.

    The quarter occupies ``[0, halfwidth]^2``; the hole is centred at the
    top-right corner ``(halfwidth, halfwidth)``.  Top and right edges are
    symmetry planes, bottom and left edges are pulled.
    """

    halfwidth: float = 0.5
    hole_radius: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.hole_radius < self.halfwidth:
            raise ValueError("need 0 < hole_radius < halfwidth")

    def descriptor(self) -> dict:
        return {"halfwidth": self.halfwidth, "hole_radius": self.hole_radius}


@dataclass
class Mesh:
    nodes: np.ndarray  # (n_nodes, 2) reference coordinates
    elements: np.ndarray  # (n_elements, 4) counter-clockwise connectivity
    boundary: dict[str, np.ndarray] = field(default_factory=dict)
    probes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    probe_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)


def _orient(nodes: np.ndarray, elements: np.ndarray) -> np.ndarray:
    xy = nodes[elements]
    # shoelace area; flip clockwise quads
    area = 0.5 * np.sum(xy[:, :, 0] * np.roll(xy[:, :, 1], -1, axis=1)
                        - np.roll(xy[:, :, 0], -1, axis=1) * xy[:, :, 1], axis=1)
    out = elements.copy()
    out[area < 0] = out[area < 0][:, ::-1]
    return out


def check_jacobians(mesh: Mesh) -> np.ndarray:
    """Reference Jacobian determinants at the 2x2 Gauss points; raise if any <= 0."""
    from .fem import GAUSS_2X2, shape_gradients

    xy = mesh.nodes[mesh.elements]
    dets = []
    for xi, eta in GAUSS_2X2:
        dN = shape_gradients(xi, eta)  # (4, 2)
        Jm = np.einsum("eai,aj->eij", xy, dN)
        dets.append(np.linalg.det(Jm))
    dets = np.stack(dets, axis=1)
    if np.any(dets <= 0.0):
        raise MeshDegenerate(f"{int(np.sum(dets <= 0))} Gauss points with non-positive Jacobian")
    return dets


def build_mesh(geometry: PlateGeometry = PlateGeometry(), refinement_level: int = 2,
               grading: float = 1.5) -> Mesh:
    """Mesh the quarter plate with rays cast from the hole centre.

    Arc nodes are equally spaced in angle, so the 11 probe positions at
    0, 9, ..., 90 degrees are mesh nodes for every level.  The probe angle is
    measured from the top symmetry edge (angle 0) towards the right symmetry
    edge (angle 90).  ``grading > 1`` clusters element rows near the hole.
    Each level doubles the element count in both directions.
    """
    if refinement_level < 1:
        raise ValueError("refinement_level must be >= 1")
    n_c = 10 * 2 ** (refinement_level - 1)
    n_r = 4 * 2 ** (refinement_level - 1)
    a, r = geometry.halfwidth, geometry.hole_radius

    phi = np.linspace(0.0, 0.5 * np.pi, n_c + 1)
    # snap the symmetric angles so mirrored nodes coincide exactly
    phi = 0.5 * (phi + (0.5 * np.pi - phi[::-1]))
    direction = np.stack([-np.cos(phi), -np.sin(phi)], axis=1)
    centre = np.array([a, a])
    with np.errstate(divide="ignore"):
        reach = np.minimum(a / np.abs(direction[:, 0]), a / np.abs(direction[:, 1]))
    inner = centre + r * direction
    outer = centre + reach[:, None] * direction

    s = np.linspace(0.0, 1.0, n_r + 1) ** grading
    nodes = inner[:, None, :] + s[None, :, None] * (outer - inner)[:, None, :]
    nodes = nodes.reshape(-1, 2)
    # exact boundary coordinates
    idx = np.arange((n_c + 1) * (n_r + 1)).reshape(n_c + 1, n_r + 1)
    nodes[idx[0], 1] = a
    nodes[idx[-1], 0] = a
    outer_ids = idx[:, -1]
    left = outer_ids[phi <= 0.25 * np.pi + 1e-12]
    bottom = outer_ids[phi >= 0.25 * np.pi - 1e-12]
    nodes[left, 0] = 0.0
    nodes[bottom, 1] = 0.0

    i, j = np.meshgrid(np.arange(n_c), np.arange(n_r), indexing="ij")
    elements = np.stack([idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]], axis=-1).reshape(-1, 4)
    elements = _orient(nodes, elements)

    step = n_c // (N_PROBES - 1)
    probes = idx[::step, 0]
    mesh = Mesh(
        nodes=nodes,
        elements=elements,
        boundary={
            "hole_arc": idx[:, 0],
            "top_symmetry": idx[0],
            "right_symmetry": idx[-1],
            "left": left,
            "bottom": bottom,
        },
        probes=probes,
        probe_angles=np.degrees(phi[::step]),
    )
    check_jacobians(mesh)
    return mesh


def square_mesh(nx: int = 1, ny: int = 1, size: float = 1.0, distortion: float = 0.0,
                seed: int = 0) -> Mesh:
    """Rectangular patch mesh; interior nodes optionally jittered."""
    x = np.linspace(0.0, size, nx + 1)
    y = np.linspace(0.0, size, ny + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel()], axis=1)
    idx = np.arange(len(nodes)).reshape(nx + 1, ny + 1)
    on_edge = np.zeros(len(nodes), dtype=bool)
    on_edge[idx[0]] = on_edge[idx[-1]] = on_edge[idx[:, 0]] = on_edge[idx[:, -1]] = True
    if distortion:
        rng = np.random.default_rng(seed)
        h = size / max(nx, ny)
        nodes[~on_edge] += distortion * h * rng.uniform(-1, 1, size=(int((~on_edge).sum()), 2))
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    elements = np.stack([idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]], axis=-1).reshape(-1, 4)
    mesh = Mesh(nodes, _orient(nodes, elements), boundary={"edge": np.flatnonzero(on_edge)})
    check_jacobians(mesh)
    return mesh
