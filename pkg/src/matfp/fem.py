"""Total-Lagrangian plane-strain finite elements for the plate-with-hole test.

Bilinear quadrilaterals with 2x2 Gauss quadrature.  The constitutive law is
any compressible :class:`~matfp.models.MaterialModel`; the out-of-plane
stretch is held at one, and only the in-plane blocks of ``P`` and ``dP/dF``
enter the element integrals.

Displacement control: the bottom edge moves by ``-delta`` vertically, the left
edge by ``-left_ratio * delta`` horizontally (both pull outwards), the top and
right edges are symmetry planes.  Each load step is solved by Newton's method
with a linear predictor, backtracking on inadmissible iterates and recursive
step bisection on divergence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ExponentOverflow, GentDomainError, InvalidDeformation, NewtonDivergence, RegimeError
from .mesh import Mesh
from .models import MaterialModel, piola_stress, piola_tangent, strain_energy

_G = 1.0 / np.sqrt(3.0)
GAUSS_2X2 = ((-_G, -_G), (_G, -_G), (_G, _G), (-_G, _G))
_DOMAIN_ERRORS = (InvalidDeformation, GentDomainError, ExponentOverflow, FloatingPointError)


def shape_functions(xi: float, eta: float) -> np.ndarray:
    return 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta), (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])


def shape_gradients(xi: float, eta: float) -> np.ndarray:
    """dN/d(xi, eta) with shape (4, 2)."""
    return 0.25 * np.array([
        [-(1 - eta), -(1 - xi)],
        [(1 - eta), -(1 + xi)],
        [(1 + eta), (1 + xi)],
        [-(1 + eta), (1 - xi)],
    ])


@dataclass(frozen=True)
class LoadProgram:
    n_steps: int = 10
    delta_max: float = 0.3
    left_ratio: float = 0.5

    def deltas(self) -> np.ndarray:
        return self.delta_max * np.arange(1, self.n_steps + 1) / self.n_steps

    def descriptor(self) -> dict:
        return {"n_steps": self.n_steps, "delta_max": self.delta_max, "left_ratio": self.left_ratio}


@dataclass(frozen=True)
class NewtonSettings:
    rtol: float = 1e-9
    max_iterations: int = 25
    max_bisections: int = 4
    max_backtracks: int = 10

    def descriptor(self) -> dict:
        return {"rtol": self.rtol, "max_iterations": self.max_iterations,
                "max_bisections": self.max_bisections}


@dataclass
class FemSolution:
    deltas: np.ndarray  # (n_t,)
    displacements: np.ndarray  # (n_t, n_nodes, 2)
    reactions: np.ndarray  # (n_t, 2): R1 (left, horizontal), R2 (bottom, vertical)
    probe_displacements: np.ndarray  # (n_t, 2, n_u): x1 block then x2 block
    iterations: list[int] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)


class Assembler:
    """Precomputed reference-configuration data for one mesh."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        xy = mesh.nodes[mesh.elements]  # (m, 4, 2)
        grads, weights = [], []
        for xi, eta in GAUSS_2X2:
            dN = shape_gradients(xi, eta)
            Jm = np.einsum("eai,aj->eij", xy, dN)
            grads.append(np.einsum("aj,eji->eai", dN, np.linalg.inv(Jm)))
            weights.append(np.linalg.det(Jm))
        self.G = np.stack(grads, axis=1)  # (m, q, 4, 2): dN_a/dX_J
        self.w = np.stack(weights, axis=1)  # (m, q)
        self.n_dofs = 2 * mesh.n_nodes
        self.dofs = (2 * mesh.elements[:, :, None] + np.arange(2)).reshape(-1, 8)
        self._rows = np.repeat(self.dofs, 8, axis=1).ravel()
        self._cols = np.tile(self.dofs, (1, 8)).ravel()

    def deformation_gradient(self, u: np.ndarray) -> np.ndarray:
        """Plane-strain F at every Gauss point, shape (m, q, 3, 3)."""
        ue = u.reshape(-1, 2)[self.mesh.elements]  # (m, 4, 2)
        H = np.einsum("eai,eqaJ->eqiJ", ue, self.G)
        F = np.zeros(H.shape[:2] + (3, 3))
        F[..., :2, :2] = H
        F[..., 0, 0] += 1.0
        F[..., 1, 1] += 1.0
        F[..., 2, 2] = 1.0
        return F

    def internal_force(self, model: MaterialModel, u: np.ndarray) -> np.ndarray:
        P = piola_stress(model, self.deformation_gradient(u))[..., :2, :2]
        fe = np.einsum("eq,eqiJ,eqaJ->eai", self.w, P, self.G)
        return np.bincount(self.dofs.ravel(), weights=fe.ravel(), minlength=self.n_dofs)

    def tangent(self, model: MaterialModel, u: np.ndarray) -> sp.csr_matrix:
        A = piola_tangent(model, self.deformation_gradient(u), plane_strain=True)
        wG = self.w[..., None, None] * self.G
        Ke = np.einsum("eqaJ,eqiJkL,eqbL->eaibk", wG, A, self.G, optimize=True).reshape(-1, 64)
        return sp.csr_matrix((Ke.ravel(), (self._rows, self._cols)), shape=(self.n_dofs, self.n_dofs))

    def energy(self, model: MaterialModel, u: np.ndarray) -> float:
        return float(np.sum(self.w * strain_energy(model, self.deformation_gradient(u))))

    def stress(self, model: MaterialModel, u: np.ndarray) -> np.ndarray:
        return piola_stress(model, self.deformation_gradient(u))


class _Dirichlet:
    def __init__(self, n_dofs: int, fixed: np.ndarray):
        self.fixed = np.asarray(fixed, dtype=int)
        mask = np.ones(n_dofs, dtype=bool)
        mask[self.fixed] = False
        self.free = np.flatnonzero(mask)


def _solve_linear(K: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
    x = spla.spsolve(K.tocsc(), rhs)
    if not np.all(np.isfinite(x)):
        raise NewtonDivergence("singular tangent")
    return x


def _increment(asm: Assembler, model: MaterialModel, u_old: np.ndarray, bc: _Dirichlet,
               values_old: np.ndarray, values_new: np.ndarray, settings: NewtonSettings):
    """One Newton solve from a converged state to new Dirichlet values."""
    free, fixed = bc.free, bc.fixed
    u = u_old.copy()
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        K = asm.tangent(model, u)
        r = asm.internal_force(model, u)
        du_d = values_new - values_old
        u[fixed] = values_new
        if np.any(du_d):
            rhs = -(r[free] + K[free][:, fixed] @ du_d)
            step = _solve_linear(K[free][:, free], rhs)
            u = _backtrack(asm, model, u, free, step, settings)
        for it in range(settings.max_iterations + 1):
            r = asm.internal_force(model, u)
            scale = max(np.linalg.norm(r[fixed]), np.finfo(float).tiny)
            res = np.linalg.norm(r[free])
            if res <= settings.rtol * scale:
                return u, it, res / scale
            if it == settings.max_iterations:
                break
            K = asm.tangent(model, u)
            step = _solve_linear(K[free][:, free], -r[free])
            u = _backtrack(asm, model, u, free, step, settings)
    raise NewtonDivergence(f"no convergence in {settings.max_iterations} iterations (residual {res / scale:.3e})")


def _backtrack(asm, model, u, free, step, settings) -> np.ndarray:
    s = 1.0
    for _ in range(settings.max_backtracks):
        trial = u.copy()
        trial[free] += s * step
        try:
            asm.internal_force(model, trial)
            return trial
        except _DOMAIN_ERRORS:
            s *= 0.5
    raise NewtonDivergence("no admissible Newton iterate along the search direction")


def solve_dirichlet(asm: Assembler, model: MaterialModel, fixed_dofs, values, u0=None,
                    settings: NewtonSettings = NewtonSettings(), values_start=None):
    """Solve equilibrium with prescribed values on ``fixed_dofs``.

    Returns (u, iterations, relative residual).  On failure the increment is
    bisected recursively up to ``settings.max_bisections`` levels.
    """
    bc = _Dirichlet(asm.n_dofs, fixed_dofs)
    u0 = np.zeros(asm.n_dofs) if u0 is None else np.asarray(u0, dtype=float).copy()
    values = np.asarray(values, dtype=float)
    start = u0[bc.fixed] if values_start is None else np.asarray(values_start, dtype=float)
    return _advance(asm, model, u0, bc, start, values, settings, 0)


def _advance(asm, model, u_old, bc, v_old, v_new, settings, depth):
    try:
        return _increment(asm, model, u_old, bc, v_old, v_new, settings)
    except (NewtonDivergence, *_DOMAIN_ERRORS) as exc:
        if depth >= settings.max_bisections:
            raise NewtonDivergence(f"load step failed after {depth} bisections: {exc}") from exc
    v_mid = 0.5 * (v_old + v_new)
    u_mid, it1, _ = _advance(asm, model, u_old, bc, v_old, v_mid, settings, depth + 1)
    u_new, it2, res = _advance(asm, model, u_mid, bc, v_mid, v_new, settings, depth + 1)
    return u_new, it1 + it2, res


def plate_constraints(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Constrained dofs of the plate and their per-unit-delta target values."""
    b = mesh.boundary
    prescribed: dict[int, float] = {}
    for n in b["top_symmetry"]:
        prescribed[2 * n + 1] = 0.0
    for n in b["right_symmetry"]:
        prescribed[2 * n] = 0.0
    for n in b["left"]:
        prescribed[2 * n] = -1.0  # times left_ratio * delta
    for n in b["bottom"]:
        prescribed[2 * n + 1] = -1.0  # times delta
    dofs = np.array(sorted(prescribed), dtype=int)
    return dofs, np.array([prescribed[d] for d in dofs])


def solve(model: MaterialModel, mesh: Mesh, program: LoadProgram = LoadProgram(),
          settings: NewtonSettings = NewtonSettings(), assembler: Assembler | None = None,
          deltas=None) -> FemSolution:
    """Quasi-static displacement-controlled plate-with-hole simulation."""
    if not model.compressible:
        raise RegimeError("the plate simulation needs a compressible model")
    asm = assembler if assembler is not None else Assembler(mesh)
    dofs, unit = plate_constraints(mesh)
    is_left = np.isin(dofs, 2 * mesh.boundary["left"])
    scale = np.where(is_left, program.left_ratio, 1.0) * unit

    deltas = program.deltas() if deltas is None else np.asarray(deltas, dtype=float)
    u = np.zeros(asm.n_dofs)
    v = np.zeros(len(dofs))
    disp, reactions, probes, iters, residuals = [], [], [], [], []
    left_x = 2 * mesh.boundary["left"]
    bottom_y = 2 * mesh.boundary["bottom"] + 1
    for delta in deltas:
        v_new = delta * scale
        u, it, res = solve_dirichlet(asm, model, dofs, v_new, u0=u, settings=settings, values_start=v)
        v = v_new
        r = asm.internal_force(model, u)
        reactions.append((-r[left_x].sum(), -r[bottom_y].sum()))
        field_ = u.reshape(-1, 2)
        disp.append(field_.copy())
        probes.append(field_[mesh.probes].T.copy())
        iters.append(it)
        residuals.append(res)
    return FemSolution(
        deltas=deltas,
        displacements=np.array(disp).reshape(len(deltas), mesh.n_nodes, 2),
        reactions=np.array(reactions).reshape(len(deltas), 2),
        probe_displacements=np.array(probes).reshape(len(deltas), 2, len(mesh.probes)),
        iterations=iters,
        residuals=residuals,
    )


def reaction_sign_convention(solution: FemSolution) -> tuple[np.ndarray, np.ndarray]:
    """(R1, R2) per load step, positive when the edges pull outwards."""
    return solution.reactions[:, 0].copy(), solution.reactions[:, 1].copy()


def dump_fields(solution: FemSolution, mesh: Mesh, path: str | Path) -> Path:
    """Write reference coordinates and per-step nodal displacements as CSV."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "delta", "node", "x", "y", "ux", "uy"])
        for t, delta in enumerate(solution.deltas):
            for n, (x, y) in enumerate(mesh.nodes):
                ux, uy = solution.displacements[t, n]
                w.writerow([t + 1, repr(float(delta)), n, repr(float(x)), repr(float(y)),
                            repr(float(ux)), repr(float(uy))])
    return path
