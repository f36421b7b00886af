"""Plate-with-hole fingerprints (reaction forces + probe displacements)."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .database import FingerprintDatabase
from .errors import GridPointError, MatFPError
from .fem import Assembler, FemSolution, LoadProgram, NewtonSettings, solve
from .grids import GridSpec, unsupervised_grid
from .mesh import N_PROBES, Mesh, PlateGeometry, build_mesh
from .models import MaterialModel


@dataclass(frozen=True)
class PlateProtocol:
    geometry: PlateGeometry = PlateGeometry()
    refinement_level: int = 2
    grading: float = 1.5
    program: LoadProgram = LoadProgram()
    newton: NewtonSettings = NewtonSettings()

    @classmethod
    def desk(cls) -> PlateProtocol:
        """Coarse-mesh variant used for quick database builds."""
        return cls(refinement_level=1)

    @cached_property
    def mesh(self) -> Mesh:
        return build_mesh(self.geometry, self.refinement_level, self.grading)

    @property
    def n_t(self) -> int:
        return self.program.n_steps

    @property
    def n_u(self) -> int:
        return N_PROBES

    @property
    def parts(self) -> tuple[int, ...]:
        return (2 * self.n_t, 2 * self.n_u * self.n_t)

    @property
    def n_f(self) -> int:
        return sum(self.parts)

    def descriptor(self) -> dict:
        return {
            "experiment": "plate_with_hole",
            "block_order": ["R1,R2 per step", "probe x1 (11) then x2 (11) per step"],
            "geometry": self.geometry.descriptor(),
            "mesh": {"element": "Q4", "quadrature": "gauss2x2", "formulation": "total_lagrangian_plane_strain",
                     "refinement_level": self.refinement_level, "grading": self.grading},
            "probes": {"n_u": self.n_u, "angles_deg": [9.0 * k for k in range(self.n_u)],
                       "angle_origin": "top_symmetry_edge"},
            "program": self.program.descriptor(),
            "newton": self.newton.descriptor(),
            "noise_rule": "unsupervised_split",
        }

    def labels(self) -> list[str]:
        forces = [f"R{j}@t{t}" for t in range(1, self.n_t + 1) for j in (1, 2)]
        disp = [f"u{c}_p{k}@t{t}" for t in range(1, self.n_t + 1) for c in (1, 2) for k in range(self.n_u)]
        return forces + disp

    @classmethod
    def from_descriptor(cls, desc: dict) -> PlateProtocol:
        m, n = desc["mesh"], desc["newton"]
        return cls(PlateGeometry(**desc["geometry"]), m["refinement_level"], m["grading"],
                   LoadProgram(**desc["program"]), NewtonSettings(**n))


@dataclass(frozen=True)
class UnsupervisedFingerprint:
    forces: np.ndarray  # f_R, (2 n_t,)
    displacements: np.ndarray  # f_u, (2 n_u n_t,)
    solution: FemSolution | None = field(default=None, repr=False, compare=False)

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.forces, self.displacements])

    @property
    def parts(self) -> tuple[int, int]:
        return (self.forces.size, self.displacements.size)


def fingerprint_from_solution(solution: FemSolution) -> UnsupervisedFingerprint:
    return UnsupervisedFingerprint(solution.reactions.ravel().copy(),
                                   solution.probe_displacements.ravel().copy(), solution)


def fem_fingerprint(model: MaterialModel, protocol: PlateProtocol | None = None,
                    assembler: Assembler | None = None) -> UnsupervisedFingerprint:
    protocol = protocol or PlateProtocol()
    sol = solve(model, protocol.mesh, protocol.program, protocol.newton, assembler)
    return fingerprint_from_solution(sol)


# worker-process state: one protocol and assembler per process
_WORKER: dict = {}


def _init_worker(protocol: PlateProtocol):
    _WORKER["protocol"] = protocol
    _WORKER["assembler"] = Assembler(protocol.mesh)


def _simulate(model: MaterialModel):
    try:
        return fem_fingerprint(model, _WORKER["protocol"], _WORKER["assembler"]).values, None
    except MatFPError as exc:
        return None, f"{exc.category}: {exc}"


def generate_database(grid: GridSpec | None = None, protocol: PlateProtocol | None = None,
                      workers: int = 1, progress=None) -> FingerprintDatabase:
    """Normalized unsupervised database; the defaults give 30,200 records.

    Every grid point must converge.  Failures are collected over the whole
    grid and reported together.
    """
    protocol = protocol or PlateProtocol()
    grid = grid or unsupervised_grid()
    models = grid.models()
    if workers > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(protocol,)) as pool:
            results = list(pool.map(_simulate, models, chunksize=max(1, len(models) // (8 * workers))))
    else:
        _init_worker(protocol)
        results = []
        for i, m in enumerate(models):
            results.append(_simulate(m))
            if progress is not None:
                progress(i + 1, len(models))
    failed = [(i, m, err) for i, (m, (_, err)) in enumerate(zip(models, results)) if err is not None]
    if failed:
        lines = "; ".join(f"#{i} {m.family.value} theta={m.theta} alpha={m.alpha}: {e}" for i, m, e in failed[:10])
        raise GridPointError(f"{len(failed)} of {len(models)} grid points failed: {lines}")
    raw = np.stack([r for r, _ in results])
    return FingerprintDatabase.from_raw("unsupervised", protocol.descriptor(), protocol.parts, raw, models,
                                        grid.to_dict())
