"""Homogeneous uniaxial-tension + simple-shear fingerprints and their database."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .database import FingerprintDatabase, normalize
from .errors import GridPointError, MatFPError
from .grids import GridSpec, supervised_grid
from .models import MaterialModel, ss_stress, ut_stress


@dataclass(frozen=True)
class HomogeneousProtocol:
    ut_stretches: tuple[float, ...]
    ss_shears: tuple[float, ...]

    def __post_init__(self):
        lam = np.asarray(self.ut_stretches, dtype=float)
        gam = np.asarray(self.ss_shears, dtype=float)
        if np.any(np.diff(lam) <= 0) or np.any(np.diff(gam) <= 0):
            raise ValueError("protocol grids must be strictly increasing")
        if lam.size and lam[0] < 1.0 or gam.size and gam[0] < 0.0:
            raise ValueError("protocol needs stretches >= 1 and shears >= 0")
        object.__setattr__(self, "ut_stretches", tuple(float(v) for v in lam))
        object.__setattr__(self, "ss_shears", tuple(float(v) for v in gam))

    @classmethod
    def default(cls, n_ut: int = 15, n_ss: int = 15) -> HomogeneousProtocol:
        return cls(tuple(np.linspace(1.0, 1.5, n_ut)), tuple(np.linspace(0.0, 0.5, n_ss)))

    @property
    def n_ut(self) -> int:
        return len(self.ut_stretches)

    @property
    def n_ss(self) -> int:
        return len(self.ss_shears)

    @property
    def n_f(self) -> int:
        return self.n_ut + self.n_ss

    @property
    def parts(self) -> tuple[int, ...]:
        return (self.n_f,)

    def descriptor(self) -> dict:
        return {
            "experiment": "homogeneous_ut_ss",
            "block_order": ["UT", "SS"],
            "ut_stretches": list(self.ut_stretches),
            "ss_shears": list(self.ss_shears),
            "noise_rule": "supervised_stress",
        }

    def labels(self) -> list[str]:
        return [f"UT_P11@{v!r}" for v in self.ut_stretches] + [f"SS_P12@{v!r}" for v in self.ss_shears]

    @classmethod
    def from_descriptor(cls, desc: dict) -> HomogeneousProtocol:
        return cls(tuple(desc["ut_stretches"]), tuple(desc["ss_shears"]))


@dataclass(frozen=True)
class SupervisedFingerprint:
    values: np.ndarray
    norm: float
    normalized: bool = False


def simulate_fingerprint(model: MaterialModel, protocol: HomogeneousProtocol | None = None) -> SupervisedFingerprint:
    """Raw stress fingerprint: UT block (P11) followed by SS block (P12)."""
    protocol = protocol or HomogeneousProtocol.default()
    try:
        ut = ut_stress(model, np.array(protocol.ut_stretches))
    except MatFPError as exc:
        raise type(exc)(f"{model.describe()}: uniaxial grid {protocol.ut_stretches}: {exc}") from exc
    try:
        ss = ss_stress(model, np.array(protocol.ss_shears))
    except MatFPError as exc:
        raise type(exc)(f"{model.describe()}: shear grid {protocol.ss_shears}: {exc}") from exc
    values = np.concatenate([np.atleast_1d(ut), np.atleast_1d(ss)]).astype(float)
    return SupervisedFingerprint(values, float(np.linalg.norm(values)))


def normalize_fingerprint(fp: SupervisedFingerprint, theta=()):
    """Unit-length fingerprint, ``theta / ||f||`` and ``||f||``."""
    fbar, theta_bar, norms = normalize(fp.values, theta)
    return SupervisedFingerprint(fbar, 1.0, True), theta_bar, float(norms[0])


def generate_database(protocol: HomogeneousProtocol | None = None,
                      grid: GridSpec | None = None) -> FingerprintDatabase:
    """Normalized supervised database; the defaults give 502 records."""
    protocol = protocol or HomogeneousProtocol.default()
    grid = grid or supervised_grid()
    models = grid.models()
    raw = np.empty((len(models), protocol.n_f))
    for i, m in enumerate(models):
        try:
            raw[i] = simulate_fingerprint(m, protocol).values
        except MatFPError as exc:
            raise GridPointError(f"grid point {i} ({m.family.value}, theta={m.theta}, alpha={m.alpha}): {exc}") from exc
    return FingerprintDatabase.from_raw("supervised", protocol.descriptor(), protocol.parts, raw, models,
                                        grid.to_dict())
