"""Parameter grids spanned during database generation.

A grid lists, per family, each parameter either as a fixed value or as an
:class:`Axis`.  Records are the tensor product of all axes, enumerated in
family order and then in declaration order (first parameter outermost).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .models import FAMILIES, Family, MaterialModel, Regime


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.n == 1:
            return np.array([self.lo])
        if self.spacing == "linear":
            return np.linspace(self.lo, self.hi, self.n)
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        raise ValueError(f"unknown spacing {self.spacing!r}")

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "spacing": self.spacing}


Entry = float | Axis


def _entry_values(entry: Entry) -> np.ndarray:
    return entry.values() if isinstance(entry, Axis) else np.array([float(entry)])


def _entry_dict(entry: Entry):
    return entry.to_dict() if isinstance(entry, Axis) else float(entry)


def _entry_from(obj) -> Entry:
    return Axis(**obj) if isinstance(obj, dict) else float(obj)


@dataclass(frozen=True)
class FamilyGrid:
    family: Family
    theta: tuple[Entry, ...]
    alpha: tuple[Entry, ...] = ()

    @property
    def count(self) -> int:
        return int(np.prod([len(_entry_values(e)) for e in self.theta + self.alpha]))

    def models(self, regime: Regime) -> list[MaterialModel]:
        n_theta = len(self.theta)
        axes = [_entry_values(e) for e in self.theta + self.alpha]
        return [
            MaterialModel(self.family, combo[:n_theta], combo[n_theta:], regime)
            for combo in itertools.product(*axes)
        ]


@dataclass(frozen=True)
class GridSpec:
    regime: Regime
    families: tuple[FamilyGrid, ...]

    @property
    def count(self) -> int:
        return sum(fg.count for fg in self.families)

    def models(self) -> list[MaterialModel]:
        out: list[MaterialModel] = []
        for fg in self.families:
            out.extend(fg.models(self.regime))
        return out

    def family_grid(self, family: Family) -> FamilyGrid:
        for fg in self.families:
            if fg.family is family:
                return fg
        raise KeyError(f"{family.value} is not part of this grid")

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "families": [
                {"family": fg.family.value,
                 "theta": [_entry_dict(e) for e in fg.theta],
                 "alpha": [_entry_dict(e) for e in fg.alpha]}
                for fg in self.families
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> GridSpec:
        fams = tuple(
            FamilyGrid(Family.parse(d["family"]),
                       tuple(_entry_from(e) for e in d["theta"]),
                       tuple(_entry_from(e) for e in d["alpha"]))
            for d in data["families"]
        )
        fams = tuple(sorted(fams, key=lambda fg: FAMILIES.index(fg.family)))
        return cls(Regime(data["regime"]), fams)


def supervised_grid(n: int = 100, spacing: str = "linear") -> GridSpec:
    """Incompressible database grid; ``n=100`` gives the 502-record default."""
    wide = Axis(0.1, 10.0, n, spacing)
    return GridSpec(Regime.INCOMPRESSIBLE, (
        FamilyGrid(Family.BLATZ_KO, (1.0,)),
        FamilyGrid(Family.DEMIRAY, (1.0,), (wide,)),
        FamilyGrid(Family.GENT, (1.0,), (Axis(0.1, 1.0, n, spacing),)),
        FamilyGrid(Family.HOLZAPFEL, (1.0,), (wide,)),
        FamilyGrid(Family.MOONEY_RIVLIN, (wide, 1.0)),
        FamilyGrid(Family.NEO_HOOKE, (1.0,)),
        FamilyGrid(Family.OGDEN, (1.0,), (wide,)),
    ))


def unsupervised_grid(n: int = 100, spacing: str = "linear") -> GridSpec:
    """Compressible database grid; ``n=100`` gives the 30,200-record default.

    The leading theta entry of every family is the volumetric penalty.
    """
    wide = Axis(0.1, 10.0, n, spacing)
    return GridSpec(Regime.COMPRESSIBLE, (
        FamilyGrid(Family.BLATZ_KO, (wide, 1.0)),
        FamilyGrid(Family.DEMIRAY, (wide, 1.0), (wide,)),
        FamilyGrid(Family.GENT, (wide, 1.0), (Axis(0.1, 1.0, n, spacing),)),
        FamilyGrid(Family.MOONEY_RIVLIN, (wide, 1.0, wide)),
        FamilyGrid(Family.NEO_HOOKE, (wide, 1.0)),
    ))


def snap_to_grid(model: MaterialModel, grid: GridSpec) -> MaterialModel:
    """Closest model of the form ``c * (grid point)``.

    The scale ``c`` is fixed by the first non-axis theta entry; every axis
    entry is replaced by its nearest grid value (theta axes relative to c).
    """
    fg = grid.family_grid(model.family)
    fixed = [i for i, e in enumerate(fg.theta) if not isinstance(e, Axis)]
    if not fixed:
        raise ValueError(f"{model.family.value} grid has no fixed theta entry")
    k = fixed[0]
    c = model.theta[k] / float(fg.theta[k])

    def nearest(entry: Entry, value: float) -> float:
        vals = _entry_values(entry)
        return float(vals[np.argmin(np.abs(vals - value))])

    theta = tuple(c * nearest(e, t / c) for e, t in zip(fg.theta, model.theta))
    alpha = tuple(nearest(e, a) for e, a in zip(fg.alpha, model.alpha))
    return MaterialModel(model.family, theta, alpha, model.regime)
