"""Relative strain-energy discrepancy between a true and a discovered model.

Both errors are ratios of integrals of ``|W_true - W_disc|`` and ``|W_true|``
over a box of principal stretches.  The incompressible error integrates over
``(l1, l2)`` with ``l3 = 1 / (l1 l2)``; the compressible error integrates over
all three stretches independently.  Integrals use tensor-product composite
Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .models import MaterialModel, energy_from_stretches

EnergyLike = MaterialModel | Callable


@dataclass(frozen=True)
class Quadrature:
    panels: int = 8
    points: int = 4

    def refined(self) -> Quadrature:
        return Quadrature(2 * self.panels, self.points)


@dataclass(frozen=True)
class ErrorReport:
    e_incompr: float
    e_compr: float | None
    a: float
    b: float
    quadrature: Quadrature


@lru_cache(maxsize=32)
def _rule(a: float, b: float, panels: int, points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _energy(w: EnergyLike) -> Callable:
    if isinstance(w, MaterialModel):
        return lambda l1, l2, l3: energy_from_stretches(w, l1, l2, l3)
    return w


def _ratio(w_true: EnergyLike, w_disc: EnergyLike, stretches, weights) -> float:
    t = _energy(w_true)(*stretches)
    d = _energy(w_disc)(*stretches)
    den = float(np.sum(weights * np.abs(t)))
    if den == 0.0:
        raise ZeroDivisionError("the true strain energy vanishes on the integration box")
    return float(np.sum(weights * np.abs(t - d))) / den


def e_incompr(w_true: EnergyLike, w_disc: EnergyLike, a: float = 0.75, b: float = 1.25,
              quadrature: Quadrature = Quadrature()) -> float:
    x, w = _rule(a, b, quadrature.panels, quadrature.points)
    l1, l2 = np.meshgrid(x, x, indexing="ij")
    return _ratio(w_true, w_disc, (l1, l2, 1.0 / (l1 * l2)), np.outer(w, w))


def e_compr(w_true: EnergyLike, w_disc: EnergyLike, a: float = 0.75, b: float = 1.25,
            quadrature: Quadrature = Quadrature()) -> float:
    x, w = _rule(a, b, quadrature.panels, quadrature.points)
    l1, l2, l3 = np.meshgrid(x, x, x, indexing="ij")
    return _ratio(w_true, w_disc, (l1, l2, l3), np.einsum("i,j,k->ijk", w, w, w))


def error_report(w_true: MaterialModel, w_disc: MaterialModel, a: float = 0.75, b: float = 1.25,
                 quadrature: Quadrature = Quadrature()) -> ErrorReport:
    ec = e_compr(w_true, w_disc, a, b, quadrature) if w_true.compressible else None
    return ErrorReport(e_incompr(w_true, w_disc, a, b, quadrature), ec, a, b, quadrature)
