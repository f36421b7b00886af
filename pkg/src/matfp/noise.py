"""Seeded Gaussian measurement noise.

Normals are drawn with the Box-Muller transform from the uniform stream of a
PCG64 bit generator seeded with ``seed``.  For each pair of uniforms
``u1 = 1 - U``, ``u2 = U'`` (so ``u1`` lies in (0, 1]) we emit

    z0 = sqrt(-2 ln u1) cos(2 pi u2),   z1 = sqrt(-2 ln u1) sin(2 pi u2)

in that order.  Any implementation reproducing PCG64 doubles reproduces the
noise exactly, independent of numpy's own normal sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TARGETS = ("supervised_stress", "unsupervised_split")


@dataclass(frozen=True)
class NoiseSpec:
    level: float
    seed: int = 0
    target: str = "supervised_stress"

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("noise level must be non-negative")
        if self.target not in TARGETS:
            raise ValueError(f"unknown noise target {self.target!r}")


def standard_normals(n: int, seed: int) -> np.ndarray:
    u = np.random.Generator(np.random.PCG64(seed)).random(2 * ((n + 1) // 2))
    u1, u2 = 1.0 - u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(u.size)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:n]


def add_noise(fingerprint, spec: NoiseSpec, parts: tuple[int, ...] | None = None) -> np.ndarray:
    """Raw fingerprint plus zero-mean noise, applied before normalization.

    The standard deviation is ``level * max|f|``.  With the split target each
    part (forces, displacements) uses its own maximum.
    """
    f = np.asarray(fingerprint, dtype=float)
    if spec.level == 0.0:
        return f.copy()
    if spec.target == "supervised_stress" or parts is None:
        parts = (f.size,)
    edges = np.cumsum((0,) + tuple(parts))
    std = np.concatenate([np.full(b - a, spec.level * np.max(np.abs(f[a:b]), initial=0.0))
                          for a, b in zip(edges[:-1], edges[1:])])
    return f + std * standard_normals(f.size, spec.seed)
