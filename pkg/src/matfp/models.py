"""Hyperelastic strain-energy families and their stress responses.

Each family is linear in its homogeneity parameters ``theta`` and may carry
non-homogeneity parameters ``alpha`` (exponents, locking limits).  Two regimes
are supported:

* ``IncompressibleLagrange``: ``W = Wt(I1, I2) + p [J - 1]``.  The Lagrange
  multiplier is never stored; :func:`strain_energy` returns ``Wt`` and the
  homogeneous-test stresses eliminate ``p`` in closed form.
* ``CompressiblePenalty``: ``W = Wt(Ib1, Ib2) + theta0 [J - 1]^2`` with the
  isochoric invariants ``Ib1 = J^(-2/3) I1`` and ``Ib2 = J^(-4/3) I2``.  The
  penalty coefficient ``theta0`` is stored as the leading entry of ``theta``.

All evaluation routines broadcast over leading array dimensions, so a whole
set of quadrature points is handled in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ExponentOverflow,
    GentDomainError,
    InvalidDeformation,
    NonPositiveStretch,
    RegimeError,
)

EXP_ARGUMENT_CAP = 700.0


class Family(str, Enum):
    BLATZ_KO = "BlatzKo"
    DEMIRAY = "Demiray"
    GENT = "Gent"
    HOLZAPFEL = "Holzapfel"
    MOONEY_RIVLIN = "MooneyRivlin"
    NEO_HOOKE = "NeoHooke"
    OGDEN = "Ogden"

    @property
    def code(self) -> int:
        return FAMILIES.index(self)

    @classmethod
    def parse(cls, name: str | Family) -> Family:
        if isinstance(name, Family):
            return name
        key = name.replace("-", "").replace("_", "").replace(" ", "").lower()
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        raise ValueError(f"unknown model family {name!r}")


FAMILIES: list[Family] = list(Family)


class Regime(str, Enum):
    INCOMPRESSIBLE = "IncompressibleLagrange"
    COMPRESSIBLE = "CompressiblePenalty"


# (homogeneity parameter names, non-homogeneity parameter names)
PARAMETER_NAMES: dict[Family, tuple[tuple[str, ...], tuple[str, ...]]] = {
    Family.BLATZ_KO: (("theta1",), ()),
    Family.DEMIRAY: (("theta2",), ("alpha2",)),
    Family.GENT: (("theta3",), ("alpha3",)),
    Family.HOLZAPFEL: (("theta4",), ("alpha4",)),
    Family.MOONEY_RIVLIN: (("theta5", "theta1"), ()),
    Family.NEO_HOOKE: (("theta5",), ()),
    Family.OGDEN: (("theta6",), ("alpha6",)),
}


@dataclass(frozen=True)
class MaterialModel:
    """A strain-energy family together with its parameters.

    ``theta`` is ordered as in :data:`PARAMETER_NAMES`; in the compressible
    regime the volumetric penalty ``theta0`` is prepended.  Mooney-Rivlin
    therefore reads ``(theta5, theta1)`` = (I1 coefficient, I2 coefficient).
    """

    family: Family
    theta: tuple[float, ...]
    alpha: tuple[float, ...] = ()
    regime: Regime = Regime.INCOMPRESSIBLE

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "theta", tuple(float(t) for t in np.atleast_1d(self.theta)))
        object.__setattr__(self, "alpha", tuple(float(a) for a in np.atleast_1d(self.alpha)))
        n_theta, n_alpha = (len(names) for names in PARAMETER_NAMES[self.family])
        if self.compressible:
            n_theta += 1
        if len(self.theta) != n_theta or len(self.alpha) != n_alpha:
            raise ValueError(
                f"{self.family.value} ({self.regime.value}) expects {n_theta} theta and "
                f"{n_alpha} alpha values, got {len(self.theta)} and {len(self.alpha)}"
            )

    @property
    def compressible(self) -> bool:
        return self.regime is Regime.COMPRESSIBLE

    @property
    def penalty(self) -> float:
        return self.theta[0] if self.compressible else 0.0

    @property
    def material_theta(self) -> tuple[float, ...]:
        return self.theta[1:] if self.compressible else self.theta

    def scaled(self, factor: float) -> MaterialModel:
        return MaterialModel(self.family, tuple(factor * t for t in self.theta), self.alpha, self.regime)

    def parameter_names(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        theta_names, alpha_names = PARAMETER_NAMES[self.family]
        if self.compressible:
            theta_names = ("theta0",) + theta_names
        return theta_names, alpha_names

    def describe(self, digits: int = 2) -> str:
        """Human-readable strain energy, e.g. ``10.00 [I1 - 3] + p [J - 1]``."""
        f = f"{{:.{digits}f}}"
        bar = "b" if self.compressible else ""
        i1, i2 = f"I{bar}1", f"I{bar}2"
        th, al = self.material_theta, self.alpha
        if self.family is Family.BLATZ_KO:
            body = f"{f.format(th[0])} [{i2} - 3]"
        elif self.family is Family.DEMIRAY:
            body = f"{f.format(th[0])} [exp({f.format(al[0])} [{i1} - 3]) - 1]"
        elif self.family is Family.GENT:
            body = f"-{f.format(th[0])} ln(1 - {f.format(al[0])} [{i1} - 3])"
        elif self.family is Family.HOLZAPFEL:
            body = f"{f.format(th[0])} [exp({f.format(al[0])} [{i1} - 3]^2) - 1]"
        elif self.family is Family.MOONEY_RIVLIN:
            body = f"{f.format(th[0])} [{i1} - 3] + {f.format(th[1])} [{i2} - 3]"
        elif self.family is Family.NEO_HOOKE:
            body = f"{f.format(th[0])} [{i1} - 3]"
        else:
            e = f.format(al[0])
            lb = "lb" if self.compressible else "l"
            body = f"{f.format(th[0])} [{lb}1^{e} + {lb}2^{e} + {lb}3^{e} - 3]"
        if self.compressible:
            return f"{body} + {f.format(self.penalty)} [J - 1]^2"
        return f"{body} + p [J - 1]"


@dataclass(frozen=True)
class Invariants:
    I1: np.ndarray
    I2: np.ndarray
    J: np.ndarray
    iso_I1: np.ndarray
    iso_I2: np.ndarray
    principal_stretches: np.ndarray  # ascending along the last axis


def invariants(F) -> Invariants:
    F = np.asarray(F, dtype=float)
    J = _checked_det(F)
    C = np.swapaxes(F, -1, -2) @ F
    I1 = np.trace(C, axis1=-2, axis2=-1)
    I2 = 0.5 * (I1**2 - np.einsum("...ij,...ji->...", C, C))
    stretches = np.sqrt(np.clip(np.linalg.eigvalsh(C), 0.0, None))
    return Invariants(I1, I2, J, J ** (-2.0 / 3.0) * I1, J ** (-4.0 / 3.0) * I2, stretches)


def _checked_det(F: np.ndarray) -> np.ndarray:
    J = np.linalg.det(F)
    if np.any(~(J > 0.0)):
        raise InvalidDeformation("deformation gradient with det F <= 0")
    return J


def _exp(arg):
    if np.any(arg > EXP_ARGUMENT_CAP):
        raise ExponentOverflow(f"exponential argument {np.max(arg):.4g} exceeds {EXP_ARGUMENT_CAP}")
    return np.exp(arg)


def _gent_argument(x, alpha):
    arg = 1.0 - alpha * (x - 3.0)
    if np.any(~(arg > 0.0)):
        raise GentDomainError(f"Gent locking limit reached: 1 - alpha [I1 - 3] = {np.min(arg):.4g}")
    return arg


# Invariant-based families: W = psi(x, y) with x = I1 (or Ib1), y = I2 (or Ib2).


def _psi(model: MaterialModel, x, y):
    th, al, fam = model.material_theta, model.alpha, model.family
    if fam is Family.BLATZ_KO:
        return th[0] * (y - 3.0)
    if fam is Family.DEMIRAY:
        return th[0] * (_exp(al[0] * (x - 3.0)) - 1.0)
    if fam is Family.GENT:
        return -th[0] * np.log(_gent_argument(x, al[0]))
    if fam is Family.HOLZAPFEL:
        return th[0] * (_exp(al[0] * (x - 3.0) ** 2) - 1.0)
    if fam is Family.MOONEY_RIVLIN:
        return th[0] * (x - 3.0) + th[1] * (y - 3.0)
    if fam is Family.NEO_HOOKE:
        return th[0] * (x - 3.0)
    raise ValueError(f"{fam.value} is not an invariant-based family")


def _psi_first(model: MaterialModel, x, y):
    """(dpsi/dx, dpsi/dy)."""
    th, al, fam = model.material_theta, model.alpha, model.family
    zero = np.zeros(np.broadcast(x, y).shape)
    if fam is Family.BLATZ_KO:
        return zero, zero + th[0]
    if fam is Family.DEMIRAY:
        return th[0] * al[0] * _exp(al[0] * (x - 3.0)), zero
    if fam is Family.GENT:
        return th[0] * al[0] / _gent_argument(x, al[0]), zero
    if fam is Family.HOLZAPFEL:
        return 2.0 * th[0] * al[0] * (x - 3.0) * _exp(al[0] * (x - 3.0) ** 2), zero
    if fam is Family.MOONEY_RIVLIN:
        return zero + th[0], zero + th[1]
    if fam is Family.NEO_HOOKE:
        return zero + th[0], zero
    raise ValueError(f"{fam.value} is not an invariant-based family")


def _psi_second(model: MaterialModel, x, y):
    """(d2psi/dx2, d2psi/dxdy, d2psi/dy2)."""
    th, al, fam = model.material_theta, model.alpha, model.family
    zero = np.zeros(np.broadcast(x, y).shape)
    if fam is Family.DEMIRAY:
        return th[0] * al[0] ** 2 * _exp(al[0] * (x - 3.0)), zero, zero
    if fam is Family.GENT:
        return th[0] * al[0] ** 2 / _gent_argument(x, al[0]) ** 2, zero, zero
    if fam is Family.HOLZAPFEL:
        d = x - 3.0
        return th[0] * _exp(al[0] * d**2) * (2.0 * al[0] + 4.0 * al[0] ** 2 * d**2), zero, zero
    if fam is Family.OGDEN:
        raise ValueError("Ogden is not an invariant-based family")
    return zero, zero, zero


def _ogden_energy(model: MaterialModel, stretches, J):
    th, e = model.material_theta[0], model.alpha[0]
    lam = stretches
    if model.compressible:
        lam = stretches * J[..., None] ** (-1.0 / 3.0)
    return th * (np.sum(lam**e, axis=-1) - 3.0)


def _energy_core(model: MaterialModel, I1, I2, J, stretches):
    if model.family is Family.OGDEN:
        W = _ogden_energy(model, stretches, J)
    elif model.compressible:
        W = _psi(model, J ** (-2.0 / 3.0) * I1, J ** (-4.0 / 3.0) * I2)
    else:
        W = _psi(model, I1, I2)
    if model.compressible:
        W = W + model.penalty * (J - 1.0) ** 2
    return W


def strain_energy(model: MaterialModel, F):
    """Strain energy density at deformation gradient(s) ``F`` of shape (..., 3, 3).

    In the incompressible regime the Lagrange term is omitted; the returned
    value is the constitutive part evaluated with the plain invariants.
    """
    F = np.asarray(F, dtype=float)
    inv = invariants(F)
    W = _energy_core(model, inv.I1, inv.I2, inv.J, inv.principal_stretches)
    return float(W) if np.ndim(W) == 0 else W


def energy_from_stretches(model: MaterialModel, l1, l2, l3):
    """Strain energy as a function of principal stretches (broadcasting)."""
    l1, l2, l3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (l1, l2, l3)))
    if np.any(~(l1 > 0)) or np.any(~(l2 > 0)) or np.any(~(l3 > 0)):
        raise NonPositiveStretch("principal stretches must be positive")
    s1, s2, s3 = l1 * l1, l2 * l2, l3 * l3
    I1 = s1 + s2 + s3
    I2 = s1 * s2 + s2 * s3 + s1 * s3
    J = l1 * l2 * l3
    stretches = np.stack([l1, l2, l3], axis=-1) if model.family is Family.OGDEN else None
    return _energy_core(model, I1, I2, J, stretches)


# --------------------------------------------------------------------------
# compressible stress and tangent
# --------------------------------------------------------------------------


def _require_compressible(model: MaterialModel):
    if not model.compressible:
        raise RegimeError("piola_stress needs the compressible (penalty) regime; "
                          "incompressible stresses need a pressure, use ut_stress/ss_stress")


def _kinematics(F):
    """Invariants and their first/second derivatives with respect to F."""
    J = _checked_det(F)
    Finv = np.linalg.inv(F)
    FinvT = np.swapaxes(Finv, -1, -2)
    C = np.swapaxes(F, -1, -2) @ F
    I1 = np.einsum("...ij,...ij->...", F, F)
    I2 = 0.5 * (I1**2 - np.einsum("...ij,...ji->...", C, C))
    dI1 = 2.0 * F
    dI2 = 2.0 * (I1[..., None, None] * F - F @ C)
    dJ = J[..., None, None] * FinvT
    return J, FinvT, C, I1, I2, dI1, dI2, dJ


def _isochoric_first(J, FinvT, I, dI, beta):
    Jb = J**beta
    return Jb * I, Jb[..., None, None] * (dI + beta * I[..., None, None] * FinvT)


def piola_stress(model: MaterialModel, F):
    """First Piola-Kirchhoff stress ``dW/dF`` (compressible regime only)."""
    _require_compressible(model)
    F = np.asarray(F, dtype=float)
    if model.family is Family.OGDEN:
        return _ogden_piola(model, F)
    J, FinvT, C, I1, I2, dI1, dI2, dJ = _kinematics(F)
    x, dx = _isochoric_first(J, FinvT, I1, dI1, -2.0 / 3.0)
    y, dy = _isochoric_first(J, FinvT, I2, dI2, -4.0 / 3.0)
    p1, p2 = _psi_first(model, x, y)
    vol = 2.0 * model.penalty * (J - 1.0)
    return p1[..., None, None] * dx + p2[..., None, None] * dy + vol[..., None, None] * dJ


def _ogden_piola(model: MaterialModel, F):
    th, e = model.material_theta[0], model.alpha[0]
    J = _checked_det(F)
    C = np.swapaxes(F, -1, -2) @ F
    mu, Q = np.linalg.eigh(C)
    Cpow = np.einsum("...ik,...k,...jk->...ij", Q, mu ** (e / 2.0 - 1.0), Q)
    Cinv = np.einsum("...ik,...k,...jk->...ij", Q, 1.0 / mu, Q)
    tr = np.sum(mu ** (e / 2.0), axis=-1)
    Je = J ** (-e / 3.0)
    S = th * e * Je[..., None, None] * (Cpow - tr[..., None, None] / 3.0 * Cinv)
    S = S + (2.0 * model.penalty * (J - 1.0) * J)[..., None, None] * Cinv
    return F @ S


def piola_tangent(model: MaterialModel, F, step: float = 1e-6, plane_strain: bool = False):
    """Material tangent ``dP/dF`` with shape (..., 3, 3, 3, 3).

    Analytic for the invariant-based families; Ogden falls back to central
    differences of :func:`piola_stress`.  With ``plane_strain`` only the
    in-plane block (..., 2, 2, 2, 2) is formed; ``F`` must then have zero
    out-of-plane shear.
    """
    _require_compressible(model)
    F = np.asarray(F, dtype=float)
    n = 2 if plane_strain else 3
    if model.family is Family.OGDEN:
        A = np.empty(F.shape[:-2] + (n, n, n, n))
        for k in range(n):
            for l in range(n):
                dF = np.zeros((3, 3))
                dF[k, l] = step
                dP = piola_stress(model, F + dF) - piola_stress(model, F - dF)
                A[..., k, l] = dP[..., :n, :n] / (2 * step)
        return A

    J, FinvT, C, I1, I2, dI1, dI2, dJ = _kinematics(F)
    x, dx = _isochoric_first(J, FinvT, I1, dI1, -2.0 / 3.0)
    y, dy = _isochoric_first(J, FinvT, I2, dI2, -4.0 / 3.0)
    p1, p2 = _psi_first(model, x, y)
    p11, p12, p22 = _psi_second(model, x, y)

    cut = lambda X: X[..., :n, :n]  # noqa: E731
    Fs, FinvT, C, dI1, dI2, dJ, dx, dy = map(cut, (F, FinvT, C, dI1, dI2, dJ, dx, dy))
    eye = np.eye(n)
    outer = lambda X, Y: np.einsum("...ij,...kl->...ijkl", X, Y)  # noqa: E731
    ex = lambda a: a[..., None, None, None, None]  # noqa: E731
    # d(F^-T)_ij / dF_kl = -F^-T_il F^-T_kj
    dFinvT = -np.einsum("...il,...kj->...ijkl", FinvT, FinvT)
    d2I1 = 2.0 * np.einsum("ik,jl->ijkl", eye, eye)

    def iso_second(I, dI, d2I, beta):
        Iv = ex(I)
        return ex(J**beta) * (
            d2I
            + beta * (outer(FinvT, dI) + outer(dI, FinvT))
            + beta**2 * Iv * outer(FinvT, FinvT)
            + beta * Iv * dFinvT
        )

    A = ex(p1) * iso_second(I1, dI1, d2I1, -2.0 / 3.0)
    if model.family in (Family.BLATZ_KO, Family.MOONEY_RIVLIN):
        b = cut(F @ np.swapaxes(F, -1, -2))
        d2I2 = 2.0 * (
            2.0 * outer(Fs, Fs)
            + ex(I1) * d2I1 / 2.0
            - np.einsum("ik,...lj->...ijkl", eye, C)
            - np.einsum("...il,...kj->...ijkl", Fs, Fs)
            - np.einsum("...ik,jl->...ijkl", b, eye)
        )
        A = A + ex(p2) * iso_second(I2, dI2, d2I2, -4.0 / 3.0)
    A = A + ex(p11) * outer(dx, dx) + ex(p22) * outer(dy, dy) + ex(p12) * (outer(dx, dy) + outer(dy, dx))
    d2J = ex(J) * (outer(FinvT, FinvT) + dFinvT)
    kappa = model.penalty
    return A + 2.0 * kappa * outer(dJ, dJ) + ex(2.0 * kappa * (J - 1.0)) * d2J


# --------------------------------------------------------------------------
# homogeneous incompressible experiments
# --------------------------------------------------------------------------


def _require_incompressible(model: MaterialModel):
    if model.compressible:
        raise RegimeError("homogeneous test stresses are defined for the incompressible regime")


def ut_stress(model: MaterialModel, stretch):
    """Nominal stress P11 in incompressible uniaxial tension.

    The pressure follows from P22 = P33 = 0, which for the invariant families
    gives ``P11 = 2 (l - l^-2) (dW/dI1 + dW/dI2 / l)``.
    """
    _require_incompressible(model)
    lam = np.asarray(stretch, dtype=float)
    if np.any(~(lam > 0.0)):
        raise NonPositiveStretch("uniaxial stretch must be positive")
    if model.family is Family.OGDEN:
        th, e = model.theta[0], model.alpha[0]
        out = th * e * (lam ** (e - 1.0) - lam ** (-e / 2.0 - 1.0))
    else:
        I1 = lam**2 + 2.0 / lam
        I2 = 2.0 * lam + lam**-2
        p1, p2 = _psi_first(model, I1, I2)
        out = 2.0 * (lam - lam**-2) * (p1 + p2 / lam)
    return float(out) if np.ndim(out) == 0 else out


def ss_stress(model: MaterialModel, shear):
    """Shear stress P12 in incompressible simple shear (pressure-free)."""
    _require_incompressible(model)
    g = np.asarray(shear, dtype=float)
    if model.family is Family.OGDEN:
        th, e = model.theta[0], model.alpha[0]
        # log of the major principal stretch: sinh(L) = g / 2
        L = np.arcsinh(g / 2.0)
        out = th * e * np.sinh(e * L) / np.cosh(L)
    else:
        I = 3.0 + g**2
        p1, p2 = _psi_first(model, I, I)
        out = 2.0 * g * (p1 + p2)
    return float(out) if np.ndim(out) == 0 else out


def ogden_shear_stretches(shear):
    """Principal stretches (l1, l2, l3) of simple shear, with l1 <= 1 <= l3."""
    g = np.asarray(shear, dtype=float)
    s = 1.0 + 0.5 * g**2
    l3 = np.sqrt(s + np.sqrt(s**2 - 1.0))
    l1 = 1.0 / l3
    return l1, np.ones_like(l3), l3


def uniaxial_deformation(stretch) -> np.ndarray:
    lam = np.asarray(stretch, dtype=float)
    F = np.zeros(lam.shape + (3, 3))
    F[..., 0, 0] = lam
    F[..., 1, 1] = F[..., 2, 2] = lam**-0.5
    return F


def shear_deformation(shear) -> np.ndarray:
    g = np.asarray(shear, dtype=float)
    F = np.broadcast_to(np.eye(3), g.shape + (3, 3)).copy()
    F[..., 0, 1] = g
    return F
