"""Typed errors raised by the fingerprinting pipeline.

Every error carries a ``category`` string that the CLI prints next to the
message, so scripts can dispatch on it without parsing prose.
"""

from __future__ import annotations


class MatFPError(Exception):
    category = "MatFPError"


class InvalidDeformation(MatFPError, ValueError):
    category = "InvalidDeformation"


class NonPositiveStretch(MatFPError, ValueError):
    category = "NonPositiveStretch"


class GentDomainError(MatFPError, ValueError):
    category = "GentDomainError"


class ExponentOverflow(MatFPError, OverflowError):
    category = "ExponentOverflow"


class RegimeError(MatFPError, ValueError):
    category = "RegimeError"


class ZeroFingerprint(MatFPError, ValueError):
    category = "ZeroFingerprint"


class ProtocolMismatch(MatFPError, ValueError):
    category = "ProtocolMismatch"


class MeshDegenerate(MatFPError, ValueError):
    category = "MeshDegenerate"


class NewtonDivergence(MatFPError, RuntimeError):
    category = "NewtonDivergence"


class GridPointError(MatFPError, ValueError):
    """A database grid point could not be simulated."""

    category = "GridPointError"


class DatabaseFormatError(MatFPError, ValueError):
    category = "DatabaseFormatError"
