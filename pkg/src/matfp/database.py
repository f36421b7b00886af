"""Normalized fingerprint databases and the ``.mfpd`` binary file format.

A fingerprint is split into one or more blocks ("parts"): a single stress
block for homogeneous tests, a force block followed by a displacement block
for the plate test.  Every part is normalized to unit length on its own, and
homogeneity parameters are divided by the norm of the first part only.

File layout (all little-endian)::

    b"MFPD" | u16 version | u8 kind | u8 n_parts | u32 header_len | header JSON
    u64 n_d | u32 n_f | u32 part sizes (n_parts)
    f64 fingerprint matrix (n_d x n_f, row-major)
    f64 part norms (n_d x n_parts)
    per record: u8 family | u8 n_theta | u8 n_alpha | f64 theta_bar | f64 alpha

The header JSON holds the protocol descriptor, its SHA-256 hash and the grid
used to populate the database.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatabaseFormatError, ZeroFingerprint
from .models import FAMILIES, Family, MaterialModel, Regime

MAGIC = b"MFPD"
FORMAT_VERSION = 1
KINDS = ("supervised", "unsupervised")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def protocol_hash(protocol: dict) -> str:
    return hashlib.sha256(canonical_json(protocol).encode()).hexdigest()


def split_norms(fingerprint, parts: tuple[int, ...]) -> np.ndarray:
    f = np.asarray(fingerprint, dtype=float)
    edges = np.cumsum((0,) + tuple(parts))
    if edges[-1] != f.shape[-1]:
        raise ValueError(f"fingerprint length {f.shape[-1]} does not match parts {parts}")
    return np.stack([np.linalg.norm(f[..., a:b], axis=-1) for a, b in zip(edges[:-1], edges[1:])], axis=-1)


def normalize(fingerprint, theta=(), parts: tuple[int, ...] | None = None):
    """Return (normalized fingerprint, scaled theta, part norms).

    Each part is divided by its own norm; ``theta`` is divided by the norm of
    the first part.
    """
    f = np.asarray(fingerprint, dtype=float)
    parts = (f.shape[-1],) if parts is None else tuple(parts)
    norms = split_norms(f, parts)
    if np.any(~(norms > 0.0)):
        raise ZeroFingerprint("fingerprint part with zero norm")
    scale = np.repeat(norms, parts, axis=-1)
    theta_bar = np.asarray(theta, dtype=float) / norms[..., :1] if np.size(theta) else np.asarray(theta, dtype=float)
    return f / scale, theta_bar, norms


@dataclass(frozen=True)
class DatabaseRecord:
    fingerprint: np.ndarray
    theta_bar: tuple[float, ...]
    alpha: tuple[float, ...]
    family: Family
    norms: tuple[float, ...]
    regime: Regime = Regime.INCOMPRESSIBLE

    @property
    def source_norm(self) -> float:
        return self.norms[0]

    def model(self, scale: float = 1.0) -> MaterialModel:
        return MaterialModel(self.family, tuple(scale * t for t in self.theta_bar), self.alpha, self.regime)


@dataclass
class FingerprintDatabase:
    kind: str
    protocol: dict
    parts: tuple[int, ...]
    matrix: np.ndarray
    norms: np.ndarray
    families: np.ndarray
    theta_bar: list[tuple[float, ...]]
    alpha: list[tuple[float, ...]]
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown database kind {self.kind!r}")
        self.parts = tuple(int(p) for p in self.parts)
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        self.norms = np.ascontiguousarray(self.norms, dtype=np.float64).reshape(len(self.matrix), len(self.parts))
        self.families = np.asarray(self.families, dtype=np.int64)
        self.matrix.setflags(write=False)

    @classmethod
    def from_raw(cls, kind: str, protocol: dict, parts, raw: np.ndarray,
                 models: list[MaterialModel], grid: dict | None = None) -> FingerprintDatabase:
        """Normalize raw fingerprints (one row per model) into a database."""
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        fbar, _, norms = normalize(raw, (), parts)
        theta_bar = [tuple(float(t) / n for t in m.theta) for m, n in zip(models, norms[:, 0])]
        return cls(kind, protocol, tuple(parts), fbar, norms,
                   np.array([m.family.code for m in models], dtype=np.int64),
                   theta_bar, [m.alpha for m in models], grid or {})

    @property
    def regime(self) -> Regime:
        return Regime.INCOMPRESSIBLE if self.kind == "supervised" else Regime.COMPRESSIBLE

    @property
    def protocol_hash(self) -> str:
        return protocol_hash(self.protocol)

    @property
    def n_f(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.matrix)

    def record(self, i: int) -> DatabaseRecord:
        return DatabaseRecord(self.matrix[i], self.theta_bar[i], self.alpha[i], FAMILIES[self.families[i]],
                              tuple(float(v) for v in self.norms[i]), self.regime)

    def records(self):
        return (self.record(i) for i in range(len(self)))

    def raw_fingerprint(self, i: int) -> np.ndarray:
        """Undo the normalization of record ``i``."""
        return self.matrix[i] * np.repeat(self.norms[i], self.parts)

    def nonzero_theta(self) -> np.ndarray:
        return np.array([sum(1 for t in th if t != 0.0) for th in self.theta_bar], dtype=float)

    def family_counts(self) -> dict[str, int]:
        codes, counts = np.unique(self.families, return_counts=True)
        return {FAMILIES[c].value: int(k) for c, k in zip(codes, counts)}

    # ------------------------------------------------------------------ io

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        header = canonical_json({"protocol": self.protocol, "protocol_hash": self.protocol_hash,
                                 "grid": self.grid}).encode()
        with path.open("wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<HBBI", FORMAT_VERSION, KINDS.index(self.kind), len(self.parts), len(header)))
            fh.write(header)
            fh.write(struct.pack("<QI", len(self), self.n_f))
            fh.write(struct.pack(f"<{len(self.parts)}I", *self.parts))
            fh.write(self.matrix.astype("<f8").tobytes())
            fh.write(self.norms.astype("<f8").tobytes())
            for code, th, al in zip(self.families, self.theta_bar, self.alpha):
                fh.write(struct.pack("<BBB", int(code), len(th), len(al)))
                fh.write(np.asarray(th + al, dtype="<f8").tobytes())
        return path

    @classmethod
    def load(cls, path: str | Path) -> FingerprintDatabase:
        data = Path(path).read_bytes()
        if data[:4] != MAGIC:
            raise DatabaseFormatError(f"{path}: not a fingerprint database (bad magic)")
        pos = 4
        version, kind, n_parts, hlen = struct.unpack_from("<HBBI", data, pos)
        if version != FORMAT_VERSION:
            raise DatabaseFormatError(f"{path}: unsupported format version {version}")
        pos += struct.calcsize("<HBBI")
        header = json.loads(data[pos:pos + hlen].decode())
        pos += hlen
        n_d, n_f = struct.unpack_from("<QI", data, pos)
        pos += struct.calcsize("<QI")
        parts = struct.unpack_from(f"<{n_parts}I", data, pos)
        pos += 4 * n_parts
        matrix = np.frombuffer(data, dtype="<f8", count=n_d * n_f, offset=pos).reshape(n_d, n_f)
        pos += 8 * n_d * n_f
        norms = np.frombuffer(data, dtype="<f8", count=n_d * n_parts, offset=pos).reshape(n_d, n_parts)
        pos += 8 * n_d * n_parts
        families, theta_bar, alpha = [], [], []
        for _ in range(n_d):
            code, nt, na = struct.unpack_from("<BBB", data, pos)
            pos += 3
            vals = np.frombuffer(data, dtype="<f8", count=nt + na, offset=pos)
            pos += 8 * (nt + na)
            families.append(code)
            theta_bar.append(tuple(float(v) for v in vals[:nt]))
            alpha.append(tuple(float(v) for v in vals[nt:]))
        if pos != len(data):
            raise DatabaseFormatError(f"{path}: {len(data) - pos} trailing bytes")
        db = cls(KINDS[kind], header["protocol"], parts, matrix.astype(np.float64), norms.astype(np.float64),
                 np.array(families), theta_bar, alpha, header.get("grid", {}))
        if db.protocol_hash != header.get("protocol_hash"):
            raise DatabaseFormatError(f"{path}: protocol hash does not match its descriptor")
        return db
