"""Noise benchmarks: simulate a known material, perturb, match, score."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .database import FingerprintDatabase
from .errors import MatFPError
from .grids import GridSpec, snap_to_grid
from .matcher import match
from .metrics import e_compr, e_incompr
from .models import Family, MaterialModel, Regime
from .noise import NoiseSpec, add_noise
from .supervised import HomogeneousProtocol, simulate_fingerprint

NOISE_LEVELS = (0.0, 0.01, 0.05)


@dataclass(frozen=True)
class Benchmark:
    name: str
    model: MaterialModel


def _inc(family, theta, alpha=()):
    return Benchmark(Family(family).value, MaterialModel(family, theta, alpha, Regime.INCOMPRESSIBLE))


def _comp(family, theta, alpha=()):
    return Benchmark(Family(family).value, MaterialModel(family, theta, alpha, Regime.COMPRESSIBLE))


# ground-truth materials of the homogeneous and plate benchmarks
SUPERVISED_BENCHMARKS = (
    _inc("BlatzKo", (50.0,)),
    _inc("Demiray", (10.0,), (8.0,)),
    _inc("MooneyRivlin", (10.0, 40.0)),
    _inc("NeoHooke", (10.0,)),
    _inc("Ogden", (5.0,), (8.0,)),
)
UNSUPERVISED_BENCHMARKS = (
    _comp("BlatzKo", (5.0, 50.0)),
    _comp("Demiray", (5.0, 10.0), (8.0,)),
    _comp("MooneyRivlin", (20.0, 10.0, 40.0)),
    _comp("NeoHooke", (20.0, 10.0)),
)


def on_grid(benchmarks, grid: GridSpec) -> tuple[Benchmark, ...]:
    """Replace every truth by its closest representable ``c * grid point``."""
    return tuple(Benchmark(b.name, snap_to_grid(b.model, grid)) for b in benchmarks)


def family_matches(truth: MaterialModel, found: MaterialModel, alpha_tol: float = 0.5) -> bool:
    """Same family, or Neo-Hooke / Ogden with exponent close to 2."""
    if truth.family is found.family:
        return True
    pair = {truth.family, found.family}
    if pair == {Family.NEO_HOOKE, Family.OGDEN}:
        ogden = truth if truth.family is Family.OGDEN else found
        return abs(ogden.alpha[0] - 2.0) <= alpha_tol
    return False


@dataclass(frozen=True)
class BenchmarkRow:
    benchmark: str
    noise: float
    seed: int
    truth: MaterialModel
    found: MaterialModel | None
    index: int = -1
    similarity: float = float("nan")
    e_incompr: float = float("nan")
    e_compr: float = float("nan")
    error: str = ""

    @property
    def family_ok(self) -> bool:
        return self.found is not None and family_matches(self.truth, self.found)


@dataclass
class BenchmarkReport:
    kind: str
    rows: list[BenchmarkRow] = field(default_factory=list)

    def select(self, benchmark: str, noise: float) -> list[BenchmarkRow]:
        return [r for r in self.rows if r.benchmark == benchmark and r.noise == noise]

    def summary(self) -> list[dict]:
        out = []
        keys = dict.fromkeys((r.benchmark, r.noise) for r in self.rows)
        for name, level in keys:
            rows = self.select(name, level)
            ok = [r for r in rows if not r.error]
            out.append({
                "benchmark": name,
                "noise": level,
                "seeds": len(rows),
                "failed": len(rows) - len(ok),
                "median_e_incompr": float(np.median([r.e_incompr for r in ok])) if ok else float("nan"),
                "median_e_compr": float(np.median([r.e_compr for r in ok])) if ok else float("nan"),
                "family_rate": float(np.mean([r.family_ok for r in ok])) if ok else 0.0,
                "example": ok[0].found.describe() if ok else "",
            })
        return out

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["benchmark", "noise", "seed", "truth", "family", "theta", "alpha", "index",
                        "similarity", "e_incompr", "e_compr", "error"])
            for r in self.rows:
                f = r.found
                w.writerow([r.benchmark, repr(r.noise), r.seed, r.truth.describe(),
                            f.family.value if f else "", " ".join(repr(t) for t in f.theta) if f else "",
                            " ".join(repr(a) for a in f.alpha) if f else "", r.index, repr(r.similarity),
                            repr(r.e_incompr), repr(r.e_compr), r.error])
        return path

    def write_summary_csv(self, path: str | Path) -> Path:
        path = Path(path)
        rows = self.summary()
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["benchmark"], lineterminator="\n")
            w.writeheader()
            for row in rows:
                w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return path


def truth_fingerprint(model: MaterialModel, db: FingerprintDatabase) -> np.ndarray:
    if db.kind == "supervised":
        return simulate_fingerprint(model, HomogeneousProtocol.from_descriptor(db.protocol)).values
    from .unsupervised import PlateProtocol, fem_fingerprint

    return fem_fingerprint(model, PlateProtocol.from_descriptor(db.protocol)).values


def _evaluate(bench: Benchmark, clean: np.ndarray, db: FingerprintDatabase, level: float, seed: int,
              sparsity_weight: float) -> BenchmarkRow:
    target = "supervised_stress" if db.kind == "supervised" else "unsupervised_split"
    try:
        query = add_noise(clean, NoiseSpec(level, seed, target), db.parts)
        res = match(query, db, k=1, sparsity_weight=sparsity_weight, workers=1)
        ei = e_incompr(bench.model, res.model)
        ec = e_compr(bench.model, res.model) if bench.model.compressible else float("nan")
        return BenchmarkRow(bench.name, level, seed, bench.model, res.model, res.index, res.similarity, ei, ec)
    except (MatFPError, ZeroDivisionError, FloatingPointError) as exc:
        return BenchmarkRow(bench.name, level, seed, bench.model, None, error=f"{type(exc).__name__}: {exc}")


def run_benchmark(db: FingerprintDatabase, benchmarks=None, noise_levels=NOISE_LEVELS, seeds: int = 1,
                  sparsity_weight: float = 0.0, workers: int = 1) -> BenchmarkReport:
    """Rows for every (benchmark, noise level, seed) in that order.

    Seeds run ``0 .. seeds-1``; the noise-free level uses a single seed.
    Pipeline errors are stored on their row and do not stop the run.
    """
    if benchmarks is None:
        benchmarks = SUPERVISED_BENCHMARKS if db.kind == "supervised" else UNSUPERVISED_BENCHMARKS
    tasks = []
    for bench in benchmarks:
        try:
            clean = truth_fingerprint(bench.model, db)
        except MatFPError as exc:
            tasks.extend((bench, None, lvl, s, f"{type(exc).__name__}: {exc}")
                         for lvl in noise_levels for s in range(1 if lvl == 0 else seeds))
            continue
        tasks.extend((bench, clean, lvl, s, "") for lvl in noise_levels for s in range(1 if lvl == 0 else seeds))

    def work(task):
        bench, clean, lvl, s, err = task
        if err:
            return BenchmarkRow(bench.name, lvl, s, bench.model, None, error=err)
        return _evaluate(bench, clean, db, lvl, s, sparsity_weight)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(work, tasks))
    else:
        rows = [work(t) for t in tasks]
    return BenchmarkReport(db.kind, rows)
