"""Command-line interface: ``matfp <command> ...``.

Exit status is 0 on success, 2 on usage errors and 1 on pipeline errors, in
which case stderr carries ``error[<Category>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import MatFPError

log = sys.stderr


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from exc


def _model(args, regime: str):
    from .models import MaterialModel

    try:
        return MaterialModel(args.model, args.theta, args.alpha, regime)
    except ValueError as exc:
        raise _Usage(str(exc)) from exc


class _Usage(Exception):
    pass


# ---------------------------------------------------------------- commands

def cmd_gen_db(args) -> int:
    from .grids import supervised_grid, unsupervised_grid

    if args.mode == "supervised":
        from .supervised import HomogeneousProtocol, generate_database

        db = generate_database(HomogeneousProtocol.default(), supervised_grid(args.grid, args.spacing))
    else:
        from .unsupervised import PlateProtocol, generate_database

        def progress(i, n):
            if i % 50 == 0 or i == n:
                print(f"  {i}/{n} solves", file=log)

        db = generate_database(unsupervised_grid(args.grid, args.spacing), PlateProtocol(refinement_level=args.level),
                               workers=args.workers, progress=progress)
    db.save(args.out)
    print(f"wrote {args.out}: kind={db.kind} n_d={len(db)} n_f={db.n_f} protocol_hash={db.protocol_hash}")
    return 0


def _prescale(rows: np.ndarray, db, force_scale: float, length_scale: float) -> np.ndarray:
    """Convert a measurement on a scaled specimen to the reference specimen."""
    rows = rows.copy()
    n0 = db.parts[0]
    rows[:, :n0] *= force_scale
    rows[:, n0:] *= length_scale
    return rows


def cmd_match(args) -> int:
    from .csvio import read_queries
    from .database import FingerprintDatabase
    from .matcher import match

    db = FingerprintDatabase.load(args.db)
    rows, declared = read_queries(args.query, db)
    rows = _prescale(rows, db, args.force_scale, args.length_scale)
    for q, row in enumerate(rows):
        res = match(row, db, k=args.top_k, sparsity_weight=args.sparsity, workers=args.workers,
                    query_hash=declared)
        if args.format == "json":
            print(json.dumps({"query": q, **res.to_dict()}))
            continue
        print(f"query {q}: {res.model.describe()}")
        print(f"  record {res.index} ({res.family.value}), similarity {res.similarity:.12g}"
              + (f", score {res.score:.12g}" if args.sparsity else ""))
        if len(res.ties) > 1:
            print(f"  tied records: {list(res.ties)} (lowest index reported)")
        print(f"  {'rank':>4} {'record':>7} {'family':<13} {'similarity':>18}")
        for r, c in enumerate(res.top_k, 1):
            print(f"  {r:>4} {c.index:>7} {c.family.value:<13} {c.similarity:>18.12f}")
    return 0


def cmd_benchmark(args) -> int:
    from .benchmark import SUPERVISED_BENCHMARKS, UNSUPERVISED_BENCHMARKS, on_grid, run_benchmark
    from .database import FingerprintDatabase
    from .grids import GridSpec

    db = FingerprintDatabase.load(args.db)
    benches = SUPERVISED_BENCHMARKS if db.kind == "supervised" else UNSUPERVISED_BENCHMARKS
    if args.on_grid:
        benches = on_grid(benches, GridSpec.from_dict(db.grid))
    report = run_benchmark(db, benches, args.noise, args.seeds, args.sparsity, args.workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / "benchmark.csv")
    report.write_summary_csv(out / "summary.csv")
    print(f"{'benchmark':<13} {'noise':>6} {'seeds':>5} {'median E_incompr':>17} {'median E_compr':>15} "
          f"{'family ok':>9}  first seed")
    for s in report.summary():
        print(f"{s['benchmark']:<13} {s['noise']:>6.2f} {s['seeds']:>5} {s['median_e_incompr']:>17.3e} "
              f"{s['median_e_compr']:>15.3e} {s['family_rate']:>9.2f}  {s['example']}")
    if not args.no_plots:
        from . import plotting

        plotting.error_distributions(report, out / "errors.png")
        plotting.family_rates(report, out / "family_rates.png")
        if db.kind == "supervised":
            from .benchmark import truth_fingerprint
            from .noise import NoiseSpec, add_noise
            from .supervised import HomogeneousProtocol

            proto = HomogeneousProtocol.from_descriptor(db.protocol)
            level = max(args.noise)
            for b in benches:
                row = next((r for r in report.select(b.name, level) if not r.error), None)
                if row is None:
                    continue
                data = add_noise(truth_fingerprint(b.model, db), NoiseSpec(level, row.seed))
                plotting.stress_strain(b.model, row.found, data, proto, out / f"stress_strain_{b.name}.png")
    print(f"report written to {out}")
    return 0


def cmd_fem_run(args) -> int:
    from .fem import LoadProgram, dump_fields, solve
    from .mesh import build_mesh

    model = _model(args, "CompressiblePenalty")
    mesh = build_mesh(refinement_level=args.level)
    sol = solve(model, mesh, LoadProgram(args.steps, args.delta_max))
    print("step,delta,R1,R2,newton_iterations")
    for t, d in enumerate(sol.deltas):
        r1, r2 = (float(v) for v in sol.reactions[t])
        print(f"{t + 1},{float(d)!r},{r1!r},{r2!r},{sol.iterations[t]}")
    if args.dump_fields:
        dump_fields(sol, mesh, args.dump_fields)
        print(f"fields written to {args.dump_fields}", file=log)
    if args.plot:
        from .plotting import plate_response

        plate_response({model.family.value: sol}, mesh.probe_angles, args.plot)
        print(f"figure written to {args.plot}", file=log)
    return 0


def cmd_export(args) -> int:
    from .csvio import export_database
    from .database import FingerprintDatabase

    db = FingerprintDatabase.load(args.db)
    export_database(db, args.out, raw=not args.normalized)
    print(f"exported {len(db)} records to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    from .benchmark import truth_fingerprint
    from .csvio import protocol_labels, write_queries
    from .database import FingerprintDatabase
    from .noise import NoiseSpec, add_noise

    db = FingerprintDatabase.load(args.db)
    model = _model(args, "IncompressibleLagrange" if db.kind == "supervised" else "CompressiblePenalty")
    clean = truth_fingerprint(model, db)
    target = "supervised_stress" if db.kind == "supervised" else "unsupervised_split"
    rows = [add_noise(clean, NoiseSpec(args.noise, args.seed + k, target), db.parts) for k in range(args.count)]
    write_queries(args.out, rows, protocol_labels(db), db.protocol_hash)
    print(f"wrote {args.count} queries for {model.describe()} to {args.out}")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matfp", description="Material model discovery by fingerprint matching.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-db", help="generate a fingerprint database")
    g.add_argument("--mode", choices=("supervised", "unsupervised"), required=True)
    g.add_argument("--grid", type=int, default=100, help="points per parameter axis (default 100)")
    g.add_argument("--spacing", choices=("linear", "log"), default="linear")
    g.add_argument("--level", type=int, default=2, help="plate mesh refinement level (unsupervised)")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_db)

    m = sub.add_parser("match", help="discover the material model of measured fingerprints")
    m.add_argument("--db", required=True)
    m.add_argument("--query", required=True, help="query CSV, one fingerprint per row")
    m.add_argument("--top-k", type=int, default=5)
    m.add_argument("--sparsity", type=float, default=0.0, help="weight of the nonzero-parameter penalty")
    m.add_argument("--format", choices=("table", "json"), default="table")
    m.add_argument("--force-scale", type=float, default=1.0, help="factor applied to the first fingerprint part")
    m.add_argument("--length-scale", type=float, default=1.0, help="factor applied to displacement parts")
    m.add_argument("--workers", type=int, default=None)
    m.set_defaults(func=cmd_match)

    b = sub.add_parser("benchmark", help="noise benchmarks against known materials")
    b.add_argument("--db", required=True)
    b.add_argument("--noise", type=_floats, default=(0.0, 0.01, 0.05))
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--sparsity", type=float, default=0.0)
    b.add_argument("--on-grid", action="store_true", help="snap benchmark truths onto the database grid")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out-dir", default="benchmark_report")
    b.add_argument("--no-plots", action="store_true")
    b.set_defaults(func=cmd_benchmark)

    f = sub.add_parser("fem-run", help="run one plate-with-hole simulation")
    f.add_argument("--model", required=True)
    f.add_argument("--theta", "--params", type=_floats, required=True, help="theta0 first, then material theta")
    f.add_argument("--alpha", type=_floats, default=())
    f.add_argument("--level", type=int, default=2)
    f.add_argument("--steps", type=int, default=10)
    f.add_argument("--delta-max", type=float, default=0.3)
    f.add_argument("--dump-fields", default=None, metavar="CSV")
    f.add_argument("--plot", default=None, metavar="PNG")
    f.set_defaults(func=cmd_fem_run)

    e = sub.add_parser("export", help="export database records as CSV")
    e.add_argument("--db", required=True)
    e.add_argument("--format", choices=("csv",), default="csv")
    e.add_argument("--out", required=True)
    e.add_argument("--normalized", action="store_true", help="write normalized instead of raw fingerprints")
    e.set_defaults(func=cmd_export)

    s = sub.add_parser("simulate", help="write query CSVs for a known material")
    s.add_argument("--db", required=True, help="database whose protocol defines the experiment")
    s.add_argument("--model", required=True)
    s.add_argument("--theta", "--params", type=_floats, required=True)
    s.add_argument("--alpha", type=_floats, default=())
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except MatFPError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except OSError as exc:
        print(f"error[IOError]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
