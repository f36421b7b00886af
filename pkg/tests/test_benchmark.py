import numpy as np
import pytest

from matfp.benchmark import (
    SUPERVISED_BENCHMARKS,
    UNSUPERVISED_BENCHMARKS,
    Benchmark,
    family_matches,
    on_grid,
    run_benchmark,
)
from matfp.grids import supervised_grid, unsupervised_grid
from matfp.models import MaterialModel

ON_GRID_SUPERVISED = [b for b in SUPERVISED_BENCHMARKS if b.name != "MooneyRivlin"]


def test_benchmarks_on_supervised_grid():
    grid = supervised_grid()
    for b in ON_GRID_SUPERVISED:
        assert on_grid([b], grid)[0].model == b.model


def test_snapping_moves_off_grid_truths():
    snapped = on_grid(UNSUPERVISED_BENCHMARKS, unsupervised_grid(10))
    assert snapped[0].model == UNSUPERVISED_BENCHMARKS[0].model  # Blatz-Ko ratio 0.1 is on the grid
    assert snapped[1].model.alpha == pytest.approx((7.8,))
    assert snapped[1].model.theta[1] == 10.0


def test_noise_free_exact(supervised_db):
    report = run_benchmark(supervised_db, ON_GRID_SUPERVISED, noise_levels=(0.0,))
    for row in report.rows:
        assert row.found.family is row.truth.family
        assert np.allclose(row.found.theta, row.truth.theta, rtol=1e-12)
        assert row.found.alpha == row.truth.alpha
        assert row.e_incompr <= 1e-12


def test_report_deterministic(supervised_db, tmp_path):
    a = run_benchmark(supervised_db, seeds=4).write_csv(tmp_path / "a.csv")
    b = run_benchmark(supervised_db, seeds=4, workers=3).write_csv(tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_row_errors_do_not_abort(supervised_db):
    bad = Benchmark("Gent-bad", MaterialModel("Gent", 1.0, 2.0))
    report = run_benchmark(supervised_db, [bad, SUPERVISED_BENCHMARKS[0]], noise_levels=(0.0, 0.01), seeds=2)
    assert all(r.error.startswith("GentDomainError") for r in report.rows if r.benchmark == "Gent-bad")
    assert all(not r.error for r in report.rows if r.benchmark == "BlatzKo")
    assert [s["failed"] for s in report.summary()] == [1, 2, 0, 0]


def test_median_error_monotone_in_noise(supervised_db):
    report = run_benchmark(supervised_db, seeds=100)
    for b in SUPERVISED_BENCHMARKS:
        med = [np.median([r.e_incompr for r in report.select(b.name, lvl)]) for lvl in (0.0, 0.01, 0.05)]
        assert med[0] <= med[1] <= med[2], (b.name, med)


def test_neo_hooke_five_percent_regime(supervised_db):
    nh = next(b for b in SUPERVISED_BENCHMARKS if b.name == "NeoHooke")
    rows = run_benchmark(supervised_db, [nh], noise_levels=(0.05,), seeds=100).rows
    families = {r.found.family.value for r in rows}
    assert max(r.e_incompr for r in rows) <= 0.15
    assert families <= {"NeoHooke", "Ogden", "Demiray"}, sorted(families)


def test_family_equivalence():
    nh = MaterialModel("NeoHooke", 10.0)
    assert family_matches(nh, MaterialModel("Ogden", 12.5, 1.8))
    assert not family_matches(nh, MaterialModel("Ogden", 12.5, 3.0))
    assert not family_matches(nh, MaterialModel("Gent", 12.5, 0.1))
