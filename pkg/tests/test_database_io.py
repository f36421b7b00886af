import numpy as np
import pytest

from matfp.csvio import export_database, protocol_labels, read_queries, write_queries
from matfp.database import FingerprintDatabase, protocol_hash
from matfp.errors import DatabaseFormatError, ProtocolMismatch
from matfp.matcher import match
from matfp.supervised import HomogeneousProtocol, simulate_fingerprint
from matfp.models import MaterialModel


def test_binary_round_trip_bitwise(supervised_db, tmp_path):
    path = supervised_db.save(tmp_path / "db.mfpd")
    back = FingerprintDatabase.load(path)
    assert back.kind == supervised_db.kind
    assert back.matrix.tobytes() == supervised_db.matrix.tobytes()
    assert back.norms.tobytes() == supervised_db.norms.tobytes()
    assert np.array_equal(back.families, supervised_db.families)
    assert back.theta_bar == supervised_db.theta_bar and back.alpha == supervised_db.alpha
    assert back.protocol == supervised_db.protocol and back.grid == supervised_db.grid
    assert back.save(tmp_path / "again.mfpd").read_bytes() == path.read_bytes()


def test_unsupervised_round_trip(desk_db, tmp_path):
    back = FingerprintDatabase.load(desk_db.save(tmp_path / "u.mfpd"))
    assert back.parts == (20, 220)
    assert back.matrix.tobytes() == desk_db.matrix.tobytes()
    assert back.protocol_hash == desk_db.protocol_hash


def test_file_header(supervised_db, tmp_path):
    data = supervised_db.save(tmp_path / "db.mfpd").read_bytes()
    assert data[:4] == b"MFPD"
    assert int.from_bytes(data[4:6], "little") == 1


def test_bad_magic(tmp_path):
    p = tmp_path / "x.mfpd"
    p.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(DatabaseFormatError):
        FingerprintDatabase.load(p)


def test_truncated_file(supervised_db, tmp_path):
    p = supervised_db.save(tmp_path / "db.mfpd")
    p.write_bytes(p.read_bytes()[:-5])
    with pytest.raises(Exception):
        FingerprintDatabase.load(p)


def test_protocol_hash_is_canonical():
    a = {"b": [1.0, 2.0], "a": 1}
    assert protocol_hash(a) == protocol_hash({"a": 1, "b": [1.0, 2.0]})
    assert protocol_hash(a) != protocol_hash({"a": 1, "b": [1.0, 2.5]})


def test_query_csv_round_trip_lossless(supervised_db, tmp_path):
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(4, 30)) * 10.0 ** rng.integers(-8, 8, size=(4, 30))
    p = write_queries(tmp_path / "q.csv", rows, protocol_labels(supervised_db), supervised_db.protocol_hash)
    back, declared = read_queries(p, supervised_db)
    assert back.tobytes() == rows.tobytes()
    assert declared == supervised_db.protocol_hash


def test_query_hash_mismatch(supervised_db, tmp_path):
    p = write_queries(tmp_path / "q.csv", np.ones(30), protocol_labels(supervised_db), "0" * 64)
    with pytest.raises(ProtocolMismatch):
        read_queries(p, supervised_db)


def test_query_without_hash_checks_length(supervised_db, tmp_path):
    p = write_queries(tmp_path / "q.csv", np.ones(29), [f"c{i}" for i in range(29)])
    with pytest.raises(ProtocolMismatch):
        read_queries(p, supervised_db)


def test_labels_follow_block_order(supervised_db):
    labels = protocol_labels(supervised_db)
    assert labels[0] == "UT_P11@1.0" and labels[15] == "SS_P12@0.0" and len(labels) == 30


def test_export_reimport_self_match(supervised_db, tmp_path):
    p = export_database(supervised_db, tmp_path / "e.csv")
    rows, declared = read_queries(p, supervised_db)
    assert rows.shape == (502, 30)
    for i in range(0, 502, 25):
        res = match(rows[i], supervised_db, query_hash=declared)
        assert res.similarity == pytest.approx(1.0, abs=1e-12)
        assert supervised_db.matrix[res.index].tobytes() == supervised_db.matrix[i].tobytes() or res.index == i


def test_query_from_simulation_matches(supervised_db, tmp_path):
    f = simulate_fingerprint(MaterialModel("Ogden", 5.0, 8.0), HomogeneousProtocol.default()).values
    p = write_queries(tmp_path / "q.csv", f, protocol_labels(supervised_db), supervised_db.protocol_hash)
    rows, h = read_queries(p, supervised_db)
    res = match(rows[0], supervised_db, query_hash=h)
    assert res.model.family.value == "Ogden" and res.model.theta[0] == pytest.approx(5.0, rel=1e-12)
