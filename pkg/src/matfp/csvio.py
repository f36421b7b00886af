"""Query and export CSV files.

Schema: an optional comment line ``# protocol_hash: <hex>``, a header row, and
one row per fingerprint.  Fingerprint columns carry the canonical labels of
the protocol in fingerprint order (``UT_P11@1.0, ..., SS_P12@0.5`` or
``R1@t1, R2@t1, ..., u1_p0@t1, ...``).  Export files add the metadata columns
``record, family, theta_bar, alpha, source_norm`` in front; the reader ignores
any column that is not a fingerprint label.  Floats use ``repr`` (shortest
round-trip form), so values survive a write/read cycle bit for bit.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .database import FingerprintDatabase
from .errors import ProtocolMismatch

HASH_PREFIX = "# protocol_hash:"
META_COLUMNS = ["record", "family", "theta_bar", "alpha", "source_norm"]


def protocol_labels(db: FingerprintDatabase) -> list[str]:
    if db.kind == "supervised":
        from .supervised import HomogeneousProtocol

        return HomogeneousProtocol.from_descriptor(db.protocol).labels()
    from .unsupervised import PlateProtocol

    return PlateProtocol.from_descriptor(db.protocol).labels()


def write_queries(path: str | Path, rows, labels: list[str], protocol_hash: str | None = None) -> Path:
    path = Path(path)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with path.open("w", newline="") as fh:
        if protocol_hash:
            fh.write(f"{HASH_PREFIX} {protocol_hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(labels)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return path


def read_queries(path: str | Path, db: FingerprintDatabase | None = None) -> tuple[np.ndarray, str | None]:
    """Fingerprint rows and the declared protocol hash (if any).

    With a database the hash is checked and columns are picked by label;
    without a hash, only the fingerprint length can be checked.
    """
    lines = Path(path).read_text().splitlines()
    declared = None
    body = []
    for line in lines:
        if line.startswith(HASH_PREFIX):
            declared = line[len(HASH_PREFIX):].strip()
        elif line.strip() and not line.startswith("#"):
            body.append(line)
    reader = csv.reader(body)
    header = next(reader, None)
    if header is None:
        raise ProtocolMismatch(f"{path}: no header row")
    records = [r for r in reader]
    if db is not None:
        if declared is not None and declared != db.protocol_hash:
            raise ProtocolMismatch(f"{path}: protocol hash {declared[:12]} does not match database "
                                   f"{db.protocol_hash[:12]}")
        labels = protocol_labels(db)
        if all(lab in header for lab in labels):
            cols = [header.index(lab) for lab in labels]
        else:
            cols = [i for i, h in enumerate(header) if h not in META_COLUMNS]
            if len(cols) != db.n_f:
                raise ProtocolMismatch(f"{path}: {len(cols)} fingerprint columns, database expects {db.n_f}")
    else:
        cols = [i for i, h in enumerate(header) if h not in META_COLUMNS]
    data = np.array([[float(r[c]) for c in cols] for r in records], dtype=float).reshape(len(records), len(cols))
    return data, declared


def export_database(db: FingerprintDatabase, path: str | Path, raw: bool = True) -> Path:
    """One row per record: metadata followed by the fingerprint.

    ``raw=True`` writes the un-normalized fingerprints, which can be fed back
    as queries and must match their own records.
    """
    path = Path(path)
    labels = protocol_labels(db)
    with path.open("w", newline="") as fh:
        fh.write(f"{HASH_PREFIX} {db.protocol_hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(META_COLUMNS + labels)
        for i in range(len(db)):
            rec = db.record(i)
            f = db.raw_fingerprint(i) if raw else rec.fingerprint
            w.writerow([i, rec.family.value, " ".join(repr(t) for t in rec.theta_bar),
                        " ".join(repr(a) for a in rec.alpha), repr(rec.source_norm)]
                       + [repr(float(v)) for v in f])
    return path
