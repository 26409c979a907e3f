"""Coincidence records: row type, column store, JSON Lines round trip."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class CoincidenceRecord:
    pair_id: int
    emission_t: float
    t_meas_a: float
    t_meas_b: float
    setting_a: int
    setting_b: int
    retarded_a: int
    retarded_b: int
    outcome_a: int
    outcome_b: int
    internal_a: bool
    internal_b: bool
    template_a: Optional[int] = None
    template_b: Optional[int] = None

    def __post_init__(self) -> None:
        if self.outcome_a not in (-1, 1) or self.outcome_b not in (-1, 1):
            raise ValueError("outcomes must be +-1")
        if not self.internal_a and self.retarded_a != self.setting_a:
            raise ValueError("non-internal end must have retarded == actual setting")
        if not self.internal_b and self.retarded_b != self.setting_b:
            raise ValueError("non-internal end must have retarded == actual setting")


FIELDS = [f.name for f in fields(CoincidenceRecord)]

_DTYPES = {
    "pair_id": np.int64,
    "emission_t": np.float64,
    "t_meas_a": np.float64,
    "t_meas_b": np.float64,
    "setting_a": np.int16,
    "setting_b": np.int16,
    "retarded_a": np.int16,
    "retarded_b": np.int16,
    "outcome_a": np.int8,
    "outcome_b": np.int8,
    "internal_a": bool,
    "internal_b": bool,
    "template_a": np.int64,  # -1 encodes "no template"
    "template_b": np.int64,
}


class RecordTable(Sequence):
    """Column store for large record logs.

    Analysis code works on the columns; iteration yields CoincidenceRecord rows.
    """

    def __init__(self, **cols) -> None:
        missing = set(FIELDS) - set(cols)
        if missing:
            raise ValueError(f"missing columns {sorted(missing)}")
        n = None
        for name in FIELDS:
            arr = np.asarray(cols[name], dtype=_DTYPES[name])
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise ValueError("column lengths differ")
            setattr(self, name, arr)

    @classmethod
    def from_records(cls, records: Iterable[CoincidenceRecord]) -> RecordTable:
        records = list(records)
        cols = {name: [getattr(r, name) for r in records] for name in FIELDS}
        for t in ("template_a", "template_b"):
            cols[t] = [-1 if v is None else v for v in cols[t]]
        return cls(**cols)

    @classmethod
    def coerce(cls, records) -> RecordTable:
        return records if isinstance(records, RecordTable) else cls.from_records(records)

    @classmethod
    def concat(cls, tables: Sequence[RecordTable]) -> RecordTable:
        return cls(**{name: np.concatenate([getattr(t, name) for t in tables]) for name in FIELDS})

    def __len__(self) -> int:
        return len(self.pair_id)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.take(np.arange(len(self))[i])
        row = {name: getattr(self, name)[i].item() for name in FIELDS}
        for t in ("template_a", "template_b"):
            if row[t] < 0:
                row[t] = None
        return CoincidenceRecord(**row)

    def __iter__(self) -> Iterator[CoincidenceRecord]:
        for i in range(len(self)):
            yield self[i]

    def take(self, idx) -> RecordTable:
        return RecordTable(**{name: getattr(self, name)[idx] for name in FIELDS})

    def select(self, mask: np.ndarray) -> RecordTable:
        return self.take(np.flatnonzero(mask))

    def equals(self, other: RecordTable) -> bool:
        return len(self) == len(other) and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in FIELDS
        )


def record_to_json(rec: CoincidenceRecord) -> str:
    return json.dumps(asdict(rec))


def write_jsonl(path: str | Path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(record_to_json(rec) + "\n")


def read_jsonl(path: str | Path) -> RecordTable:
    with open(path) as fh:
        rows = [CoincidenceRecord(**json.loads(line)) for line in fh if line.strip()]
    return RecordTable.from_records(rows)
