"""Sweep tables and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

CSV_HEADER = ("axis", "r2", "t2", "defect")


def fmt(x: float) -> str:
    """Full double precision, '.' decimal, locale independent."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


@dataclass
class SweepTable:
    axis: str
    values: np.ndarray
    r2: np.ndarray
    t2: np.ndarray
    status: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.r2 = np.asarray(self.r2, dtype=float)
        self.t2 = np.asarray(self.t2, dtype=float)
        if not self.status:
            self.status = ["ok"] * len(self.values)

    def __len__(self):
        return len(self.values)

    @property
    def defect(self) -> np.ndarray:
        return 1.0 - self.r2 - self.t2

    def rows(self):
        for v, r2, t2, d in zip(self.values, self.r2, self.t2, self.defect):
            yield v, r2, t2, d

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows():
            writer.writerow([fmt(x) for x in row])
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        return [
            {"axis": float(v), "r2": float(r2), "t2": float(t2), "defect": float(d), "status": s}
            for (v, r2, t2, d), s in zip(self.rows(), self.status)
        ]

    def to_json(self) -> str:
        return json.dumps({"axis_name": self.axis, "rows": self.to_records()}, indent=1,
                          allow_nan=True)

    @classmethod
    def from_csv(cls, text: str, axis: str = "axis") -> "SweepTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        data = np.array([[float(x) for x in row] for row in reader], dtype=float).reshape(-1, 4)
        return cls(axis, data[:, 0], data[:, 1], data[:, 2])


def write_series_csv(path_or_buf, columns: dict) -> None:
    """Write equal-length named columns (complex values are split into re/im)."""
    names, cols = [], []
    for name, col in columns.items():
        col = np.asarray(col)
        if np.iscomplexobj(col):
            names += [f"{name}_re", f"{name}_im"]
            cols += [col.real, col.imag]
        else:
            names.append(name)
            cols.append(col)
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*cols):
            writer.writerow([fmt(x) for x in row])
    finally:
        if own:
            fh.close()
