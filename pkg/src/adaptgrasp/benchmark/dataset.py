"""Benchmark object set loading and validation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from ..fixtures import ChecksumMismatch, read_bytes, sha256_bytes, verify
from ..physics import G, ObjectModel

DEFAULT_FILE = "objects.csv"
EXPECTED_ROWS = 12
UNIFORM_MU = 0.33
F_MIN_REL_TOL = 0.03

COLUMNS = [
    "name", "label", "description", "input_phrase", "rest_width[mm]", "mass[g]",
    "mu", "k_true[N/m]", "f_damage[N]", "slip_budget[mm]", "width_bias[mm]",
    "f_min_ref[N]", "deformation_note",
]

__all__ = ["BenchmarkObject", "SchemaError", "ChecksumMismatch", "load_dataset", "find_object"]


class SchemaError(ValueError):
    def __init__(self, line: int, field: str, message: str = ""):
        super().__init__(f"line {line}, field {field!r}: {message}".rstrip(": "))
        self.line = line
        self.field = field


class UnknownObject(KeyError):
    def __str__(self):
        return f"unknown object: {self.args[0]!r}"


@dataclass(frozen=True)
class BenchmarkObject:
    model: ObjectModel
    label: str
    input_phrase: str
    f_min_ref: float
    deformation_note: str
    width_bias: float = -1.0  # perception error in mm, applied by the suite

    @property
    def name(self) -> str:
        return self.model.name

    def aliases(self) -> set[str]:
        return {
            a.strip().lower()
            for a in (self.name, self.label, self.model.description, self.input_phrase)
            if a and a.strip()
        }


def printed_precision_ok(computed: float, printed_text: str, rel_tol: float = F_MIN_REL_TOL) -> bool:
    """Relative agreement, or agreement at the printed number of decimals."""
    printed = float(printed_text)
    if abs(computed - printed) <= rel_tol * abs(printed):
        return True
    decimals = len(printed_text.split(".")[1]) if "." in printed_text else 0
    return abs(computed - printed) <= 0.5 * 10**-decimals + 1e-12


def _num(row: dict, key: str, line: int) -> float:
    text = row.get(key)
    if text is None or text.strip() == "":
        raise SchemaError(line, key, "missing value")
    try:
        return float(text)
    except ValueError:
        raise SchemaError(line, key, f"not a number: {text!r}") from None


def load_dataset(path: str | Path | None = None) -> list[BenchmarkObject]:
    """Load and validate the twelve benchmark objects."""
    if path is None:
        data = read_bytes(DEFAULT_FILE)
        verify(DEFAULT_FILE, data)
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise SchemaError(0, "path", str(e)) from None
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    missing = [c for c in COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise SchemaError(1, missing[0], "column absent from header")

    objects = []
    for line, row in enumerate(reader, start=2):
        mass = _num(row, "mass[g]", line)
        try:
            model = ObjectModel(
                name=row["name"].strip(),
                rest_width=_num(row, "rest_width[mm]", line),
                mass=mass,
                mu=_num(row, "mu", line),
                k_true=_num(row, "k_true[N/m]", line),
                f_damage=_num(row, "f_damage[N]", line),
                slip_budget=_num(row, "slip_budget[mm]", line),
                description=row["description"].strip(),
            )
        except ValueError as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(line, "name", str(e)) from None
        f_ref_text = row["f_min_ref[N]"].strip()
        f_ref = _num(row, "f_min_ref[N]", line)
        if not printed_precision_ok(mass * 1e-3 * G / UNIFORM_MU, f_ref_text):
            raise SchemaError(line, "f_min_ref[N]", "inconsistent with mass at mu = 0.33")
        objects.append(
            BenchmarkObject(
                model=model,
                label=row["label"].strip(),
                input_phrase=row["input_phrase"].strip(),
                f_min_ref=f_ref,
                deformation_note=row["deformation_note"].strip(),
                width_bias=_num(row, "width_bias[mm]", line),
            )
        )
    if len(objects) != EXPECTED_ROWS:
        raise SchemaError(len(objects) + 1, "rows", f"expected {EXPECTED_ROWS} objects, found {len(objects)}")
    names = [o.name for o in objects]
    if len(set(names)) != len(names):
        raise SchemaError(0, "name", "duplicate object names")
    return objects


def find_object(query: str, objects: list[BenchmarkObject]) -> BenchmarkObject:
    q = query.strip().lower()
    for o in objects:
        if q in o.aliases():
            return o
    raise UnknownObject(query)


def dataset_digest(path: str | Path | None = None) -> str:
    data = read_bytes(DEFAULT_FILE) if path is None else Path(path).read_bytes()
    return sha256_bytes(data)
