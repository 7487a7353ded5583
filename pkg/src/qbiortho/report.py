"""Verification report rows and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

EXACT_ZERO = "exact-zero"
STATUSES = ("pass", "fail", "skipped")
CSV_COLUMNS = ("identity_id", "inputs", "computed", "reference", "residual", "status", "runtime_ms")


def format_value(value) -> str:
    """Canonical string for a scalar: exact rationals as num/den, floats via repr."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        if value.imag == 0:
            return repr(value.real)
        return f"{value.real!r}{value.imag:+.17g}j"
    return repr(float(value))


@dataclass
class VerificationReport:
    identity_id: str
    inputs: dict
    computed: str
    reference: str
    residual: object  # float or EXACT_ZERO
    status: str
    runtime_ms: int
    notes: str = field(default="")

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        self.inputs = {str(k): str(v) for k, v in self.inputs.items()}
        if self.residual != EXACT_ZERO:
            self.residual = float(self.residual)

    def inputs_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.inputs.items()))

    def sort_key(self) -> tuple:
        return (self.identity_id, self.inputs_string())

    def to_dict(self) -> dict:
        out = asdict(self)
        # strict JSON has no NaN/Infinity; float() reads "nan" and "inf" back
        if isinstance(self.residual, float) and not math.isfinite(self.residual):
            out["residual"] = repr(self.residual)
        return out


def to_json(rows: list[VerificationReport]) -> str:
    return json.dumps([r.to_dict() for r in rows], sort_keys=True, indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> list[VerificationReport]:
    return [VerificationReport(**d) for d in json.loads(text)]


def to_csv(rows: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        residual = r.residual if r.residual == EXACT_ZERO else repr(r.residual)
        writer.writerow([r.identity_id, r.inputs_string(), r.computed, r.reference, residual, r.status,
                         r.runtime_ms])
    return buf.getvalue()


def from_csv(text: str) -> list[VerificationReport]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        inputs = dict(item.split("=", 1) for item in rec["inputs"].split(";") if item)
        rows.append(VerificationReport(rec["identity_id"], inputs, rec["computed"], rec["reference"],
                                       rec["residual"], rec["status"], int(rec["runtime_ms"])))
    return rows
