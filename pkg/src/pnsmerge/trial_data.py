"""Trial summaries: count tables, binary marginals and trivariate tables.

A trial studies one binary treatment ``W`` and the shared binary outcome
``Z``.  Counts are indexed ``n[w][z]``; the derived :class:`BinaryMarginal`
stores ``P(Z=0 | W=0)``, ``P(Z=0 | W=1)`` and ``P(W=0)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateTreatmentMarginal,
    EmptyTreatmentArm,
    MalformedPayload,
    NegativeCount,
    OutOfRange,
)

TOL = 1e-12
_KEYS = ("n00", "n01", "n10", "n11")


@dataclass(frozen=True)
class CountTable:
    """Four cell counts ``n[w][z]`` of a two-arm trial with binary outcome."""

    n: tuple[tuple[int, int], tuple[int, int]]
    treatment: str = "W"
    outcome: str = "Z"

    def __post_init__(self):
        cells = [self.n[w][z] for w in (0, 1) for z in (0, 1)]
        for value in cells:
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise MalformedPayload(f"count {value!r} is not an integer")
            if value < 0:
                raise NegativeCount(f"negative count {value}")
        for w in (0, 1):
            if self.n[w][0] + self.n[w][1] == 0:
                raise EmptyTreatmentArm(f"treatment arm {self.treatment}={w} has no observations")

    @classmethod
    def from_cells(cls, n00, n01, n10, n11, treatment="W", outcome="Z"):
        return cls(((n00, n01), (n10, n11)), treatment, outcome)

    @property
    def total(self) -> int:
        return sum(self.n[0]) + sum(self.n[1])


@dataclass(frozen=True)
class BinaryMarginal:
    """Distribution of one binary treatment and the binary outcome.

    Constructed values are validated; ``p_w0`` must lie strictly inside (0, 1).
    """

    p_z0_w0: float
    p_z0_w1: float
    p_w0: float

    def __post_init__(self):
        validate_marginal(self)

    @property
    def p_w1(self) -> float:
        return 1.0 - self.p_w0

    @property
    def p_z0(self) -> float:
        """Outcome marginal ``P(Z=0)`` implied by this trial."""
        return self.p_w0 * self.p_z0_w0 + self.p_w1 * self.p_z0_w1

    def joint(self) -> np.ndarray:
        """Return ``P(W=w, Z=z)`` as a 2x2 array indexed ``[w][z]``."""
        return np.array(
            [
                [self.p_w0 * self.p_z0_w0, self.p_w0 * (1.0 - self.p_z0_w0)],
                [self.p_w1 * self.p_z0_w1, self.p_w1 * (1.0 - self.p_z0_w1)],
            ]
        )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_z0_w0, self.p_z0_w1, self.p_w0)


@dataclass(frozen=True)
class TrivariateTable:
    """Joint distribution ``p[x][y][z]`` over three binary variables."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if arr.shape != (2, 2, 2):
            raise MalformedPayload(f"trivariate table must have shape (2, 2, 2), got {arr.shape}")
        if np.any(arr < 0):
            raise OutOfRange("trivariate table has a negative entry")
        if abs(arr.sum() - 1.0) > TOL:
            raise OutOfRange(f"trivariate table sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def marginal(self, treatment: str) -> BinaryMarginal:
        """Two-variable marginal of ``treatment`` ("X" or "Y") with ``Z``."""
        if treatment == "X":
            pwz = self.p.sum(axis=1)
        elif treatment == "Y":
            pwz = self.p.sum(axis=0)
        else:
            raise ValueError(f"treatment must be 'X' or 'Y', got {treatment!r}")
        pw = pwz.sum(axis=1)
        return BinaryMarginal(float(pwz[0, 0] / pw[0]), float(pwz[1, 0] / pw[1]), float(pw[0]))


def validate_marginal(m) -> None:
    """Raise unless ``m`` is a valid marginal.

    ``m`` may be a :class:`BinaryMarginal` or any ``(p_z0_w0, p_z0_w1, p_w0)``
    triple.  Conditionals may sit on the boundary; the treatment marginal may not.
    """
    if isinstance(m, BinaryMarginal):
        values = (m.p_z0_w0, m.p_z0_w1, m.p_w0)
    else:
        values = tuple(m)
        if len(values) != 3:
            raise MalformedPayload("a marginal needs exactly three probabilities")
    names = ("p_z0_w0", "p_z0_w1", "p_w0")
    for name, v in zip(names, values):
        if not isinstance(v, (int, float, np.floating, np.integer)) or isinstance(v, bool):
            raise MalformedPayload(f"{name} must be a number, got {v!r}")
        if not np.isfinite(v) or v < 0.0 or v > 1.0:
            raise OutOfRange(f"{name}={v!r} is outside [0, 1]")
    if values[2] <= 0.0 or values[2] >= 1.0:
        raise DegenerateTreatmentMarginal(f"p_w0={values[2]!r} must lie strictly between 0 and 1")


def marginal_from_counts(t: CountTable) -> BinaryMarginal:
    (n00, n01), (n10, n11) = t.n
    arm0, arm1 = n00 + n01, n10 + n11
    return BinaryMarginal(
        float(Fraction(n00, arm0)),
        float(Fraction(n10, arm1)),
        float(Fraction(arm0, arm0 + arm1)),
    )


def parse_trial_summary(payload: bytes | str, format: str = "json") -> CountTable:
    """Decode a trial summary.

    JSON: ``{"treatment": ..., "outcome": ..., "n00": int, ...}``.
    CSV: header ``w,z,count`` followed by one row per cell.
    """
    text = payload.decode("utf-8") if isinstance(payload, (bytes, bytearray)) else payload
    if format == "json":
        return _parse_json(text)
    if format == "csv":
        return _parse_csv(text)
    raise MalformedPayload(f"unknown format {format!r}")


def _parse_json(text: str) -> CountTable:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedPayload(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedPayload("trial summary must be a JSON object")
    missing = [k for k in _KEYS if k not in obj]
    if missing:
        raise MalformedPayload(f"missing keys: {', '.join(missing)}")
    cells = [obj[k] for k in _KEYS]
    return CountTable.from_cells(
        *cells,
        treatment=str(obj.get("treatment", "W")),
        outcome=str(obj.get("outcome", "Z")),
    )


def _parse_csv(text: str) -> CountTable:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows or [c.strip() for c in rows[0]] != ["w", "z", "count"]:
        raise MalformedPayload('CSV must start with header "w,z,count"')
    body = rows[1:]
    if len(body) != 4:
        raise MalformedPayload(f"CSV must have four data rows, got {len(body)}")
    cells: dict[tuple[int, int], int] = {}
    for row in body:
        if len(row) != 3:
            raise MalformedPayload(f"bad CSV row {row!r}")
        try:
            w, z, count = (int(c.strip()) for c in row)
        except ValueError as exc:
            raise MalformedPayload(f"non-integer CSV row {row!r}") from exc
        if w not in (0, 1) or z not in (0, 1):
            raise MalformedPayload(f"cell index out of range in row {row!r}")
        if (w, z) in cells:
            raise MalformedPayload(f"duplicate cell ({w},{z})")
        cells[(w, z)] = count
    return CountTable.from_cells(cells[0, 0], cells[0, 1], cells[1, 0], cells[1, 1])


def serialize_trial_summary(t: CountTable, format: str = "json") -> bytes:
    (n00, n01), (n10, n11) = t.n
    if format == "json":
        obj = {"treatment": t.treatment, "outcome": t.outcome,
               "n00": int(n00), "n01": int(n01), "n10": int(n10), "n11": int(n11)}
        return json.dumps(obj).encode("utf-8")
    if format == "csv":
        lines = ["w,z,count"] + [f"{w},{z},{int(t.n[w][z])}" for w in (0, 1) for z in (0, 1)]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise MalformedPayload(f"unknown format {format!r}")


def parse_trivariate(payload: bytes | str) -> TrivariateTable:
    text = payload.decode("utf-8") if isinstance(payload, (bytes, bytearray)) else payload
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedPayload(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "p" not in obj:
        raise MalformedPayload('trivariate payload must be {"p": [[[...]]]}')
    try:
        arr = np.array(obj["p"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedPayload(f"bad trivariate table: {exc}") from exc
    return TrivariateTable(arr)


def parse_marginal(payload: bytes | str, format: str = "json") -> BinaryMarginal:
    """Load a marginal from counts (JSON/CSV) or from explicit probabilities.

    A JSON object carrying ``p_z0_w0``, ``p_z0_w1`` and ``p_w0`` is taken as
    exact probabilities; anything else is parsed as a count table.
    """
    if format == "json":
        text = payload.decode("utf-8") if isinstance(payload, (bytes, bytearray)) else payload
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedPayload(f"invalid JSON: {exc}") from exc
        if isinstance(obj, dict) and {"p_z0_w0", "p_z0_w1", "p_w0"} <= obj.keys():
            return BinaryMarginal(obj["p_z0_w0"], obj["p_z0_w1"], obj["p_w0"])
        return marginal_from_counts(_parse_json(text))
    return marginal_from_counts(parse_trial_summary(payload, format))


def as_marginal(m: BinaryMarginal | Sequence[float]) -> BinaryMarginal:
    return m if isinstance(m, BinaryMarginal) else BinaryMarginal(*m)
