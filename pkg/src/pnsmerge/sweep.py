"""Grid sweeps over Y-trial marginals at a fixed X-trial.

For every ``(p_y0, pp00, pp01)`` cell the merged polytope is solved for the
restricted lambda range and the MaxEnt model.  Because both trials must
share ``P(Z)``, the X-trial's ``P(X=0)`` is by default derived per cell:

    P(X=0) = (P_Y(Z=0) - p01) / (p00 - p01)

Cells where that value falls outside (0, 1) cannot match and are flagged
incompatible.  Supplying ``p_x0`` fixes it instead.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import check_compatibility, restricted_lambda_range
from .errors import Incompatible, MalformedPayload
from .maxent import maxent_scm
from .polytope import build_polytope
from .scm import lambda_range
from .trial_data import BinaryMarginal

OUTPUTS = ("entropy", "lambda_range_width", "maxent_lambda_normalized")
COLUMNS = (
    "p_y0",
    "pp00",
    "pp01",
    "p_x0",
    "compatible",
    "entropy_bits",
    "lambda_min_restricted",
    "lambda_max",
    "maxent_lambda",
    "maxent_lambda_normalized",
)
WIDTH_TOL = 1e-12


def fmt(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{x:.12g}") + 0.0


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if isinstance(self.steps, bool) or not isinstance(self.steps, int) or self.steps < 2:
            raise MalformedPayload(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (0.0 <= self.start <= 1.0 and 0.0 <= self.stop <= 1.0):
            raise MalformedPayload(f"range [{self.start}, {self.stop}] leaves [0, 1]")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    p00: float
    p01: float
    pp00: Range
    pp01: Range
    p_y0: Range
    p_x0: float | None = None
    outputs: frozenset = frozenset(OUTPUTS)

    def __post_init__(self):
        for name in ("p00", "p01"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise MalformedPayload(f"{name}={v!r} outside [0, 1]")
        if not (0.0 < self.p_y0.start < 1.0 and 0.0 < self.p_y0.stop < 1.0):
            raise MalformedPayload("p_y0 range must lie strictly inside (0, 1)")
        if self.p_x0 is None and self.p00 == self.p01:
            raise MalformedPayload("deriving p_x0 needs p00 != p01; set p_x0 explicitly")
        if self.p_x0 is not None and not 0.0 < self.p_x0 < 1.0:
            raise MalformedPayload(f"p_x0={self.p_x0!r} must lie strictly inside (0, 1)")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise MalformedPayload(f"unknown outputs: {sorted(unknown)}")

    @classmethod
    def from_dict(cls, obj: dict) -> "SweepConfig":
        try:
            mx = obj["mX"]
            cfg = cls(
                p00=float(mx["p00"]),
                p01=float(mx["p01"]),
                p_x0=None if mx.get("p_x0") is None else float(mx["p_x0"]),
                pp00=Range(**obj["pp00"]),
                pp01=Range(**obj["pp01"]),
                p_y0=Range(**obj["p_y0"]),
                outputs=frozenset(obj.get("outputs", OUTPUTS)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedPayload):
                raise
            raise MalformedPayload(f"bad sweep config: {exc!r}") from exc
        return cfg

    @classmethod
    def from_json(cls, text: str | bytes) -> "SweepConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedPayload(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise MalformedPayload("sweep config must be a JSON object")
        return cls.from_dict(obj)

    def cells(self) -> list[tuple[float, float, float]]:
        """Grid cells ordered with ``p_y0`` outermost, then ``pp00``, then ``pp01``."""
        return [
            (float(y), float(a), float(b))
            for y in self.p_y0.values()
            for a in self.pp00.values()
            for b in self.pp01.values()
        ]


def x_treatment_marginal(cfg: SweepConfig, mY: BinaryMarginal) -> float | None:
    """``P(X=0)`` for a cell, or None when no valid value matches ``P(Z)``."""
    if cfg.p_x0 is not None:
        return cfg.p_x0
    px0 = (mY.p_z0 - cfg.p01) / (cfg.p00 - cfg.p01)
    return px0 if 1e-12 < px0 < 1.0 - 1e-12 else None


def sweep_cell(cfg: SweepConfig, cell: tuple[float, float, float]) -> dict:
    p_y0, pp00, pp01 = cell
    row = dict.fromkeys(COLUMNS)
    row.update(p_y0=fmt(p_y0), pp00=fmt(pp00), pp01=fmt(pp01), compatible=False)
    mY = BinaryMarginal(pp00, pp01, p_y0)
    px0 = x_treatment_marginal(cfg, mY)
    if px0 is None:
        return row
    row["p_x0"] = fmt(px0)
    mX = BinaryMarginal(cfg.p00, cfg.p01, px0)
    if not check_compatibility(mX, mY).compatible:
        return row
    try:
        lo = restricted_lambda_range(mX, mY).lo
    except Incompatible:
        return row
    row["compatible"] = True
    hi = lambda_range(mX).hi
    if "lambda_range_width" in cfg.outputs:
        row["lambda_min_restricted"] = fmt(lo)
        row["lambda_max"] = fmt(hi)
    want_norm = "maxent_lambda_normalized" in cfg.outputs
    if "entropy" in cfg.outputs or want_norm:
        res = maxent_scm(build_polytope(mX, mY))
        if "entropy" in cfg.outputs:
            row["entropy_bits"] = fmt(res.entropy)
        if want_norm:
            row["maxent_lambda"] = fmt(res.lambda_x)
            if hi - lo > WIDTH_TOL:
                row["maxent_lambda_normalized"] = fmt((hi - res.lambda_x) / (hi - lo))
    return row


def _cell_task(args):
    return sweep_cell(*args)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[dict]:
    """Evaluate every cell; rows follow :meth:`SweepConfig.cells` order."""
    tasks = [(cfg, cell) for cell in cfg.cells()]
    if workers <= 1:
        return [sweep_cell(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_csv_value(row[c]) for c in COLUMNS])
    return buf.getvalue()
