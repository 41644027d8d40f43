"""CSV and JSON output files and their readers."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .abc import HistoryRow
from .analysis import PushoverTrace

CONVERGENCE_HEADER = ["iteration", "best_phi", "best_weight_kg", "best_C", "feasible_count"]


def _num(x: float) -> str:
    return repr(float(x))


def _csv(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    return rows[0], rows[1:]


# -- pushover ---------------------------------------------------------------------


@dataclass
class CapacityCurve:
    """The tabular part of a pushover trace (what the CSV carries)."""

    load_factor: np.ndarray
    base_shear: np.ndarray
    roof: np.ndarray
    drifts: np.ndarray  # (n_steps, n_stories)

    @classmethod
    def from_trace(cls, trace: PushoverTrace) -> "CapacityCurve":
        return cls(trace.load_factor, trace.base_shear, trace.roof, trace.drifts)

    def __eq__(self, other) -> bool:
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("load_factor", "base_shear", "roof", "drifts"))


def pushover_csv(curve: CapacityCurve | PushoverTrace) -> str:
    if isinstance(curve, PushoverTrace):
        curve = CapacityCurve.from_trace(curve)
    ns = curve.drifts.shape[1] if curve.drifts.ndim == 2 else 0
    header = ["step", "load_factor", "base_shear_kN", "roof_disp_m"] + [f"drift_{k + 1}" for k in range(ns)]
    rows = [[k, _num(curve.load_factor[k]), _num(curve.base_shear[k]), _num(curve.roof[k]),
             *(_num(d) for d in curve.drifts[k])] for k in range(len(curve.roof))]
    return _csv(rows, header)


def read_pushover_csv(text: str) -> CapacityCurve:
    header, rows = _rows(text)
    if header[:4] != ["step", "load_factor", "base_shear_kN", "roof_disp_m"]:
        raise ValueError("not a pushover CSV")
    a = np.array([[float(v) for v in r[1:]] for r in rows]).reshape(len(rows), len(header) - 1)
    return CapacityCurve(a[:, 0], a[:, 1], a[:, 2], a[:, 3:])


# -- convergence ------------------------------------------------------------------


def convergence_csv(history: Sequence[HistoryRow]) -> str:
    rows = [[h.iteration, _num(h.best_phi), _num(h.best_weight), _num(h.best_C), h.feasible_count]
            for h in history]
    return _csv(rows, CONVERGENCE_HEADER)


def read_convergence_csv(text: str) -> list[HistoryRow]:
    header, rows = _rows(text)
    if header != CONVERGENCE_HEADER:
        raise ValueError("not a convergence CSV")
    return [HistoryRow(int(r[0]), float(r[1]), float(r[2]), float(r[3]), int(r[4])) for r in rows]


# -- drift profiles ---------------------------------------------------------------


def drift_csv(profiles: dict, heights: Sequence[float]) -> str:
    """Story drift at each level's target; ``profiles`` maps level -> drifts (or None)."""
    levels = list(profiles)
    rows = []
    for k, h in enumerate(heights):
        row = [k + 1, _num(h)]
        for lv in levels:
            d = profiles[lv]
            row.append("" if d is None else _num(d[k]))
        rows.append(row)
    return _csv(rows, ["story", "height_m", *levels])


def read_drift_csv(text: str) -> tuple[dict, list[float]]:
    header, rows = _rows(text)
    if header[:2] != ["story", "height_m"]:
        raise ValueError("not a drift CSV")
    levels = header[2:]
    heights = [float(r[1]) for r in rows]
    prof = {}
    for j, lv in enumerate(levels):
        col = [r[2 + j] for r in rows]
        prof[lv] = None if all(v == "" for v in col) else np.array([float(v) for v in col])
    return prof, heights


# -- files -------------------------------------------------------------------------


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")
