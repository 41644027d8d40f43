"""Allowable drift and hinge-rotation tables, the 21 violation terms and the penalty."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .frame import SizedFrame, member_length
from .sections import default_data_dir

log = logging.getLogger(__name__)

N_CONSTRAINTS = 21

# V / (b d sqrt(f'c)) with SI units (sqrt MPa) -> the psi form used by the tables
SHEAR_PSI = math.sqrt(145.0377)

LEVELS = ("IO", "LS", "CP")


class PerformanceLevel(str, Enum):
    IO = "IO"
    LS = "LS"
    CP = "CP"


def _level(level) -> str:
    v = level.value if isinstance(level, PerformanceLevel) else str(level).upper().replace("-", "")
    if v not in LEVELS:
        raise ValueError(f"unknown performance level {level!r}")
    return v


# -- allowable tables ---------------------------------------------------------------


@dataclass(frozen=True)
class LimitRow:
    kind: str
    demand: float  # band edge value
    demand_side: str  # "<=" or ">="
    confinement: str
    shear: float
    shear_side: str
    limits: tuple  # (IO, LS, CP)


@dataclass
class AllowableTables:
    drift_limits: dict
    rows: dict  # kind -> list[LimitRow]
    warnings: list = field(default_factory=list)
    overrides: list = field(default_factory=list)

    @property
    def column_rows(self):
        return self.rows.get("column", [])

    @property
    def beam_rows(self):
        return self.rows.get("beam", [])

    @property
    def wall_rows(self):
        return self.rows.get("wall", [])

    def cells(self) -> list[tuple]:
        """Every printed cell as (kind, demand, confinement, shear, level, value)."""
        out = [("drift", None, None, None, lv, self.drift_limits[lv]) for lv in LEVELS]
        for kind in ("column", "beam", "wall"):
            for r in self.rows.get(kind, []):
                for lv, v in zip(LEVELS, r.limits):
                    out.append((kind, r.demand, r.confinement, r.shear, lv, v))
        return out


def _band(text: str) -> tuple[str, float]:
    text = text.strip().replace(" ", "")
    for op in ("<=", ">="):
        if text.startswith(op):
            return op, float(text[2:])
    raise ValueError(f"bad band {text!r}; expected '<=x' or '>=x'")


def _parse_rows(text: str, source: str) -> list[tuple]:
    reader = csv.DictReader(io.StringIO(text))
    need = {"table", "demand_band", "confinement", "shear_band", "IO", "LS", "CP"}
    if not reader.fieldnames or not need <= set(reader.fieldnames):
        raise ValueError(f"{source}: header must contain {sorted(need)}")
    out = []
    for n, row in enumerate(reader, start=2):
        try:
            vals = tuple(float(row[lv]) for lv in LEVELS)
            kind = row["table"].strip()
            if kind == "drift":
                out.append((kind, None, None, vals))
                continue
            d = _band(row["demand_band"])
            s = _band(row["shear_band"])
            out.append((kind, d, row["confinement"].strip().upper(), s, vals))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"{source} line {n}: {exc}") from None
        if any(v <= 0 for v in vals):
            raise ValueError(f"{source} line {n}: limits must be positive")
    return out


def _read(path_or_text) -> tuple[str, str]:
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text):
        p = Path(path_or_text)
        return p.read_text(encoding="utf-8"), str(p)
    return str(path_or_text), "<text>"


def load_allowables(source=None, override=None) -> AllowableTables:
    """Load the limit tables; ``override`` rows replace matching cells.

    Per-level monotonicity (IO <= LS <= CP) is checked and reported as a
    warning, never corrected.
    """
    text, name = _read(source if source is not None else default_data_dir() / "allowables.csv")
    drift: dict = {}
    rows: dict = {}
    for rec in _parse_rows(text, name):
        if rec[0] == "drift":
            drift = dict(zip(LEVELS, rec[3]))
        else:
            kind, (dop, dv), conf, (sop, sv), vals = rec
            rows.setdefault(kind, []).append(LimitRow(kind, dv, dop, conf, sv, sop, vals))
    if not drift:
        raise ValueError(f"{name}: missing drift row")
    tables = AllowableTables(drift, rows)
    if override is not None:
        _apply_override(tables, *_read(override))
    _check(tables)
    return tables


def _apply_override(tables: AllowableTables, text: str, name: str) -> None:
    for rec in _parse_rows(text, name):
        if rec[0] == "drift":
            tables.drift_limits = dict(zip(LEVELS, rec[3]))
            tables.overrides.append(f"drift -> {rec[3]}")
            continue
        kind, (dop, dv), conf, (sop, sv), vals = rec
        rows = tables.rows.get(kind, [])
        for k, r in enumerate(rows):
            if (r.demand, r.demand_side, r.confinement, r.shear, r.shear_side) == (dv, dop, conf, sv, sop):
                rows[k] = LimitRow(kind, dv, dop, conf, sv, sop, vals)
                tables.overrides.append(f"{kind} {dop}{dv} {conf} {sop}{sv}: {r.limits} -> {vals}")
                break
        else:
            raise ValueError(f"{name}: override row {kind} {dop}{dv} {conf} {sop}{sv} matches no table row")
    for msg in tables.overrides:
        log.info("allowable override: %s", msg)


def _check(tables: AllowableTables) -> None:
    d = tables.drift_limits
    if not d["IO"] <= d["LS"] <= d["CP"]:
        tables.warnings.append(f"drift limits not monotone: {d}")
    for kind, rows in tables.rows.items():
        for k, r in enumerate(rows, start=1):
            io_, ls, cp = r.limits
            if not io_ <= ls <= cp:
                tables.warnings.append(f"{kind} row {k} ({r.demand_side}{r.demand}, {r.confinement}, "
                                       f"{r.shear_side}{r.shear}) not monotone across levels: {r.limits}")
    for w in tables.warnings:
        log.warning(w)


_DEFAULT: AllowableTables | None = None


def default_tables() -> AllowableTables:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_allowables()
    return _DEFAULT


def drift_limit(level, tables: AllowableTables | None = None) -> float:
    tables = tables or default_tables()
    return float(tables.drift_limits[_level(level)])


def _confinement(kind: str, confinement) -> str:
    if isinstance(confinement, str):
        return confinement.strip().upper()
    if kind == "wall":
        return "YES" if confinement else "NO"
    return "C" if confinement else "NC"


def rotation_limit(kind: str, demand_ratio: float, confinement, shear_ratio: float, level,
                   tables: AllowableTables | None = None) -> float:
    """Allowable plastic rotation (rad).

    Bilinear in the demand ratio and the (psi-form) shear ratio between the
    printed bands; inputs outside the bands clamp to the nearest row. Beams
    and columns only have conforming ("C") rows, which are used whatever the
    ``confinement`` argument says.
    """
    tables = tables or default_tables()
    if not (math.isfinite(demand_ratio) and math.isfinite(shear_ratio)):
        raise ValueError("demand and shear ratios must be finite")
    lv = LEVELS.index(_level(level))
    conf = _confinement(kind, confinement)
    rows = tables.rows.get(kind)
    if not rows:
        raise ValueError(f"no rotation table for {kind!r}")
    sel = [r for r in rows if r.confinement == conf] or rows
    d_edges = sorted({r.demand for r in sel})
    s_edges = sorted({r.shear for r in sel})
    grid = {(r.demand, r.shear): r.limits[lv] for r in sel}

    def frac(x, edges):
        lo, hi = edges[0], edges[-1]
        if hi == lo:
            return lo, hi, 0.0
        t = (min(max(x, lo), hi) - lo) / (hi - lo)
        return lo, hi, t

    d0, d1, td = frac(demand_ratio, d_edges)
    s0, s1, ts = frac(shear_ratio, s_edges)
    v00, v01 = grid[(d0, s0)], grid[(d0, s1)]
    v10, v11 = grid[(d1, s0)], grid[(d1, s1)]
    if td == 0.0 and ts == 0.0:
        return v00
    return float((1 - td) * ((1 - ts) * v00 + ts * v01) + td * ((1 - ts) * v10 + ts * v11))


# -- violation helpers ------------------------------------------------------------


def excess(demand: float, limit: float, big: float = 10.0) -> float:
    """``max(0, (demand - limit) / limit)``; ``big`` when the limit is not positive."""
    if limit <= 0:
        return big if demand > 0 else 0.0
    return max(0.0, (demand - limit) / limit)


def deficit(value: float, minimum: float) -> float:
    """``max(0, (minimum - value) / minimum)``."""
    if minimum <= 0:
        return 0.0
    return max(0.0, (minimum - value) / minimum)


def phi_flexure_axial(eps_t: float, materials) -> float:
    """Strength reduction varying with net tensile strain (compression to tension controlled)."""
    lo, hi = materials.phi_compression, materials.phi_flexure
    ey = materials.eps_y
    if eps_t <= ey:
        return lo
    if eps_t >= 0.005:
        return hi
    return lo + (hi - lo) * (eps_t - ey) / (0.005 - ey)


# -- strength demands ------------------------------------------------------------------


@dataclass
class StrengthDemands:
    """Member forces per strength combination (rows of every array).

    ``axial`` is compression positive, ``end_moments`` are internal moments
    (sagging positive), ``span_moments`` sample each member along its length.
    """

    tags: tuple
    axial: np.ndarray  # (nc, ne)
    end_moments: np.ndarray  # (nc, ne, 2)
    span_moments: np.ndarray  # (nc, ne, n)
    shear: np.ndarray  # (nc, ne)

    @classmethod
    def from_results(cls, tags, results) -> "StrengthDemands":
        return cls(tuple(tags), np.array([r.axial for r in results]),
                   np.array([r.end_moments for r in results]),
                   np.array([r.span_moments() for r in results]),
                   np.array([r.shear for r in results]))


STRENGTH_NAMES = {
    2: "column axial", 3: "column moment", 4: "column shear", 5: "column min rho", 6: "column max rho",
    7: "column width stacking", 8: "column depth stacking", 9: "beam vs column width",
    10: "column aspect", 11: "column slenderness", 12: "column bar spacing", 13: "beam moment",
    14: "beam stirrup shear", 15: "beam min steel", 16: "beam tensile strain", 17: "beam bar spacing",
    18: "beam depth",
}


def _record_dims(rec) -> tuple[float, float]:
    """(b, h) in mm for any record kind."""
    if hasattr(rec, "side_mm"):
        return rec.side_mm, rec.side_mm
    if hasattr(rec, "depth_mm"):
        return rec.width_mm, rec.depth_mm
    return rec.t_w_mm, rec.t_w_mm


def strength_violations(sized: SizedFrame, demands: StrengthDemands, big: float = 10.0) -> dict:
    """Violation terms c_2..c_18 keyed by constraint number.

    Column terms c_2..c_4 cover walls too (walls are vertical members whose
    strength is otherwise unchecked).
    """
    model, mat = sized.model, sized.materials
    c = {i: 0.0 for i in range(2, 19)}
    for k, m in enumerate(model.members):
        cap = sized.capacities[k]
        if cap is None:
            continue
        rec = sized.records[k]
        b, h = _record_dims(rec)
        if m.kind in ("column", "wall"):
            for row in range(len(demands.tags)):
                P = float(demands.axial[row, k])
                M = float(np.abs(demands.end_moments[row, k]).max())
                V = float(demands.shear[row, k])
                c[2] = max(c[2], excess(P, mat.phi_compression * cap.P_n_max, big))
                Mn = max(cap.interaction.moment_at(P), 0.0)
                phi = phi_flexure_axial(cap.interaction.strain_at(P), mat)
                c[3] = max(c[3], excess(M, phi * Mn, big))
                c[4] = max(c[4], excess(V, mat.phi_shear * cap.V_n, big))
        if m.kind == "column":
            c[5] = max(c[5], deficit(cap.rho, 0.01))
            c[6] = max(c[6], excess(cap.rho, 0.08))
            c[10] = max(c[10], excess(b, h))
            story = model.stories[m.story]
            beam_h = _beam_depth_above(sized, m)
            l_u = story.height * 1000.0 - beam_h
            c[11] = max(c[11], excess(1.0 * l_u / (0.3 * h), 100.0))
            c[12] = max(c[12], deficit(cap.S, cap.S_min))
        elif m.kind == "beam":
            phi = mat.phi_flexure
            span = demands.span_moments[:, k, :]
            sag = float(span.max())
            hog = float(-span.min())
            if sag > 0:
                c[13] = max(c[13], excess(sag, phi * cap.M_n_pos, big))
            if hog > 0:
                c[13] = max(c[13], excess(hog, phi * cap.M_n_neg, big))
            V_u = float(demands.shear[:, k].max())
            Vs_req = V_u / mat.phi_shear - cap.V_c
            c[14] = max(c[14], excess(Vs_req, cap.V_s_max, big))
            A_st = rec.bot_bars[0] * math.pi * rec.bot_bars[1] ** 2 / 4
            c[15] = max(c[15], deficit(A_st, cap.A_st_min))
            c[16] = max(c[16], deficit(cap.eps_t, 0.004))
            c[17] = max(c[17], deficit(cap.S, cap.S_min))
            h_min = member_length(model, m) * 1000.0 / 18.5
            c[18] = max(c[18], deficit(h, h_min))
    for lower, upper in sized.column_pairs():
        bl, hl = _record_dims(sized.records[lower])
        bu, hu = _record_dims(sized.records[upper])
        c[7] = max(c[7], excess(bu, bl))
        c[8] = max(c[8], excess(hu, hl))
    for beam, col in sized.beam_column_pairs():
        bb, _ = _record_dims(sized.records[beam])
        bc, _ = _record_dims(sized.records[col])
        c[9] = max(c[9], excess(bb, bc))
    return c


def _beam_depth_above(sized: SizedFrame, column) -> float:
    depths = [sized.records[k].depth_mm for k, m in enumerate(sized.model.members)
              if m.kind == "beam" and column.j in (m.i, m.j)]
    return max(depths, default=0.0)


# -- performance -------------------------------------------------------------------


@dataclass
class LevelState:
    """Pushover response at one level's target displacement (or ``None`` if unreached)."""

    level: str
    target: float
    drifts: np.ndarray | None
    rotations: np.ndarray | None  # (ne, 2)
    moments: np.ndarray | None
    shear: np.ndarray | None
    axial: np.ndarray | None

    @property
    def reached(self) -> bool:
        return self.drifts is not None


def hinge_limit(sized: SizedFrame, k: int, end: int, state: LevelState, tables: AllowableTables) -> float:
    """Allowable rotation of hinge ``(k, end)`` in the given response state."""
    m = sized.model.members[k]
    cap, rec, mat = sized.capacities[k], sized.records[k], sized.materials
    sq = math.sqrt(mat.f_c_prime)
    V = float(state.shear[k])
    if m.kind == "column":
        b, h = _record_dims(rec)
        demand = max(float(state.axial[k]), 0.0) * 1e3 / (cap.A_g * mat.f_c_prime)
        shear = V * 1e3 / (b * cap.d * sq) * SHEAR_PSI
        return rotation_limit("column", demand, "C", shear, state.level, tables)
    if m.kind == "beam":
        sagging = float(state.moments[k, end]) >= 0
        rho, rho_p = (cap.rho, cap.rho_prime) if sagging else (cap.rho_prime, cap.rho)
        demand = (rho - rho_p) / cap.rho_bal
        shear = V * 1e3 / (rec.width_mm * cap.d * sq) * SHEAR_PSI
        return rotation_limit("beam", demand, "C", shear, state.level, tables)
    from .sections import derive_wall_terms

    axial, shear, boundary = derive_wall_terms(rec, mat, sized.detailing.wall_length_mm,
                                               max(float(state.axial[k]), 0.0), V)
    return rotation_limit("wall", axial, boundary, shear * SHEAR_PSI, state.level, tables)


def performance_violations(sized: SizedFrame, states: Sequence[LevelState], tables: AllowableTables | None,
                           elastic_drifts: Sequence[float] | None, elastic_limit: float = 0.0045,
                           unreached: float = 10.0) -> dict:
    """c_1, c_19, c_20 (columns and walls) and c_21 (beams), keyed by number."""
    tables = tables or default_tables()
    c = {1: 0.0, 19: 0.0, 20: 0.0, 21: 0.0}
    if elastic_drifts is not None and len(elastic_drifts):
        c[1] = max(0.0, float(np.max(np.abs(elastic_drifts))) / elastic_limit - 1.0)
    for st in states:
        if not st.reached:
            c[19] += unreached
            continue
        d_all = drift_limit(st.level, tables)
        c[19] = max(c[19], float(np.max(np.abs(st.drifts))) / d_all - 1.0)
        for k, m in enumerate(sized.model.members):
            if m.kind == "link":
                continue
            for end in (0, 1):
                theta = float(st.rotations[k, end])
                if theta <= 0:
                    continue
                lim = hinge_limit(sized, k, end, st, tables)
                key = 21 if m.kind == "beam" else 20
                c[key] = max(c[key], theta / lim - 1.0)
    return c


# -- penalty ---------------------------------------------------------------------


@dataclass(frozen=True)
class PenaltyParams:
    K: float = 1.0
    eps: float = 2.0

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")
        if not self.eps >= 1:
            raise ValueError("eps must be at least 1")


def aggregate(c: Iterable[float]) -> float:
    vals = [float(x) for x in c]
    if any(v < 0 or math.isnan(v) for v in vals):
        raise ValueError("violation terms must be nonnegative")
    return math.fsum(vals)


def penalize(F: float, C: float, params: PenaltyParams | None = None) -> float:
    p = params or PenaltyParams()
    if F < 0 or C < 0:
        raise ValueError("F and C must be nonnegative")
    return F * (1.0 + p.K * C) ** p.eps


@dataclass(frozen=True)
class PenaltyReport:
    c: tuple  # c_1 .. c_21
    C: float
    F: float
    phi: float
    notes: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.C == 0.0

    @classmethod
    def build(cls, terms: Mapping[int, float], F: float, params: PenaltyParams | None = None,
              notes: Sequence[str] = ()) -> "PenaltyReport":
        c = tuple(float(terms.get(i, 0.0)) for i in range(1, N_CONSTRAINTS + 1))
        C = aggregate(c)
        return cls(c, C, float(F), penalize(F, C, params), tuple(notes))

    def as_dict(self) -> dict:
        return {"c": list(self.c), "C": self.C, "F_kg": self.F, "phi": self.phi, "notes": list(self.notes)}
