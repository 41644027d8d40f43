"""Cross-section catalogs and RC section capacities.

Lengths are in mm and stresses in MPa inside this module; capacities are
reported in kN and kN*m.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numpy as np


class CatalogError(ValueError):
    """A catalog file or row failed validation."""


class SectionError(ValueError):
    """A section cannot develop a meaningful capacity."""


@dataclass(frozen=True)
class Materials:
    f_c_prime: float = 30.0
    f_y: float = 400.0
    E_c: float | None = None
    E_s: float = 200_000.0
    rho_steel: float = 7850.0
    rho_concrete: float = 2400.0
    phi_flexure: float = 0.90
    phi_compression: float = 0.65
    phi_shear: float = 0.75
    eps_cu: float = 0.003

    def __post_init__(self):
        if self.E_c is None:
            object.__setattr__(self, "E_c", 4700.0 * math.sqrt(self.f_c_prime))
        for f in ("f_c_prime", "f_y", "E_c", "E_s", "rho_steel", "rho_concrete", "eps_cu"):
            if not getattr(self, f) > 0:
                raise ValueError(f"{f} must be positive")
        for f in ("phi_flexure", "phi_compression", "phi_shear"):
            if not 0 < getattr(self, f) <= 1:
                raise ValueError(f"{f} must lie in (0, 1]")

    @property
    def beta1(self) -> float:
        """Stress-block depth factor (ACI 318, SI)."""
        b = 0.85 - 0.05 * (self.f_c_prime - 28.0) / 7.0
        return min(0.85, max(0.65, b))

    @property
    def eps_y(self) -> float:
        return self.f_y / self.E_s


@dataclass(frozen=True)
class Detailing:
    """Member detailing used when turning a catalog row into a section."""

    cover_mm: float = 40.0
    stirrup_dia_mm: float = 10.0
    stirrup_legs: int = 2
    stirrup_spacing_mm: float = 150.0
    min_clear_spacing_mm: float = 10.0
    i_eff_beam: float = 0.35
    i_eff_column: float = 0.70
    i_eff_wall: float = 0.70
    wall_length_mm: float = 5000.0


def bar_area(diameter_mm: float) -> float:
    if diameter_mm < 0:
        raise ValueError("bar diameter must be non-negative")
    return math.pi * diameter_mm**2 / 4.0


_BARS_RE = re.compile(r"^\s*(\d+)\s*[Φφx×]\s*(\d+(?:\.\d+)?)\s*(?:mm)?\s*$")


def parse_bars(text: str) -> tuple[int, float]:
    """Parse a bar group such as ``3Φ16`` or ``3x16``."""
    m = _BARS_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse bar group {text!r}")
    dia = float(m.group(2))
    return int(m.group(1)), int(dia) if dia.is_integer() else dia


def format_bars(bars: tuple[int, float]) -> str:
    n, d = bars
    return f"{n}Φ{_fmt(d)}"


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


# -- records ------------------------------------------------------------------


@dataclass(frozen=True)
class BeamSectionRecord:
    id: int
    depth_mm: float
    width_mm: float
    bot_bars: tuple[int, float]
    top_bars: tuple[int, float]
    reconstructed: bool = False

    kind = "beam"

    @property
    def area_mm2(self) -> float:
        return self.depth_mm * self.width_mm

    @property
    def steel_mm2(self) -> float:
        return self.bot_bars[0] * bar_area(self.bot_bars[1]) + self.top_bars[0] * bar_area(self.top_bars[1])

    def validate(self) -> None:
        if self.depth_mm <= 0 or self.width_mm <= 0:
            raise CatalogError(f"beam {self.id}: dimensions must be positive")
        if self.depth_mm < self.width_mm:
            raise CatalogError(f"beam {self.id}: depth smaller than width")
        for face, (n, d) in (("bot_bars", self.bot_bars), ("top_bars", self.top_bars)):
            if n < 2 or d <= 0:
                raise CatalogError(f"beam {self.id}: {face} needs at least 2 bars")


@dataclass(frozen=True)
class ColumnSectionRecord:
    id: int
    side_mm: float
    bars: tuple[int, float]
    reconstructed: bool = False

    kind = "column"

    @property
    def area_mm2(self) -> float:
        return self.side_mm**2

    @property
    def steel_mm2(self) -> float:
        return self.bars[0] * bar_area(self.bars[1])

    @property
    def rho(self) -> float:
        return self.steel_mm2 / self.area_mm2

    def validate(self) -> None:
        if self.side_mm < 300:
            raise CatalogError(f"column {self.id}: side below 300 mm")
        n, d = self.bars
        if n < 8 or n % 4 or d <= 0:
            raise CatalogError(f"column {self.id}: bar count must be a multiple of 4 and at least 8")
        if not 0.01 <= self.rho <= 0.08:
            raise CatalogError(f"column {self.id}: reinforcement ratio {self.rho:.4f} outside [0.01, 0.08]")


@dataclass(frozen=True)
class WallSectionRecord:
    id: int
    t_w_mm: float
    t_f_mm: float
    s_sh_mm: float
    b_f_mm: float
    bar_diameter_mm: float
    reconstructed: bool = False

    kind = "wall"

    @property
    def has_boundary(self) -> bool:
        return self.t_f_mm > 0

    def validate(self) -> None:
        if self.t_w_mm < 200:
            raise CatalogError(f"wall {self.id}: web thickness below 200 mm")
        if (self.t_f_mm == 0) != (self.b_f_mm == 0):
            raise CatalogError(f"wall {self.id}: t_f and b_f must both be zero or both positive")
        if self.t_f_mm < 0 or self.b_f_mm < 0:
            raise CatalogError(f"wall {self.id}: negative boundary dimensions")
        if self.s_sh_mm <= 0 or self.bar_diameter_mm <= 0:
            raise CatalogError(f"wall {self.id}: spacing and bar diameter must be positive")

    def layout(self, wall_length_mm: float, cover_mm: float) -> "Layout":
        """Concrete outline and bar layers over the wall length.

        Web bars sit in two curtains at ``s_sh`` spacing. Boundary elements
        (``t_f`` x ``b_f`` at each end) carry ``ceil(t_f / s_sh) + 1`` bars per
        layer instead of two.
        """
        lw = wall_length_mm
        if self.has_boundary and 2 * self.b_f_mm >= lw:
            raise SectionError(f"wall {self.id}: boundary elements overlap on a {lw} mm wall")
        if self.has_boundary:
            rects = ((0.0, self.b_f_mm, self.t_f_mm),
                     (self.b_f_mm, lw - self.b_f_mm, self.t_w_mm),
                     (lw - self.b_f_mm, lw, self.t_f_mm))
        else:
            rects = ((0.0, lw, self.t_w_mm),)
        n_layers = int(math.floor((lw - 2 * cover_mm) / self.s_sh_mm + 1e-9)) + 1
        ys = np.linspace(cover_mm, lw - cover_mm, n_layers)
        ab = bar_area(self.bar_diameter_mm)
        per_boundary = math.ceil(self.t_f_mm / self.s_sh_mm) + 1 if self.has_boundary else 2
        bars = []
        for y in ys:
            in_bf = self.has_boundary and (y <= self.b_f_mm or y >= lw - self.b_f_mm)
            bars.append((float(y), (per_boundary if in_bf else 2) * ab))
        return Layout(height=lw, rects=rects, bars=tuple(bars))


RECORD_TYPES = {"beam": BeamSectionRecord, "column": ColumnSectionRecord, "wall": WallSectionRecord}
_BAR_FIELDS = {"bot_bars", "top_bars", "bars"}


def _record_fields(cls) -> list[str]:
    return [f.name for f in fields(cls)]


def unit_weight(record, materials: Materials, detailing: Detailing | None = None) -> float:
    """Self weight per metre of member (kg/m): gross concrete plus steel."""
    detailing = detailing or Detailing()
    a_c, a_s = gross_and_steel_area(record, detailing)
    return (materials.rho_concrete * a_c + materials.rho_steel * a_s) * 1e-6


def gross_and_steel_area(record, detailing: Detailing) -> tuple[float, float]:
    """(gross concrete area, longitudinal steel area) in mm^2."""
    if isinstance(record, WallSectionRecord):
        lay = record.layout(detailing.wall_length_mm, detailing.cover_mm)
        return lay.gross_area, lay.steel_area
    return record.area_mm2, record.steel_mm2


# -- catalogs -----------------------------------------------------------------


@dataclass(frozen=True)
class Catalog:
    """Records of one member kind, keyed by id and ranked by unit weight.

    Design variables index the weight ranking (1 = lightest), not the printed
    id; the two only differ where the printed tables are out of weight order.
    """

    kind: str
    records: tuple  # in weight order
    _by_id: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._by_id.update({r.id: r for r in self.records})

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, record_id: int):
        return self._by_id[record_id]

    def by_rank(self, rank: int):
        if not 1 <= rank <= len(self.records):
            raise IndexError(f"{self.kind} catalog index {rank} outside 1..{len(self.records)}")
        return self.records[rank - 1]

    def ids(self) -> list[int]:
        return sorted(self._by_id)


def read_catalog(path_or_text, kind: str) -> list:
    """Parse and validate one catalog file, returning records in id order."""
    cls = RECORD_TYPES[kind]
    is_text = isinstance(path_or_text, str) and "\n" in path_or_text
    if not is_text and Path(path_or_text).exists():
        text = Path(path_or_text).read_text(encoding="utf-8")
        where = str(path_or_text)
    else:
        text = str(path_or_text)
        where = f"<{kind} catalog>"
    reader = csv.DictReader(io.StringIO(text))
    expected = _record_fields(cls)
    if reader.fieldnames is None:
        raise CatalogError(f"{where}: empty catalog")
    missing = [f for f in expected if f not in reader.fieldnames]
    if missing:
        raise CatalogError(f"{where}: missing columns {missing}")

    records = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        try:
            rec = _parse_row(cls, row)
        except (TypeError, ValueError) as exc:
            raise CatalogError(f"{where} line {lineno}: {exc}") from None
        if rec.id in seen:
            raise CatalogError(f"{where} line {lineno}: duplicate id {rec.id}")
        seen.add(rec.id)
        try:
            rec.validate()
        except CatalogError as exc:
            raise CatalogError(f"{where} line {lineno}: {exc}") from None
        records.append(rec)
    if not records:
        raise CatalogError(f"{where}: no rows")
    ids = sorted(seen)
    if ids != list(range(1, len(ids) + 1)):
        raise CatalogError(f"{where}: ids are not contiguous from 1")
    return sorted(records, key=lambda r: r.id)


def _parse_row(cls, row: dict):
    kw = {}
    for name in _record_fields(cls):
        raw = (row.get(name) or "").strip()
        if name == "id":
            kw[name] = int(raw)
        elif name == "reconstructed":
            kw[name] = raw.lower() in ("true", "1", "yes")
        elif name in _BAR_FIELDS:
            kw[name] = parse_bars(raw)
        else:
            kw[name] = float(raw)
    return cls(**kw)


def serialize_catalog(records: Iterable, kind: str) -> str:
    cls = RECORD_TYPES[kind]
    names = _record_fields(cls)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for rec in sorted(records, key=lambda r: r.id):
        out = []
        for name in names:
            v = getattr(rec, name)
            if name in _BAR_FIELDS:
                out.append(format_bars(v))
            elif name == "reconstructed":
                out.append("true" if v else "false")
            elif name == "id":
                out.append(str(v))
            else:
                out.append(_fmt(v))
        w.writerow(out)
    return buf.getvalue()


CATALOG_FILES = {"beam": "beams.csv", "column": "columns.csv", "wall": "walls.csv"}


def default_data_dir() -> Path:
    env = os.environ.get("FRAME_PBO_DATA")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def make_catalog(records, kind: str, materials: Materials | None = None,
                 detailing: Detailing | None = None) -> Catalog:
    materials = materials or Materials()
    ordered = sorted(records, key=lambda r: (unit_weight(r, materials, detailing), r.id))
    return Catalog(kind, tuple(ordered))


def load_catalogs(source=None, materials: Materials | None = None,
                  detailing: Detailing | None = None) -> tuple[Catalog, Catalog, Catalog]:
    """Load beam, column and wall catalogs from a fixture directory."""
    src = Path(source) if source is not None else default_data_dir()
    out = []
    for kind in ("beam", "column", "wall"):
        path = src / CATALOG_FILES[kind]
        if not path.exists():
            raise CatalogError(f"missing catalog file {path}")
        out.append(make_catalog(read_catalog(path, kind), kind, materials, detailing))
    return tuple(out)


# -- section strength ---------------------------------------------------------


@dataclass(frozen=True)
class Layout:
    """Section outline for strain compatibility about one axis.

    ``y`` runs from the compression face (0) to ``height``. Concrete is a set
    of rectangles ``(y0, y1, width)``; steel is a set of ``(y, area)`` layers.
    """

    height: float
    rects: tuple
    bars: tuple

    @property
    def gross_area(self) -> float:
        return sum((y1 - y0) * b for y0, y1, b in self.rects)

    @property
    def steel_area(self) -> float:
        return sum(a for _, a in self.bars)

    def flipped(self) -> "Layout":
        h = self.height
        return Layout(h, tuple((h - y1, h - y0, b) for y0, y1, b in reversed(self.rects)),
                      tuple((h - y, a) for y, a in reversed(self.bars)))

    def gross_inertia(self) -> float:
        yc = sum((y1 - y0) * b * (y0 + y1) / 2 for y0, y1, b in self.rects) / self.gross_area
        total = 0.0
        for y0, y1, b in self.rects:
            d = y1 - y0
            total += b * d**3 / 12 + b * d * ((y0 + y1) / 2 - yc) ** 2
        return total


def _block(layout: Layout, a: float) -> tuple[float, float]:
    """Area of concrete above depth ``a`` and its centroid depth."""
    area = 0.0
    first = 0.0
    for y0, y1, b in layout.rects:
        top, bot = y0, min(y1, a)
        if bot > top:
            area += b * (bot - top)
            first += b * (bot - top) * (top + bot) / 2
    return area, (first / area if area > 0 else 0.0)


def section_forces(layout: Layout, c: float, mat: Materials) -> tuple[float, float, float]:
    """Axial force (N, compression +), moment (N*mm) about mid-height, and
    extreme tension steel strain for neutral-axis depth ``c``."""
    a = min(mat.beta1 * c, layout.height)
    ac, yc = _block(layout, a)
    fc = 0.85 * mat.f_c_prime
    P = fc * ac
    yref = layout.height / 2
    M = fc * ac * (yref - yc)
    eps_t = 0.0
    y_max = 0.0
    for y, area in layout.bars:
        eps = mat.eps_cu * (c - y) / c
        fs = max(-mat.f_y, min(mat.f_y, mat.E_s * eps))
        if y < a:
            fs -= fc
        P += fs * area
        M += fs * area * (yref - y)
        if y >= y_max:
            y_max = y
            eps_t = -eps
    return P, M, eps_t


def _solve_c(layout: Layout, target_P: float, mat: Materials) -> float:
    lo, hi = 1e-9 * layout.height, 1e3 * layout.height
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if section_forces(layout, mid, mat)[0] < target_P:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10 * layout.height:
            break
    return 0.5 * (lo + hi)


def flexural_strength(layout: Layout, mat: Materials, P: float = 0.0) -> tuple[float, float, float]:
    """Nominal moment (N*mm), neutral-axis depth and tension strain at axial load P (N)."""
    if layout.steel_area == 0 and P == 0:
        return 0.0, 0.0, math.inf
    c = _solve_c(layout, P, mat)
    _, M, eps_t = section_forces(layout, c, mat)
    return M, c, eps_t


@dataclass(frozen=True)
class InteractionDiagram:
    """Axial-moment polyline from pure tension to pure compression.

    Points are ordered by axial load; moments are nominal (kN*m) and refer to
    compression on the layout's ``y = 0`` face.
    """

    P: tuple  # kN
    M: tuple  # kN*m
    eps_t: tuple
    P_balanced: float
    P0: float

    def moment_at(self, P_kN: float) -> float:
        return float(np.interp(P_kN, self.P, self.M))

    def strain_at(self, P_kN: float) -> float:
        return float(np.interp(P_kN, self.P, self.eps_t))


def interaction_diagram(layout: Layout, mat: Materials, n_positions: int = 21) -> InteractionDiagram:
    h = layout.height
    As = layout.steel_area
    P0 = 0.85 * mat.f_c_prime * (layout.gross_area - As) + mat.f_y * As
    d_t = max(y for y, _ in layout.bars)
    c_bal = mat.eps_cu / (mat.eps_cu + mat.eps_y) * d_t
    c_flex = _solve_c(layout, 0.0, mat)
    cs = sorted(set([h * k / n_positions for k in range(1, n_positions + 1)] + [c_bal, c_flex]))
    pts = [(-mat.f_y * As, 0.0, math.inf)]
    for c in cs:
        P, M, e = section_forces(layout, c, mat)
        pts.append((P, M, e))
    pts.append((P0, 0.0, 0.0))
    pts.sort(key=lambda p: p[0])
    P_arr = np.array([p[0] for p in pts]) * 1e-3
    M_arr = np.array([p[1] for p in pts]) * 1e-6
    e_arr = np.array([p[2] for p in pts])
    # np.interp needs finite values; cap the pure-tension strain
    e_arr = np.where(np.isfinite(e_arr), e_arr, 1.0)
    Pb = section_forces(layout, c_bal, mat)[0] * 1e-3
    return InteractionDiagram(tuple(P_arr), tuple(M_arr), tuple(e_arr), Pb, P0 * 1e-3)


# -- capacities ---------------------------------------------------------------


@dataclass(frozen=True)
class SectionCapacities:
    A_g: float
    A_s_total: float
    rho: float
    I_eff: float
    M_n_pos: float
    M_n_neg: float
    P_n_max: float
    V_n: float
    V_s: float
    V_s_max: float
    V_c: float
    eps_t: float
    A_st_min: float
    S: float
    S_min: float
    rho_bal: float
    d: float
    rho_prime: float = 0.0
    interaction: InteractionDiagram | None = None


def rho_balanced(mat: Materials) -> float:
    return 0.85 * mat.beta1 * mat.f_c_prime / mat.f_y * (mat.eps_cu * mat.E_s) / (mat.eps_cu * mat.E_s + mat.f_y)


def _shear(b: float, d: float, mat: Materials, det: Detailing) -> tuple[float, float, float]:
    sq = math.sqrt(mat.f_c_prime)
    Vc = 0.17 * sq * b * d
    Av = det.stirrup_legs * bar_area(det.stirrup_dia_mm)
    Vs = Av * mat.f_y * d / det.stirrup_spacing_mm
    Vs_max = 0.66 * sq * b * d
    return Vc * 1e-3, Vs * 1e-3, Vs_max * 1e-3


def _clear_spacing(width: float, n: int, dia: float, det: Detailing) -> float:
    inner = width - 2 * det.cover_mm - 2 * det.stirrup_dia_mm
    if n < 2:
        return inner - n * dia
    return (inner - n * dia) / (n - 1)


def beam_layout(record: BeamSectionRecord, det: Detailing) -> Layout:
    h = record.depth_mm
    nb, db = record.bot_bars
    nt, dt = record.top_bars
    y_top = det.cover_mm + det.stirrup_dia_mm + dt / 2
    y_bot = h - det.cover_mm - det.stirrup_dia_mm - db / 2
    return Layout(h, ((0.0, h, record.width_mm),),
                  ((y_top, nt * bar_area(dt)), (y_bot, nb * bar_area(db))))


def column_layout(record: ColumnSectionRecord, det: Detailing) -> Layout:
    """Square column with half the bars on each of two opposite faces."""
    h = record.side_mm
    n, db = record.bars
    y0 = det.cover_mm + det.stirrup_dia_mm + db / 2
    half = n / 2 * bar_area(db)
    return Layout(h, ((0.0, h, h),), ((y0, half), (h - y0, half)))


def derive_beam_capacities(record: BeamSectionRecord, materials: Materials,
                           detailing: Detailing | None = None) -> SectionCapacities:
    det = detailing or Detailing()
    return _beam_caps(record, materials, det)


@lru_cache(maxsize=4096)
def _beam_caps(record, mat, det) -> SectionCapacities:
    lay = beam_layout(record, det)
    b, h = record.width_mm, record.depth_mm
    d = lay.bars[1][0]
    As_bot, As_top = lay.bars[1][1], lay.bars[0][1]
    M_pos, c_pos, et_pos = flexural_strength(lay, mat)
    M_neg, c_neg, et_neg = flexural_strength(lay.flipped(), mat)
    for c in (c_pos, c_neg):
        if c > h:
            raise SectionError(f"beam {record.id}: neutral axis outside the section")
    Vc, Vs, Vs_max = _shear(b, d, mat, det)
    sq = math.sqrt(mat.f_c_prime)
    As_min = max(0.25 * sq, 1.4) / mat.f_y * b * d
    S = min(_clear_spacing(b, record.bot_bars[0], record.bot_bars[1], det),
            _clear_spacing(b, record.top_bars[0], record.top_bars[1], det))
    As = As_bot + As_top
    return SectionCapacities(
        A_g=b * h, A_s_total=As, rho=As_bot / (b * d), I_eff=det.i_eff_beam * b * h**3 / 12,
        M_n_pos=M_pos * 1e-6, M_n_neg=M_neg * 1e-6,
        P_n_max=0.80 * (0.85 * mat.f_c_prime * (b * h - As) + mat.f_y * As) * 1e-3,
        V_n=Vc + Vs, V_s=Vs, V_s_max=Vs_max, V_c=Vc,
        eps_t=min(et_pos, et_neg), A_st_min=As_min, S=S, S_min=det.min_clear_spacing_mm,
        rho_bal=rho_balanced(mat), d=d, rho_prime=As_top / (b * d),
    )


def derive_column_capacities(record: ColumnSectionRecord, materials: Materials, P_u: float = 0.0,
                             detailing: Detailing | None = None) -> SectionCapacities:
    """Column capacities with the flexural strength read at axial load ``P_u`` (kN).

    ``P_u`` above ``P_n_max`` is not an error; the caller reports it as an
    axial-capacity violation.
    """
    det = detailing or Detailing()
    base = _column_caps(record, materials, det)
    M = base.interaction.moment_at(P_u)
    if P_u == 0.0:
        return base
    return replace(base, M_n_pos=M, M_n_neg=M, eps_t=base.interaction.strain_at(P_u))


@lru_cache(maxsize=4096)
def _column_caps(record, mat, det) -> SectionCapacities:
    lay = column_layout(record, det)
    h = record.side_mm
    As = record.steel_mm2
    diag = interaction_diagram(lay, mat)
    M0, c0, et0 = flexural_strength(lay, mat)
    d = lay.bars[1][0]
    Vc, Vs, Vs_max = _shear(h, d, mat, det)
    n, db = record.bars
    S = _clear_spacing(h, n // 2, db, det)
    return SectionCapacities(
        A_g=h * h, A_s_total=As, rho=As / (h * h), I_eff=det.i_eff_column * h**4 / 12,
        M_n_pos=M0 * 1e-6, M_n_neg=M0 * 1e-6, P_n_max=0.80 * diag.P0,
        V_n=Vc + Vs, V_s=Vs, V_s_max=Vs_max, V_c=Vc, eps_t=et0,
        A_st_min=0.01 * h * h, S=S, S_min=det.min_clear_spacing_mm, rho_bal=rho_balanced(mat),
        d=d, interaction=diag,
    )


def derive_wall_capacities(record: WallSectionRecord, materials: Materials,
                           detailing: Detailing | None = None) -> SectionCapacities:
    det = detailing or Detailing()
    return _wall_caps(record, materials, det)


@lru_cache(maxsize=4096)
def _wall_caps(record, mat, det) -> SectionCapacities:
    lw = det.wall_length_mm
    lay = record.layout(lw, det.cover_mm)
    diag = interaction_diagram(lay, mat)
    M0, _, et0 = flexural_strength(lay, mat)
    d = 0.8 * lw
    Vc, Vs, Vs_max = _shear(record.t_w_mm, d, mat, det)
    return SectionCapacities(
        A_g=lay.gross_area, A_s_total=lay.steel_area, rho=lay.steel_area / lay.gross_area,
        I_eff=det.i_eff_wall * lay.gross_inertia(), M_n_pos=M0 * 1e-6, M_n_neg=M0 * 1e-6,
        P_n_max=0.80 * diag.P0, V_n=Vc + Vs, V_s=Vs, V_s_max=Vs_max, V_c=Vc, eps_t=et0,
        A_st_min=0.0, S=record.s_sh_mm - record.bar_diameter_mm, S_min=det.min_clear_spacing_mm,
        rho_bal=rho_balanced(mat), d=d, interaction=diag,
    )


def derive_wall_terms(record: WallSectionRecord, materials: Materials, wall_length_mm: float,
                      P: float, V: float, A_s: float | None = None,
                      A_s_prime: float | None = None) -> tuple[float, float, bool]:
    """Table-lookup terms for a wall hinge.

    Returns ``((A_s - A's) f_y + P) / (t_w l_w f'c)``, ``V / (t_w l_w sqrt(f'c))``
    (SI units, P and V in kN) and whether boundary elements exist. Tension and
    compression boundary steel default to equal (symmetric walls).
    """
    if wall_length_mm <= 0:
        raise ValueError("wall length must be positive")
    As = A_s or 0.0
    Asp = A_s if A_s_prime is None else A_s_prime
    Asp = Asp or 0.0
    tw, fc = record.t_w_mm, materials.f_c_prime
    axial = ((As - Asp) * materials.f_y + P * 1e3) / (tw * wall_length_mm * fc)
    shear = V * 1e3 / (tw * wall_length_mm * math.sqrt(fc))
    return axial, shear, record.has_boundary


def capacities_for(record, materials: Materials, detailing: Detailing) -> SectionCapacities:
    if isinstance(record, BeamSectionRecord):
        return _beam_caps(record, materials, detailing)
    if isinstance(record, ColumnSectionRecord):
        return _column_caps(record, materials, detailing)
    return _wall_caps(record, materials, detailing)
