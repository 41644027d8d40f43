"""Frame topology, member grouping, load combinations and the weight objective."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .sections import (
    Catalog,
    Detailing,
    Materials,
    capacities_for,
    gross_and_steel_area,
)

G = 9.81

KINDS = ("beam", "column", "wall")


@dataclass(frozen=True)
class GeometryConfig:
    bay_width_m: float = 5.0
    story_height_m: float = 3.0
    dead_kg_m2: float = 600.0
    live_kg_m2: float = 200.0
    tributary_width_m: float = 5.0

    def __post_init__(self):
        for name in ("bay_width_m", "story_height_m", "tributary_width_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.dead_kg_m2 < 0 or self.live_kg_m2 < 0:
            raise ValueError("floor loads must be non-negative")


@dataclass(frozen=True)
class Story:
    height: float  # m
    dead: float  # kN/m2
    live: float  # kN/m2
    tributary_width: float  # m


@dataclass(frozen=True)
class Member:
    kind: str  # beam | column | wall | link
    i: int
    j: int
    story: int  # 0-based story index; beams/links sit at the top of their story
    group: str
    offset: float = 0.0  # horizontal offset of both ends from the nodes (m), walls only
    bay: int = -1


@dataclass(frozen=True)
class FrameModel:
    """Planar frame on a regular grid.

    Node ``level * (n_bays + 1) + column_line`` sits at the intersection of a
    floor level (0 = base) and a column line. Walls are line elements at the
    bay centreline, hung from the bay's left column line through a rigid arm;
    the floor of a wall bay is a stiff ``link`` member.
    """

    nodes: tuple  # ((x, y), ...) in m
    members: tuple
    stories: tuple
    bays: tuple  # bay widths (m)
    wall_bays: tuple = ()  # 1-based bay indices hosting walls
    groups: tuple = ()  # ordered (kind, group name) pairs
    name: str = "custom"

    def __post_init__(self):
        n = len(self.nodes)
        for m in self.members:
            if not (0 <= m.i < n and 0 <= m.j < n):
                raise ValueError(f"member {m} references a missing node")
        for s in self.stories:
            if s.height <= 0:
                raise ValueError("story heights must be positive")
        known = {g for _, g in self.groups}
        for m in self.members:
            if m.kind != "link" and m.group not in known:
                raise ValueError(f"member group {m.group!r} not declared")

    @property
    def n_stories(self) -> int:
        return len(self.stories)

    @property
    def n_bays(self) -> int:
        return len(self.bays)

    def node_at(self, level: int, line: int) -> int:
        return level * (self.n_bays + 1) + line

    def level_nodes(self, level: int) -> list[int]:
        return [self.node_at(level, c) for c in range(self.n_bays + 1)]

    def elevations(self) -> list[float]:
        out, y = [], 0.0
        for s in self.stories:
            y += s.height
            out.append(y)
        return out

    def group_names(self, kind: str) -> list[str]:
        return [g for k, g in self.groups if k == kind]

    @property
    def total_height(self) -> float:
        return sum(s.height for s in self.stories)


def build_frame(n_stories: int, bay_widths: Sequence[float], wall_bays: Sequence[int] = (),
                geometry: GeometryConfig | None = None, grouping: str = "story",
                name: str = "custom") -> FrameModel:
    """Regular frame with optional walls.

    ``grouping='story'`` gives one beam, column and wall group per story;
    ``'uniform'`` one group per member kind.
    """
    geo = geometry or GeometryConfig()
    if n_stories < 1 or not bay_widths:
        raise ValueError("need at least one story and one bay")
    if grouping not in ("story", "uniform"):
        raise ValueError(f"unknown grouping {grouping!r}")
    n_bays = len(bay_widths)
    for b in wall_bays:
        if not 1 <= b <= n_bays:
            raise ValueError(f"wall bay {b} outside 1..{n_bays}")
    dead = geo.dead_kg_m2 * G / 1000.0
    live = geo.live_kg_m2 * G / 1000.0
    stories = tuple(Story(geo.story_height_m, dead, live, geo.tributary_width_m) for _ in range(n_stories))

    xs = [0.0]
    for b in bay_widths:
        xs.append(xs[-1] + b)
    nodes = []
    y = 0.0
    for level in range(n_stories + 1):
        if level:
            y += stories[level - 1].height
        nodes.extend((x, y) for x in xs)

    def gname(kind, s):
        prefix = kind[0].upper()
        return f"{prefix}{s + 1}" if grouping == "story" else prefix

    def node(level, line):
        return level * (n_bays + 1) + line

    members = []
    for s in range(n_stories):
        for c in range(n_bays + 1):
            members.append(Member("column", node(s, c), node(s + 1, c), s, gname("column", s)))
        for b in range(n_bays):
            i, j = node(s + 1, b), node(s + 1, b + 1)
            if b + 1 in wall_bays:
                members.append(Member("link", i, j, s, "", bay=b + 1))
            else:
                members.append(Member("beam", i, j, s, gname("beam", s), bay=b + 1))
        for b in sorted(wall_bays):
            members.append(Member("wall", node(s, b - 1), node(s + 1, b - 1), s, gname("wall", s),
                                  offset=bay_widths[b - 1] / 2, bay=b))

    groups = []
    for kind in KINDS:
        if kind == "wall" and not wall_bays:
            continue
        names = []
        for m in members:
            if m.kind == kind and m.group not in names:
                names.append(m.group)
        groups.extend((kind, g) for g in names)
    return FrameModel(tuple(nodes), tuple(members), stories, tuple(float(b) for b in bay_widths),
                      tuple(sorted(wall_bays)), tuple(groups), name)


CASES = {
    "story4": (4, 4, (2, 4)),
    "story8": (8, 3, (2,)),
    "story12": (12, 3, (2,)),
}


def build_case(case_id: str, geometry: GeometryConfig | None = None) -> FrameModel:
    """One of the three case-study frames."""
    if case_id not in CASES:
        raise ValueError(f"unknown case {case_id!r}; expected one of {sorted(CASES)}")
    geo = geometry or GeometryConfig()
    n_st, n_bays, walls = CASES[case_id]
    return build_frame(n_st, [geo.bay_width_m] * n_bays, walls, geo, "story", case_id)


# -- load combinations --------------------------------------------------------


@dataclass(frozen=True)
class LoadCombination:
    tag: str
    d_factor: float
    l_factor: float
    e_factor: float = 0.0

    @property
    def factors(self) -> tuple[float, float, float]:
        return (self.d_factor, self.l_factor, self.e_factor)


COMBINATIONS = {
    "ACI-1": LoadCombination("ACI-1", 1.2, 1.6, 0.0),
    "ACI-2": LoadCombination("ACI-2", 1.2, 1.0, 1.4),
    "ACI-3": LoadCombination("ACI-3", 0.9, 0.0, 1.4),
    "G-strength": LoadCombination("G-strength", 1.2, 1.6, 0.0),
    "G-pbd": LoadCombination("G-pbd", 1.1, 1.1, 0.0),
}

STRENGTH_COMBINATIONS = ("G-strength", "ACI-1", "ACI-2", "ACI-3")


def factored_load(combination, D, L, E=0.0):
    """Linear combination of dead, live and earthquake effects.

    Works elementwise on numpy arrays. ``E`` is scaled by the combination's
    earthquake factor, so gravity-only tags ignore it; the sign of ``E`` is
    the caller's (envelopes evaluate both).
    """
    combo = COMBINATIONS[combination] if isinstance(combination, str) else combination
    d, l, e = combo.factors
    out = d * D + l * L
    if e:
        out = out + e * E
    return out


# -- sized frames -------------------------------------------------------------


@dataclass(frozen=True)
class DesignVector:
    beam_group_ids: tuple = ()
    column_group_ids: tuple = ()
    wall_group_ids: tuple = ()

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.beam_group_ids) + tuple(self.column_group_ids) + tuple(self.wall_group_ids)

    @classmethod
    def from_flat(cls, model: FrameModel, values: Sequence[int]) -> "DesignVector":
        nb = len(model.group_names("beam"))
        nc = len(model.group_names("column"))
        nw = len(model.group_names("wall"))
        vals = [int(v) for v in values]
        if len(vals) != nb + nc + nw:
            raise ValueError(f"design has {len(vals)} entries, model has {nb + nc + nw} groups")
        return cls(tuple(vals[:nb]), tuple(vals[nb:nb + nc]), tuple(vals[nb + nc:]))

    def ids_for(self, kind: str) -> tuple:
        return {"beam": self.beam_group_ids, "column": self.column_group_ids,
                "wall": self.wall_group_ids}[kind]

    def __str__(self) -> str:
        def j(v):
            return "-".join(str(x) for x in v)

        return f"B[{j(self.beam_group_ids)}] C[{j(self.column_group_ids)}] W[{j(self.wall_group_ids)}]"


class DesignError(IndexError):
    """A design index falls outside its catalog."""


@dataclass(frozen=True)
class Catalogs:
    beam: Catalog
    column: Catalog
    wall: Catalog

    def of(self, kind: str) -> Catalog:
        return getattr(self, kind)

    def bounds(self, model: FrameModel) -> list[tuple[int, int]]:
        out = []
        for kind in KINDS:
            out += [(1, len(self.of(kind)))] * len(model.group_names(kind))
        return out


@dataclass(frozen=True)
class SizedFrame:
    model: FrameModel
    design: DesignVector
    records: tuple  # per member; None for links
    capacities: tuple  # per member SectionCapacities; None for links
    materials: Materials = field(default_factory=Materials)
    detailing: Detailing = field(default_factory=Detailing)

    def member_areas(self, index: int) -> tuple[float, float]:
        """(concrete, steel) areas in m^2 for a member."""
        rec = self.records[index]
        if rec is None:
            return 0.0, 0.0
        a_c, a_s = gross_and_steel_area(rec, self.detailing)
        return a_c * 1e-6, a_s * 1e-6

    def column_pairs(self):
        """(lower, upper) member index pairs of stacked columns."""
        model = self.model
        by_bottom = {m.i: k for k, m in enumerate(model.members) if m.kind == "column"}
        for k, m in enumerate(model.members):
            if m.kind == "column" and m.j in by_bottom:
                yield k, by_bottom[m.j]

    def beam_column_pairs(self):
        """(beam, column) member index pairs meeting at a joint."""
        model = self.model
        cols_at: dict[int, list[int]] = {}
        for k, m in enumerate(model.members):
            if m.kind == "column":
                cols_at.setdefault(m.i, []).append(k)
                cols_at.setdefault(m.j, []).append(k)
        for k, m in enumerate(model.members):
            if m.kind == "beam":
                for n in (m.i, m.j):
                    for c in cols_at.get(n, []):
                        yield k, c


def apply_design(model: FrameModel, design: DesignVector, catalogs: Catalogs,
                 materials: Materials | None = None, detailing: Detailing | None = None) -> SizedFrame:
    """Resolve every member's catalog row (by weight rank) and capacities."""
    materials = materials or Materials()
    if detailing is None:
        detailing = Detailing(wall_length_mm=_wall_length_mm(model))
    chosen = {}
    for kind in KINDS:
        names = model.group_names(kind)
        ids = design.ids_for(kind)
        if len(ids) != len(names):
            raise DesignError(f"{kind}: design has {len(ids)} indices for {len(names)} groups")
        cat = catalogs.of(kind)
        for name, rank in zip(names, ids):
            try:
                chosen[name] = cat.by_rank(int(rank))
            except IndexError as exc:
                raise DesignError(f"group {name}: {exc}") from None
    records, caps = [], []
    for m in model.members:
        if m.kind == "link":
            records.append(None)
            caps.append(None)
            continue
        rec = chosen[m.group]
        records.append(rec)
        caps.append(capacities_for(rec, materials, detailing))
    return SizedFrame(model, design, tuple(records), tuple(caps), materials, detailing)


def _wall_length_mm(model: FrameModel) -> float:
    if not model.wall_bays:
        return Detailing().wall_length_mm
    widths = {model.bays[b - 1] for b in model.wall_bays}
    if len(widths) > 1:
        raise ValueError("wall bays must share one width")
    return widths.pop() * 1000.0


def member_length(model: FrameModel, member: Member) -> float:
    (x1, y1), (x2, y2) = model.nodes[member.i], model.nodes[member.j]
    return ((x2 - x1) ** 2 + (y2 - y1) ** 2) ** 0.5


def structure_weight(sized: SizedFrame) -> float:
    """Steel plus concrete mass of all designed members (kg).

    Concrete is summed over beams, columns and walls alike, using gross
    section areas.
    """
    mat = sized.materials
    steel = concrete = 0.0
    for k, m in enumerate(sized.model.members):
        if m.kind == "link":
            continue
        length = member_length(sized.model, m)
        a_c, a_s = sized.member_areas(k)
        steel += mat.rho_steel * length * a_s
        concrete += mat.rho_concrete * length * a_c
    return steel + concrete


def weight_of(members, materials: Materials | None = None) -> float:
    """Mass (kg) of ``(length_m, concrete_m2, steel_m2)`` triples."""
    mat = materials or Materials()
    return sum(mat.rho_steel * L * a_s + mat.rho_concrete * L * a_c for L, a_c, a_s in members)

