"""Run configuration: a sectioned ``key = value`` file plus named presets."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .abc import ABCConfig
from .evaluation import SeismicSettings
from .frame import CASES, KINDS, Catalogs, FrameModel, GeometryConfig, build_case, build_frame
from .perf_constraints import LEVELS, PenaltyParams
from .sections import Materials


class ConfigError(ValueError):
    pass


# Colony settings printed per level and case (bees, "repetitive loads" read as
# iterations). Keys: case -> level -> (N_p, I_max).
PAPER_COLONY = {
    "story4": {"IO": (30, 105), "LS": (30, 140), "CP": (30, 140)},
    "story8": {"IO": (30, 105), "LS": (55, 80), "CP": (30, 140)},
    "story12": {"IO": (30, 150), "LS": (30, 140), "CP": (30, 150)},
}

PRESETS = ("paper", "paper-io", "paper-ls", "paper-cp", "desk")


@dataclass(frozen=True)
class CustomCase:
    stories: int = 2
    bays: tuple = (5.0,)
    wall_bays: tuple = ()
    grouping: str = "uniform"


@dataclass(frozen=True)
class RunConfig:
    case: str = "story4"
    levels: tuple = LEVELS
    abc: ABCConfig = field(default_factory=ABCConfig)
    level_abc: tuple = ()  # ((level, {field: value}), ...) per-level overrides
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    materials: Materials = field(default_factory=Materials)
    seismic: SeismicSettings = field(default_factory=SeismicSettings)
    penalty: PenaltyParams = field(default_factory=PenaltyParams)
    custom: CustomCase | None = None
    bounds: tuple = ()  # ((kind, lo, hi), ...) rank restrictions
    design: tuple | None = None  # flat design for ``analyze``
    data_dir: str | None = None
    allowables: str | None = None
    allowables_override: str | None = None
    output_dir: str = "framepbo-out"
    preset: str | None = None

    def __post_init__(self):
        if not self.levels:
            raise ConfigError("at least one performance level is required")
        for lv in self.levels:
            if lv not in LEVELS:
                raise ConfigError(f"unknown level {lv!r}")
        if self.custom is None and self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}")

    def model(self) -> FrameModel:
        if self.custom is not None:
            c = self.custom
            return build_frame(c.stories, list(c.bays), c.wall_bays, self.geometry, c.grouping, self.case)
        return build_case(self.case, self.geometry)

    def abc_for(self, level: str, bounds) -> ABCConfig:
        over = dict(dict(self.level_abc).get(level, {}))
        return replace(self.abc, bounds=tuple(bounds), **over)

    def design_bounds(self, model: FrameModel, catalogs: Catalogs) -> list[tuple[int, int]]:
        limits = {kind: (1, len(catalogs.of(kind))) for kind in KINDS}
        for kind, lo, hi in self.bounds:
            n = len(catalogs.of(kind))
            if not 1 <= lo <= hi <= n:
                raise ConfigError(f"{kind} bounds {lo}:{hi} outside 1..{n}")
            limits[kind] = (lo, hi)
        out = []
        for kind in KINDS:
            out += [limits[kind]] * len(model.group_names(kind))
        return out


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def _coerce(cls, section: configparser.SectionProxy, name: str):
    """Build a dataclass from the keys of a config section (typed by defaults)."""
    kw = {}
    known = {f.name: f for f in fields(cls)}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"[{name}] unknown key {key!r}")
        default = getattr(cls(), key) if key != "bounds" else ()
        try:
            if isinstance(default, bool):
                kw[key] = section.getboolean(key)
            elif isinstance(default, int) and not isinstance(default, bool):
                kw[key] = int(raw)
            elif raw.strip().lower() in ("none", "auto", ""):
                kw[key] = None
            else:
                kw[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{name}] {key}: {exc}") from None
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] {exc}") from None


def _seismic(section) -> SeismicSettings:
    kw = {}
    sa = dict(SeismicSettings().S_a)
    base = SeismicSettings()
    for key, raw in section.items():
        if key.lower().startswith("s_a_"):
            lv = key[4:].upper()
            if lv not in LEVELS:
                raise ConfigError(f"[spectrum] unknown level in {key!r}")
            sa[lv] = float(raw)
            continue
        if not hasattr(base, key):
            raise ConfigError(f"[spectrum] unknown key {key!r}")
        default = getattr(base, key)
        if isinstance(default, bool):
            kw[key] = section.getboolean(key)
        elif isinstance(default, int):
            kw[key] = int(raw)
        elif raw.strip().lower() in ("none", "auto", ""):
            kw[key] = None
        else:
            kw[key] = float(raw)
    try:
        return SeismicSettings(S_a=tuple((lv, sa[lv]) for lv in LEVELS), **kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[spectrum] {exc}") from None


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case (N_p, I_max)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {"run", "abc", "geometry", "materials", "spectrum", "penalty", "custom", "bounds", "design", "data",
             "abc.IO", "abc.LS", "abc.CP"}
    for s in cp.sections():
        if s not in known:
            raise ConfigError(f"unknown section [{s}]")
    kw: dict = {}
    run = cp["run"] if cp.has_section("run") else {}
    if "case" in run:
        kw["case"] = run["case"].strip()
    if "levels" in run:
        kw["levels"] = tuple(v.strip().upper().replace("-", "") for v in run["levels"].split(",") if v.strip())
    if "output_dir" in run:
        kw["output_dir"] = _path(run["output_dir"], base_dir)
    if "preset" in run:
        kw["preset"] = run["preset"].strip()
    seed = int(run["seed"]) if "seed" in run else None
    threads = int(run["threads"]) if "threads" in run else None

    if cp.has_section("abc"):
        abc = _abc_section(cp["abc"], "abc")
    else:
        abc = ABCConfig()
    if seed is not None:
        abc = replace(abc, seed=seed)
    if threads is not None:
        abc = replace(abc, threads=threads)
    kw["abc"] = abc
    level_abc = []
    for lv in LEVELS:
        if cp.has_section(f"abc.{lv}"):
            level_abc.append((lv, _abc_dict(cp[f"abc.{lv}"], f"abc.{lv}")))
    kw["level_abc"] = tuple(level_abc)
    if cp.has_section("geometry"):
        kw["geometry"] = _coerce(GeometryConfig, cp["geometry"], "geometry")
    if cp.has_section("materials"):
        kw["materials"] = _coerce(Materials, cp["materials"], "materials")
    if cp.has_section("spectrum"):
        kw["seismic"] = _seismic(cp["spectrum"])
    if cp.has_section("penalty"):
        kw["penalty"] = _coerce(PenaltyParams, cp["penalty"], "penalty")
    if cp.has_section("custom"):
        c = cp["custom"]
        try:
            kw["custom"] = CustomCase(int(c.get("stories", "2")), _floats(c.get("bays", "5.0")),
                                      _ints(c.get("wall_bays", "")), c.get("grouping", "uniform").strip())
        except ValueError as exc:
            raise ConfigError(f"[custom] {exc}") from None
        kw.setdefault("case", "custom")
    if cp.has_section("bounds"):
        out = []
        for kind, raw in cp["bounds"].items():
            if kind not in KINDS:
                raise ConfigError(f"[bounds] unknown member kind {kind!r}")
            try:
                lo, hi = (int(v) for v in raw.split(":"))
            except ValueError:
                raise ConfigError(f"[bounds] {kind}: expected 'lo:hi'") from None
            out.append((kind, lo, hi))
        kw["bounds"] = tuple(out)
    if cp.has_section("design"):
        d = cp["design"]
        try:
            flat = []
            for kind in ("beams", "columns", "walls"):
                flat += list(_ints(d.get(kind, "")))
        except ValueError as exc:
            raise ConfigError(f"[design] {exc}") from None
        kw["design"] = tuple(flat)
    if cp.has_section("data"):
        d = cp["data"]
        for key in ("data_dir", "allowables", "allowables_override"):
            if key in d and d[key].strip():
                kw[key] = _path(d[key], base_dir)
    try:
        cfg = RunConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.preset:
        cfg = apply_preset(cfg, cfg.preset)
    return cfg


_ABC_INT = {"N_p", "I_L", "I_max", "r", "seed", "threads"}
_ABC_FLOAT = {"VCP", "divergence_window"}
_ABC_BOOL = {"abort_on_divergence"}


def _abc_dict(section, name) -> dict:
    kw = {}
    for key, raw in section.items():
        try:
            if key in _ABC_INT:
                kw[key] = None if raw.strip().lower() in ("none", "auto") else int(raw)
            elif key in _ABC_FLOAT:
                kw[key] = float(raw)
            elif key in _ABC_BOOL:
                kw[key] = section.getboolean(key)
            else:
                raise ConfigError(f"[{name}] unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"[{name}] {key}: {exc}") from None
    return kw


def _abc_section(section, name) -> ABCConfig:
    try:
        return ABCConfig(**_abc_dict(section, name))
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from None


def _path(raw: str, base_dir: Path | None) -> str:
    p = Path(raw.strip())
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return str(p)


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text, p.parent)


def apply_preset(cfg: RunConfig, name: str) -> RunConfig:
    """Colony settings from the printed per-level table, or the reduced desk set.

    ``paper-io`` / ``paper-ls`` / ``paper-cp`` also restrict the run to that
    level. Cases without printed settings use the 4-story values.
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {PRESETS}")
    if name == "desk":
        return replace(cfg, preset=name, abc=replace(cfg.abc, N_p=20, I_max=40, r=1), level_abc=())
    table = PAPER_COLONY.get(cfg.case, PAPER_COLONY["story4"])
    levels = cfg.levels if name == "paper" else (name.split("-")[1].upper(),)
    per = tuple((lv, {"N_p": table[lv][0], "I_max": table[lv][1]}) for lv in levels)
    return replace(cfg, preset=name, levels=levels, level_abc=per)


def default_config_text() -> str:
    return """\
[run]
case = story4
levels = IO, LS, CP
seed = 0
threads = 1
output_dir = framepbo-out

[abc]
N_p = 30
I_max = 100
VCP = 0.2
r = 1

[spectrum]
S_a_IO = 0.6
S_a_LS = 0.8
S_a_CP = 1.0
base_shear_coeff = 0.1
"""
