"""From a design vector to a penalized objective: analyses, constraints and caching."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analysis as an
from .frame import (
    COMBINATIONS,
    STRENGTH_COMBINATIONS,
    Catalogs,
    DesignVector,
    FrameModel,
    SizedFrame,
    apply_design,
    structure_weight,
)
from .perf_constraints import (
    LEVELS,
    AllowableTables,
    LevelState,
    PenaltyParams,
    PenaltyReport,
    StrengthDemands,
    default_tables,
    performance_violations,
    strength_violations,
)
from .sections import Detailing, Materials


@dataclass(frozen=True)
class SeismicSettings:
    """Hazard and analysis settings shared by all evaluations of a run.

    ``S_a`` maps each level to a spectral acceleration (g); beyond the corner
    period ``t_c`` (if set) it decays as ``S_a * t_c / T``. ``C0 = None``
    selects the story-count table. The equivalent static design force is
    ``base_shear_coeff * W`` unless ``base_shear_kN`` is given.
    """

    S_a: tuple = (("IO", 0.6), ("LS", 0.8), ("CP", 1.0))
    t_c: float | None = None
    C0: float | None = None
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0
    base_shear_coeff: float = 0.1
    base_shear_kN: float | None = None
    elastic_drift_limit: float = 0.0045
    pushover_roof_drift: float = 0.04
    pushover_steps: int = 200
    alpha: float = 1e-3
    p_delta: bool = True
    unreached_violation: float = 10.0
    mechanism_violation: float = 10.0

    def __post_init__(self):
        sa = dict(self.S_a)
        for lv, v in sa.items():
            if lv not in LEVELS or not v > 0:
                raise ValueError(f"bad spectral acceleration {lv}={v}")
        for name in ("C1", "C2", "C3", "base_shear_coeff", "elastic_drift_limit", "pushover_roof_drift",
                     "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.pushover_steps < 1:
            raise ValueError("pushover_steps must be at least 1")

    def spectral_acceleration(self, level: str, T: float) -> float:
        sa = dict(self.S_a)[level]
        if self.t_c and T > self.t_c:
            return sa * self.t_c / T
        return sa


@dataclass
class Evaluation:
    """Everything computed for one design (kept for reporting)."""

    sized: SizedFrame
    report: PenaltyReport
    trace: an.PushoverTrace | None = None
    targets: dict = field(default_factory=dict)
    states: list = field(default_factory=list)
    elastic_drifts: np.ndarray | None = None
    T_i: float | None = None
    T_e: float | None = None


def evaluate_sized(sized: SizedFrame, levels: Sequence[str], settings: SeismicSettings | None = None,
                   tables: AllowableTables | None = None, params: PenaltyParams | None = None) -> Evaluation:
    """Weight, all 21 violation terms and the penalized objective of a sized frame."""
    settings = settings or SeismicSettings()
    tables = tables or default_tables()
    F = structure_weight(sized)
    notes: list[str] = []
    system = an.build_system(sized)
    D, L = an.gravity_cases(system)
    masses = an.level_masses(system, D)
    pattern = an.frame_lateral_pattern(system, D)
    W = float(masses.sum() * an.G)
    V_design = settings.base_shear_kN if settings.base_shear_kN is not None else settings.base_shear_coeff * W
    E = an.lateral_case(system, pattern * V_design)
    try:
        rD, rL, rE = an.solve_many(system, [D, L, E])
    except an.MechanismError:
        terms = {1: settings.mechanism_violation}
        return Evaluation(sized, PenaltyReport.build(terms, F, params, ["mechanism under linear analysis"]))

    results, tags = [], []
    for tag in STRENGTH_COMBINATIONS:
        d, l_, e = COMBINATIONS[tag].factors
        for sign in ((1.0, -1.0) if e else (0.0,)):
            r = an.combine((rD, rL, rE), (d, l_, e * sign))
            results.append(r)
            tags.append(f"{tag}{'+' if sign > 0 else '-' if sign < 0 else ''}E" if e else tag)
    demands = StrengthDemands.from_results(tags, results)
    terms = strength_violations(sized, demands)

    elastic = an.drifts_from_displacements(system.floor_displacements(rE.u), system.heights)
    ev = Evaluation(sized, None, elastic_drifts=elastic)  # type: ignore[arg-type]
    states: list[LevelState] = []
    if levels:
        d, l_, _ = COMBINATIONS["G-pbd"].factors
        gravity = D.scaled(d) + L.scaled(l_)
        H = sum(system.heights)
        target = settings.pushover_roof_drift * H
        ctrl = an.PushoverControl(target, target / settings.pushover_steps, max_steps=settings.pushover_steps + 5,
                                  alpha=settings.alpha, p_delta=settings.p_delta)
        try:
            trace = an.pushover(system, gravity, pattern, ctrl)
        except (an.MechanismError, an.ConvergenceError) as exc:
            trace = None
            notes.append(f"pushover failed: {exc}")
        ev.trace = trace
        if trace is not None and trace.n_steps > 1 and trace.unit_story_disp is not None:
            props = an.curve_properties(trace)
            T_i = an.rayleigh_period(masses, pattern, trace.unit_story_disp)
            T_e = an.effective_period(T_i, props.K_i, min(props.K_e, props.K_i))
            ev.T_i, ev.T_e = T_i, T_e
            C0 = settings.C0 if settings.C0 is not None else an.c0_factor(system.n_stories)
            for lv in levels:
                sa = settings.spectral_acceleration(lv, T_e)
                dt = an.target_displacement(an.TargetDisplacementInputs(C0, settings.C1, settings.C2,
                                                                        settings.C3, sa, T_e))
                ev.targets[lv] = dt
                try:
                    s = an.state_at(trace, dt)
                    states.append(LevelState(lv, dt, s.drifts, s.rotations, s.moments, s.shear, s.axial))
                except an.TargetNotReached:
                    notes.append(f"{lv}: target {dt:.4f} m not reached ({trace.status} at {trace.max_roof:.4f} m)")
                    states.append(LevelState(lv, dt, None, None, None, None, None))
        else:
            for lv in levels:
                notes.append(f"{lv}: no lateral response")
                states.append(LevelState(lv, math.nan, None, None, None, None, None))
    terms.update(performance_violations(sized, states, tables, elastic, settings.elastic_drift_limit,
                                        settings.unreached_violation))
    ev.states = states
    ev.report = PenaltyReport.build(terms, F, params, notes)
    return ev


class Evaluator:
    """Thread-safe memoized map from flat design indices to a PenaltyReport."""

    def __init__(self, model: FrameModel, catalogs: Catalogs, levels: Sequence[str],
                 settings: SeismicSettings | None = None, tables: AllowableTables | None = None,
                 params: PenaltyParams | None = None, materials: Materials | None = None,
                 detailing: Detailing | None = None):
        self.model = model
        self.catalogs = catalogs
        self.levels = tuple(levels)
        self.settings = settings or SeismicSettings()
        self.tables = tables or default_tables()
        self.params = params or PenaltyParams()
        self.materials = materials or Materials()
        self.detailing = detailing
        self.bounds = catalogs.bounds(model)
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.calls = 0

    def design(self, values) -> DesignVector:
        return DesignVector.from_flat(self.model, [int(v) for v in values])

    def sized(self, values) -> SizedFrame:
        return apply_design(self.model, self.design(values), self.catalogs, self.materials, self.detailing)

    def evaluate(self, values) -> Evaluation:
        return evaluate_sized(self.sized(values), self.levels, self.settings, self.tables, self.params)

    def __call__(self, values) -> PenaltyReport:
        key = tuple(int(v) for v in values)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        rep = self.evaluate(key).report
        with self._lock:
            self._cache.setdefault(key, rep)
            self.calls += 1
        return rep

    @property
    def unique_evaluations(self) -> int:
        return len(self._cache)
