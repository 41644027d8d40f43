"""Artificial Bee Colony search over bounded (optionally integer) vectors.

The evaluator is any callable returning either a float or an object with
``phi`` (penalized objective) and ``C`` (total violation) attributes. Every
random number is drawn by one sequential generator before a batch of
candidates is dispatched, and results are merged in source order, so a
seed reproduces a run exactly whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np


class DivergenceError(RuntimeError):
    """No penalty-free source inside the divergence window (abort policy)."""

    def __init__(self, message: str, result: "RunResult | None" = None):
        super().__init__(message)
        self.result = result


class EvaluationError(RuntimeError):
    """The evaluator raised; ``design`` holds the failing candidate."""

    def __init__(self, message: str, design):
        super().__init__(message)
        self.design = design


@dataclass(frozen=True)
class ABCConfig:
    N_p: int = 30
    I_L: int | None = None  # default N_s * D
    I_max: int = 100
    VCP: float = 0.2
    r: int = 1
    seed: int = 0
    bounds: tuple = ()
    divergence_window: float = 0.10
    abort_on_divergence: bool = False
    threads: int = 1
    integer: bool = True

    def __post_init__(self):
        if self.N_p < 2:
            raise ValueError("N_p must be at least 2")
        if self.I_L is not None and self.I_L < 1:
            raise ValueError("I_L must be >= 1")
        if self.I_max < 0:
            raise ValueError("I_max must be >= 0")
        if not 0 < self.VCP <= 1:
            raise ValueError("VCP must lie in (0, 1]")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if not 0 < self.divergence_window <= 1:
            raise ValueError("divergence_window must lie in (0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"bad bounds ({lo}, {hi})")

    @property
    def N_s(self) -> int:
        # half the colony are employed bees; an odd colony rounds down
        return self.N_p // 2

    @property
    def D(self) -> int:
        return len(self.bounds)

    @property
    def limit(self) -> int:
        return self.I_L if self.I_L is not None else self.N_s * self.D

    @cached_property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds], dtype=float)

    @cached_property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds], dtype=float)


@dataclass
class FoodSource:
    x: np.ndarray
    f: float = math.inf
    trial: int = 0
    result: Any = None


@dataclass(frozen=True)
class HistoryRow:
    iteration: int
    best_phi: float
    best_weight: float
    best_C: float
    feasible_count: int


@dataclass
class RunResult:
    best_design: tuple
    best_result: Any
    history: list
    diverged: bool
    evaluations: int
    seed: int
    per_run: list = field(default_factory=list)  # (seed, best_phi, evaluations, diverged) per run

    @property
    def best_phi(self) -> float:
        return _phi(self.best_result)

    @property
    def phi_std(self) -> float:
        vals = [p[1] for p in self.per_run] or [self.best_phi]
        return float(np.std(vals))


def _phi(result) -> float:
    return float(getattr(result, "phi", result))


def _C(result) -> float:
    return float(getattr(result, "C", 0.0))


def _F(result) -> float:
    return float(getattr(result, "F", _phi(result)))


# -- operators ---------------------------------------------------------------------


def init_population(config: ABCConfig, rng: np.random.Generator) -> list[FoodSource]:
    lo, hi = config.lower, config.upper
    u = rng.random((config.N_s, config.D))
    return [FoodSource(lo + u[i] * (hi - lo)) for i in range(config.N_s)]


def neighbor_move(x_i: np.ndarray, x_k: np.ndarray, config: ABCConfig, rng: np.random.Generator,
                  dims: Sequence[int] | None = None, phis: Sequence[float] | None = None) -> np.ndarray:
    """Perturb a VCP fraction of dimensions (at least one) towards/away from a partner."""
    D = len(x_i)
    if dims is None:
        n = max(1, int(round(config.VCP * D)))
        dims = rng.permutation(D)[:n]
    else:
        dims = np.asarray(dims, dtype=int)
    if phis is None:
        phis = rng.uniform(-1.0, 1.0, size=len(dims))
    v = np.array(x_i, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    v[dims] += np.asarray(phis) * (v[dims] - x_k[dims])
    if config.bounds:
        np.maximum(v, config.lower, out=v)
        np.minimum(v, config.upper, out=v)
    return v


def greedy_select(old: FoodSource, candidate: FoodSource) -> FoodSource:
    """Keep the candidate if it is no worse (ties go to the candidate)."""
    if candidate.f <= old.f:
        candidate.trial = 0
        return candidate
    old.trial += 1
    return old


def onlooker_probability(f_i: float, f_min: float) -> float:
    if not (f_min > 0 and f_i > 0):
        raise ValueError("fitness values must be positive")
    if f_i < f_min:
        raise ValueError("f_i must not be below f_min")
    # divide first so f_i == f_min gives exactly 1.0
    return min(1.0, 0.9 * (f_min / f_i) + 0.1)


def _probabilities(fs: np.ndarray) -> np.ndarray:
    f_min = float(fs.min())
    if f_min <= 0:
        # only an exact zero objective can get here; treat it as certainly chosen
        return np.where(fs == f_min, 1.0, 0.1 + 0.9 * np.exp(-(fs - f_min)))
    return np.array([onlooker_probability(f, f_min) for f in fs])


def scout_replace(source: FoodSource, config: ABCConfig, rng: np.random.Generator) -> FoodSource:
    if source.trial < config.limit:
        return source
    lo, hi = config.lower, config.upper
    return FoodSource(lo + rng.random(config.D) * (hi - lo))


def pick_scout(sources: Sequence[FoodSource], limit: int) -> int | None:
    """Index of the single abandoned source to replace, if any (largest trial wins)."""
    best, idx = -1, None
    for i, s in enumerate(sources):
        if s.trial >= limit and s.trial > best:
            best, idx = s.trial, i
    return idx


def decode(x: Sequence[float], bounds: Sequence[tuple]) -> tuple:
    """Round to the nearest integer (halves up) and clamp to integer bounds."""
    out = []
    for v, (lo, hi) in zip(x, bounds):
        n = math.floor(float(v) + 0.5)
        out.append(int(min(max(n, math.ceil(lo)), math.floor(hi))))
    return tuple(out)


# -- driver --------------------------------------------------------------------------


class _Batch:
    def __init__(self, config: ABCConfig, evaluator: Callable, pool: ThreadPoolExecutor | None):
        self.config = config
        self.evaluator = evaluator
        self.pool = pool
        self.count = 0

    def key(self, x: np.ndarray):
        if self.config.integer:
            return decode(x, self.config.bounds)
        return tuple(float(v) for v in x)

    def __call__(self, xs: Sequence[np.ndarray]) -> list:
        keys = [self.key(x) for x in xs]
        self.count += len(keys)

        def one(k):
            try:
                return self.evaluator(k)
            except Exception as exc:  # noqa: BLE001 - re-raised with the design attached
                raise EvaluationError(f"evaluation failed for {k}: {exc}", k) from exc

        if self.pool is None or len(keys) < 2:
            return [one(k) for k in keys]
        return list(self.pool.map(one, keys))


def _run_once(config: ABCConfig, evaluator: Callable, seed: int, pool) -> RunResult:
    rng = np.random.default_rng(seed)
    batch = _Batch(config, evaluator, pool)
    sources = init_population(config, rng)
    for s, res in zip(sources, batch([s.x for s in sources])):
        s.f, s.result = _phi(res), res

    best = min(sources, key=lambda s: s.f)
    best_key, best_res = batch.key(best.x), best.result
    history: list[HistoryRow] = []

    def note(it):
        feas = sum(1 for s in sources if _C(s.result) == 0.0)
        history.append(HistoryRow(it, _phi(best_res), _F(best_res), _C(best_res), feas))

    def improve(s: FoodSource):
        nonlocal best_key, best_res
        if s.f < _phi(best_res):
            best_key, best_res = batch.key(s.x), s.result

    def phase(indices: Sequence[int]):
        moves = []
        for i in indices:
            k = int(rng.integers(config.N_s - 1))
            k = k + 1 if k >= i else k
            moves.append(neighbor_move(sources[i].x, sources[k].x, config, rng))
        results = batch(moves)
        for i, v, res in zip(indices, moves, results):
            cand = FoodSource(v, _phi(res), 0, res)
            sources[i] = greedy_select(sources[i], cand)
            improve(sources[i])

    note(0)
    diverged = False
    window = math.ceil(config.divergence_window * config.I_max) if config.I_max else 0
    for it in range(1, config.I_max + 1):
        if config.N_s > 1:
            phase(range(config.N_s))
            probs = _probabilities(np.array([s.f for s in sources]))
            chosen, i = [], 0
            while len(chosen) < config.N_s:
                if rng.random() < probs[i]:
                    chosen.append(i)
                i = (i + 1) % config.N_s
            phase(chosen)
        idx = pick_scout(sources, config.limit)
        if idx is not None:
            fresh = scout_replace(sources[idx], config, rng)
            res = batch([fresh.x])[0]
            fresh.f, fresh.result = _phi(res), res
            sources[idx] = fresh
            improve(fresh)
        note(it)
        if it == window and not any(_C(s.result) == 0.0 for s in sources) and _C(best_res) > 0:
            diverged = True
            if config.abort_on_divergence:
                result = RunResult(best_key, best_res, history, True, batch.count, seed)
                raise DivergenceError(f"no penalty-free design after {it} iterations", result)
    return RunResult(best_key, best_res, history, diverged, batch.count, seed)


def derived_seeds(seed: int, r: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(r)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def run(config: ABCConfig, evaluator: Callable) -> RunResult:
    """``r`` independent runs; returns the best one with per-run statistics."""
    if not config.bounds:
        raise ValueError("config.bounds is empty")
    seeds = derived_seeds(config.seed, config.r)
    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        runs = [_run_once(config, evaluator, s, pool) for s in seeds]
    finally:
        if pool is not None:
            pool.shutdown()
    best = min(runs, key=lambda r_: (r_.best_phi, runs.index(r_)))
    best.per_run = [(r_.seed, r_.best_phi, r_.evaluations, r_.diverged) for r_ in runs]
    return best
