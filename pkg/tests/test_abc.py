from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framepbo.abc import (
    ABCConfig,
    DivergenceError,
    EvaluationError,
    FoodSource,
    decode,
    derived_seeds,
    greedy_select,
    init_population,
    neighbor_move,
    onlooker_probability,
    pick_scout,
    run,
    scout_replace,
)


class FixedDraw:
    """Stand-in generator whose uniform draws are a constant."""

    def __init__(self, value):
        self.value = value

    def random(self, size=None):
        return np.full(size, self.value)


def sphere(x):
    return float(np.sum(np.asarray(x) ** 2))


class TestConfig:
    def test_derived(self):
        c = ABCConfig(N_p=30, bounds=((0, 1),) * 4)
        assert (c.N_s, c.D, c.limit) == (15, 4, 60)
        assert ABCConfig(N_p=55).N_s == 27

    @pytest.mark.parametrize("kw", [dict(N_p=1), dict(VCP=0), dict(r=0), dict(threads=0),
                                    dict(bounds=((2, 1),)), dict(I_L=0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            ABCConfig(**kw)


class TestOperators:
    cfg = ABCConfig(N_p=4, bounds=((10, 20), (-5, 5)))

    @pytest.mark.parametrize("u, expect", [(0.0, [10, -5]), (1.0, [20, 5]), (0.5, [15, 0])])
    def test_init_population(self, u, expect):
        pop = init_population(self.cfg, FixedDraw(u))
        assert len(pop) == 2
        assert list(pop[0].x) == expect

    def test_neighbor_identity(self, rng):
        x = np.array([12.0, 1.0])
        v = neighbor_move(x, np.array([18.0, -3.0]), self.cfg, rng, dims=[0, 1], phis=[0.0, 0.0])
        assert list(v) == list(x)

    def test_neighbor_hand_value(self, rng):
        cfg = ABCConfig(N_p=4, bounds=((0, 10),))
        assert neighbor_move(np.array([5.0]), np.array([3.0]), cfg, rng, dims=[0], phis=[1.0])[0] == 7.0

    def test_neighbor_same_partner(self, rng):
        x = np.array([12.0, 1.0])
        assert list(neighbor_move(x, x.copy(), self.cfg, rng)) == list(x)

    def test_neighbor_clamps(self, rng):
        v = neighbor_move(np.array([19.0, 4.0]), np.array([10.0, -5.0]), self.cfg, rng, dims=[0, 1],
                          phis=[1.0, 1.0])
        assert list(v) == [20.0, 5.0]

    def test_vcp_dimension_count(self, rng):
        cfg = ABCConfig(N_p=4, VCP=0.5, bounds=((0, 100),) * 10)
        x, k = np.full(10, 50.0), np.full(10, 10.0)
        changed = np.count_nonzero(neighbor_move(x, k, cfg, rng) != x)
        assert changed <= 5
        cfg1 = ABCConfig(N_p=4, VCP=0.01, bounds=((0, 100),) * 10)
        assert np.count_nonzero(neighbor_move(x, k, cfg1, np.random.default_rng(1)) != x) == 1

    @pytest.mark.parametrize("old, cand, keep_cand", [(10, 8, True), (10, 12, False), (10, 10, True)])
    def test_greedy(self, old, cand, keep_cand):
        o = FoodSource(np.zeros(1), old, trial=3)
        c = FoodSource(np.ones(1), cand)
        out = greedy_select(o, c)
        if keep_cand:
            assert out is c and out.trial == 0
        else:
            assert out is o and out.trial == 4

    def test_onlooker(self):
        assert onlooker_probability(5.0, 5.0) == 1.0
        assert onlooker_probability(10.0, 5.0) == pytest.approx(0.55)
        assert onlooker_probability(1e12, 1.0) == pytest.approx(0.1)

    @given(st.floats(1e-6, 1e6), st.floats(1.0, 1e6))
    def test_onlooker_bounds(self, f_min, ratio):
        p = onlooker_probability(f_min * ratio, f_min)
        assert 0.1 <= p <= 1.0

    def test_scout(self, rng):
        cfg = ABCConfig(N_p=4, I_L=5, bounds=((0, 1),) * 3)
        s = FoodSource(np.full(3, 0.5), 1.0, trial=4)
        assert scout_replace(s, cfg, rng) is s
        s.trial = 5
        fresh = scout_replace(s, cfg, rng)
        assert fresh is not s and fresh.trial == 0
        assert np.all((fresh.x >= 0) & (fresh.x <= 1))

    def test_single_scout(self):
        srcs = [FoodSource(np.zeros(1), 1.0, trial=t) for t in (6, 9, 2)]
        assert pick_scout(srcs, 5) == 1
        assert pick_scout(srcs, 10) is None

    @pytest.mark.parametrize("x, out", [(3.7, 4), (0.4, 1), (31.5, 31), (2.5, 3)])
    def test_decode(self, x, out):
        assert decode([x], [(1, 31)]) == (out,)


class TestRun:
    def test_sphere(self):
        cfg = ABCConfig(N_p=30, I_max=500, bounds=((-5, 5),) * 5, integer=False, seed=0)
        res = run(cfg, sphere)
        assert res.best_phi < 1e-3

    def test_zero_budget(self):
        cfg = ABCConfig(N_p=10, I_max=0, bounds=((-5, 5),) * 3, integer=False)
        res = run(cfg, sphere)
        assert len(res.history) == 1 and res.evaluations == 5

    def test_history_nonincreasing(self):
        cfg = ABCConfig(N_p=10, I_max=60, bounds=((-5, 5),) * 4, integer=False, seed=4)
        phis = [h.best_phi for h in run(cfg, sphere).history]
        assert all(b <= a for a, b in zip(phis, phis[1:]))
        assert len(phis) == 61

    def test_bounds_respected(self):
        seen = []

        def f(x):
            seen.append(x)
            return sphere(x)

        cfg = ABCConfig(N_p=8, I_max=30, I_L=3, bounds=((1, 7), (2, 9)), seed=2)
        run(cfg, f)
        assert all(1 <= a <= 7 and 2 <= b <= 9 for a, b in seen)

    def test_deterministic_and_thread_independent(self):
        cfg = ABCConfig(N_p=12, I_max=40, bounds=((-5, 5),) * 4, integer=False, seed=11)
        a = run(cfg, sphere)
        b = run(replace(cfg, threads=4), sphere)
        assert a.history == b.history and a.best_design == b.best_design

    def test_derived_seeds(self):
        s = derived_seeds(7, 3)
        assert len(set(s)) == 3 and s == derived_seeds(7, 3)

    def test_restarts(self):
        cfg = ABCConfig(N_p=10, I_max=20, bounds=((-5, 5),) * 3, integer=False, r=3, seed=5)
        res = run(cfg, sphere)
        assert len(res.per_run) == 3
        assert res.best_phi == min(p[1] for p in res.per_run)
        assert res.phi_std >= 0

    def test_brute_force(self):
        table = {(i, j): (i - 3) ** 2 + 2 * (j - 2) ** 2 + 0.1 * i for i in range(1, 6) for j in range(1, 6)}
        best = min(table.values())
        cfg = ABCConfig(N_p=10, I_max=20, bounds=((1, 5), (1, 5)), seed=0)
        assert run(cfg, lambda x: table[tuple(x)]).best_phi == best


class Report:
    def __init__(self, phi, C):
        self.phi, self.C, self.F = phi, C, phi


class TestDivergence:
    def test_flagged(self):
        cfg = ABCConfig(N_p=6, I_max=20, bounds=((0, 1),), integer=False)
        res = run(cfg, lambda x: Report(1.0 + x[0], 1.0))
        assert res.diverged

    def test_abort(self):
        cfg = ABCConfig(N_p=6, I_max=20, bounds=((0, 1),), integer=False, abort_on_divergence=True)
        with pytest.raises(DivergenceError) as info:
            run(cfg, lambda x: Report(1.0 + x[0], 1.0))
        assert info.value.result.history[-1].iteration == 2

    def test_feasible_not_flagged(self):
        cfg = ABCConfig(N_p=6, I_max=20, bounds=((0, 1),), integer=False, abort_on_divergence=True)
        assert not run(cfg, lambda x: Report(1.0 + x[0], 0.0)).diverged

    def test_evaluator_failure(self):
        def bad(x):
            raise RuntimeError("boom")

        with pytest.raises(EvaluationError) as info:
            run(ABCConfig(N_p=4, I_max=1, bounds=((1, 3),)), bad)
        assert len(info.value.design) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_population_within_bounds(seed, D):
    cfg = ABCConfig(N_p=6, bounds=((-2, 3),) * D)
    pop = init_population(cfg, np.random.default_rng(seed))
    assert len(pop) == 3
    assert all(np.all((s.x >= -2) & (s.x <= 3)) for s in pop)
