import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from framepbo import plots
from framepbo.abc import HistoryRow
from framepbo.results import (
    CapacityCurve,
    convergence_csv,
    drift_csv,
    dump_json,
    pushover_csv,
    read_convergence_csv,
    read_drift_csv,
    read_pushover_csv,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


class TestRoundTrip:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 4), st.data())
    def test_pushover(self, n, ns, data):
        arr = data.draw(hnp.arrays(float, (n, 3 + ns), elements=finite))
        curve = CapacityCurve(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3:])
        back = read_pushover_csv(pushover_csv(curve))
        assert back == curve
        assert pushover_csv(back) == pushover_csv(curve)

    @given(st.lists(st.tuples(st.integers(0, 10**6), finite, finite, st.floats(0, 1e6), st.integers(0, 100)),
                    max_size=20))
    def test_convergence(self, rows):
        hist = [HistoryRow(*r) for r in rows]
        assert read_convergence_csv(convergence_csv(hist)) == hist

    def test_drift(self):
        prof = {"IO": np.array([0.001, 0.002]), "LS": None, "CP": np.array([0.004, 0.0051])}
        back, heights = read_drift_csv(drift_csv(prof, [3.0, 3.5]))
        assert heights == [3.0, 3.5] and back["LS"] is None
        np.testing.assert_array_equal(back["CP"], prof["CP"])

    def test_header(self):
        curve = CapacityCurve(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros((1, 2)))
        assert pushover_csv(curve).splitlines()[0] == "step,load_factor,base_shear_kN,roof_disp_m,drift_1,drift_2"
        assert convergence_csv([]).strip() == "iteration,best_phi,best_weight_kg,best_C,feasible_count"


def test_json_sorted_and_numpy():
    text = dump_json({"b": np.float64(1.5), "a": np.arange(2)})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [0, 1], "b": 1.5}


class TestPlots:
    def test_capacity_svg(self):
        svg = plots.capacity_plot({"IO": ([0, 0.1, 0.2], [0, 100, 120]), "CP": ([0, 0.3], [0, 90])})
        assert svg.startswith("<svg") and svg.count("<polyline") == 2 and "IO" in svg

    def test_empty_series(self):
        assert "<svg" in plots.capacity_plot({})

    def test_drift_and_convergence(self):
        assert plots.drift_plot({"LS": np.array([0.001, 0.003]), "CP": None}).count("<polyline") == 1
        hist = [HistoryRow(i, 10.0 - i, 10.0 - i, 0.0, 1) for i in range(5)]
        assert plots.convergence_plot({"LS": hist}).count("<polyline") == 1

    def test_escapes_labels(self):
        assert "&lt;x&gt;" in plots.line_chart({}, "<x>", "a", "b")
