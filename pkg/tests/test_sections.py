import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framepbo.sections import (
    BeamSectionRecord,
    CatalogError,
    ColumnSectionRecord,
    Detailing,
    Materials,
    bar_area,
    column_layout,
    default_data_dir,
    derive_beam_capacities,
    derive_column_capacities,
    derive_wall_capacities,
    derive_wall_terms,
    load_catalogs,
    parse_bars,
    read_catalog,
    serialize_catalog,
)

MAT = Materials(f_c_prime=30.0, f_y=400.0)
DET = Detailing()


def fiber_moment(b, h, bars, P_kN, mat, n=4000):
    """Independent strain-compatibility oracle with a parabolic concrete law.

    Concrete follows Hognestad's parabola (peak 0.85 f'c at 0.002, crushing at
    0.003), integrated over ``n`` fibers; steel is elastic-perfectly plastic.
    Returns M (kN*m) about mid-depth at axial load P (compression +).
    """
    y = (np.arange(n) + 0.5) * h / n
    dA = b * h / n
    eps0, fc = 0.002, 0.85 * mat.f_c_prime

    def forces(c):
        eps = mat.eps_cu * (c - y) / c
        e = np.clip(eps, 0.0, None) / eps0
        sc = np.where(eps > 0, fc * np.minimum(2 * e - e**2, 1.0), 0.0)
        sc = np.where(eps > eps0, fc, sc)
        P = (sc * dA).sum()
        M = (sc * dA * (h / 2 - y)).sum()
        for yb, a in bars:
            es = mat.eps_cu * (c - yb) / c
            fs = float(np.clip(mat.E_s * es, -mat.f_y, mat.f_y))
            P += fs * a
            M += fs * a * (h / 2 - yb)
        return P, M

    lo, hi = 1.0, 50 * h
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if forces(mid)[0] < P_kN * 1e3:
            lo = mid
        else:
            hi = mid
    return forces(0.5 * (lo + hi))[1] * 1e-6


class TestBarArea:
    @pytest.mark.parametrize("d, area", [(0, 0.0), (16, 201.0619), (10, 78.5398)])
    def test_values(self, d, area):
        assert bar_area(d) == pytest.approx(area, abs=1e-4)

    @given(st.floats(0, 60), st.floats(0.01, 10))
    def test_strictly_increasing(self, d, step):
        assert bar_area(d + step) > bar_area(d)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bar_area(-1)

    @pytest.mark.parametrize("text, out", [("3Φ16", (3, 16)), ("12φ28", (12, 28)), ("4x20", (4, 20))])
    def test_parse_bars(self, text, out):
        assert parse_bars(text) == out

    def test_parse_bars_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_bars("three bars")


class TestCatalogs:
    def test_printed_rows(self, catalogs):
        b1 = catalogs.beam.get(1)
        assert (b1.depth_mm, b1.width_mm, b1.bot_bars, b1.top_bars) == (300, 300, (3, 16), (3, 16))
        c65 = catalogs.column.get(65)
        assert (c65.side_mm, c65.bars) == (750, (16, 32))

    def test_sizes(self, catalogs):
        assert (len(catalogs.beam), len(catalogs.column), len(catalogs.wall)) == (31, 65, 26)

    def test_ranks_follow_unit_weight(self, catalogs):
        from framepbo.sections import unit_weight

        for cat in (catalogs.beam, catalogs.column, catalogs.wall):
            w = [unit_weight(r, MAT) for r in cat]
            assert w == sorted(w)

    def test_wall_ranks_swap_first_two(self, catalogs):
        # printed wall 2 has no flanges, so it is lighter than printed wall 1
        assert [catalogs.wall.by_rank(k).id for k in (1, 2, 3)] == [2, 1, 3]

    def test_rank_out_of_range(self, catalogs):
        with pytest.raises(IndexError):
            catalogs.beam.by_rank(0)

    @pytest.mark.parametrize("kind, name", [("beam", "beams.csv"), ("column", "columns.csv"),
                                            ("wall", "walls.csv")])
    def test_round_trip_bit_identical(self, kind, name):
        path = default_data_dir() / name
        recs = read_catalog(path, kind)
        text = serialize_catalog(recs, kind)
        assert text == path.read_text(encoding="utf-8")
        assert read_catalog(text, kind) == recs

    def test_duplicate_id(self):
        text = "id,side_mm,bars,reconstructed\n1,300,8Φ16,false\n1,350,8Φ16,false\n"
        with pytest.raises(CatalogError, match="duplicate id 1"):
            read_catalog(text, "column")

    def test_negative_depth_names_row(self):
        text = "id,depth_mm,width_mm,bot_bars,top_bars,reconstructed\n1,-300,300,3Φ16,3Φ16,false\n"
        with pytest.raises(CatalogError, match="line 2"):
            read_catalog(text, "beam")

    def test_empty(self):
        with pytest.raises(CatalogError):
            read_catalog("id,depth_mm,width_mm,bot_bars,top_bars,reconstructed\n", "beam")

    def test_column_steel_ratio_within_limits(self, catalogs):
        for r in catalogs.column:
            assert 0.01 <= r.rho <= 0.08

    def test_missing_directory(self, tmp_path):
        with pytest.raises(CatalogError):
            load_catalogs(tmp_path)


class TestMaterials:
    @pytest.mark.parametrize("fc, b1", [(20, 0.85), (28, 0.85), (35, 0.80), (56, 0.65), (80, 0.65)])
    def test_beta1(self, fc, b1):
        assert Materials(f_c_prime=fc).beta1 == pytest.approx(b1)

    def test_default_modulus(self):
        assert Materials(f_c_prime=30).E_c == pytest.approx(4700 * math.sqrt(30))

    def test_rejects_bad_phi(self):
        with pytest.raises(ValueError):
            Materials(phi_flexure=1.2)


class TestBeamCapacities:
    def test_stress_block_oracle(self, catalogs):
        # hand calculation: 300 x 300, 3Φ16 each face, cover 40 + stirrup 10
        rec = catalogs.beam.get(1)
        As = 3 * math.pi * 16**2 / 4
        d, d_p = 300 - 40 - 10 - 8, 40 + 10 + 8
        fc, fy, Es = 30.0, 400.0, 200000.0
        b1 = 0.85 - 0.05 * 2 / 7
        # compression steel below yield: solve 0.85 fc b b1 c + As' fs' - As' 0.85 fc = As fy
        lo, hi = 1.0, 300.0
        for _ in range(200):
            c = 0.5 * (lo + hi)
            fs_p = min(fy, max(-fy, Es * 0.003 * (c - d_p) / c))
            a = b1 * c
            comp = 0.85 * fc * 300 * a + As * (fs_p - (0.85 * fc if d_p < a else 0.0))
            if comp < As * fy:
                lo = c
            else:
                hi = c
        a = b1 * c
        M = (0.85 * fc * 300 * a * (150 - a / 2) + As * (fs_p - (0.85 * fc if d_p < a else 0)) * (150 - d_p)
             + As * fy * (d - 150)) * 1e-6
        cap = derive_beam_capacities(rec, MAT, DET)
        assert cap.M_n_pos == pytest.approx(M, rel=0.01)
        assert cap.M_n_neg == pytest.approx(M, rel=0.01)

    def test_singly_reinforced_closed_form(self):
        from framepbo.sections import Layout, flexural_strength

        As, b, d = 1000.0, 300.0, 450.0
        lay = Layout(500.0, ((0.0, 500.0, b),), ((d, As),))
        a = As * 400 / (0.85 * 30 * b)
        M, _, _ = flexural_strength(lay, MAT)
        # moment is taken about mid-depth; with P = 0 that equals the couple
        assert M * 1e-6 == pytest.approx(As * 400 * (d - a / 2) * 1e-6, rel=1e-6)

    def test_no_steel_no_strength(self):
        from framepbo.sections import Layout, flexural_strength

        lay = Layout(300.0, ((0.0, 300.0, 300.0),), ())
        assert flexural_strength(lay, MAT)[0] == 0.0

    def test_more_bottom_steel_more_strength(self, catalogs):
        rec = catalogs.beam.get(10)
        richer = replace(rec, bot_bars=(rec.bot_bars[0] + 1, rec.bot_bars[1]))
        a = derive_beam_capacities(rec, MAT, DET)
        b = derive_beam_capacities(richer, MAT, DET)
        assert b.M_n_pos > a.M_n_pos

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(2, 6), st.sampled_from([14, 16, 18, 20, 22, 25]))
    def test_face_steel_monotone(self, n1, n2, dia):
        base = BeamSectionRecord(99, 500, 350, (min(n1, n2), dia), (2, 16))
        more = replace(base, bot_bars=(max(n1, n2), dia))
        assert derive_beam_capacities(more, MAT, DET).M_n_pos >= derive_beam_capacities(base, MAT, DET).M_n_pos

    def test_shear_terms(self, catalogs):
        rec = catalogs.beam.get(1)
        cap = derive_beam_capacities(rec, MAT, DET)
        d = 300 - 40 - 10 - 8
        assert cap.V_c == pytest.approx(0.17 * math.sqrt(30) * 300 * d * 1e-3)
        assert cap.V_s == pytest.approx(2 * math.pi * 25 * 400 * d / 150 * 1e-3)
        assert cap.V_s_max == pytest.approx(0.66 * math.sqrt(30) * 300 * d * 1e-3)


class TestColumnCapacities:
    def test_zero_axial_equals_pure_flexure(self, catalogs):
        from framepbo.sections import flexural_strength

        rec = catalogs.column.get(1)
        cap = derive_column_capacities(rec, MAT, 0.0, DET)
        M0 = flexural_strength(column_layout(rec, DET), MAT)[0] * 1e-6
        assert cap.M_n_pos == pytest.approx(M0, rel=1e-9)
        assert cap.interaction.moment_at(0.0) == pytest.approx(M0, rel=1e-9)

    def test_balanced_point_is_peak(self, catalogs):
        rec = catalogs.column.get(30)
        diag = derive_column_capacities(rec, MAT, 0.0, DET).interaction
        assert diag.moment_at(diag.P_balanced) == pytest.approx(max(diag.M), rel=1e-12)

    def test_fiber_oracle(self, catalogs):
        rec = catalogs.column.get(1)
        P = 0.1 * 300 * 300 * 30 * 1e-3
        lay = column_layout(rec, DET)
        oracle = fiber_moment(300, 300, lay.bars, P, MAT)
        got = derive_column_capacities(rec, MAT, P, DET).M_n_pos
        assert got == pytest.approx(oracle, rel=0.03)

    @pytest.mark.parametrize("rid", [1, 20, 45, 65])
    def test_interaction_single_peaked(self, catalogs, rid):
        diag = derive_column_capacities(catalogs.column.get(rid), MAT, 0.0, DET).interaction
        M = np.array(diag.M)
        k = int(np.argmax(M))
        assert np.all(np.diff(M[: k + 1]) >= -1e-9)
        assert np.all(np.diff(M[k:]) <= 1e-9)

    def test_axial_cap(self, catalogs):
        rec = catalogs.column.get(1)
        cap = derive_column_capacities(rec, MAT, 0.0, DET)
        As = rec.steel_mm2
        assert cap.P_n_max == pytest.approx(0.8 * (0.85 * 30 * (300 * 300 - As) + 400 * As) * 1e-3)

    def test_record_validation(self):
        with pytest.raises(CatalogError):
            ColumnSectionRecord(1, 250, (8, 16)).validate()


class TestWallTerms:
    def test_symmetric_zero_axial(self, catalogs):
        rec = catalogs.wall.get(1)
        axial, _, _ = derive_wall_terms(rec, MAT, 2000, 0.0, 100.0, A_s=500.0)
        assert axial == 0.0

    def test_zero_shear(self, catalogs):
        _, shear, _ = derive_wall_terms(catalogs.wall.get(1), MAT, 2000, 100.0, 0.0)
        assert shear == 0.0

    def test_axial_hand_value(self, catalogs):
        rec = catalogs.wall.get(2)
        assert rec.t_w_mm == 200
        axial, _, boundary = derive_wall_terms(rec, MAT, 2000, 360.0, 0.0, A_s=800.0, A_s_prime=800.0)
        assert axial == pytest.approx(0.03, abs=1e-15)
        assert boundary is False
        assert derive_wall_terms(catalogs.wall.get(1), MAT, 2000, 0, 0)[2] is True

    def test_capacities_positive(self, catalogs):
        for rec in catalogs.wall:
            cap = derive_wall_capacities(rec, MAT, DET)
            assert cap.M_n_pos > 0 and cap.P_n_max > 0 and cap.I_eff > 0
