"""Regenerate the section catalog fixtures in src/framepbo/data.

Only the first and last rows of each printed catalog are known. Interior rows
are filled in deterministically and flagged ``reconstructed=true``:

beams (ids 4..28)
    eight sizes from 300x300 to 550x400 mm in 50 mm steps, 3 to 5 rows per
    size. Rows are evenly spaced picks, by steel area, from symmetric
    arrangements of 3..6 bars of 16..25 mm that leave >= 25 mm clear spacing.
columns (ids 3..63)
    sides 300..750 mm in 50 mm steps, 6 or 7 rows per side. Within a side the
    rows are evenly spaced picks from the bar arrangements (8/12/16 bars of
    16..32 mm) whose reinforcement ratio lies in [0.01, 0.04], sorted by steel
    area, bracketed by the printed endpoint rows.
walls (ids 3..24)
    web thickness 200..350 mm in 50 mm steps (6 or 7 rows each); rows are
    evenly spaced picks by unit weight (5 m wall) over boundary element on/off,
    bar spacing 150..300 mm and bar diameter 16..24 mm. Boundary elements are
    (t_w + 200) x (t_w + 100), which reproduces both printed boundary rows.

Run from the repository root: ``python scripts/build_fixtures.py``.
"""

from __future__ import annotations

import math
from pathlib import Path

from framepbo.sections import (
    BeamSectionRecord,
    ColumnSectionRecord,
    WallSectionRecord,
    Materials,
    bar_area,
    serialize_catalog,
    unit_weight,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "framepbo" / "data"
DIAMETERS = (16, 18, 20, 22, 25, 28, 32)
MATERIALS = Materials()


def _picks(pool: list, need: int) -> list:
    """``need`` evenly spaced entries of ``pool`` (which is already sorted)."""
    if need <= 0:
        return []
    if need == 1:
        return [pool[len(pool) // 2]]
    idx = [round(i * (len(pool) - 1) / (need - 1)) for i in range(need)]
    assert len(set(idx)) == need, "candidate pool too small"
    return [pool[i] for i in idx]


def _fill(groups, fixed_lo, fixed_hi, candidates, make):
    """Fill each size group with picks between the printed endpoint rows.

    ``groups`` is a list of (size, n_rows); the first group starts with
    ``fixed_lo`` and the last ends with ``fixed_hi``.
    """
    rows = []
    for gi, (size, n_rows) in enumerate(groups):
        lo = fixed_lo if gi == 0 else []
        hi = fixed_hi if gi == len(groups) - 1 else []
        pool = candidates(size)
        if lo:
            pool = [c for c in pool if c[0] > lo[-1][0]]
        if hi:
            pool = [c for c in pool if c[0] < hi[0][0]]
        picks = _picks(pool, n_rows - len(lo) - len(hi))
        for c in lo:
            rows.append(make(len(rows) + 1, size, c[1], False))
        for c in picks:
            rows.append(make(len(rows) + 1, size, c[1], True))
        for c in hi:
            rows.append(make(len(rows) + 1, size, c[1], False))
    return rows


def beams() -> list[BeamSectionRecord]:
    groups = [((300, 300), 5), ((350, 300), 4), ((400, 300), 4), ((400, 350), 4),
              ((450, 350), 4), ((500, 350), 4), ((500, 400), 3), ((550, 400), 3)]

    def area(b):
        return b[0] * bar_area(b[1])

    def candidates(size):
        _, width = size
        out = []
        for n in (3, 4, 5, 6):
            for d in (16, 18, 20, 22, 25):
                clear = (width - 100 - n * d) / (n - 1)
                if clear >= 25:
                    out.append((area((n, d)), (n, d)))
        return sorted(out)

    lo = [(area(b), b) for b in ((3, 16), (3, 18), (4, 20))]
    # printed rows 29-31 are not in steel order (6 bars before 5); keep them verbatim
    hi = [(area((4, 22)), (4, 22)), (math.inf, (6, 22)), (math.inf, (5, 22))]

    def make(i, size, bars, rec):
        return BeamSectionRecord(i, size[0], size[1], bars, bars, reconstructed=rec)

    return _fill(groups, lo, hi, candidates, make)


def columns() -> list[ColumnSectionRecord]:
    sides = list(range(300, 751, 50))
    groups = [(s, 7 if i % 2 == 0 else 6) for i, s in enumerate(sides)]

    def area(b):
        return b[0] * bar_area(b[1])

    def candidates(side):
        ag = side * side
        return sorted((area((n, d)), (n, d)) for n in (8, 12, 16) for d in DIAMETERS
                      if 0.01 <= area((n, d)) / ag <= 0.04)

    lo = [(area(b), b) for b in ((8, 16), (8, 18))]
    hi = [(area(b), b) for b in ((12, 32), (16, 32))]

    def make(i, side, bars, rec):
        return ColumnSectionRecord(i, side, bars, reconstructed=rec)

    return _fill(groups, lo, hi, candidates, make)


def walls() -> list[WallSectionRecord]:
    groups = [(200, 7), (250, 6), (300, 6), (350, 7)]

    def rec(tw, spec, i=0, reconstructed=False):
        has_b, s, d = spec
        tf, bf = (tw + 200, tw + 100) if has_b else (0, 0)
        return WallSectionRecord(i, tw, tf, s, bf, d, reconstructed=reconstructed)

    def weight(tw, spec):
        return unit_weight(rec(tw, spec), MATERIALS)

    def candidates(tw):
        return sorted((weight(tw, (b, s, d)), (b, s, d))
                      for b in (False, True) for s in (150, 200, 250, 300) for d in (16, 18, 20, 22, 24))

    # printed row 1 has a boundary element and row 2 does not; row 2 is the lighter
    lo = sorted((weight(200, b), b) for b in ((True, 150, 16), (False, 150, 16)))
    hi = [(weight(350, b), b) for b in ((True, 300, 22), (True, 300, 24))]

    def make(i, tw, spec, reconstructed):
        return rec(tw, spec, i, reconstructed)

    rows = _fill(groups, lo, hi, candidates, make)
    r1, r2 = rows[0], rows[1]
    rows[0] = WallSectionRecord(1, r2.t_w_mm, r2.t_f_mm, r2.s_sh_mm, r2.b_f_mm, r2.bar_diameter_mm)
    rows[1] = WallSectionRecord(2, r1.t_w_mm, r1.t_f_mm, r1.s_sh_mm, r1.b_f_mm, r1.bar_diameter_mm)
    return rows


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    for kind, name, recs in (("beam", "beams.csv", beams()), ("column", "columns.csv", columns()),
                             ("wall", "walls.csv", walls())):
        for r in recs:
            r.validate()
        (DATA / name).write_text(serialize_catalog(recs, kind), encoding="utf-8")
        print(f"wrote {len(recs)} rows to {DATA / name}")


if __name__ == "__main__":
    main()
