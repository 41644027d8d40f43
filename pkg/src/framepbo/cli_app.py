"""Command-line front end: validate, analyze, optimize and report.

Exit codes: 0 success (every reported design feasible), 1 infeasible best,
2 validation or configuration failure, 3 divergence under the abort policy,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import abc as abc_mod
from . import plots
from .config import PRESETS, ConfigError, RunConfig, apply_preset, load_config, parse_config
from .evaluation import Evaluation, Evaluator
from .frame import Catalogs, DesignError
from .perf_constraints import LEVELS, load_allowables
from .results import (
    convergence_csv,
    drift_csv,
    dump_json,
    pushover_csv,
    read_convergence_csv,
    read_drift_csv,
    read_pushover_csv,
    write_text,
)
from .sections import CATALOG_FILES, CatalogError, default_data_dir, load_catalogs, read_catalog

log = logging.getLogger("framepbo")

EXIT_OK, EXIT_INFEASIBLE, EXIT_VALIDATION, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(ValueError):
    """Bad command-line input (reported with the validation exit code)."""


# -- shared setup ------------------------------------------------------------------


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config("")
    if args.preset:
        cfg = apply_preset(cfg, args.preset)
    abc = cfg.abc
    if args.seed is not None:
        abc = replace(abc, seed=args.seed)
    if args.threads is not None:
        abc = replace(abc, threads=args.threads)
    cfg = replace(cfg, abc=abc)
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def _writable_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".framepbo-write-test"
    probe.write_text("", encoding="utf-8")
    probe.unlink()
    return out


def _catalogs(cfg: RunConfig) -> Catalogs:
    return Catalogs(*load_catalogs(cfg.data_dir, cfg.materials))


def _tables(cfg: RunConfig):
    src = cfg.allowables
    if src is None and cfg.data_dir is not None:
        src = str(Path(cfg.data_dir) / "allowables.csv")
    return load_allowables(src, cfg.allowables_override)


def _evaluator(cfg: RunConfig, levels: Sequence[str], catalogs: Catalogs, tables) -> Evaluator:
    return Evaluator(cfg.model(), catalogs, levels, cfg.seismic, tables, cfg.penalty, cfg.materials)


def _evaluation_dict(ev: Evaluation) -> dict:
    return {
        "design": list(ev.sized.design.as_tuple()),
        "design_label": str(ev.sized.design),
        "weight_kg": ev.report.F,
        "penalty": ev.report.as_dict(),
        "feasible": ev.report.feasible,
        "T_i_s": ev.T_i,
        "T_e_s": ev.T_e,
        "targets_m": dict(ev.targets),
        "pushover_status": ev.trace.status if ev.trace is not None else None,
        "drifts": {s.level: (None if s.drifts is None else list(map(float, s.drifts))) for s in ev.states},
    }


def _profiles(ev: Evaluation) -> dict:
    return {s.level: s.drifts for s in ev.states}


# -- validate ----------------------------------------------------------------------


def detect_kind(header: Sequence[str]) -> str | None:
    cols = set(header)
    if "table" in cols:
        return "allowables"
    if "depth_mm" in cols:
        return "beam"
    if "side_mm" in cols:
        return "column"
    if "t_w_mm" in cols:
        return "wall"
    return None


def validate_file(path: Path) -> tuple[str, list[str]]:
    """Validate one catalog or limit-table file; returns (summary, warnings).

    Raises OSError if unreadable and CatalogError/ValueError if invalid.
    """
    text = path.read_text(encoding="utf-8")
    header = next(csv.reader(io.StringIO(text)), None)
    if not header:
        raise CatalogError(f"{path}: empty file")
    kind = detect_kind([h.strip() for h in header])
    if kind is None:
        raise CatalogError(f"{path}: unrecognised header {header}")
    if kind == "allowables":
        tables = load_allowables(text if "\n" in text else text + "\n")
        return f"{path}: limit tables, {len(tables.cells())} cells", list(tables.warnings)
    records = read_catalog(path, kind)
    return f"{path}: {kind} catalog, {len(records)} sections", []


def cmd_validate(args) -> int:
    paths = [Path(p) for p in args.paths]
    if not paths:
        base = Path(args.data) if args.data else default_data_dir()
        paths = [base / name for name in CATALOG_FILES.values()] + [base / "allowables.csv"]
    invalid = unreadable = False
    for p in paths:
        try:
            summary, warnings = validate_file(p)
        except OSError as exc:
            print(f"ERROR {p}: {exc}")
            unreadable = True
            continue
        except (CatalogError, ValueError) as exc:
            print(f"ERROR {exc}")
            invalid = True
            continue
        print(f"OK {summary}")
        for w in warnings:
            print(f"WARNING {w}")
    return EXIT_VALIDATION if invalid else EXIT_IO if unreadable else EXIT_OK


# -- analyze -----------------------------------------------------------------------


def _parse_design(text: str, bounds: Sequence[tuple]) -> tuple:
    t = text.strip().lower()
    if t == "max":
        return tuple(hi for _, hi in bounds)
    if t == "min":
        return tuple(lo for lo, _ in bounds)
    try:
        return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError:
        raise UsageError(f"bad design {text!r}; expected comma-separated ranks, 'min' or 'max'") from None


def cmd_analyze(args) -> int:
    cfg = resolve_config(args)
    out = _writable_dir(cfg.output_dir)
    catalogs, tables = _catalogs(cfg), _tables(cfg)
    ev_ = _evaluator(cfg, cfg.levels, catalogs, tables)
    bounds = cfg.design_bounds(ev_.model, catalogs)
    if args.design:
        design = _parse_design(args.design, bounds)
    elif cfg.design is not None:
        design = cfg.design
    else:
        raise UsageError("no design given; use --design or a [design] section")
    try:
        ev = ev_.evaluate(design)
    except (ValueError, DesignError) as exc:
        raise UsageError(str(exc)) from None
    report = {"case": cfg.case, "levels": list(cfg.levels), **_evaluation_dict(ev)}
    write_text(out / "report.json", dump_json(report))
    heights = ev.trace.heights if ev.trace is not None else [s.height for s in ev_.model.stories]
    write_text(out / "drift.csv", drift_csv(_profiles(ev), heights))
    if ev.trace is not None:
        write_text(out / "pushover.csv", pushover_csv(ev.trace))
        write_text(out / "capacity.svg",
                   plots.capacity_plot({"pushover": (list(ev.trace.roof), list(ev.trace.base_shear))}))
    write_text(out / "drift.svg", plots.drift_plot(_profiles(ev)))
    rep = ev.report
    print(f"design {ev.sized.design}  weight {rep.F:.1f} kg  C {rep.C:.6g}  phi {rep.phi:.1f}")
    for n in rep.notes:
        print(f"note: {n}")
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


# -- optimize ----------------------------------------------------------------------


@dataclass
class LevelOutcome:
    level: str
    result: abc_mod.RunResult
    evaluation: Evaluation
    unique_evaluations: int
    wall_clock_s: float


@dataclass
class CaseReport:
    """Per-level best designs plus the files that back them."""

    case: str
    seed: int
    outcomes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        levels = {}
        for o in self.outcomes:
            d = _evaluation_dict(o.evaluation)
            d.update({
                "best_phi": o.result.best_phi,
                "diverged": o.result.diverged,
                "evaluations": o.result.evaluations,
                "unique_evaluations": o.unique_evaluations,
                "runs": [{"seed": s, "best_phi": p, "evaluations": n, "diverged": dv}
                         for s, p, n, dv in o.result.per_run],
                "phi_std": o.result.phi_std,
                "files": {"convergence": f"convergence_{o.level}.csv", "pushover": f"pushover_{o.level}.csv",
                          "drift": "drift.csv"},
            })
            levels[o.level] = d
        return {"case": self.case, "seed": self.seed, "levels": levels}

    @property
    def feasible(self) -> bool:
        return all(o.evaluation.report.feasible for o in self.outcomes)


def optimize(cfg: RunConfig) -> CaseReport:
    """Run the colony for each level; raises abc.DivergenceError under the abort policy."""
    catalogs, tables = _catalogs(cfg), _tables(cfg)
    report = CaseReport(cfg.case, cfg.abc.seed)
    for lv in cfg.levels:
        evaluator = _evaluator(cfg, (lv,), catalogs, tables)
        config = cfg.abc_for(lv, cfg.design_bounds(evaluator.model, catalogs))
        t0 = time.perf_counter()
        result = abc_mod.run(config, evaluator)
        elapsed = time.perf_counter() - t0
        ev = evaluator.evaluate(result.best_design)
        report.outcomes.append(LevelOutcome(lv, result, ev, evaluator.unique_evaluations, elapsed))
        log.info("%s: best %s phi %.1f C %.4g", lv, ev.sized.design, ev.report.phi, ev.report.C)
    return report


def write_case(report: CaseReport, out: Path, started: str, argv: Sequence[str]) -> None:
    """All outputs of an optimize run; only run_meta.json carries timing data."""
    histories = {o.level: o.result.history for o in report.outcomes}
    profiles = {o.level: _profiles(o.evaluation).get(o.level) for o in report.outcomes}
    curves = {}
    heights = None
    for o in report.outcomes:
        write_text(out / f"convergence_{o.level}.csv", convergence_csv(o.result.history))
        tr = o.evaluation.trace
        if tr is not None:
            write_text(out / f"pushover_{o.level}.csv", pushover_csv(tr))
            curves[o.level] = (list(tr.roof), list(tr.base_shear))
            heights = tr.heights
    if heights is None:
        heights = [s.height for s in report.outcomes[0].evaluation.sized.model.stories]
    write_text(out / "drift.csv", drift_csv(profiles, heights))
    write_text(out / "report.json", dump_json(report.as_dict()))
    write_text(out / "capacity.svg", plots.capacity_plot(curves))
    write_text(out / "drift.svg", plots.drift_plot(profiles))
    write_text(out / "convergence.svg", plots.convergence_plot(histories))
    meta = {"started": started, "finished": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "argv": list(argv), "wall_clock_s": {o.level: round(o.wall_clock_s, 3) for o in report.outcomes}}
    write_text(out / "run_meta.json", dump_json(meta))


def cmd_optimize(args) -> int:
    cfg = resolve_config(args)
    out = _writable_dir(cfg.output_dir)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    try:
        report = optimize(cfg)
    except abc_mod.DivergenceError as exc:
        print(f"diverged: {exc}")
        return EXIT_DIVERGED
    write_case(report, out, started, sys.argv)
    for o in report.outcomes:
        rep = o.evaluation.report
        flag = "feasible" if rep.feasible else f"INFEASIBLE (C={rep.C:.4g})"
        print(f"{o.level}: {o.evaluation.sized.design}  weight {rep.F:.1f} kg  {flag}"
              f"{'  diverged' if o.result.diverged else ''}")
    print(f"outputs in {out}")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


# -- report ------------------------------------------------------------------------


def cmd_report(args) -> int:
    """Re-render the plots of an existing output directory from its CSV files."""
    out = Path(args.dir or args.out or (load_config(args.config).output_dir if args.config else "framepbo-out"))
    if not out.is_dir():
        raise OSError(f"output directory {out} does not exist")
    curves, histories = {}, {}
    for p in sorted(out.glob("pushover*.csv")):
        c = read_pushover_csv(p.read_text(encoding="utf-8"))
        label = p.stem.split("_", 1)[1] if "_" in p.stem else "pushover"
        curves[label] = (list(c.roof), list(c.base_shear))
    for p in sorted(out.glob("convergence_*.csv")):
        histories[p.stem.split("_", 1)[1]] = read_convergence_csv(p.read_text(encoding="utf-8"))
    drift = out / "drift.csv"
    written = []
    if curves:
        write_text(out / "capacity.svg", plots.capacity_plot(_ordered(curves)))
        written.append("capacity.svg")
    if drift.exists():
        profiles, _ = read_drift_csv(drift.read_text(encoding="utf-8"))
        write_text(out / "drift.svg", plots.drift_plot(profiles))
        written.append("drift.svg")
    if histories:
        write_text(out / "convergence.svg", plots.convergence_plot(_ordered(histories)))
        written.append("convergence.svg")
    if not written:
        raise OSError(f"no result CSV files in {out}")
    print(f"rendered {', '.join(written)} in {out}")
    return EXIT_OK


def _ordered(d: dict) -> dict:
    rank = {lv: i for i, lv in enumerate(LEVELS)}
    return dict(sorted(d.items(), key=lambda kv: (rank.get(kv[0], len(rank)), kv[0])))


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file")
    common.add_argument("--seed", type=int, metavar="N", help="override the configured seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--threads", type=int, metavar="N", help="evaluation worker threads")
    common.add_argument("--preset", choices=PRESETS, metavar="NAME", help=f"one of {', '.join(PRESETS)}")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="framepbo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", parents=[common], help="check catalog and limit-table files")
    v.add_argument("paths", nargs="*", help="files to check (default: the fixture directory)")
    v.add_argument("--data", metavar="DIR", help="fixture directory to check")
    v.set_defaults(func=cmd_validate)
    a = sub.add_parser("analyze", parents=[common], help="evaluate one design")
    a.add_argument("--design", help="comma-separated ranks (beams, columns, walls), or 'min'/'max'")
    a.set_defaults(func=cmd_analyze)
    o = sub.add_parser("optimize", parents=[common], help="run the bee colony per performance level")
    o.set_defaults(func=cmd_optimize)
    r = sub.add_parser("report", parents=[common], help="re-render plots from existing CSV output")
    r.add_argument("dir", nargs="?", help="output directory (default: --out or the config's)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CatalogError, UsageError, DesignError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except abc_mod.EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
