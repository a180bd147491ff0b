"""Command-line entry point: ``fairlaunch <subcommand> ...``.

Exit codes: 0 success, 1 usage or bad parameter, 2 data error, 3 internal
invariant violation. ``FAIRLAUNCH_RESULTS_DIR`` sets the root under which
output directories are created when ``--out`` is not given.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import calibration as cal
from . import engine, validation
from .behavior import PRESETS
from .errors import DataLoadError, InvariantViolation, ParameterError, UndefinedMetricError
from .ingest import FgiModel, load_reference_series, save_market_series, save_reference_series, \
    synthetic_market_series
from .scenario import ScenarioKind

logger = logging.getLogger("fairlaunch")

RESULTS_ENV = "FAIRLAUNCH_RESULTS_DIR"
SCENARIOS = tuple(k.value for k in ScenarioKind)
PRESET_NAMES = tuple(PRESETS)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Experiment presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentPreset:
    """A named batch of runs; each run is a label plus a nested config delta."""

    name: str
    description: str
    runs: tuple

    def labels(self) -> list[str]:
        return [label for label, _ in self.runs]


def _cell(kind: str, level: str, **extra) -> tuple[str, dict]:
    delta = {"scenario": {"kind": kind}, "behavior": dict(PRESETS[level])}
    delta.update(extra)
    return f"{kind}_{level}", delta


EXPERIMENTS = {
    "fig-high": ExperimentPreset("fig-high", "all scenarios, high DH trading probabilities",
                                 tuple(_cell(k, "high") for k in SCENARIOS)),
    "fig-medium": ExperimentPreset("fig-medium", "all scenarios, medium DH trading probabilities",
                                   tuple(_cell(k, "medium") for k in SCENARIOS)),
    "fig-low": ExperimentPreset("fig-low", "all scenarios, low DH trading probabilities",
                                tuple(_cell(k, "low") for k in SCENARIOS)),
    "bentham-extension": ExperimentPreset("bentham-extension", "equal split run on to t=545",
                                          tuple(_cell("bentham", p, t_end=545) for p in PRESET_NAMES)),
    "whale-table": ExperimentPreset("whale-table", "3 scenarios x 3 presets for the whale table",
                                    tuple(_cell(k, p) for k in SCENARIOS for p in PRESET_NAMES)),
    "event-validity": ExperimentPreset("event-validity", "Cronje allocation, high preset",
                                       (_cell("cronje", "high"),)),
    "sensitivity": ExperimentPreset("sensitivity", "Cronje high with 10/30/50% DH agents",
                                    tuple((f"cronje_high_dh{int(s * 100)}",
                                           {**_cell("cronje", "high")[1], "population": {"dh_share": s}})
                                          for s in (0.1, 0.3, 0.5))),
}


# ---------------------------------------------------------------------------
# Config assembly
# ---------------------------------------------------------------------------

def _merge(base: dict, delta: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in delta.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _load_config_file(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise DataLoadError("config file not found", path=p)
    try:
        d = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataLoadError(f"invalid JSON ({exc.msg} at line {exc.lineno})", path=p) from None
    if not isinstance(d, dict):
        raise DataLoadError("config must be a JSON object", path=p)
    # accept the config.json echo written next to results
    return d["config"] if "config" in d and isinstance(d["config"], dict) else d


def _flag_delta(args) -> dict:
    d: dict = {}
    if args.seed is not None:
        d["seed"] = args.seed
    if args.t_start is not None:
        d["t_start"] = args.t_start
    if args.t_end is not None:
        d["t_end"] = args.t_end
    if args.scenario is not None:
        d["scenario"] = {"kind": args.scenario}
    if args.preset is not None:
        d["behavior"] = dict(PRESETS[args.preset])
    pop = {}
    if args.n_initial is not None:
        pop["n_initial"] = args.n_initial
    if args.dh_share is not None:
        pop["dh_share"] = args.dh_share
    if pop:
        d["population"] = pop
    if args.entrant_scale is not None:
        d["entrant_scale"] = args.entrant_scale
    if args.include_zero_holders:
        d["include_zero_holders"] = True
    if args.market_data is not None:
        d["market_data"] = str(args.market_data)
        d["synthetic"] = None
    elif args.synthetic:
        d["market_data"] = None
        d["synthetic"] = {"seed": args.synth_seed, "price0": args.price0, "drift": args.drift,
                          "vol": args.vol, "fgi": {"kind": args.fgi_model}}
    return d


def config_dict(args, delta: dict | None = None) -> dict:
    """Config file, then the experiment delta, then flags (flags win)."""
    d = _load_config_file(args.config) if args.config else {}
    if delta:
        d = _merge(d, delta)
    d = _merge(d, _flag_delta(args))
    if delta:
        # keys an experiment varies must stay varied
        for key in ("scenario", "t_end"):
            if key in delta:
                d = _merge(d, {key: delta[key]})
        if "population" in delta:
            d = _merge(d, {"population": delta["population"]})
    if d.get("market_data") is None and d.get("synthetic") is None:
        raise UsageError("no market data: pass --market-data PATH (CSV with date,price_usd,fgi) "
                         "or --synthetic to generate a series")
    return d


def build_config(args, delta: dict | None = None) -> engine.RunConfig:
    try:
        return engine.RunConfig.from_dict(config_dict(args, delta))
    except TypeError as exc:
        raise ParameterError(f"bad config: {exc}") from None


def results_root() -> Path:
    return Path(os.environ.get(RESULTS_ENV) or "results")


def out_dir(args, default_name: str) -> Path:
    return Path(args.out) if args.out else results_root() / default_name


def _workers(args) -> int:
    return engine.default_workers() if args.workers is None else args.workers


def _run_name(prefix: str, cfg: engine.RunConfig) -> str:
    return f"{prefix}-{cfg.scenario.kind.value}-seed{cfg.seed}"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _simulate_one(cfg: engine.RunConfig, args, out: Path) -> Path:
    ens = engine.run_ensemble(cfg, args.replicates, _workers(args))
    engine.write_results(ens, cfg, out, args.replicates)
    if args.fill_log:
        engine.run(engine.replicate_config(cfg, 0), fill_log_dir=out / "fills")
    g = ens.gini_mean
    print(f"{out}: {ens.n_replicates} replicate(s), t={int(ens.t[0])}..{int(ens.t[-1])}, "
          f"gini {g[0]:.4f} -> {g[-1]:.4f}, whale share {ens.whale_mean[-1]:.4f}")
    return out


def cmd_simulate(args) -> int:
    if args.experiment:
        exp = EXPERIMENTS[args.experiment]
        root = out_dir(args, f"{exp.name}-seed{args.seed if args.seed is not None else 0}")
        for label, delta in exp.runs:
            _simulate_one(build_config(args, delta), args, root / label)
        return EXIT_OK
    cfg = build_config(args)
    _simulate_one(cfg, args, out_dir(args, _run_name("simulate", cfg)))
    return EXIT_OK


def _read_final_whales(run_dir: Path) -> list[dict]:
    path = run_dir / "final_whales.csv"
    if not path.is_file():
        raise DataLoadError("missing run results (final_whales.csv)", path=path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataLoadError("no replicate rows", path=path)
    return rows


WHALE_TABLE_COLUMNS = ("scenario", "preset", "percentage", "whale_count", "n_measured",
                       "mean_percentage", "std_percentage", "n_replicates")


def whale_table(results_dir) -> list[dict]:
    """One row per scenario x preset from ``<dir>/<scenario>_<preset>/final_whales.csv``.

    ``percentage`` and ``whale_count / n_measured`` come from replicate 0; the
    mean and std are over all replicates.
    """
    base = Path(results_dir)
    missing = [f"{k}_{p}" for k in SCENARIOS for p in PRESET_NAMES if not (base / f"{k}_{p}").is_dir()]
    if missing:
        raise DataLoadError(f"missing runs: {', '.join(missing)}", path=base)
    rows = []
    for k in SCENARIOS:
        for p in PRESET_NAMES:
            reps = _read_final_whales(base / f"{k}_{p}")
            first = reps[0]
            count, n = int(first["whale_count"]), int(first["n_measured"])
            shares = np.array([100.0 * float(r["whale_share"]) for r in reps])
            rows.append({"scenario": k, "preset": p, "percentage": round(100.0 * count / n, 2),
                         "whale_count": count, "n_measured": n, "mean_percentage": float(shares.mean()),
                         "std_percentage": float(shares.std()), "n_replicates": len(reps)})
    return rows


def whale_ordering_holds(rows: list[dict]) -> dict[str, bool]:
    """Per preset: is Bentham > Cronje > Rawls in whale percentage?"""
    by = {(r["scenario"], r["preset"]): r["mean_percentage"] for r in rows}
    return {p: by[("bentham", p)] > by[("cronje", p)] > by[("rawls", p)] for p in PRESET_NAMES}


def cmd_table_whales(args) -> int:
    src = Path(args.results) if args.results else results_root() / "whale-table"
    if args.run:
        exp = EXPERIMENTS["whale-table"]
        for label, delta in exp.runs:
            _simulate_one(build_config(args, delta), args, src / label)
    rows = whale_table(src)
    out = Path(args.out) if args.out else src
    out.mkdir(parents=True, exist_ok=True)
    with (out / "whale_table.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=WHALE_TABLE_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    by = {(r["scenario"], r["preset"]): r for r in rows}
    print(f"{'':10}" + "".join(f"{p:>26}" for p in PRESET_NAMES))
    for k in SCENARIOS:
        cells = [by[(k, p)] for p in PRESET_NAMES]
        print(f"{k:10}" + "".join(f"{c['percentage']:>8.2f}% ({c['whale_count']} / {c['n_measured']})".rjust(26)
                                  for c in cells))
    for p, ok in whale_ordering_holds(rows).items():
        print(f"ordering bentham > cronje > rawls, {p}: {'yes' if ok else 'no'}")
    print(out / "whale_table.csv")
    return EXIT_OK


def _reference_lookup(reference, t: np.ndarray, column: str) -> list:
    if reference is None or getattr(reference, column) is None:
        return [""] * len(t)
    values = dict(zip(reference.t.tolist(), getattr(reference, column).tolist()))
    return [repr(values[int(x)]) if int(x) in values else "" for x in t]


def cmd_plot_data(args) -> int:
    runs = [Path(r) for r in args.runs]
    labels = args.labels or [r.name for r in runs]
    if len(labels) != len(runs):
        raise UsageError(f"{len(runs)} run directories but {len(labels)} labels")
    data = []
    for r in runs:
        path = r / "ensemble.csv"
        if not path.is_file():
            raise DataLoadError("missing ensemble.csv", path=path)
        data.append(engine.read_ensemble_csv(path))
    t = data[0]["t"]
    for r, d in zip(runs, data):
        if not np.array_equal(d["t"], t):
            raise DataLoadError("runs cover different days", path=r / "ensemble.csv")
    reference = load_reference_series(args.reference) if args.reference else None
    out = Path(args.out) if args.out else results_root() / "plot-data"
    out.mkdir(parents=True, exist_ok=True)
    for panel, stem, ref_col in (("gini", "gini", "gini"), ("one_minus_nse", "nse", "one_minus_nse")):
        path = out / f"{args.name}_{panel}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"{lab}_{s}" for lab in labels for s in ("mean", "std")] + ["reference"])
            ref = _reference_lookup(reference, t, ref_col)
            for i, day in enumerate(t):
                row = [int(day)]
                for d in data:
                    row += [repr(float(d[f"{stem}_mean"][i])), repr(float(d[f"{stem}_std"][i]))]
                w.writerow(row + [ref[i]])
        print(path)
    return EXIT_OK


def cmd_synth_data(args) -> int:
    if args.kind == "market":
        days = args.days if args.days is not None else 392 - args.t_start_market + 1
        series = synthetic_market_series(args.synth_seed, days, args.price0, args.drift, args.vol,
                                         FgiModel(kind=args.fgi_model), t_start=args.t_start_market)
        path = Path(args.out) if args.out else results_root() / "synthetic_market.csv"
        save_market_series(series, path)
    else:
        cfg = build_config(args)
        ens = engine.run_ensemble(cfg, args.replicates, _workers(args))
        path = Path(args.out) if args.out else results_root() / "synthetic_reference.csv"
        save_reference_series(validation.reference_from_ensemble(ens), path)
    print(path)
    return EXIT_OK


def _parse_grid(args) -> cal.GridSpec:
    if args.grid and args.grid_param:
        raise UsageError("use either --grid FILE or --grid-param, not both")
    if args.grid:
        grid = cal.read_grid_json(args.grid)
    elif args.grid_param:
        values = {}
        for item in args.grid_param:
            name, sep, raw = item.partition("=")
            if not sep or not raw:
                raise UsageError(f"--grid-param expects NAME=v1,v2,..., got {item!r}")
            try:
                vals = [float(v) for v in raw.split(",")]
            except ValueError:
                raise UsageError(f"non-numeric value in --grid-param {item!r}") from None
            if name in cal.THRESHOLD_PARAMS:
                vals = [int(v) for v in vals]
            values[name] = tuple(vals)
        grid = cal.GridSpec(values)
    else:
        grid = cal.GridSpec.full()
    if args.replicates_per_cell is not None:
        grid = replace(grid, replicates=args.replicates_per_cell)
    return grid


def cmd_calibrate(args) -> int:
    cfg = build_config(args)
    reference = load_reference_series(args.reference)
    grid = _parse_grid(args)
    result = cal.grid_search(grid, cfg, reference, args.objective, args.objective_metric, _workers(args),
                             args.max_cells)
    if args.refine:
        fine = cal.refine_grid(grid, result.best.cell)
        second = cal.grid_search(fine, cfg, reference, args.objective, args.objective_metric, _workers(args),
                                 args.max_cells)
        known = {r.cell for r in result.table}
        table = result.table + [r for r in second.table if r.cell not in known]
        best = min(table, key=lambda r: (r.objective(args.objective), r.cell))
        result = cal.CalibrationResult(result.objective, result.metric, best, table)
    extra = {}
    if args.final_replicates:
        final = cal.evaluate_cell(cfg, result.best.cell, reference, args.final_replicates, args.objective_metric)
        extra = {"final_replicates": args.final_replicates, "final_rmse": final.rmse, "final_mape": final.mape,
                 "final_rmse_std": final.rmse_std, "final_mape_std": final.mape_std}
    out = cal.write_calibration(result, out_dir(args, f"calibrate-seed{cfg.seed}"), extra)
    b = result.best
    print(f"{len(result.table)} cells; best {b.params} rmse={b.rmse:.6g} mape={b.mape:.6g}")
    print(out)
    return EXIT_OK


def cmd_validate_event(args) -> int:
    cfg = build_config(args)
    reference = load_reference_series(args.reference)
    report = validation.validation_event(cfg, reference, args.replicates, _workers(args))
    out = out_dir(args, f"validate-event-seed{cfg.seed}")
    report.write_csv(out / "event_validity.csv")
    print(f"final-day whale share: simulated {report.simulated[-1]:.4%}, reference {report.reference[-1]:.4%}, "
          f"gap {report.final_gap_pp:.3f} pp")
    print(out / "event_validity.csv")
    return EXIT_OK


def cmd_validate_sensitivity(args) -> int:
    cfg = build_config(args)
    reference = load_reference_series(args.reference)
    rows = validation.validation_sensitivity(cfg, args.shares, reference, args.replicates, _workers(args))
    out = out_dir(args, f"validate-sensitivity-seed{cfg.seed}")
    for r in rows:
        engine.write_ensemble_csv(r.ensemble, out / f"dh{int(round(r.dh_share * 100))}" / "ensemble.csv")
        nse = "n/a" if r.delta_nse is None else f"{r.delta_nse:.4f}"
        print(f"dh_share={r.dh_share:.2f}: |dGini|={r.delta_gini:.4f} |d(1-NSE)|={nse} at t={r.t_final}")
    print(validation.write_sensitivity_csv(rows, out / "sensitivity.csv"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(raw: str) -> int:
    v = int(raw)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _share(raw: str) -> float:
    v = float(raw)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {v}")
    return v


def _add_market_args(p):
    g = p.add_argument_group("synthetic market")
    g.add_argument("--synth-seed", type=int, default=2020, help="seed of the synthetic price/FGI series")
    g.add_argument("--price0", type=float, default=30000.0, help="first-day price in USD")
    g.add_argument("--drift", type=float, default=0.0, help="daily log-return drift")
    g.add_argument("--vol", type=float, default=0.05, help="daily log-return volatility")
    g.add_argument("--fgi-model", choices=("ar1", "uniform"), default="ar1", help="synthetic FGI generator")


def _add_run_args(p):
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON file mirroring RunConfig; flags override its values")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--scenario", choices=SCENARIOS, help="initial allocation")
    g.add_argument("--preset", choices=PRESET_NAMES, help="DH trading-probability set")
    g.add_argument("--t-start", type=int, help="first trading day (default 45)")
    g.add_argument("--t-end", type=int, help="last trading day (default 392)")
    g.add_argument("--n-initial", type=_positive_int, help="initial population before --entrant-scale")
    g.add_argument("--dh-share", type=_share, help="fraction of Diamond Hand agents")
    g.add_argument("--entrant-scale", type=float,
                   help="divide initial and entering agents by this factor and multiply fiat endowments by it")
    g.add_argument("--include-zero-holders", action="store_true",
                   help="measure concentration over all agents, not only token holders")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--market-data", help="CSV with columns date,price_usd,fgi")
    src.add_argument("--synthetic", action="store_true", help="use a generated price/FGI series")
    g.add_argument("--workers", type=_positive_int, help="parallel processes (default: all cores)")
    g.add_argument("--out", help=f"output directory (default: ${RESULTS_ENV} or ./results, plus a run name)")
    _add_market_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairlaunch", description="Agent-based simulation of governance-token concentration.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one configuration or a named experiment")
    _add_run_args(p)
    p.add_argument("--replicates", type=_positive_int, default=1, help="Monte Carlo replicates (default 1)")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS), help="run a batch of preset configurations")
    p.add_argument("--fill-log", action="store_true", help="write per-day fills of replicate 0 under fills/")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="grid-search behaviour parameters against a reference series")
    _add_run_args(p)
    p.add_argument("--reference", required=True, help="CSV with columns t,gini[,one_minus_nse,...]")
    p.add_argument("--grid", help="JSON file: {param: [values], ..., \"replicates\": n}")
    p.add_argument("--grid-param", action="append", metavar="NAME=V1,V2",
                   help=f"values for one parameter (repeatable); names: {', '.join(cal.PARAMS)}")
    p.add_argument("--replicates-per-cell", type=_positive_int, help="replicates per cell (default 5)")
    p.add_argument("--objective", choices=cal.OBJECTIVES, default="rmse", help="selection objective")
    p.add_argument("--objective-metric", choices=cal.METRICS, default="gini", help="series to fit")
    p.add_argument("--max-cells", type=_positive_int, default=10000, help="refuse larger grids (default 10000)")
    p.add_argument("--refine", action="store_true", help="second pass at half the step around the incumbent")
    p.add_argument("--final-replicates", type=int, default=30,
                   help="re-evaluate the optimum with this many replicates (0 to skip)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("validate-event", help="simulated vs reference whale share (Cronje allocation)")
    _add_run_args(p)
    p.add_argument("--reference", required=True, help="CSV with a whale_share column")
    p.add_argument("--replicates", type=_positive_int, default=30)
    p.set_defaults(func=cmd_validate_event)

    p = sub.add_parser("validate-sensitivity", help="final-day Gini/1-NSE gaps for several DH shares")
    _add_run_args(p)
    p.add_argument("--reference", required=True, help="reference series CSV")
    p.add_argument("--shares", type=_share, nargs="+", default=[0.1, 0.3, 0.5], help="DH shares to try")
    p.add_argument("--replicates", type=_positive_int, default=30)
    p.set_defaults(func=cmd_validate_sensitivity)

    p = sub.add_parser("table-whales", help="whale share at the final day for 3 scenarios x 3 presets")
    _add_run_args(p)
    p.add_argument("--results", help="directory holding <scenario>_<preset>/ run folders")
    p.add_argument("--run", action="store_true", help="run the nine ensembles first")
    p.add_argument("--replicates", type=_positive_int, default=30)
    p.add_argument("--fill-log", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_table_whales)

    p = sub.add_parser("plot-data", help="plot-ready CSVs (mean and std per run, reference overlay)")
    p.add_argument("--runs", nargs="+", required=True, help="run directories containing ensemble.csv")
    p.add_argument("--labels", nargs="+", help="column label per run (default: directory names)")
    p.add_argument("--reference", help="reference series CSV to overlay")
    p.add_argument("--name", default="figure", help="file name stem")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("synth-data", help="write a synthetic market or reference CSV")
    p.add_argument("kind", choices=("market", "reference"))
    _add_run_args(p)
    p.add_argument("--days", type=_positive_int, help="market: number of days (default up to t=392)")
    p.add_argument("--market-t-start", dest="t_start_market", type=int, default=45,
                   help="market: day index of the first row")
    p.add_argument("--replicates", type=_positive_int, default=5, help="reference: ensemble size")
    p.set_defaults(func=cmd_synth_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"fairlaunch {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataLoadError, UndefinedMetricError, OSError) as exc:
        print(f"fairlaunch {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantViolation as exc:
        print(f"fairlaunch {args.command}: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
