"""Exhaustive grid search of behaviour parameters against a reference series.

Every feasible cell of the grid (``th_l < th_h``) is simulated as a small
ensemble; the ensemble-mean metric series is scored against the reference
with RMSE and MAPE, and the cell with the lowest selected objective wins.
Ties go to the lexicographically smallest parameter tuple.

A cell's random seed is derived from its parameter values, not from its
position in the grid, so a cell scores the same in any grid that contains it.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import engine
from .distributions import derive_seed
from .errors import DataLoadError, ParameterError, UndefinedMetricError
from .ingest import ReferenceSeries

logger = logging.getLogger(__name__)

#: Grid dimensions, in tie-break order.
PARAMS = ("p_dh_buy", "dh_share", "th_h", "th_l", "p_t_fgi_e", "p_t_w_h", "p_t_fgi_n", "p_t_w_l")
THRESHOLD_PARAMS = ("th_h", "th_l")
OBJECTIVES = ("rmse", "mape")
METRICS = ("gini", "one_minus_nse")


def rmse(actual, simulated) -> float:
    x = np.asarray(actual, dtype=float)
    y = np.asarray(simulated, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise ParameterError(f"series must be non-empty and of equal length, got {x.size} and {y.size}")
    return float(np.sqrt(np.mean((x - y) ** 2)))


def mape_detail(actual, simulated) -> tuple[float, int]:
    """MAPE in percent over points with non-zero actual value, and the number skipped."""
    x = np.asarray(actual, dtype=float)
    y = np.asarray(simulated, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise ParameterError(f"series must be non-empty and of equal length, got {x.size} and {y.size}")
    ok = x != 0
    if not ok.any():
        raise UndefinedMetricError("MAPE is undefined when every actual value is zero")
    return float(100.0 * np.mean(np.abs((x[ok] - y[ok]) / x[ok]))), int((~ok).sum())


def mape(actual, simulated) -> float:
    return mape_detail(actual, simulated)[0]


def _linspace_values(lo: float, hi: float, step: float) -> tuple:
    n = int(round((hi - lo) / step))
    return tuple(round(lo + k * step, 10) for k in range(n + 1))


@dataclass
class GridSpec:
    """Candidate values per parameter; parameters left out keep the base config's value."""

    values: dict
    replicates: int = 5

    def __post_init__(self):
        unknown = set(self.values) - set(PARAMS)
        if unknown:
            raise ParameterError(f"unknown grid parameters {sorted(unknown)}")
        for name, vals in self.values.items():
            if len(vals) == 0:
                raise ParameterError(f"grid parameter {name} has no values")
        if self.replicates < 1:
            raise ParameterError("replicates per cell must be >= 1")
        self.values = {k: tuple(self.values[k]) for k in PARAMS if k in self.values}

    @classmethod
    def full(cls, replicates: int = 5) -> "GridSpec":
        probs = _linspace_values(0.0, 1.0, 0.1)
        th = tuple(int(v) for v in _linspace_values(0, 100, 10))
        return cls({"p_dh_buy": probs, "dh_share": (0.1, 0.3, 0.5), "th_h": th, "th_l": th,
                    "p_t_fgi_e": probs, "p_t_w_h": probs, "p_t_fgi_n": probs, "p_t_w_l": probs}, replicates)

    def cells(self, base: engine.RunConfig) -> list[tuple]:
        """Feasible parameter tuples (ordered as :data:`PARAMS`)."""
        axes = [self.values.get(p, (base_value(base, p),)) for p in PARAMS]
        i_h, i_l = PARAMS.index("th_h"), PARAMS.index("th_l")
        return [c for c in itertools.product(*axes) if c[i_l] < c[i_h]]

    def n_cells(self, base: engine.RunConfig) -> int:
        return len(self.cells(base))


def base_value(config: engine.RunConfig, name: str):
    if name == "dh_share":
        return config.population.dh_share
    return getattr(config.behavior, name)


def config_for_cell(config: engine.RunConfig, cell: tuple) -> engine.RunConfig:
    params = dict(zip(PARAMS, cell))
    dh = params.pop("dh_share")
    params["th_h"] = int(params["th_h"])
    params["th_l"] = int(params["th_l"])
    return replace(config, behavior=replace(config.behavior, **params),
                   population=replace(config.population, dh_share=dh))


def cell_seed(seed: int, cell: tuple) -> int:
    return derive_seed(seed, *(int(round(v * 1000)) for v in cell))


@dataclass
class CellResult:
    cell: tuple
    rmse: float
    mape: float
    mape_skipped: int
    rmse_std: float
    mape_std: float

    @property
    def params(self) -> dict:
        return dict(zip(PARAMS, self.cell))

    def objective(self, name: str) -> float:
        return getattr(self, name)

    def objective_std(self, name: str) -> float:
        return getattr(self, f"{name}_std")


@dataclass
class CalibrationResult:
    objective: str
    metric: str
    best: CellResult
    table: list[CellResult] = field(default_factory=list)

    @property
    def best_params(self) -> dict:
        return self.best.params

    def lookup(self, cell: tuple) -> CellResult:
        key = tuple(cell)
        for r in self.table:
            if r.cell == key:
                return r
        raise KeyError(cell)


def _reference_values(reference: ReferenceSeries, metric: str) -> np.ndarray:
    if metric not in METRICS:
        raise ParameterError(f"objective metric must be one of {METRICS}, got {metric!r}")
    return reference.column(metric)


def evaluate_cell(config: engine.RunConfig, cell: tuple, reference: ReferenceSeries,
                  replicates: int, metric: str = "gini") -> CellResult:
    cfg = replace(config_for_cell(config, cell), seed=cell_seed(config.seed, cell))
    ens = engine.run_ensemble(cfg, replicates, workers=1)
    ref = _reference_values(reference, metric)
    common, i_sim, i_ref = np.intersect1d(ens.t, reference.t, return_indices=True)
    if common.size != ens.t.size:
        raise DataLoadError(f"reference covers {common.size} of the {ens.t.size} simulated days")
    actual = ref[i_ref]
    mean_series = ens.gini_mean if metric == "gini" else ens.nse_mean
    per_rep = [(rmse(actual, getattr(r, metric)[i_sim]), mape(actual, getattr(r, metric)[i_sim])) for r in ens.runs]
    m, skipped = mape_detail(actual, mean_series[i_sim])
    return CellResult(tuple(cell), rmse(actual, mean_series[i_sim]), m, skipped,
                      float(np.std([p[0] for p in per_rep])), float(np.std([p[1] for p in per_rep])))


def _evaluate(args):
    return evaluate_cell(*args)


def grid_search(grid: GridSpec, config: engine.RunConfig, reference: ReferenceSeries,
                objective: str = "rmse", metric: str = "gini", workers: int | None = 1,
                max_cells: int | None = None) -> CalibrationResult:
    if objective not in OBJECTIVES:
        raise ParameterError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    _reference_values(reference, metric)
    cells = grid.cells(config)
    if not cells:
        raise ParameterError("the grid has no feasible cell (every th_l >= th_h)")
    if max_cells is not None and len(cells) > max_cells:
        raise ParameterError(f"grid has {len(cells)} feasible cells, above --max-cells {max_cells}; "
                             "coarsen the grid and refine around the incumbent instead")
    logger.info("grid search over %d cells x %d replicates", len(cells), grid.replicates)
    jobs = [(config, c, reference, grid.replicates, metric) for c in cells]
    workers = engine.default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(jobs) == 1:
        table = [_evaluate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            table = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    best = min(table, key=lambda r: (r.objective(objective), r.cell))
    return CalibrationResult(objective, metric, best, table)


def refine_grid(grid: GridSpec, incumbent: tuple) -> GridSpec:
    """Second-pass grid: for each searched parameter, the incumbent value and
    the points half a grid step either side of it, clipped to the domain."""
    params = dict(zip(PARAMS, incumbent))
    values = {}
    for name, vals in grid.values.items():
        v = params[name]
        if len(vals) < 2:
            values[name] = (v,)
            continue
        srt = sorted(vals)
        step = min(b - a for a, b in zip(srt, srt[1:]))
        lo, hi = (0, 100) if name in THRESHOLD_PARAMS else (0.0, 1.0)
        half = step / 2.0
        if name in THRESHOLD_PARAMS:
            half = max(1, int(round(half)))
        cand = sorted({min(hi, max(lo, round(x, 10))) for x in (v - half, v, v + half)})
        values[name] = tuple(int(x) for x in cand) if name in THRESHOLD_PARAMS else tuple(cand)
    return GridSpec(values, grid.replicates)


TABLE_COLUMNS = PARAMS + ("rmse", "mape", "mape_skipped", "rmse_std", "mape_std")


def write_calibration(result: CalibrationResult, out_dir, extra: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "calibration_table.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in result.table:
            w.writerow(list(r.cell) + [repr(r.rmse), repr(r.mape), r.mape_skipped, repr(r.rmse_std), repr(r.mape_std)])
    best = {"objective": result.objective, "metric": result.metric, "params": result.best.params,
            "rmse": result.best.rmse, "mape": result.best.mape, "cells_evaluated": len(result.table)}
    if extra:
        best.update(extra)
    (out / "best.json").write_text(json.dumps(best, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def read_grid_json(path) -> GridSpec:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    replicates = int(d.pop("replicates", 5))
    return GridSpec({k: tuple(v) for k, v in d.items()}, replicates)
