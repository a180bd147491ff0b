"""Day loop and Monte Carlo runner.

Each trading day ``t`` runs, in order:

1. new token-free agents arrive (none on the first day);
2. the day's wealth cut-off and FGI state are computed;
3. every agent, in id order, decides and sizes at most one order;
4. orders are FIFO-matched at the day price and settled;
5. concentration metrics are recorded.

A run is a pure function of its :class:`RunConfig`; the replicate ``k`` of
an ensemble runs with seed ``derive_seed(config.seed, k)``, so ensembles are
identical for any number of workers.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import behavior as bh
from . import market, metrics
from . import scenario as sc
from .distributions import RNG_NAME, derive_seed, make_rng
from .errors import DataLoadError, InvariantViolation, ParameterError
from .ingest import FgiModel, MarketDay, load_market_series, synthetic_market_series

logger = logging.getLogger(__name__)

CONSERVATION_TOL = 1e-6


@dataclass(frozen=True)
class SyntheticMarket:
    """Parameters of a generated price/FGI series (see ``synthetic_market_series``)."""

    seed: int = 2020
    price0: float = 30000.0
    drift: float = 0.0
    vol: float = 0.05
    fgi: FgiModel = field(default_factory=FgiModel)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    t_start: int = 45
    t_end: int = 392
    scenario: sc.ScenarioSpec = field(default_factory=sc.ScenarioSpec)
    behavior: bh.BehaviorParams = field(default_factory=bh.BehaviorParams)
    population: sc.PopulationConfig = field(default_factory=sc.PopulationConfig)
    entrants: sc.EntrantSpec = field(default_factory=sc.EntrantSpec)
    market_data: str | None = None
    synthetic: SyntheticMarket | None = None
    entrant_scale: float = 1.0
    include_zero_holders: bool = False
    whale_threshold: float = 0.9

    def __post_init__(self):
        if not self.t_start <= self.t_end:
            raise ParameterError(f"t_start ({self.t_start}) must not exceed t_end ({self.t_end})")
        if not self.entrant_scale > 0:
            raise ParameterError(f"entrant_scale must be positive, got {self.entrant_scale}")
        if self.market_data is None and self.synthetic is None:
            raise ParameterError("a run needs market_data or a synthetic market")

    @property
    def n_days(self) -> int:
        return self.t_end - self.t_start + 1

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["scenario"] = self.scenario.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        kw = {}
        if "scenario" in d:
            kw["scenario"] = sc.ScenarioSpec(**d.pop("scenario"))
        if "behavior" in d:
            kw["behavior"] = bh.BehaviorParams(**d.pop("behavior"))
        if "population" in d:
            kw["population"] = sc.PopulationConfig(**d.pop("population"))
        if "entrants" in d:
            kw["entrants"] = sc.EntrantSpec(**d.pop("entrants"))
        if d.get("synthetic") is not None:
            s = dict(d.pop("synthetic"))
            if "fgi" in s:
                s["fgi"] = FgiModel(**s["fgi"])
            kw["synthetic"] = SyntheticMarket(**s)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d, **kw)


@functools.lru_cache(maxsize=16)
def _market_window(market_data, synthetic, t_start: int, t_end: int) -> tuple[np.ndarray, np.ndarray]:
    if market_data is not None:
        days = load_market_series(market_data, t_start=t_start, t_end=t_end)
    else:
        s = synthetic
        days = synthetic_market_series(s.seed, t_end - t_start + 1, s.price0, s.drift, s.vol, s.fgi,
                                       t_start=t_start)
    prices = np.array([d.price for d in days])
    fgi = np.array([d.fgi for d in days], dtype=np.int64)
    prices.flags.writeable = False
    fgi.flags.writeable = False
    return prices, fgi


def market_window(config: RunConfig) -> list[MarketDay]:
    """The price/FGI days a run will see, t_start..t_end."""
    if config.market_data is not None:
        return load_market_series(config.market_data, t_start=config.t_start, t_end=config.t_end)
    s = config.synthetic
    return synthetic_market_series(s.seed, config.n_days, s.price0, s.drift, s.vol, s.fgi, t_start=config.t_start)


@dataclass
class SimState:
    config: RunConfig
    t: int
    pop: sc.Population
    rng: np.random.Generator
    records: list = field(default_factory=list)  # (MetricPoint, whale_count, n_measured)
    last_fills: market.Fills | None = None


def effective_population(config: RunConfig) -> sc.PopulationConfig:
    """Population settings after applying the desk-scale divisor.

    ``entrant_scale = s`` divides the initial population (and, in
    :func:`step_day`, each day's entrant count) by ``s`` and multiplies fiat
    endowments by ``s``. Aggregate fiat demand per token of the fixed supply
    is then unchanged, so the token-share dynamics track the full-size model
    with ``s`` times fewer agents.
    """
    s = config.entrant_scale
    p = config.population
    if s == 1:
        return p
    return replace(p, n_initial=max(1, int(math.floor(p.n_initial / s + 0.5))),
                   pareto_min=p.pareto_min * s, exp_rate=p.exp_rate / s)


def init_state(config: RunConfig) -> SimState:
    rng = make_rng(config.seed)
    pop = sc.initial_population(rng, effective_population(config), config.scenario, config.t_start)
    return SimState(config, config.t_start, pop, rng)


def _measure(state: SimState, t: int):
    cfg = state.config
    return metrics.measure(t, state.pop.tokens, len(state.pop), cfg.include_zero_holders, cfg.whale_threshold)


def step_day(state: SimState, day: MarketDay) -> SimState:
    """Advance ``state`` through trading day ``day.t`` (in place) and return it."""
    cfg = state.config
    rng = state.rng
    t = day.t
    if t > cfg.t_start:
        count = sc.draw_entrant_count(rng, cfg.entrants, cfg.entrant_scale)
        if count:
            state.pop.extend(sc.spawn_entrants(rng, effective_population(cfg), t, count))
    pop = state.pop

    fiat_p90 = bh.wealth_threshold(pop.fiat, cfg.behavior)
    fgi_state = bh.classify_fgi(int(day.fgi), cfg.behavior)
    actions = bh.decide_actions(rng, pop, fgi_state, fiat_p90, cfg.behavior)
    z = rng.standard_normal(len(pop))

    is_buy = actions == bh.Action.BUY
    is_sell = actions == bh.Action.SELL
    budgets = np.where(is_buy, bh.order_size(pop.fiat, z), 0.0)
    quantities = np.where(is_sell, bh.order_size(pop.tokens, z), 0.0)
    buy_ids = np.flatnonzero(budgets > 0)
    sell_ids = np.flatnonzero(quantities > 0)

    fills = market.match_arrays(buy_ids, budgets[buy_ids], sell_ids, quantities[sell_ids], day.price)
    market.settle(pop, fills)
    state.last_fills = fills

    drift = abs(math.fsum(pop.tokens) - cfg.scenario.total_supply)
    if drift > CONSERVATION_TOL:
        raise InvariantViolation(f"token supply drifted by {drift:.3g} on day {t}")
    state.records.append(_measure(state, t))
    state.t = t
    return state


@dataclass
class RunResult:
    config: RunConfig
    seed: int
    t: np.ndarray
    gini: np.ndarray
    one_minus_nse: np.ndarray
    whale_share: np.ndarray
    whale_count: np.ndarray
    n_measured: np.ndarray
    n_agents: np.ndarray
    initial: metrics.MetricPoint  # pre-trade snapshot at t_start
    final_population: sc.Population
    wall_time: float = 0.0

    def __len__(self) -> int:
        return len(self.t)

    def points(self) -> list[metrics.MetricPoint]:
        return [metrics.MetricPoint(int(t), float(g), float(e), float(w), int(n))
                for t, g, e, w, n in zip(self.t, self.gini, self.one_minus_nse, self.whale_share, self.n_agents)]

    def same_series(self, other: "RunResult") -> bool:
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("t", "gini", "one_minus_nse", "whale_share", "whale_count", "n_agents"))


def run(config: RunConfig, fill_log_dir=None) -> RunResult:
    """Simulate t_start..t_end inclusive; one metric point per day."""
    started = time.perf_counter()
    prices, fgis = _market_window(config.market_data, config.synthetic, config.t_start, config.t_end)
    if len(prices) != config.n_days:
        raise DataLoadError(f"market data has {len(prices)} days, run needs {config.n_days}")
    state = init_state(config)
    initial, _, _ = _measure(state, config.t_start)
    for k, t in enumerate(range(config.t_start, config.t_end + 1)):
        day = MarketDay(t, None, float(prices[k]), int(fgis[k]))
        step_day(state, day)
        if fill_log_dir is not None:
            market.write_fill_log(Path(fill_log_dir) / f"fills_{t}.csv", t, state.last_fills)
    recs = state.records
    return RunResult(
        config=config,
        seed=config.seed,
        t=np.array([r[0].t for r in recs], dtype=np.int64),
        gini=np.array([r[0].gini for r in recs]),
        one_minus_nse=np.array([r[0].one_minus_nse for r in recs]),
        whale_share=np.array([r[0].whale_share for r in recs]),
        whale_count=np.array([r[1] for r in recs], dtype=np.int64),
        n_measured=np.array([r[2] for r in recs], dtype=np.int64),
        n_agents=np.array([r[0].n_agents for r in recs], dtype=np.int64),
        initial=initial,
        final_population=state.pop,
        wall_time=time.perf_counter() - started,
    )


@dataclass
class EnsembleResult:
    t: np.ndarray
    gini_mean: np.ndarray
    gini_std: np.ndarray
    nse_mean: np.ndarray
    nse_std: np.ndarray
    whale_mean: np.ndarray
    whale_std: np.ndarray
    n_agents_mean: np.ndarray
    n_replicates: int
    final_whale_shares: np.ndarray
    final_whale_counts: np.ndarray
    final_n_measured: np.ndarray
    initial_gini: np.ndarray
    runs: list[RunResult] = field(default_factory=list, repr=False)


def replicate_config(config: RunConfig, k: int) -> RunConfig:
    return replace(config, seed=derive_seed(config.seed, k))


def _run_replicate(args):
    config, k = args
    return run(replicate_config(config, k))


def default_workers() -> int:
    return os.cpu_count() or 1


def run_ensemble(config: RunConfig, n_replicates: int, workers: int | None = 1,
                 keep_runs: bool = True) -> EnsembleResult:
    """Run ``n_replicates`` independent replicates and aggregate per day.

    Standard deviations are population (ddof=0) values, so one replicate
    gives sigma = 0.
    """
    if n_replicates < 1:
        raise ParameterError(f"n_replicates must be >= 1, got {n_replicates}")
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = [(config, k) for k in range(n_replicates)]
    if workers == 1 or n_replicates == 1:
        runs = [_run_replicate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, n_replicates)) as pool:
            runs = list(pool.map(_run_replicate, jobs))
    return aggregate(runs, keep_runs=keep_runs)


def aggregate(runs: list[RunResult], keep_runs: bool = True) -> EnsembleResult:
    """Per-day mean/std across replicates, reduced in replicate order."""
    stack = lambda name: np.vstack([getattr(r, name) for r in runs]).astype(float)  # noqa: E731
    g, e, w, n = stack("gini"), stack("one_minus_nse"), stack("whale_share"), stack("n_agents")
    return EnsembleResult(
        t=runs[0].t.copy(),
        gini_mean=g.mean(axis=0), gini_std=g.std(axis=0),
        nse_mean=e.mean(axis=0), nse_std=e.std(axis=0),
        whale_mean=w.mean(axis=0), whale_std=w.std(axis=0),
        n_agents_mean=n.mean(axis=0),
        n_replicates=len(runs),
        final_whale_shares=np.array([r.whale_share[-1] for r in runs]),
        final_whale_counts=np.array([r.whale_count[-1] for r in runs], dtype=np.int64),
        final_n_measured=np.array([r.n_measured[-1] for r in runs], dtype=np.int64),
        initial_gini=np.array([r.initial.gini for r in runs]),
        runs=list(runs) if keep_runs else [],
    )


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

METRIC_COLUMNS = ("t", "gini", "one_minus_nse", "whale_share", "n_agents")
ENSEMBLE_COLUMNS = ("t", "gini_mean", "gini_std", "nse_mean", "nse_std", "whale_mean", "whale_std", "n_agents_mean")
FINAL_WHALE_COLUMNS = ("replicate", "t", "whale_share", "whale_count", "n_measured", "n_agents")


def write_metrics_csv(result: RunResult, path) -> Path:
    """Per-day metrics; the first row, labelled ``<t_start>_pre``, is the
    snapshot before the first trading round."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        p = result.initial
        w.writerow([f"{p.t}_pre", repr(p.gini), repr(p.one_minus_nse), repr(p.whale_share), p.n_agents])
        for p in result.points():
            w.writerow([p.t, repr(p.gini), repr(p.one_minus_nse), repr(p.whale_share), p.n_agents])
    return path


def read_metrics_csv(path) -> dict[str, np.ndarray]:
    """Load a metrics CSV, dropping the pre-trade row."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.DictReader(fh) if not r["t"].endswith("_pre")]
    return {c: np.array([float(r[c]) for r in rows]) for c in METRIC_COLUMNS}


def write_ensemble_csv(ens: EnsembleResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ENSEMBLE_COLUMNS)
        cols = (ens.gini_mean, ens.gini_std, ens.nse_mean, ens.nse_std, ens.whale_mean, ens.whale_std, ens.n_agents_mean)
        for i, t in enumerate(ens.t):
            w.writerow([int(t)] + [repr(float(c[i])) for c in cols])
    return path


def read_ensemble_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataLoadError("empty ensemble file", path=path)
    return {c: np.array([float(r[c]) for r in rows]) for c in ENSEMBLE_COLUMNS}


def write_final_whales_csv(ens: EnsembleResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FINAL_WHALE_COLUMNS)
        for k, run_ in enumerate(ens.runs):
            w.writerow([k, int(run_.t[-1]), repr(float(run_.whale_share[-1])), int(run_.whale_count[-1]),
                        int(run_.n_measured[-1]), int(run_.n_agents[-1])])
    return path


def write_results(ens: EnsembleResult, config: RunConfig, out_dir, n_replicates: int) -> Path:
    """Write ``config.json``, ``metrics.csv`` (replicate 0), ``ensemble.csv``,
    ``final_whales.csv`` and, for several replicates, ``replicates/metrics_<k>.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "config": config.to_dict(),
        "n_replicates": n_replicates,
        "replicate_seeds": [int(r.seed) for r in ens.runs],
        "rng": RNG_NAME,
        "wall_time_s": [round(r.wall_time, 3) for r in ens.runs],
    }
    (out / "config.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    write_metrics_csv(ens.runs[0], out / "metrics.csv")
    if len(ens.runs) > 1:
        for k, r in enumerate(ens.runs):
            write_metrics_csv(r, out / "replicates" / f"metrics_{k}.csv")
    write_ensemble_csv(ens, out / "ensemble.csv")
    write_final_whales_csv(ens, out / "final_whales.csv")
    return out
