"""Event-validity and parameter-variability checks against a reference series."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import engine
from .errors import DataLoadError, ParameterError
from .ingest import ReferenceSeries
from .scenario import ScenarioKind


def _align(sim_t: np.ndarray, ref: ReferenceSeries):
    common, i_sim, i_ref = np.intersect1d(sim_t, ref.t, return_indices=True)
    if common.size == 0:
        raise DataLoadError("reference series shares no day with the simulation window")
    return common, i_sim, i_ref


@dataclass
class EventValidityReport:
    t: np.ndarray
    simulated: np.ndarray
    reference: np.ndarray
    n_replicates: int

    @property
    def final_gap_pp(self) -> float:
        """Absolute whale-share gap on the last common day, in percentage points."""
        return float(abs(self.simulated[-1] - self.reference[-1]) * 100.0)

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "simulated_whale_share", "reference_whale_share", "gap_pp"])
            for t, s, r in zip(self.t, self.simulated, self.reference):
                w.writerow([int(t), repr(float(s)), repr(float(r)), repr(float(abs(s - r) * 100.0))])
        return path


def validation_event(config: engine.RunConfig, reference: ReferenceSeries, n_replicates: int = 1,
                     workers: int | None = 1, ensemble: engine.EnsembleResult | None = None) -> EventValidityReport:
    """Compare the simulated whale share of the Cronje scenario with the reference.

    The simulated series is the ensemble mean; pass ``ensemble`` to reuse a
    finished Cronje ensemble instead of running one.
    """
    ref_whale = reference.column("whale_share")
    if ensemble is None:
        cfg = replace(config, scenario=replace(config.scenario, kind=ScenarioKind.CRONJE))
        ensemble = engine.run_ensemble(cfg, n_replicates, workers)
    common, i_sim, i_ref = _align(ensemble.t, reference)
    return EventValidityReport(common, ensemble.whale_mean[i_sim], ref_whale[i_ref], ensemble.n_replicates)


@dataclass
class SensitivityRow:
    dh_share: float
    t_final: int
    gini: float
    one_minus_nse: float
    delta_gini: float
    delta_nse: float | None
    ensemble: engine.EnsembleResult = field(repr=False)


def validation_sensitivity(config: engine.RunConfig, dh_shares, reference: ReferenceSeries,
                           n_replicates: int = 1, workers: int | None = 1) -> list[SensitivityRow]:
    """One ensemble per DH population share; absolute final-day gaps to the reference."""
    rows = []
    for share in dh_shares:
        share = float(share)
        if not 0.0 <= share <= 1.0:
            raise ParameterError(f"DH share must lie in [0, 1], got {share}")
        cfg = replace(config, population=replace(config.population, dh_share=share))
        ens = engine.run_ensemble(cfg, n_replicates, workers)
        common, i_sim, i_ref = _align(ens.t, reference)
        i, j = i_sim[-1], i_ref[-1]
        d_nse = None
        if reference.one_minus_nse is not None:
            d_nse = float(abs(ens.nse_mean[i] - reference.one_minus_nse[j]))
        rows.append(SensitivityRow(share, int(common[-1]), float(ens.gini_mean[i]), float(ens.nse_mean[i]),
                                   float(abs(ens.gini_mean[i] - reference.gini[j])), d_nse, ens))
    return rows


def write_sensitivity_csv(rows: list[SensitivityRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dh_share", "t", "gini", "one_minus_nse", "delta_gini", "delta_nse"])
        for r in rows:
            w.writerow([r.dh_share, r.t_final, repr(r.gini), repr(r.one_minus_nse), repr(r.delta_gini),
                        "" if r.delta_nse is None else repr(r.delta_nse)])
    return path


def reference_from_ensemble(ens: engine.EnsembleResult) -> ReferenceSeries:
    """A synthetic reference series made from simulated ensemble means."""
    return ReferenceSeries(ens.t.astype(np.int64), ens.gini_mean.copy(), ens.nse_mean.copy(),
                           ens.whale_mean.copy(), np.rint(ens.n_agents_mean).astype(np.int64))
