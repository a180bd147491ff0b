import copy
import math
from dataclasses import replace

import numpy as np
import pytest

from fairlaunch import behavior as bh
from fairlaunch import engine, metrics
from fairlaunch import scenario as sc
from fairlaunch.errors import DataLoadError, ParameterError
from fairlaunch.ingest import MarketDay, save_market_series, synthetic_market_series

from conftest import drift_config


def small(**kw) -> engine.RunConfig:
    base = dict(seed=3, t_end=75, population=sc.PopulationConfig(n_initial=300), synthetic=engine.SyntheticMarket(),
                entrant_scale=10.0)
    base.update(kw)
    return engine.RunConfig(**base)


class TestRunConfig:
    def test_validation(self):
        with pytest.raises(ParameterError):
            small(t_start=50, t_end=49)
        with pytest.raises(ParameterError):
            small(entrant_scale=0)
        with pytest.raises(ParameterError):
            engine.RunConfig()

    def test_dict_round_trip(self):
        cfg = small(scenario=sc.ScenarioSpec(kind="rawls"), behavior=bh.preset("low"))
        assert engine.RunConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key(self):
        with pytest.raises(ParameterError):
            engine.RunConfig.from_dict({**small().to_dict(), "bogus": 1})

    def test_effective_population(self):
        cfg = small(population=sc.PopulationConfig(n_initial=5000))
        p = engine.effective_population(cfg)
        assert p.n_initial == 500
        assert p.pareto_min == pytest.approx(4_000_000)
        assert p.exp_rate == pytest.approx(1 / 400_000)
        assert engine.effective_population(replace(cfg, entrant_scale=1.0)) is cfg.population


class TestRun:
    def test_single_day(self):
        r = engine.run(small(t_end=45))
        assert len(r) == 1 and r.t.tolist() == [45]

    def test_one_point_per_day(self):
        r = engine.run(small())
        assert r.t.tolist() == list(range(45, 76))

    def test_deterministic(self):
        assert engine.run(small()).same_series(engine.run(small()))
        assert not engine.run(small()).same_series(engine.run(small(seed=4)))

    def test_conservation_and_bookkeeping(self):
        cfg = small(t_end=120)
        state = engine.init_state(cfg)
        for d in engine.market_window(cfg):
            before = len(state.pop)
            probe = copy.deepcopy(state.rng)
            expected = sc.draw_entrant_count(probe, cfg.entrants, cfg.entrant_scale) if d.t > cfg.t_start else 0
            engine.step_day(state, d)
            assert len(state.pop) == before + expected
            assert abs(math.fsum(state.pop.tokens) - sc.TOTAL_SUPPLY) < 1e-6
            assert (state.pop.fiat >= 0).all() and (state.pop.tokens >= 0).all()

    def test_null_step(self):
        frozen = bh.BehaviorParams(p_rt_trade=0.0, p_t_fgi_e=0.0, p_t_w_h=0.0, p_t_fgi_n=0.0, p_t_w_l=0.0)
        cfg = small(behavior=frozen, entrants=sc.EntrantSpec(kappa=1.0, loc=-1e9, scale=1.0))
        state = engine.init_state(cfg)
        days = engine.market_window(cfg)
        engine.step_day(state, days[0])
        tokens, fiat, point = state.pop.tokens.copy(), state.pop.fiat.copy(), state.records[-1][0]
        engine.step_day(state, days[1])
        assert np.array_equal(tokens, state.pop.tokens) and np.array_equal(fiat, state.pop.fiat)
        p2 = state.records[-1][0]
        assert (p2.gini, p2.one_minus_nse, p2.whale_share, p2.n_agents) == \
            (point.gini, point.one_minus_nse, point.whale_share, point.n_agents)

    def test_agent_count_non_decreasing(self):
        r = engine.run(small())
        assert (np.diff(r.n_agents) >= 0).all()

    def test_bentham_starts_at_zero(self):
        r = engine.run(small(scenario=sc.ScenarioSpec(kind="bentham")))
        assert r.initial.gini == 0.0

    def test_market_file(self, tmp_path):
        days = synthetic_market_series(11, 31)
        path = save_market_series(days, tmp_path / "m.csv")
        a = engine.run(small(market_data=str(path), synthetic=None))
        b = engine.run(small(synthetic=engine.SyntheticMarket(seed=11)))
        assert a.same_series(b)

    def test_market_too_short(self, tmp_path):
        path = save_market_series(synthetic_market_series(1, 10), tmp_path / "m.csv")
        with pytest.raises(DataLoadError):
            engine.run(small(market_data=str(path), synthetic=None))

    def test_final_agent_count_full_scale(self):
        cfg = small(t_end=392, entrant_scale=1.0, population=sc.PopulationConfig(n_initial=5000))
        ens = engine.run_ensemble(cfg, 3)
        added = ens.runs[0].n_agents[-1] - 5000
        per_day = np.mean([r.n_agents[-1] - 5000 for r in ens.runs]) / 347
        expected = sc.expected_entrant_count(cfg.entrants)
        # sd of a 3-run mean of 347-day averages is about 100 / sqrt(1041) ~ 3.1
        assert abs(per_day - expected) < 4 * 3.1
        assert added > 0


class TestEnsemble:
    def test_single_replicate(self):
        ens = engine.run_ensemble(small(), 1)
        r = engine.run(engine.replicate_config(small(), 0))
        assert np.array_equal(ens.gini_mean, r.gini)
        assert (ens.gini_std == 0).all() and (ens.whale_std == 0).all()

    def test_worker_count_irrelevant(self):
        a = engine.run_ensemble(small(), 3, workers=1)
        b = engine.run_ensemble(small(), 3, workers=3)
        for k in ("gini_mean", "gini_std", "nse_mean", "whale_mean", "n_agents_mean", "final_whale_shares"):
            assert np.array_equal(getattr(a, k), getattr(b, k))

    def test_invalid(self):
        with pytest.raises(ParameterError):
            engine.run_ensemble(small(), 0)


class TestOutputs:
    def test_write_results(self, tmp_path):
        cfg = small()
        ens = engine.run_ensemble(cfg, 2)
        out = engine.write_results(ens, cfg, tmp_path / "run", 2)
        lines = (out / "metrics.csv").read_text().splitlines()
        assert lines[0] == "t,gini,one_minus_nse,whale_share,n_agents"
        assert lines[1].startswith("45_pre,")
        assert len(lines) == 2 + cfg.n_days
        back = engine.read_metrics_csv(out / "metrics.csv")
        np.testing.assert_array_equal(back["gini"], ens.runs[0].gini)
        e = engine.read_ensemble_csv(out / "ensemble.csv")
        assert list(e) == list(engine.ENSEMBLE_COLUMNS)
        assert len(e["t"]) == cfg.n_days and (e["gini_std"] >= 0).all()
        assert (out / "replicates" / "metrics_1.csv").is_file()
        assert (out / "final_whales.csv").read_text().startswith(",".join(engine.FINAL_WHALE_COLUMNS))
        import json
        meta = json.loads((out / "config.json").read_text())
        assert engine.RunConfig.from_dict(meta["config"]) == cfg
        assert meta["rng"].startswith("numpy.random.PCG64")

    def test_fill_log(self, tmp_path):
        cfg = small(t_end=47)
        engine.run(cfg, fill_log_dir=tmp_path)
        assert sorted(p.name for p in tmp_path.iterdir()) == ["fills_45.csv", "fills_46.csv", "fills_47.csv"]


class TestConcentrationInvariants:
    """Synthetic-market properties of the full model (30 replicates, desk scale 10)."""

    @pytest.mark.parametrize("level", list(bh.PRESETS))
    def test_bentham_rises(self, drift_ensembles, level):
        ens = drift_ensembles[("bentham", level)]
        assert ens.gini_mean[-1] > ens.gini_mean[20]
        assert (ens.initial_gini == 0.0).all()

    @pytest.mark.parametrize("level", list(bh.PRESETS))
    def test_cronje_replicate_slopes(self, drift_ensembles, level):
        ens = drift_ensembles[("cronje", level)]
        slopes = [metrics.linreg_slope(r.t[-200:], r.gini[-200:])[0] for r in ens.runs]
        assert np.mean(np.array(slopes) >= 0) >= 0.9

    def test_bentham_has_most_whales(self, drift_ensembles):
        w = {k: drift_ensembles[(k, "high")].whale_mean[-1] for k in ("bentham", "cronje", "rawls")}
        assert w["bentham"] > w["cronje"] and w["bentham"] > w["rawls"]
