import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairlaunch import behavior as bh
from fairlaunch.distributions import make_rng
from fairlaunch.errors import ParameterError
from fairlaunch.scenario import Agent, Population, Strategy

P = bh.BehaviorParams()


@pytest.fixture
def rng():
    return make_rng(99)


def population(n, dh, fiat=1000.0, tokens=1.0):
    return Population(np.full(n, fiat), np.full(n, tokens), np.full(n, dh), np.zeros(n, dtype=np.int64))


class TestClassification:
    @pytest.mark.parametrize("fgi,state", [(85, "extreme"), (80, "normal"), (10, "extreme"), (20, "normal"),
                                           (50, "normal"), (0, "extreme"), (100, "extreme")])
    def test_fgi(self, fgi, state):
        assert bh.classify_fgi(fgi, P).value == state

    def test_fgi_out_of_range(self):
        with pytest.raises(ParameterError):
            bh.classify_fgi(101, P)

    def test_wealth_boundary(self):
        assert bh.classify_wealth(500.0, 500.0) is bh.WealthState.LOW
        assert bh.classify_wealth(501.0, 500.0) is bh.WealthState.HIGH

    @given(n=st.integers(10, 2000), seed=st.integers(0, 10**6))
    @settings(max_examples=50, deadline=None)
    def test_share_classified_high(self, n, seed):
        fiat = make_rng(seed).permutation(n).astype(float) + 1.0  # distinct
        p90 = bh.wealth_threshold(fiat, P)
        high = sum(bh.classify_wealth(f, p90) is bh.WealthState.HIGH for f in fiat)
        assert abs(high - int(np.floor(0.1 * n))) <= 1


class TestTradeProbability:
    def test_cell_rule(self):
        assert bh.dh_trade_probability(bh.FgiState.EXTREME, bh.WealthState.HIGH, bh.preset("high")) == pytest.approx(0.7)
        assert bh.dh_trade_probability(bh.FgiState.NORMAL, bh.WealthState.LOW, bh.preset("high")) == pytest.approx(0.85)

    @pytest.mark.parametrize("name,exact", [("high", 0.775), ("medium", 0.375), ("low", 0.15)])
    def test_equal_weight_aggregate_matches_published(self, name, exact):
        agg = bh.aggregate_trade_probability(bh.preset(name), 0.5, 0.5)
        assert agg == pytest.approx(exact, abs=1e-12)
        # published values are these rounded to two decimals
        assert abs(agg - bh.PRESET_AGGREGATES[name]) <= 0.005 + 1e-12

    @given(p=st.floats(0, 1))
    def test_degenerate_equal_conditionals(self, p):
        params = bh.BehaviorParams(p_t_fgi_e=p, p_t_w_h=p, p_t_fgi_n=p, p_t_w_l=p, th_h=100, th_l=0)
        cells = {bh.dh_trade_probability(f, w, params) for f in bh.FgiState for w in bh.WealthState}
        assert all(c == pytest.approx(p) for c in cells)
        states = {bh.classify_fgi(x, params) for x in range(101)}
        probs = {bh.dh_trade_probability(s, bh.WealthState.LOW, params) for s in states}
        assert len(probs) == 1

    def test_presets(self):
        assert bh.preset("medium").p_t_w_l == 0.5
        assert bh.PRESETS["low"] == {"p_t_fgi_e": 0.1, "p_t_w_h": 0.1, "p_t_fgi_n": 0.2, "p_t_w_l": 0.2}

    @pytest.mark.parametrize("kw", [{"p_dh_buy": 1.1}, {"th_l": 80, "th_h": 80}, {"th_h": 101}, {"p_t_w_l": -0.1}])
    def test_validation(self, kw):
        with pytest.raises(ParameterError):
            bh.BehaviorParams(**kw)


class TestDecisions:
    def test_rt_no_trade_rate(self, rng):
        pop = population(100_000, False)
        a = bh.decide_actions(rng, pop, bh.FgiState.NORMAL, np.inf, P)
        assert 0.49 <= np.mean(a == bh.Action.NO_TRADE) <= 0.51
        traded = a != bh.Action.NO_TRADE
        assert 0.49 <= np.mean(a[traded] == bh.Action.BUY) <= 0.51

    def test_dh_buy_fraction(self, rng):
        pop = population(100_000, True)
        a = bh.decide_actions(rng, pop, bh.FgiState.EXTREME, np.inf, bh.preset("high"))
        traded = a != bh.Action.NO_TRADE
        assert 0.68 <= np.mean(a[traded] == bh.Action.BUY) <= 0.72
        assert np.mean(traded) == pytest.approx(0.5 * (0.7 + 0.9), abs=0.01)

    def test_no_sell_without_tokens(self, rng):
        pop = population(50_000, False, tokens=0.0)
        a = bh.decide_actions(rng, pop, bh.FgiState.NORMAL, np.inf, P)
        assert not (a == bh.Action.SELL).any()

    def test_no_buy_without_fiat(self, rng):
        pop = population(50_000, True, fiat=0.0)
        a = bh.decide_actions(rng, pop, bh.FgiState.NORMAL, np.inf, P)
        assert not (a == bh.Action.BUY).any()

    @given(seed=st.integers(0, 10**6), dh=st.booleans(), fiat=st.sampled_from([0.0, 10.0]),
           tokens=st.sampled_from([0.0, 2.0]), extreme=st.booleans(), high=st.booleans())
    @settings(max_examples=80, deadline=None)
    def test_scalar_matches_vectorised(self, seed, dh, fiat, tokens, extreme, high):
        fgi = bh.FgiState.EXTREME if extreme else bh.FgiState.NORMAL
        agent = Agent(0, Strategy.DIAMOND_HAND if dh else Strategy.RANDOM_TRADER, fiat, tokens, 45)
        wealth = bh.WealthState.HIGH if high else bh.WealthState.LOW
        scalar = bh.decide_action(make_rng(seed), agent, fgi, wealth, P)
        pop = Population(np.array([fiat]), np.array([tokens]), np.array([dh]), np.array([45]))
        p90 = fiat - 1.0 if high else fiat
        vec = bh.decide_actions(make_rng(seed), pop, fgi, p90, P)
        assert int(vec[0]) == int(scalar)


class TestSizing:
    def test_zero_noise_is_half(self):
        assert bh.order_size(100.0, 0.0) == 50.0
        assert bh.order_size(3.0, 0.0) == 1.5

    @given(h=st.floats(1e-6, 1e12), z=st.floats(-50, 50))
    def test_never_exceeds_holding(self, h, z):
        s = float(bh.order_size(h, z))
        assert 0.0 <= s <= h

    def test_suppressed_fraction(self, rng):
        z = rng.standard_normal(1_000_000)
        frac = np.mean(bh.order_size(np.ones_like(z), z) == 0.0)
        assert 0.0008 <= frac <= 0.002

    def test_mean_sold_fraction(self, rng):
        z = rng.standard_normal(100_000)
        assert bh.order_size(np.ones_like(z), z).mean() == pytest.approx(0.5, rel=0.01)

    def test_size_functions(self, rng):
        agent = Agent(0, Strategy.RANDOM_TRADER, 100.0, 3.0, 45)
        assert 0 <= bh.size_buy(rng, agent) <= 100.0
        assert 0 <= bh.size_sell(rng, agent) <= 3.0
        with pytest.raises(ParameterError):
            bh.size_sell(rng, Agent(1, Strategy.RANDOM_TRADER, 100.0, 0.0, 45))
        with pytest.raises(ParameterError):
            bh.size_buy(rng, Agent(1, Strategy.RANDOM_TRADER, 0.0, 1.0, 45))
