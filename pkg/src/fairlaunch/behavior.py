"""Per-agent trading decisions for Diamond Hands (DH) and Random Traders (RT).

A DH trades with the probability of the (FGI state, wealth state) cell it is
in on that day. Each cell is the mean of the two conditional probabilities
that define it, e.g. ``cell(extreme, high) = (p_t_fgi_e + p_t_w_h) / 2``.
An RT trades with ``p_rt_trade``. Given a trade, both classes buy with their
buy probability and sell otherwise. Infeasible orders (buy with no fiat,
sell with no tokens) are dropped.

Order sizes are Normal(h/2, h/6) in the agent's holding ``h`` (fiat for buys,
tokens for sells), clamped to ``(0, h]``; a non-positive draw cancels the
order.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import ParameterError
from .scenario import Agent, Population, Strategy


class FgiState(str, enum.Enum):
    EXTREME = "extreme"
    NORMAL = "normal"


class WealthState(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


class Action(enum.IntEnum):
    NO_TRADE = 0
    BUY = 1
    SELL = 2


@dataclass(frozen=True)
class BehaviorParams:
    p_dh_buy: float = 0.7
    p_rt_trade: float = 0.5
    p_rt_buy: float = 0.5
    th_h: int = 80
    th_l: int = 20
    p_t_fgi_e: float = 0.7
    p_t_w_h: float = 0.7
    p_t_fgi_n: float = 0.8
    p_t_w_l: float = 0.9
    wealth_percentile: float = 0.90

    def __post_init__(self):
        for name in ("p_dh_buy", "p_rt_trade", "p_rt_buy", "p_t_fgi_e", "p_t_w_h",
                     "p_t_fgi_n", "p_t_w_l", "wealth_percentile"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {v}")
        if not 0 <= self.th_l < self.th_h <= 100:
            raise ParameterError(f"need 0 <= th_l < th_h <= 100, got th_l={self.th_l}, th_h={self.th_h}")

    def with_preset(self, name: str) -> "BehaviorParams":
        return replace(self, **PRESETS[name.lower()])

    def to_dict(self) -> dict:
        return asdict(self)


#: DH trading-probability sets (High is also the calibrated optimum).
PRESETS: dict[str, dict[str, float]] = {
    "high": {"p_t_fgi_e": 0.7, "p_t_w_h": 0.7, "p_t_fgi_n": 0.8, "p_t_w_l": 0.9},
    "medium": {"p_t_fgi_e": 0.3, "p_t_w_h": 0.4, "p_t_fgi_n": 0.3, "p_t_w_l": 0.5},
    "low": {"p_t_fgi_e": 0.1, "p_t_w_h": 0.1, "p_t_fgi_n": 0.2, "p_t_w_l": 0.2},
}

#: Published aggregate DH trade probability of each preset.
PRESET_AGGREGATES = {"high": 0.77, "medium": 0.38, "low": 0.15}


def preset(name: str) -> BehaviorParams:
    return BehaviorParams().with_preset(name)


def classify_fgi(fgi: int, params: BehaviorParams) -> FgiState:
    """Extreme iff ``fgi > th_h`` or ``fgi < th_l``; the thresholds themselves are Normal."""
    if not 0 <= fgi <= 100:
        raise ParameterError(f"fgi must lie in [0, 100], got {fgi}")
    return FgiState.EXTREME if (fgi > params.th_h or fgi < params.th_l) else FgiState.NORMAL


def classify_wealth(agent_fiat: float, fiat_p90: float) -> WealthState:
    return WealthState.HIGH if agent_fiat > fiat_p90 else WealthState.LOW


def wealth_threshold(fiat: np.ndarray, params: BehaviorParams) -> float:
    """The day's wealth cut-off: the ``wealth_percentile`` quantile of all agents' fiat."""
    return float(np.quantile(fiat, params.wealth_percentile))


def dh_trade_probability(fgi_state: FgiState, wealth_state: WealthState, params: BehaviorParams) -> float:
    p_f = params.p_t_fgi_e if fgi_state is FgiState.EXTREME else params.p_t_fgi_n
    p_w = params.p_t_w_h if wealth_state is WealthState.HIGH else params.p_t_w_l
    return 0.5 * (p_f + p_w)


def aggregate_trade_probability(params: BehaviorParams, p_extreme: float = 0.5, p_high: float = 0.5) -> float:
    """Population-level DH trade probability: cell probabilities weighted by
    the state probabilities ``P(FGI_e)`` and ``P(W_h)``, assumed independent."""
    total = 0.0
    for f, pf in ((FgiState.EXTREME, p_extreme), (FgiState.NORMAL, 1.0 - p_extreme)):
        for w, pw in ((WealthState.HIGH, p_high), (WealthState.LOW, 1.0 - p_high)):
            total += dh_trade_probability(f, w, params) * pf * pw
    return total


def actions_from_uniforms(u_trade, u_side, p_trade, p_buy, fiat, tokens) -> np.ndarray:
    """Vectorised decision rule given the two uniforms per agent.

    Trade iff ``u_trade < p_trade``; then buy iff ``u_side < p_buy``.
    Returns :class:`Action` codes as an int8 array.
    """
    trade = np.asarray(u_trade) < p_trade
    buy = np.asarray(u_side) < p_buy
    out = np.zeros(np.shape(trade), dtype=np.int8)
    out[trade & buy & (np.asarray(fiat) > 0)] = Action.BUY
    out[trade & ~buy & (np.asarray(tokens) > 0)] = Action.SELL
    return out


def decide_action(rng: np.random.Generator, agent: Agent, fgi_state: FgiState,
                  wealth_state: WealthState, params: BehaviorParams) -> Action:
    if agent.strategy is Strategy.DIAMOND_HAND:
        p_trade, p_buy = dh_trade_probability(fgi_state, wealth_state, params), params.p_dh_buy
    else:
        p_trade, p_buy = params.p_rt_trade, params.p_rt_buy
    u = rng.random(2)
    return Action(int(actions_from_uniforms(u[0], u[1], p_trade, p_buy, agent.fiat, agent.tokens)))


def trade_probabilities(pop: Population, fgi_state: FgiState, fiat_p90: float,
                        params: BehaviorParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent (trade probability, buy probability) arrays for one day."""
    high = pop.fiat > fiat_p90
    p_f = params.p_t_fgi_e if fgi_state is FgiState.EXTREME else params.p_t_fgi_n
    dh_p = 0.5 * (p_f + np.where(high, params.p_t_w_h, params.p_t_w_l))
    p_trade = np.where(pop.is_dh, dh_p, params.p_rt_trade)
    p_buy = np.where(pop.is_dh, params.p_dh_buy, params.p_rt_buy)
    return p_trade, p_buy


def decide_actions(rng: np.random.Generator, pop: Population, fgi_state: FgiState,
                   fiat_p90: float, params: BehaviorParams) -> np.ndarray:
    """Actions for every agent, in id order. Consumes two uniforms per agent."""
    n = len(pop)
    u_trade = rng.random(n)
    u_side = rng.random(n)
    p_trade, p_buy = trade_probabilities(pop, fgi_state, fiat_p90, params)
    return actions_from_uniforms(u_trade, u_side, p_trade, p_buy, pop.fiat, pop.tokens)


def order_size(holding, z):
    """``holding/2 + holding/6 * z`` clamped to ``(0, holding]``; 0 means no order."""
    holding = np.asarray(holding, dtype=float)
    raw = holding / 2.0 + holding / 6.0 * np.asarray(z, dtype=float)
    return np.where(raw <= 0.0, 0.0, np.minimum(raw, holding))


def size_buy(rng: np.random.Generator, agent: Agent) -> float:
    """Fiat budget for a buy order."""
    if not agent.fiat > 0:
        raise ParameterError("size_buy needs an agent with positive fiat")
    return float(order_size(agent.fiat, rng.standard_normal()))


def size_sell(rng: np.random.Generator, agent: Agent) -> float:
    """Token quantity for a sell order."""
    if not agent.tokens > 0:
        raise ParameterError("size_sell needs an agent with positive tokens")
    return float(order_size(agent.tokens, rng.standard_normal()))
