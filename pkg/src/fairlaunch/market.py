"""Daily clearing: FIFO matching of buy budgets against sell quantities at the
exogenous day price, then settlement into agent holdings.

Two matchers implement the same rule:

* :func:`match_day` walks both queues order by order (reference version,
  works on :class:`Order` objects);
* :func:`match_arrays` does the same with cumulative sums. If buy demand and
  sell supply are laid end to end on a token axis, the FIFO fills are exactly
  the overlaps of the two partitions up to the matched volume. The engine
  uses this one.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvariantViolation, ParameterError
from .scenario import Population

#: Remaining fiat below this is forgiven rather than left as a resting order.
FIAT_DUST = 1e-9
TOKEN_DUST = 1e-12
#: Relative slack allowed when checking settlement feasibility.
SETTLE_RTOL = 1e-9
#: Cumulative-sum matching carries absolute error ~ eps * day volume; allow
#: this fraction of the day's matched tokens on top of SETTLE_RTOL.
SETTLE_VOLUME_TOL = 1e-10


class Side(str, enum.Enum):
    BUY = "buy"
    SELL = "sell"


@dataclass(frozen=True)
class Order:
    agent_id: int
    side: Side
    amount: float  # fiat budget for buys, tokens for sells
    arrival_seq: int

    def __post_init__(self):
        if not self.amount > 0:
            raise ParameterError(f"order amount must be positive, got {self.amount}")


@dataclass(frozen=True)
class Fill:
    buyer_id: int
    seller_id: int
    tokens: float
    fiat: float
    price: float


@dataclass
class Fills:
    """Column-oriented fill list for one day."""

    buyer: np.ndarray
    seller: np.ndarray
    tokens: np.ndarray
    price: float

    @property
    def fiat(self) -> np.ndarray:
        return self.tokens * self.price

    def __len__(self) -> int:
        return len(self.tokens)

    def records(self) -> list[Fill]:
        return [Fill(int(b), int(s), float(q), float(f), self.price)
                for b, s, q, f in zip(self.buyer, self.seller, self.tokens, self.fiat)]

    @classmethod
    def from_records(cls, fills: list[Fill]) -> "Fills":
        if not fills:
            return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0), 0.0)
        prices = {f.price for f in fills}
        if len(prices) != 1:
            raise ParameterError("all fills of one day must share the day price")
        return cls(np.array([f.buyer_id for f in fills], dtype=np.int64),
                   np.array([f.seller_id for f in fills], dtype=np.int64),
                   np.array([f.tokens for f in fills], dtype=float), prices.pop())


def _check_price(price: float) -> float:
    price = float(price)
    if not price > 0:
        raise ParameterError(f"price must be positive, got {price}")
    return price


def match_day(orders: list[Order], price: float) -> tuple[list[Fill], list[Order]]:
    """FIFO-match one day's orders at ``price``.

    The head buy is matched against the head sell for
    ``min(budget/price, tokens)``; whichever side is exhausted leaves the
    queue. Returns the fills in execution order and the cancelled remainders
    (partially filled orders carry their residual amount).
    """
    price = _check_price(price)
    seqs = [o.arrival_seq for o in orders]
    if len(set(seqs)) != len(seqs):
        raise ParameterError("arrival_seq must be unique within a day")
    buys = sorted((o for o in orders if o.side is Side.BUY), key=lambda o: o.arrival_seq)
    sells = sorted((o for o in orders if o.side is Side.SELL), key=lambda o: o.arrival_seq)

    fills: list[Fill] = []
    bi = si = 0
    budget = buys[0].amount if buys else 0.0
    supply = sells[0].amount if sells else 0.0
    while bi < len(buys) and si < len(sells):
        demand = budget / price
        if demand <= supply:
            qty = demand
            supply -= qty
            budget = 0.0
            buyer_done, seller_done = True, supply <= TOKEN_DUST
        else:
            qty = supply
            budget -= qty * price
            supply = 0.0
            buyer_done, seller_done = budget <= FIAT_DUST, True
        if qty > 0:
            fills.append(Fill(buys[bi].agent_id, sells[si].agent_id, qty, qty * price, price))
        if buyer_done:
            bi += 1
            budget = buys[bi].amount if bi < len(buys) else 0.0
        if seller_done:
            si += 1
            supply = sells[si].amount if si < len(sells) else 0.0

    cancelled: list[Order] = []
    if bi < len(buys):
        if budget > FIAT_DUST:
            cancelled.append(Order(buys[bi].agent_id, Side.BUY, budget, buys[bi].arrival_seq))
        cancelled.extend(buys[bi + 1:])
    if si < len(sells):
        if supply > TOKEN_DUST:
            cancelled.append(Order(sells[si].agent_id, Side.SELL, supply, sells[si].arrival_seq))
        cancelled.extend(sells[si + 1:])
    return fills, cancelled


def match_arrays(buy_ids, budgets, sell_ids, quantities, price: float) -> Fills:
    """Vectorised FIFO matching; inputs must already be in arrival order.

    ``budgets`` are fiat amounts, ``quantities`` token amounts. Fills come
    back in execution order.
    """
    price = _check_price(price)
    buy_ids = np.asarray(buy_ids, dtype=np.int64)
    sell_ids = np.asarray(sell_ids, dtype=np.int64)
    if len(buy_ids) == 0 or len(sell_ids) == 0:
        return Fills(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0), price)
    demand = np.cumsum(np.asarray(budgets, dtype=float) / price)
    supply = np.cumsum(np.asarray(quantities, dtype=float))
    volume = min(demand[-1], supply[-1])
    cuts = np.union1d(demand[demand < volume], supply[supply < volume])
    edges = np.concatenate([[0.0], cuts, [volume]])
    lengths = np.diff(edges)
    keep = lengths > 0
    mids = 0.5 * (edges[:-1] + edges[1:])[keep]
    bi = np.minimum(np.searchsorted(demand, mids, side="left"), len(demand) - 1)
    si = np.minimum(np.searchsorted(supply, mids, side="left"), len(supply) - 1)
    return Fills(buy_ids[bi], sell_ids[si], lengths[keep], price)


def settle(pop: Population, fills) -> Population:
    """Apply fills to holdings in place and return ``pop``.

    Accepts a :class:`Fills` or a list of :class:`Fill`. Raises
    :class:`InvariantViolation` if any agent would spend more fiat or sell
    more tokens than it holds (beyond float rounding).
    """
    if not isinstance(fills, Fills):
        fills = Fills.from_records(list(fills))
    if len(fills) == 0:
        return pop
    n = len(pop)
    if fills.buyer.max(initial=-1) >= n or fills.seller.max(initial=-1) >= n or \
            min(fills.buyer.min(), fills.seller.min()) < 0:
        raise InvariantViolation("fill references an unknown agent")
    if np.any(fills.buyer == fills.seller):
        raise InvariantViolation("self-trade in fill list")
    bought = np.bincount(fills.buyer, weights=fills.tokens, minlength=n)
    sold = np.bincount(fills.seller, weights=fills.tokens, minlength=n)
    spent = bought * fills.price
    earned = sold * fills.price
    tok_tol = SETTLE_VOLUME_TOL * float(fills.tokens.sum()) + TOKEN_DUST
    # an agent places at most one order per day, so it is either buyer or seller
    if np.any(spent > pop.fiat * (1 + SETTLE_RTOL) + tok_tol * fills.price + FIAT_DUST):
        raise InvariantViolation("buyer spends more fiat than it holds")
    if np.any(sold > pop.tokens * (1 + SETTLE_RTOL) + tok_tol):
        raise InvariantViolation("seller sells more tokens than it holds")
    pop.fiat = np.maximum(pop.fiat - spent + earned, 0.0)
    pop.tokens = np.maximum(pop.tokens + bought - sold, 0.0)
    return pop


FILL_LOG_COLUMNS = ("t", "buyer", "seller", "tokens", "fiat", "price")


def write_fill_log(path, t: int, fills: Fills) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FILL_LOG_COLUMNS)
        for f in fills.records():
            w.writerow([t, f.buyer_id, f.seller_id, repr(f.tokens), repr(f.fiat), repr(f.price)])
    return path
