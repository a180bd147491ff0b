"""Initial population, fair-launch token allocations and daily entrants."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import distributions as dist
from .errors import InvariantViolation, ParameterError

TOTAL_SUPPLY = 36666.0


class Strategy(str, enum.Enum):
    DIAMOND_HAND = "DH"
    RANDOM_TRADER = "RT"


class ScenarioKind(str, enum.Enum):
    CRONJE = "cronje"
    BENTHAM = "bentham"
    RAWLS = "rawls"


@dataclass(frozen=True)
class ScenarioSpec:
    """One of the three fair-launch allocations (S0 Cronje, S1 Bentham, S2 Rawls)."""

    kind: ScenarioKind = ScenarioKind.CRONJE
    lomax_scale: float = 0.4
    lomax_shape: float = 0.5
    tn_mu: float = 0.103
    tn_sigma: float = 0.192
    total_supply: float = TOTAL_SUPPLY

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        for name in ("lomax_scale", "lomax_shape", "tn_sigma", "total_supply"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


@dataclass(frozen=True)
class PopulationConfig:
    n_initial: int = 5000
    dh_share: float = 0.3
    pareto_shape: float = 2.1
    pareto_min: float = 400_000.0
    exp_rate: float = 1.0 / 40_000.0
    rich_share: float = 0.1

    def __post_init__(self):
        if self.n_initial < 1:
            raise ParameterError(f"n_initial must be >= 1, got {self.n_initial}")
        for name in ("dh_share", "rich_share"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {v}")
        for name in ("pareto_shape", "pareto_min", "exp_rate"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class EntrantSpec:
    """Asymmetric Laplace law of the daily number of new agents."""

    kappa: float = 0.71
    loc: float = 58.0
    scale: float = 76.0

    def __post_init__(self):
        if not (self.kappa > 0 and self.scale > 0):
            raise ParameterError(f"entrant kappa and scale must be positive, got {self.kappa}, {self.scale}")

    def distribution(self) -> dist.DistributionSpec:
        return dist.DistributionSpec("asym_laplace", {"kappa": self.kappa, "loc": self.loc, "scale": self.scale})


@dataclass(frozen=True)
class Agent:
    id: int
    strategy: Strategy
    fiat: float
    tokens: float
    entry_day: int


@dataclass
class Population:
    """Structure-of-arrays agent store; an agent's id is its index."""

    fiat: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tokens: np.ndarray = field(default_factory=lambda: np.zeros(0))
    is_dh: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    entry_day: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.fiat)

    def extend(self, other: "Population") -> None:
        self.fiat = np.concatenate([self.fiat, other.fiat])
        self.tokens = np.concatenate([self.tokens, other.tokens])
        self.is_dh = np.concatenate([self.is_dh, other.is_dh])
        self.entry_day = np.concatenate([self.entry_day, other.entry_day])

    def copy(self) -> "Population":
        return Population(self.fiat.copy(), self.tokens.copy(), self.is_dh.copy(), self.entry_day.copy())

    def agent(self, i: int) -> Agent:
        strategy = Strategy.DIAMOND_HAND if self.is_dh[i] else Strategy.RANDOM_TRADER
        return Agent(int(i), strategy, float(self.fiat[i]), float(self.tokens[i]), int(self.entry_day[i]))

    def agents(self) -> list[Agent]:
        return [self.agent(i) for i in range(len(self))]


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def endow_fiat(rng: np.random.Generator, cfg: PopulationConfig, n: int) -> np.ndarray:
    """Fiat holdings for ``n`` agents: exactly ``round(rich_share*n)`` Pareto
    draws, the rest exponential, in random order."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    n_rich = _round_half_up(cfg.rich_share * n)
    fiat = np.empty(n)
    rich = rng.permutation(n)[:n_rich]
    poor = np.ones(n, dtype=bool)
    poor[rich] = False
    fiat[rich] = dist.sample_pareto(rng, cfg.pareto_min, cfg.pareto_shape, size=n_rich)
    fiat[poor] = dist.sample_exponential(rng, cfg.exp_rate, size=n - n_rich)
    return fiat


def assign_strategies(rng: np.random.Generator, cfg: PopulationConfig, n: int) -> np.ndarray:
    """Boolean DH mask with exactly ``round(dh_share*n)`` entries set,
    chosen uniformly at random (independent of holdings)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    mask = np.zeros(n, dtype=bool)
    mask[rng.permutation(n)[:_round_half_up(cfg.dh_share * n)]] = True
    return mask


MAX_ALLOCATION_RETRIES = 10


def allocate_tokens(rng: np.random.Generator, spec: ScenarioSpec, n: int) -> np.ndarray:
    """Initial token holdings for ``n`` agents, summing to ``spec.total_supply``.

    Raw weights come from the scenario's law (Lomax, equal, truncated normal on
    [0, inf)) and are rescaled proportionally. The float residual of the
    rescaling goes to the largest holding so no entry can turn negative.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    total = spec.total_supply
    if spec.kind is ScenarioKind.BENTHAM:
        return np.full(n, total / n)
    for _ in range(MAX_ALLOCATION_RETRIES + 1):
        if spec.kind is ScenarioKind.CRONJE:
            w = dist.sample_lomax(rng, spec.lomax_scale, spec.lomax_shape, size=n)
        else:
            w = dist.sample_trunc_normal(rng, spec.tn_mu, spec.tn_sigma, 0.0, math.inf, size=n)
        s = math.fsum(w)
        if s > 0 and math.isfinite(s):
            break
    else:
        raise InvariantViolation(f"{spec.kind.value}: raw allocation was all zero after {MAX_ALLOCATION_RETRIES} retries")
    out = w * (total / s)
    top = int(np.argmax(out))
    out[top] += total - math.fsum(out)
    return out


def initial_population(rng: np.random.Generator, cfg: PopulationConfig, spec: ScenarioSpec,
                       day: int) -> Population:
    n = cfg.n_initial
    fiat = endow_fiat(rng, cfg, n)
    is_dh = assign_strategies(rng, cfg, n)
    tokens = allocate_tokens(rng, spec, n)
    return Population(fiat, tokens, is_dh, np.full(n, day, dtype=np.int64))


def spawn_entrants(rng: np.random.Generator, cfg: PopulationConfig, day: int, count: int) -> Population:
    """``count`` new token-free agents.

    Daily batches are small, so the rich/poor and DH/RT splits are per-agent
    Bernoulli draws at ``rich_share`` and ``dh_share`` rather than exact
    counts (rounding would bias a batch of, say, 4 agents).
    """
    if count < 0:
        raise ParameterError(f"count must be >= 0, got {count}")
    if count == 0:
        return Population()
    rich = rng.random(count) < cfg.rich_share
    fiat = np.where(rich,
                    dist.sample_pareto(rng, cfg.pareto_min, cfg.pareto_shape, size=count),
                    dist.sample_exponential(rng, cfg.exp_rate, size=count))
    is_dh = rng.random(count) < cfg.dh_share
    return Population(fiat, np.zeros(count), is_dh, np.full(count, day, dtype=np.int64))


def draw_entrant_count(rng: np.random.Generator, spec: EntrantSpec, entrant_scale: float = 1.0) -> int:
    """One day's entrant count: the ALap draw, clamped at 0, divided by
    ``entrant_scale`` and rounded to the nearest integer."""
    x = float(dist.sample_asym_laplace(rng, spec.kappa, spec.loc, spec.scale))
    return _round_half_up(max(x, 0.0) / entrant_scale)


def expected_entrant_count(spec: EntrantSpec, entrant_scale: float = 1.0, tol: float = 1e-12) -> float:
    """Exact mean of :func:`draw_entrant_count` (``E[Y] = sum_k P(Y >= k)``)."""
    total = 0.0
    k = 1
    while True:
        # Y >= k  <=>  X / scale >= k - 1/2
        tail = 1.0 - float(dist.asym_laplace_cdf((k - 0.5) * entrant_scale, spec.kappa, spec.loc, spec.scale))
        total += tail
        if tail < tol and (k - 0.5) * entrant_scale > spec.loc:
            return total
        k += 1


#: 95% CI of the mean daily entrant count that the mapping must reproduce.
ENTRANT_MEAN_TARGET = (114.0, 119.0)


def resolve_entrant_mapping(kappa: float = 0.71, first: float = 58.0, second: float = 76.0,
                            target: tuple[float, float] = ENTRANT_MEAN_TARGET) -> EntrantSpec:
    """Choose which of the two unnamed ALap numbers is location and which is scale.

    Both orderings are scored by the exact expected daily count after
    clamping and rounding; the one inside ``target`` (closest to its centre
    if both are) wins. Raises if neither ordering reaches the target.
    """
    centre = 0.5 * (target[0] + target[1])
    candidates = []
    for loc, scale in ((first, second), (second, first)):
        spec = EntrantSpec(kappa, loc, scale)
        m = expected_entrant_count(spec)
        if target[0] <= m <= target[1]:
            candidates.append((abs(m - centre), spec))
    if not candidates:
        raise ParameterError(f"no (loc, scale) ordering of ({first}, {second}) gives a daily mean in {target}")
    return min(candidates, key=lambda c: c[0])[1]
