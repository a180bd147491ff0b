"""Seedable samplers for every distribution the model draws from.

All samplers take a :class:`numpy.random.Generator` and an optional ``size``.
Closed-form distributions are sampled by inverse CDF from ``rng.random()``,
so each has a matching ``*_ppf``/``*_cdf`` pair that tests can check against.

Random streams come from :func:`make_rng` / :func:`derive_rng`. Both go through
:class:`numpy.random.SeedSequence`, so a replicate stream ``derive_rng(seed, k)``
is statistically independent of every other ``k`` and of the parent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ParameterError

#: Recorded in run metadata so results can be traced to the bit generator.
RNG_NAME = "numpy.random.PCG64 seeded via SeedSequence"


def make_rng(seed: int) -> np.random.Generator:
    """Return the root generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_check_seed(seed))))


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Return an independent child stream of ``seed`` identified by ``key``.

    ``derive_rng(s, k)`` does not depend on how many other children exist,
    which is what keeps ensembles identical under any worker count.
    """
    if not key:
        return make_rng(seed)
    spawn_key = tuple(_check_seed(k) for k in key)
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """64-bit integer seed for the child ``key`` of ``seed``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(_check_seed(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_seed(seed) -> int:
    seed = int(seed)
    if seed < 0:
        raise ParameterError(f"seed must be a non-negative integer, got {seed}")
    return seed


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ParameterError(f"{name} must be a positive finite number, got {value}")
    return value


# ---------------------------------------------------------------------------
# Lomax (Pareto type II)
# ---------------------------------------------------------------------------

def lomax_ppf(u, scale: float, shape: float):
    scale = _positive("lomax scale", scale)
    shape = _positive("lomax shape", shape)
    u = np.asarray(u, dtype=float)
    return scale * ((1.0 - u) ** (-1.0 / shape) - 1.0)


def lomax_cdf(x, scale: float, shape: float):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return 1.0 - (1.0 + x / scale) ** (-shape)


def sample_lomax(rng: np.random.Generator, scale: float, shape: float, size=None):
    """Lomax draws with CDF ``1 - (1 + x/scale)**(-shape)``."""
    return lomax_ppf(rng.random(size), scale, shape)


# ---------------------------------------------------------------------------
# Pareto type I
# ---------------------------------------------------------------------------

def pareto_ppf(u, x_min: float, shape: float):
    x_min = _positive("pareto x_min", x_min)
    shape = _positive("pareto shape", shape)
    u = np.asarray(u, dtype=float)
    return x_min * (1.0 - u) ** (-1.0 / shape)


def pareto_cdf(x, x_min: float, shape: float):
    x = np.asarray(x, dtype=float)
    return np.where(x < x_min, 0.0, 1.0 - (np.maximum(x, x_min) / x_min) ** (-shape))


def sample_pareto(rng: np.random.Generator, x_min: float, shape: float, size=None):
    return pareto_ppf(rng.random(size), x_min, shape)


# ---------------------------------------------------------------------------
# Exponential
# ---------------------------------------------------------------------------

def exponential_ppf(u, rate: float):
    rate = _positive("exponential rate", rate)
    return -np.log1p(-np.asarray(u, dtype=float)) / rate


def exponential_cdf(x, rate: float):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return -np.expm1(-rate * x)


def sample_exponential(rng: np.random.Generator, rate: float, size=None):
    return exponential_ppf(rng.random(size), rate)


# ---------------------------------------------------------------------------
# Asymmetric Laplace, (kappa, loc, scale) parameterisation
# ---------------------------------------------------------------------------

def asym_laplace_ppf(u, kappa: float, loc: float, scale: float):
    """Inverse CDF. The left branch (``u < kappa**2/(1+kappa**2)``) is an
    exponential of mean ``scale*kappa`` below ``loc``; the right branch one of
    mean ``scale/kappa`` above it."""
    kappa = _positive("asymmetric Laplace kappa", kappa)
    scale = _positive("asymmetric Laplace scale", scale)
    u = np.asarray(u, dtype=float)
    p_left = kappa**2 / (1.0 + kappa**2)
    with np.errstate(divide="ignore"):
        left = loc + scale * kappa * np.log(u / p_left)
        right = loc - (scale / kappa) * np.log((1.0 - u) / (1.0 - p_left))
    return np.where(u < p_left, left, right)


def asym_laplace_cdf(x, kappa: float, loc: float, scale: float):
    x = np.asarray(x, dtype=float)
    p_left = kappa**2 / (1.0 + kappa**2)
    z = (x - loc) / scale
    with np.errstate(over="ignore"):
        left = p_left * np.exp(np.minimum(z, 0.0) / kappa)
        right = 1.0 - (1.0 - p_left) * np.exp(-np.maximum(z, 0.0) * kappa)
    return np.where(z < 0, left, right)


def asym_laplace_mean(kappa: float, loc: float, scale: float) -> float:
    return loc + scale * (1.0 / kappa - kappa)


def sample_asym_laplace(rng: np.random.Generator, kappa: float, loc: float, scale: float, size=None):
    return asym_laplace_ppf(rng.random(size), kappa, loc, scale)


# ---------------------------------------------------------------------------
# Normal and truncated normal
# ---------------------------------------------------------------------------

def sample_normal(rng: np.random.Generator, mu: float, sigma: float, size=None):
    sigma = _positive("normal sigma", sigma)
    return mu + sigma * rng.standard_normal(size)


def trunc_normal_mass(mu: float, sigma: float, lower: float, upper: float) -> float:
    """Probability that N(mu, sigma) falls inside [lower, upper]."""
    a = (lower - mu) / sigma
    b = (upper - mu) / sigma
    return float(special.ndtr(b) - special.ndtr(a))


def trunc_normal_mean(mu: float, sigma: float, lower: float, upper: float = math.inf) -> float:
    a = (lower - mu) / sigma
    b = (upper - mu) / sigma
    pdf = lambda z: 0.0 if math.isinf(z) else math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)  # noqa: E731
    mass = special.ndtr(b) - special.ndtr(a)
    return mu + sigma * (pdf(a) - pdf(b)) / mass


#: Below this acceptance probability rejection sampling is replaced by inverse CDF.
MIN_REJECTION_ACCEPTANCE = 0.10


def sample_trunc_normal(rng: np.random.Generator, mu: float, sigma: float,
                        lower: float, upper: float = math.inf, size=None):
    """Normal(mu, sigma) conditioned on ``[lower, upper]``.

    Rejection sampling when the interval holds at least 10% of the mass,
    inverse CDF otherwise.
    """
    sigma = _positive("truncated normal sigma", sigma)
    lower = float(lower)
    upper = float(upper)
    if not lower < upper:
        raise ParameterError(f"empty truncation interval [{lower}, {upper}]")
    n = 1 if size is None else int(np.prod(size))
    mass = trunc_normal_mass(mu, sigma, lower, upper)
    if mass >= MIN_REJECTION_ACCEPTANCE:
        out = np.empty(n)
        filled = 0
        while filled < n:
            batch = max(16, int((n - filled) / mass * 1.1) + 8)
            z = mu + sigma * rng.standard_normal(batch)
            ok = z[(z >= lower) & (z <= upper)]
            take = min(n - filled, ok.size)
            out[filled:filled + take] = ok[:take]
            filled += take
    else:
        a = special.ndtr((lower - mu) / sigma)
        b = special.ndtr((upper - mu) / sigma)
        u = rng.random(n)
        out = mu + sigma * special.ndtri(a + u * (b - a))
        out = np.clip(out, lower, upper)
    if size is None:
        return float(out[0])
    return out.reshape(size)


# ---------------------------------------------------------------------------
# Bernoulli and uniform
# ---------------------------------------------------------------------------

def sample_bernoulli(rng: np.random.Generator, p: float, size=None):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"Bernoulli p must lie in [0, 1], got {p}")
    return rng.random(size) < p


def sample_uniform01(rng: np.random.Generator, size=None):
    return rng.random(size)


# ---------------------------------------------------------------------------
# Declarative distribution description
# ---------------------------------------------------------------------------

_SAMPLERS = {
    "lomax": (sample_lomax, ("scale", "shape")),
    "pareto": (sample_pareto, ("x_min", "shape")),
    "exponential": (sample_exponential, ("rate",)),
    "trunc_normal": (sample_trunc_normal, ("mu", "sigma", "lower", "upper")),
    "asym_laplace": (sample_asym_laplace, ("kappa", "loc", "scale")),
    "normal": (sample_normal, ("mu", "sigma")),
    "bernoulli": (sample_bernoulli, ("p",)),
    "uniform01": (sample_uniform01, ()),
}


@dataclass(frozen=True)
class DistributionSpec:
    """A named distribution plus its parameters, e.g.
    ``DistributionSpec("asym_laplace", {"kappa": 0.71, "loc": 58, "scale": 76})``."""

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in _SAMPLERS:
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        expected = set(_SAMPLERS[self.kind][1])
        given = set(self.params)
        if self.kind == "trunc_normal":
            expected.discard("upper")
            given.discard("upper")
        if given != expected:
            raise ParameterError(f"{self.kind} expects parameters {sorted(expected)}, got {sorted(given)}")
        # validate eagerly by drawing zero samples through the ppf checks
        self.sample(np.random.default_rng(0), size=0)

    def sample(self, rng: np.random.Generator, size=None):
        fn, names = _SAMPLERS[self.kind]
        args = [self.params[n] for n in names if n in self.params]
        return fn(rng, *args, size=size)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}
