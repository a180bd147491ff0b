"""Loading, validating and synthesising the exogenous daily series.

Two CSV formats are read and written here:

* market series: ``date,price_usd,fgi`` (one row per calendar day)
* reference series: ``t,gini,one_minus_nse,whale_share,n_holders``; only
  ``t`` and ``gini`` are mandatory.

Calendar dates map to model days through ``origin``: ``t = (date - origin).days``.
The default origin puts 2020-09-01 at t=45, the model's first trading day.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import derive_rng
from .errors import DataLoadError, ParameterError

DEFAULT_ORIGIN = dt.date(2020, 7, 18)
MARKET_COLUMNS = ("date", "price_usd", "fgi")
REFERENCE_COLUMNS = ("t", "gini", "one_minus_nse", "whale_share", "n_holders")
REFERENCE_REQUIRED = ("t", "gini")


@dataclass(frozen=True)
class MarketDay:
    t: int
    date: dt.date
    price: float
    fgi: int


@dataclass
class ReferenceSeries:
    """Observed concentration series; optional columns are ``None`` when absent."""

    t: np.ndarray
    gini: np.ndarray
    one_minus_nse: np.ndarray | None = None
    whale_share: np.ndarray | None = None
    n_holders: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        values = getattr(self, name)
        if values is None:
            raise DataLoadError(f"reference series has no '{name}' column", column=name)
        return values

    def window(self, t_start: int, t_end: int) -> "ReferenceSeries":
        mask = (self.t >= t_start) & (self.t <= t_end)
        pick = lambda a: None if a is None else a[mask]  # noqa: E731
        return ReferenceSeries(self.t[mask], self.gini[mask], pick(self.one_minus_nse),
                               pick(self.whale_share), pick(self.n_holders))


def day_index(date: dt.date, origin: dt.date = DEFAULT_ORIGIN) -> int:
    return (date - origin).days


def _read_rows(path, required: tuple[str, ...], allowed: tuple[str, ...]):
    path = Path(path)
    if not path.is_file():
        raise DataLoadError("file not found", path=path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise DataLoadError(f"missing required column(s) {missing}", path=path, column=missing[0])
        unknown = [c for c in header if c not in allowed]
        if unknown:
            raise DataLoadError(f"unexpected column(s) {unknown}", path=path, column=unknown[0])
        reader.fieldnames = header
        rows = [{k: (v.strip() if isinstance(v, str) else v) for k, v in row.items()} for row in reader]
    return path, header, rows


def _parse_float(raw, path, row, column) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise DataLoadError(f"not a number: {raw!r}", path=path, row=row, column=column) from None
    if not math.isfinite(value):
        raise DataLoadError(f"non-finite value {raw!r}", path=path, row=row, column=column)
    return value


def _parse_int(raw, path, row, column) -> int:
    value = _parse_float(raw, path, row, column)
    if value != int(value):
        raise DataLoadError(f"expected an integer, got {raw!r}", path=path, row=row, column=column)
    return int(value)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def load_market_series(path, *, origin: dt.date = DEFAULT_ORIGIN,
                       t_start: int | None = None, t_end: int | None = None) -> list[MarketDay]:
    """Read a market CSV into a dense, date-sorted list of :class:`MarketDay`.

    A single missing day between two present days is filled by linear
    interpolation (price = mean of neighbours, fgi = rounded mean); longer
    gaps raise :class:`DataLoadError`. With ``t_start``/``t_end`` the result
    is cut to that window, which must then be fully covered.
    """
    path, _, rows = _read_rows(path, MARKET_COLUMNS, MARKET_COLUMNS)
    if not rows:
        raise DataLoadError("no data rows", path=path)
    parsed = []
    for i, row in enumerate(rows, start=1):
        try:
            date = dt.date.fromisoformat(row["date"])
        except (TypeError, ValueError):
            raise DataLoadError(f"bad ISO-8601 date {row['date']!r}", path=path, row=i, column="date") from None
        price = _parse_float(row["price_usd"], path, i, "price_usd")
        if price <= 0:
            raise DataLoadError(f"price must be positive, got {price}", path=path, row=i, column="price_usd")
        fgi = _parse_int(row["fgi"], path, i, "fgi")
        if not 0 <= fgi <= 100:
            raise DataLoadError(f"fgi must lie in [0, 100], got {fgi}", path=path, row=i, column="fgi")
        parsed.append((date, price, fgi, i))
    parsed.sort(key=lambda r: r[0])

    days: list[MarketDay] = []
    for date, price, fgi, row in parsed:
        if days:
            prev = days[-1]
            gap = (date - prev.date).days
            if gap == 0:
                raise DataLoadError(f"duplicate date {date}", path=path, row=row, column="date")
            if gap == 2:
                mid = prev.date + dt.timedelta(days=1)
                days.append(MarketDay(day_index(mid, origin), mid, (prev.price + price) / 2.0,
                                      _round_half_up((prev.fgi + fgi) / 2.0)))
            elif gap > 2:
                raise DataLoadError(f"{gap - 1} consecutive missing days before {date}",
                                    path=path, row=row, column="date")
        days.append(MarketDay(day_index(date, origin), date, price, fgi))

    if t_start is not None or t_end is not None:
        lo = days[0].t if t_start is None else t_start
        hi = days[-1].t if t_end is None else t_end
        if days[0].t > lo or days[-1].t < hi:
            raise DataLoadError(f"market data covers t={days[0].t}..{days[-1].t}, need {lo}..{hi}", path=path)
        days = [d for d in days if lo <= d.t <= hi]
    return days


def save_market_series(days, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MARKET_COLUMNS)
        for d in days:
            w.writerow([d.date.isoformat(), repr(float(d.price)), int(d.fgi)])
    return path


def load_reference_series(path) -> ReferenceSeries:
    """Read a reference concentration CSV.

    Values must be in range (``gini``, ``one_minus_nse``, ``whale_share`` in
    [0, 1]; ``n_holders`` non-negative) and ``t`` strictly increasing. Empty
    cells in an optional column are not allowed; drop the column instead.
    """
    path, header, rows = _read_rows(path, REFERENCE_REQUIRED, REFERENCE_COLUMNS)
    if not rows:
        raise DataLoadError("no data rows", path=path)
    cols: dict[str, list] = {c: [] for c in header}
    for i, row in enumerate(rows, start=1):
        for c in header:
            if c in ("t", "n_holders"):
                v = _parse_int(row[c], path, i, c)
                if v < 0:
                    raise DataLoadError(f"{c} must be non-negative, got {v}", path=path, row=i, column=c)
            else:
                v = _parse_float(row[c], path, i, c)
                if not 0.0 <= v <= 1.0:
                    raise DataLoadError(f"{c} must lie in [0, 1], got {v}", path=path, row=i, column=c)
            if c == "t" and cols["t"] and v <= cols["t"][-1]:
                raise DataLoadError("t must be strictly increasing", path=path, row=i, column="t")
            cols[c].append(v)
    arr = lambda c, dtype: np.asarray(cols[c], dtype=dtype) if c in cols else None  # noqa: E731
    return ReferenceSeries(arr("t", np.int64), arr("gini", float), arr("one_minus_nse", float),
                           arr("whale_share", float), arr("n_holders", np.int64))


def save_reference_series(ref: ReferenceSeries, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    present = [c for c in REFERENCE_COLUMNS if getattr(ref, c) is not None]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(present)
        for i in range(len(ref.t)):
            out = []
            for c in present:
                v = getattr(ref, c)[i]
                out.append(int(v) if c in ("t", "n_holders") else repr(float(v)))
            w.writerow(out)
    return path


@dataclass(frozen=True)
class FgiModel:
    """How synthetic Fear & Greed values are generated.

    ``kind="ar1"``: ``x[k+1] = mean + phi*(x[k]-mean) + noise*eps``, clipped to
    [0, 100] and rounded. ``kind="uniform"``: i.i.d. integers on [0, 100].
    """

    kind: str = "ar1"
    mean: float = 50.0
    phi: float = 0.9
    noise: float = 10.0
    start: float = 50.0

    def __post_init__(self):
        if self.kind not in ("ar1", "uniform"):
            raise ParameterError(f"unknown FGI model {self.kind!r}")
        if self.kind == "ar1":
            if not -1.0 < self.phi < 1.0:
                raise ParameterError(f"AR(1) phi must lie in (-1, 1), got {self.phi}")
            if self.noise < 0:
                raise ParameterError(f"FGI noise must be non-negative, got {self.noise}")
            if not 0 <= self.start <= 100:
                raise ParameterError(f"FGI start must lie in [0, 100], got {self.start}")


def synthetic_market_series(seed: int, days: int, price0: float = 30000.0, drift: float = 0.0,
                            vol: float = 0.05, fgi_model: FgiModel | None = None, *,
                            t_start: int = 45, origin: dt.date = DEFAULT_ORIGIN) -> list[MarketDay]:
    """Geometric random-walk prices and bounded FGI, deterministic in ``seed``.

    Daily log-returns are ``drift + vol * N(0, 1)``; the first day is ``price0``.
    """
    if days < 1:
        raise ParameterError(f"days must be >= 1, got {days}")
    if not price0 > 0:
        raise ParameterError(f"price0 must be positive, got {price0}")
    if vol < 0:
        raise ParameterError(f"vol must be non-negative, got {vol}")
    fgi_model = fgi_model or FgiModel()
    # separate streams so a shorter series is a prefix of a longer one
    ret_rng, fgi_rng = derive_rng(seed, 0), derive_rng(seed, 1)
    log_ret = drift + vol * ret_rng.standard_normal(days - 1)
    prices = price0 * np.exp(np.concatenate([[0.0], np.cumsum(log_ret)]))
    if fgi_model.kind == "uniform":
        fgi = fgi_rng.integers(0, 101, size=days)
    else:
        eps = fgi_rng.standard_normal(days)
        x = np.empty(days)
        x[0] = fgi_model.start
        for k in range(1, days):
            x[k] = fgi_model.mean + fgi_model.phi * (x[k - 1] - fgi_model.mean) + fgi_model.noise * eps[k]
            x[k] = min(100.0, max(0.0, x[k]))
        fgi = np.rint(x).astype(int)
    first = origin + dt.timedelta(days=t_start)
    return [MarketDay(t_start + k, first + dt.timedelta(days=k), float(prices[k]), int(fgi[k]))
            for k in range(days)]
