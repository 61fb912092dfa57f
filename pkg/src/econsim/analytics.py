"""Market statistics from transaction logs.

Implements the whole measurement pipeline: fixed-interval OHLC bars from
tick trades, log returns, distributional moments (skewness, excess
kurtosis), the autocorrelation function of absolute returns, the Ljung-Box
portmanteau test, stability diagnostics (log-price range, maximum
drawdown), supply-chain price comparisons, and the education/occupation
stratification report.

Conventions, fixed for reproducibility:

* bar prices are effective trade prices (what agents actually paid), not
  post-trade quotes;
* empty intervals are omitted — no forward-fill — and returns run over
  consecutive emitted bars;
* moments use population-style (biased) central moment estimators;
* the ACF denominator is the full-sample lag-0 sum of squared deviations,
  with the full-sample mean;
* Ljung-Box uses that ACF on absolute returns with a chi-squared
  right-tail p-value, Q = n (n+2) sum_k rho(k)^2 / (n-k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .errors import (EmptyInput, EmptyLog, EmptyPopulation, InsufficientData,
                     MissingCommodity, NonPositivePrice, UnsortedLog,
                     ZeroVariance)
from .logs import TradeRow


@dataclass(frozen=True)
class OhlcBar:
    commodity: str
    interval_start: int          # in-game seconds
    open: float
    high: float
    low: float
    close: float
    volume: int
    trade_count: int


@dataclass(frozen=True)
class ReturnSeries:
    commodity: str
    values: np.ndarray           # consecutive-bar log returns

    def __len__(self) -> int:
        return len(self.values)


def _check_sorted(rows: list[TradeRow]) -> None:
    previous = None
    for row in rows:
        if previous is not None and row.in_game_seconds < previous:
            raise UnsortedLog("transaction log is not sorted by time")
        previous = row.in_game_seconds


def build_ohlc(rows: list[TradeRow], interval: int = 300,
               commodity: str | None = None) -> list[OhlcBar]:
    """One bar per interval containing at least one trade; empty intervals
    are omitted.  Open/close follow log row order, which equals execution
    order for equal timestamps."""
    if interval <= 0:
        raise EmptyInput(f"interval must be positive, got {interval}")
    if not rows:
        raise EmptyLog("transaction log contains no trades")
    _check_sorted(rows)
    bars: list[OhlcBar] = []
    current_key: int | None = None
    prices: list[float] = []
    volume = 0
    name = commodity

    def flush() -> None:
        nonlocal prices, volume
        if current_key is not None and prices:
            bars.append(OhlcBar(
                commodity=name or "",
                interval_start=current_key * interval,
                open=prices[0],
                high=max(prices),
                low=min(prices),
                close=prices[-1],
                volume=volume,
                trade_count=len(prices),
            ))
        prices, volume = [], 0

    for row in rows:
        if commodity is not None and row.commodity != commodity:
            continue
        key = row.in_game_seconds // interval
        if key != current_key:
            flush()
            current_key = key
        prices.append(row.effective_price)
        volume += row.quantity
    flush()
    return bars


def log_returns(bars: list[OhlcBar]) -> ReturnSeries:
    """Log close-to-close returns over consecutive emitted bars."""
    if len(bars) < 2:
        raise InsufficientData(f"need at least 2 bars, have {len(bars)}")
    closes = np.array([bar.close for bar in bars], dtype=float)
    if np.any(closes <= 0):
        raise NonPositivePrice("bar closes must be positive for log returns")
    values = np.diff(np.log(closes))
    return ReturnSeries(bars[0].commodity, values)


def moments(returns: ReturnSeries | np.ndarray) -> dict[str, float]:
    """Mean, standard deviation, skewness, excess kurtosis.

    Population-style estimators: central moments are divided by n, the
    skewness by m2^(3/2), and kurtosis by m2^2 (minus 3 for excess).
    """
    values = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, float)
    n = len(values)
    if n < 4:
        raise InsufficientData(f"need at least 4 observations, have {n}")
    mean = float(np.mean(values))
    deviations = values - mean
    m2 = float(np.mean(deviations ** 2))
    if m2 == 0.0:
        raise ZeroVariance("constant series has undefined shape moments")
    m3 = float(np.mean(deviations ** 3))
    m4 = float(np.mean(deviations ** 4))
    return {
        "mean": mean,
        "std": math.sqrt(m2),
        "skewness": m3 / m2 ** 1.5,
        "excess_kurtosis": m4 / (m2 * m2) - 3.0,
    }


def acf_abs(returns: ReturnSeries | np.ndarray, max_lag: int) -> np.ndarray:
    """Autocorrelation of absolute returns for lags 1..max_lag.

    rho(k) = sum_{t=k+1..T} (|r_t|-m)(|r_{t-k}|-m) / sum_{t=1..T} (|r_t|-m)^2
    with m the full-sample mean of |r_t|.
    """
    values = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, float)
    n = len(values)
    if max_lag < 1 or n <= max_lag:
        raise InsufficientData(
            f"need more than {max_lag} observations, have {n}")
    magnitude = np.abs(values)
    deviations = magnitude - magnitude.mean()
    denominator = float(np.sum(deviations ** 2))
    if denominator == 0.0:
        raise ZeroVariance("constant absolute returns have no autocorrelation")
    out = np.empty(max_lag, dtype=float)
    for k in range(1, max_lag + 1):
        out[k - 1] = float(np.sum(deviations[k:] * deviations[:-k])) / denominator
    return out


def ljung_box(returns: ReturnSeries | np.ndarray, lags: int = 20) -> dict[str, float]:
    """Portmanteau test for serial correlation of absolute returns.

    Q = n (n+2) sum_{k=1..lags} rho(k)^2 / (n-k), chi-squared with `lags`
    degrees of freedom under the null of no autocorrelation.
    """
    values = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, float)
    n = len(values)
    if lags < 1 or n <= lags:
        raise InsufficientData(f"need more than {lags} observations, have {n}")
    rho = acf_abs(values, lags)
    k = np.arange(1, lags + 1)
    statistic = float(n * (n + 2) * np.sum(rho ** 2 / (n - k)))
    return {
        "statistic": statistic,
        "dof": float(lags),
        "p_value": float(chi2.sf(statistic, lags)),
    }


def stability_diagnostics(bars: list[OhlcBar]) -> dict[str, float]:
    """Log-price range and maximum drawdown over bar closes.

    Range is max minus min of the log closes.  Drawdown at t compares the
    close to its running peak; the maximum over t is reported.
    """
    if not bars:
        raise EmptyInput("no bars to diagnose")
    closes = np.array([bar.close for bar in bars], dtype=float)
    if np.any(closes <= 0):
        raise NonPositivePrice("bar closes must be positive")
    logs = np.log(closes)
    peaks = np.maximum.accumulate(closes)
    drawdowns = 1.0 - closes / peaks
    return {
        "log_price_range": float(logs.max() - logs.min()),
        "max_drawdown": float(drawdowns.max()),
    }


@dataclass(frozen=True)
class StylizedFactsReport:
    commodity: str
    bar_count: int
    return_count: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float
    acf_abs: tuple[float, ...]
    ljung_box_statistic: float
    ljung_box_dof: float
    ljung_box_p: float
    log_price_range: float
    max_drawdown: float


def compute_stylized_facts(bars: list[OhlcBar], lags: int = 20) -> StylizedFactsReport:
    """Full per-commodity report; lags shrink to fit short series."""
    returns = log_returns(bars)
    stats = moments(returns)
    usable_lags = min(lags, len(returns) - 1)
    if usable_lags < 1:
        raise InsufficientData("too few returns for any autocorrelation lag")
    rho = acf_abs(returns, usable_lags)
    lb = ljung_box(returns, usable_lags)
    diag = stability_diagnostics(bars)
    return StylizedFactsReport(
        commodity=bars[0].commodity,
        bar_count=len(bars),
        return_count=len(returns),
        mean=stats["mean"],
        std=stats["std"],
        skewness=stats["skewness"],
        excess_kurtosis=stats["excess_kurtosis"],
        acf_abs=tuple(float(x) for x in rho),
        ljung_box_statistic=lb["statistic"],
        ljung_box_dof=lb["dof"],
        ljung_box_p=lb["p_value"],
        log_price_range=diag["log_price_range"],
        max_drawdown=diag["max_drawdown"],
    )


@dataclass(frozen=True)
class ChainSeries:
    commodity: str
    baseline: float
    points: dict[int, float]     # interval_start -> normalized multiplier


@dataclass(frozen=True)
class ChainComparison:
    grid: tuple[int, ...]
    series: tuple[ChainSeries, ...]


def chain_comparison(rows: list[TradeRow], chain: list[str],
                     normalize_at: int, interval: int = 300) -> ChainComparison:
    """Normalized price multipliers for a supply chain, on a common grid.

    Each commodity's closes are divided by its close at (or latest before)
    `normalize_at`.  The grid is the union of traded intervals; commodities
    without a trade in some interval simply have no point there.
    """
    all_series: list[ChainSeries] = []
    grid: set[int] = set()
    for commodity in chain:
        bars = build_ohlc(rows, interval, commodity)
        if not bars:
            raise MissingCommodity(f"no trades for chain commodity '{commodity}'")
        baseline = None
        for bar in bars:
            if bar.interval_start <= normalize_at:
                baseline = bar.close
            else:
                break
        if baseline is None:
            raise MissingCommodity(
                f"'{commodity}' has no trade at or before the normalization time")
        points = {bar.interval_start: bar.close / baseline for bar in bars}
        grid.update(points)
        all_series.append(ChainSeries(commodity, baseline, points))
    return ChainComparison(grid=tuple(sorted(grid)), series=tuple(all_series))


@dataclass(frozen=True)
class StratificationReport:
    bin_width: int
    bins: tuple[tuple[float, float, int], ...]   # (center, median net worth, count)
    quadratic: tuple[float, float, float]        # coefficients, highest degree first
    occupation_ranking: tuple[tuple[str, float, int], ...]  # (job, median, count)


def stratification_report(snapshots: list[dict], bin_width: int = 50,
                          education_range: tuple[float, float] = (0.0, 1500.0)
                          ) -> StratificationReport:
    """Education-binned wealth medians with a quadratic trend, and the
    per-occupation median net worth ranking (unemployed excluded).

    Education scores outside the configured range are dropped before
    binning; bins without agents are omitted.
    """
    if not snapshots:
        raise EmptyPopulation("no agent snapshots to stratify")
    lo, hi = education_range
    n_bins = int((hi - lo) / bin_width)

    binned: dict[int, list[float]] = {}
    for row in snapshots:
        h = row["education"]
        if h < lo or h > hi:
            continue
        index = min(int((h - lo) / bin_width), n_bins - 1)
        binned.setdefault(index, []).append(row["net_worth"])

    bins: list[tuple[float, float, int]] = []
    for index in sorted(binned):
        values = binned[index]
        center = lo + (index + 0.5) * bin_width
        bins.append((center, float(np.median(values)), len(values)))

    if bins:
        centers = np.array([b[0] for b in bins])
        medians = np.array([b[1] for b in bins])
        degree = min(2, len(bins) - 1)
        fitted = np.polyfit(centers, medians, degree) if degree >= 1 \
            else np.array([medians[0]])
        quadratic = tuple(float(c) for c in
                          np.concatenate([np.zeros(3 - len(fitted)), fitted]))
    else:
        quadratic = (0.0, 0.0, 0.0)

    by_job: dict[str, list[float]] = {}
    for row in snapshots:
        job = row.get("job")
        if job:
            by_job.setdefault(job, []).append(row["net_worth"])
    ranking = sorted(((job, float(np.median(values)), len(values))
                      for job, values in by_job.items()),
                     key=lambda item: (-item[1], item[0]))

    return StratificationReport(
        bin_width=bin_width,
        bins=tuple(bins),
        quadratic=quadratic,
        occupation_ranking=tuple(ranking),
    )
