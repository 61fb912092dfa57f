"""Optional figure rendering for analytics reports.

Four figure families: candlestick-with-volume, standardized return
histogram against a Gaussian of equal mean/variance, return time series,
and the stratification charts (binned wealth medians with quadratic trend,
horizontal occupation bars).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analytics import OhlcBar, ReturnSeries, StratificationReport


def candlestick_volume(bars: list[OhlcBar], path: Path, title: str = "") -> None:
    fig, (ax_price, ax_volume) = plt.subplots(
        2, 1, figsize=(11, 6), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]})
    xs = np.arange(len(bars))
    width = 0.7
    for x, bar in zip(xs, bars):
        color = "#2ca02c" if bar.close >= bar.open else "#d62728"
        ax_price.vlines(x, bar.low, bar.high, color=color, linewidth=0.7)
        body_low = min(bar.open, bar.close)
        height = abs(bar.close - bar.open)
        ax_price.add_patch(plt.Rectangle((x - width / 2, body_low), width,
                                         max(height, 1e-12), color=color))
    ax_volume.bar(xs, [bar.volume for bar in bars], width=width, color="#7f7f7f")
    ax_price.set_ylabel("price")
    ax_volume.set_ylabel("volume")
    ax_volume.set_xlabel("bar")
    if title:
        ax_price.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def return_histogram(returns: ReturnSeries, path: Path, title: str = "") -> None:
    values = returns.values
    std = values.std()
    if std == 0:
        std = 1.0
    standardized = (values - values.mean()) / std
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.hist(standardized, bins=80, density=True, alpha=0.65,
            color="#1f77b4", label="returns")
    grid = np.linspace(-5, 5, 400)
    ax.plot(grid, np.exp(-grid ** 2 / 2) / np.sqrt(2 * np.pi),
            "k--", label="normal")
    ax.set_xlabel("standardized return")
    ax.set_ylabel("density")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def return_series(returns: ReturnSeries, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(11, 4))
    ax.plot(returns.values, linewidth=0.6, color="#1f77b4")
    ax.set_xlabel("bar")
    ax.set_ylabel("log return")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def stratification_charts(report: StratificationReport, out_dir: Path) -> None:
    if report.bins:
        centers = np.array([b[0] for b in report.bins])
        medians = np.array([b[1] for b in report.bins])
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.bar(centers, medians, width=report.bin_width * 0.85,
               color="#1f77b4", alpha=0.7, label="binned median wealth")
        c2, c1, c0 = report.quadratic
        grid = np.linspace(centers.min(), centers.max(), 200)
        ax.plot(grid, c2 * grid ** 2 + c1 * grid + c0, "r-",
                label="quadratic trend")
        ax.set_xlabel("education score")
        ax.set_ylabel("median net worth")
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / "education_wealth.png", dpi=120)
        plt.close(fig)

    if report.occupation_ranking:
        jobs = [item[0] for item in report.occupation_ranking][::-1]
        values = [item[1] for item in report.occupation_ranking][::-1]
        fig, ax = plt.subplots(figsize=(8, max(3, 0.35 * len(jobs))))
        ax.barh(jobs, values, color="#2ca02c", alpha=0.8)
        ax.set_xlabel("median net worth")
        fig.tight_layout()
        fig.savefig(out_dir / "occupation_wealth.png", dpi=120)
        plt.close(fig)
