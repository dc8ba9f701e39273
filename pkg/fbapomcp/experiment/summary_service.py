"""
Learning-curve statistics and plots over independent runs.
"""

import logging
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from scipy import stats  # noqa: E402

from fbapomcp.common.exceptions import InsufficientDataError, InvalidArgumentError  # noqa: E402
from fbapomcp.experiment.experiment_model import SUMMARY_COLUMNS  # noqa: E402


CONFIDENCE = 0.95


def summarize(records: pd.DataFrame, window: int = 1) -> pd.DataFrame:
    """
    Per-episode mean return across runs with a normal-approximation 95% CI.

    With ``window > 1`` each run's curve is first smoothed by a trailing
    moving average.
    """
    if window <= 0:
        raise InvalidArgumentError(f"Smoothing window must be positive, got {window}")
    num_runs = records["run"].nunique()
    if num_runs < 2:
        raise InsufficientDataError(f"At least two runs are required, got {num_runs}")

    curves = records.pivot(index="episode", columns="run", values="return").sort_index()
    if window > 1:
        curves = curves.rolling(window, min_periods=1).mean()

    counts = curves.count(axis=1)
    mean = curves.mean(axis=1)
    sem = (curves.std(axis=1, ddof=1) / np.sqrt(counts)).fillna(0.0)
    half_width = stats.norm.ppf(0.5 + CONFIDENCE / 2) * sem
    summary = pd.DataFrame(
        {
            "episode": curves.index.to_numpy(),
            "mean": mean.to_numpy(),
            "ci_low": (mean - half_width).to_numpy(),
            "ci_high": (mean + half_width).to_numpy(),
        }
    )
    return summary[SUMMARY_COLUMNS]


def plot_learning_curves(summaries: Mapping[str, pd.DataFrame], path: str, title: str = ""):
    """
    One line per agent with its shaded confidence band, written as SVG.
    """
    plt.rcParams["svg.hashsalt"] = "fbapomcp"
    figure, ax = plt.subplots(figsize=(8, 5))
    try:
        for name, summary in summaries.items():
            line = ax.plot(summary["episode"], summary["mean"], label=name)[0]
            ax.fill_between(
                summary["episode"],
                summary["ci_low"],
                summary["ci_high"],
                color=line.get_color(),
                alpha=0.2,
                linewidth=0,
            )
        ax.set_xlabel("episode")
        ax.set_ylabel("return")
        if title:
            ax.set_title(title)
        ax.legend()
        figure.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(figure)
    logging.info(f"[Summary Service] [Plot] wrote {path}")
