"""Reward-versus-relation-probability figure."""

from collections import defaultdict
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from loguru import logger  # noqa: E402

from .metrics import Aggregate  # noqa: E402


def plot_reward_vs_r(aggregates: Sequence[Aggregate], path: Path, position: Optional[int] = 2) -> Path:
    """Mean reward with 95% confidence intervals against r, one line per (experiment, env, policy, object)."""
    series: dict[tuple[str, str, str, str], list[Aggregate]] = defaultdict(list)
    for agg in aggregates:
        if position is None or agg.object_position == position:
            series[(agg.experiment, agg.env, agg.policy, agg.object_id)].append(agg)

    fig, ax = plt.subplots(figsize=(6, 4))
    for (experiment, env, policy, object_id), points in sorted(series.items()):
        points = sorted(points, key=lambda a: a.r)
        ax.errorbar(
            [a.r for a in points],
            [a.reward_mean for a in points],
            yerr=[a.reward_ci for a in points],
            marker="o",
            capsize=3,
            label=f"{experiment} {env} {policy} {object_id}",
        )
    ax.set_xlabel("relation probability r")
    ax.set_ylabel("reward" if position is None else f"reward (object {position})")
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend(fontsize="small")
    fig.tight_layout()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info(f"Saved reward plot to {path}")
    return path
