"""Per-seed metrics, aggregates with confidence intervals and significance tests."""

import csv
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, fields
from src._compat import StrEnum
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import stats

from src.errors import CedmError

from .episode_log import EpisodeLog
from .run_config import RunConfig

CSV_HEADER = (
    "experiment",
    "env",
    "r",
    "policy",
    "seed",
    "object_position",
    "object_id",
    "reward_mean",
    "success_rate",
    "n",
    "relation_act_rate",
)

ALPHA = 0.05


class StatisticsError(CedmError):
    """Not enough samples for a test or aggregate."""


@dataclass(frozen=True)
class MetricsRow:
    experiment: str
    env: str
    r: float
    policy: str
    seed: int
    object_position: int
    object_id: str
    reward_mean: float
    success_rate: float
    n: int
    relation_act_rate: float

    @property
    def successes(self) -> int:
        return round(self.success_rate * self.n)


def relation_act_rate(logs: Sequence[EpisodeLog]) -> float:
    """Fraction of dialogues with at least one system act addressing a relation."""
    if not logs:
        return 0.0
    return sum(1 for log in logs if log.has_relation_act) / len(logs)


def rows_from_logs(config: RunConfig, seed: int, logs: Sequence[EpisodeLog]) -> list[MetricsRow]:
    """One row per (object position, object) that occurs in ``logs``."""
    groups: dict[tuple[int, str], list[EpisodeLog]] = defaultdict(list)
    for log in logs:
        for object_id in log.order:
            groups[(log.position(object_id), object_id)].append(log)
    rows = []
    for (position, object_id), group in sorted(groups.items()):
        rows.append(
            MetricsRow(
                experiment=config.experiment,
                env=config.env_name,
                r=config.relation_probability,
                policy=config.policies[object_id],
                seed=seed,
                object_position=position,
                object_id=object_id,
                reward_mean=sum(log.returns[object_id] for log in group) / len(group),
                success_rate=sum(log.success[object_id] for log in group) / len(group),
                n=len(group),
                relation_act_rate=relation_act_rate(group),
            )
        )
    return rows


@dataclass(frozen=True)
class Aggregate:
    """Metrics of one (experiment, env, r, policy, position, object) over seeds."""

    experiment: str
    env: str
    r: float
    policy: str
    object_position: int
    object_id: str
    seed_rewards: tuple[float, ...]
    successes: int
    n: int
    relation_act_rate: float

    @property
    def reward_mean(self) -> float:
        return float(np.mean(self.seed_rewards))

    @property
    def reward_ci(self) -> float:
        """Half-width of the 95% t confidence interval over seed means."""
        k = len(self.seed_rewards)
        if k < 2:
            return 0.0
        sem = float(np.std(self.seed_rewards, ddof=1)) / math.sqrt(k)
        return float(stats.t.ppf(0.975, k - 1)) * sem

    @property
    def success_rate(self) -> float:
        return self.successes / self.n if self.n else 0.0

    @property
    def key(self) -> tuple[str, str, float, str, int, str]:
        return self.experiment, self.env, self.r, self.policy, self.object_position, self.object_id


class MetricsTable:
    """Per-seed metric rows with CSV persistence and aggregation."""

    def __init__(self, rows: Iterable[MetricsRow] = ()):
        self.rows: list[MetricsRow] = list(rows)

    def extend(self, rows: Iterable[MetricsRow]) -> None:
        self.rows.extend(rows)

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in self.rows:
                writer.writerow([getattr(row, name) for name in CSV_HEADER])
        return path

    @classmethod
    def from_csv(cls, *paths: Path) -> "MetricsTable":
        casts = {f.name: f.type for f in fields(MetricsRow)}
        rows = []
        for path in paths:
            with Path(path).open(encoding="utf-8", newline="") as f:
                reader = csv.DictReader(f)
                if tuple(reader.fieldnames or ()) != CSV_HEADER:
                    raise StatisticsError(f"{path}: unexpected metrics header {reader.fieldnames}")
                for record in reader:
                    rows.append(MetricsRow(**{k: casts[k](v) for k, v in record.items()}))
        return cls(rows)

    def aggregate(self) -> list[Aggregate]:
        groups: dict[tuple, list[MetricsRow]] = defaultdict(list)
        for row in self.rows:
            groups[(row.experiment, row.env, row.r, row.policy, row.object_position, row.object_id)].append(row)
        aggregates = []
        for key, rows in sorted(groups.items()):
            rows = sorted(rows, key=lambda row: row.seed)
            by_seed: dict[int, list[MetricsRow]] = defaultdict(list)
            for row in rows:
                by_seed[row.seed].append(row)
            seed_rewards = tuple(
                sum(row.reward_mean * row.n for row in seed_rows) / sum(row.n for row in seed_rows)
                for _, seed_rows in sorted(by_seed.items())
            )
            n = sum(row.n for row in rows)
            aggregates.append(
                Aggregate(
                    *key,
                    seed_rewards=seed_rewards,
                    successes=sum(row.successes for row in rows),
                    n=n,
                    relation_act_rate=sum(row.relation_act_rate * row.n for row in rows) / n if n else 0.0,
                )
            )
        return aggregates


# significance


class Verdict(StrEnum):
    A_BETTER = "A better"
    B_BETTER = "B better"
    NO_DIFFERENCE = "no difference"


@dataclass(frozen=True)
class SignificanceResult:
    statistic: float
    p_value: float
    verdict: Verdict


def _verdict(difference: float, p_value: float, alpha: float) -> Verdict:
    if p_value >= alpha or difference == 0.0:
        return Verdict.NO_DIFFERENCE
    return Verdict.A_BETTER if difference > 0 else Verdict.B_BETTER


def welch_test(a: Sequence[float], b: Sequence[float], alpha: float = ALPHA) -> SignificanceResult:
    """
    Two-sided Welch t-test on per-seed means.

    Raises:
        StatisticsError: With fewer than two samples on either side
    """
    if len(a) < 2 or len(b) < 2:
        raise StatisticsError(f"need at least 2 samples per side, got {len(a)} and {len(b)}")
    x, y = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    difference = float(x.mean() - y.mean())
    if np.var(x) == 0.0 and np.var(y) == 0.0:
        if difference == 0.0:
            return SignificanceResult(0.0, 1.0, Verdict.NO_DIFFERENCE)
        return SignificanceResult(math.copysign(math.inf, difference), 0.0, _verdict(difference, 0.0, alpha))
    result = stats.ttest_ind(x, y, equal_var=False)
    statistic, p_value = float(result.statistic), float(result.pvalue)
    return SignificanceResult(statistic, p_value, _verdict(difference, p_value, alpha))


def proportion_test(
    successes_a: int, n_a: int, successes_b: int, n_b: int, alpha: float = ALPHA
) -> SignificanceResult:
    """
    Two-sided two-proportion z-test with pooled variance.

    Raises:
        StatisticsError: If either side has no trials
    """
    if n_a < 1 or n_b < 1:
        raise StatisticsError(f"need trials on both sides, got {n_a} and {n_b}")
    p_a, p_b = successes_a / n_a, successes_b / n_b
    pooled = (successes_a + successes_b) / (n_a + n_b)
    if pooled in (0.0, 1.0):
        return SignificanceResult(0.0, 1.0, Verdict.NO_DIFFERENCE)
    z = (p_a - p_b) / math.sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b))
    p_value = float(2.0 * stats.norm.sf(abs(z)))
    return SignificanceResult(float(z), p_value, _verdict(p_a - p_b, p_value, alpha))


@dataclass(frozen=True)
class Comparison:
    reward: SignificanceResult
    success: SignificanceResult


def significance(a: Aggregate, b: Aggregate, alpha: float = ALPHA) -> Comparison:
    """Reward (Welch, per-seed means) and success (pooled z-test) verdicts of ``a`` against ``b``."""
    return Comparison(
        reward=welch_test(a.seed_rewards, b.seed_rewards, alpha),
        success=proportion_test(a.successes, a.n, b.successes, b.n, alpha),
    )


# summary table

BETTER = "*"
EQUAL = "~"


def _marker(cell: Aggregate, others: list[Aggregate], alpha: float) -> str:
    """``*`` if the cell beats every other policy on reward, ``~`` if it ties with all of them."""
    if not others or len(cell.seed_rewards) < 2 or any(len(o.seed_rewards) < 2 for o in others):
        return ""
    verdicts = [welch_test(cell.seed_rewards, other.seed_rewards, alpha).verdict for other in others]
    if all(v == Verdict.A_BETTER for v in verdicts):
        return BETTER
    if all(v == Verdict.NO_DIFFERENCE for v in verdicts):
        return EQUAL
    return ""


def format_table(aggregates: Sequence[Aggregate], position: Optional[int] = 2, alpha: float = ALPHA) -> str:
    """
    Reward / success rate per relation probability and object (rows) and
    policy (columns), one block per experiment, environment and position.
    """
    selected = [a for a in aggregates if position is None or a.object_position == position]
    blocks: dict[tuple[str, str, int], list[Aggregate]] = defaultdict(list)
    for agg in selected:
        blocks[(agg.experiment, agg.env, agg.object_position)].append(agg)

    out = []
    for (experiment, env, pos), cells in sorted(blocks.items()):
        policies = sorted({c.policy for c in cells})
        keys = sorted({(c.r, c.object_id) for c in cells})
        width = 22
        object_width = max(8, max(len(object_id) for _, object_id in keys) + 2)
        out.append(f"{experiment} {env} object {pos}")
        out.append("r".ljust(6) + "object".ljust(object_width) + "".join(p.rjust(width) for p in policies))
        for r, object_id in keys:
            line = f"{r:<6.2f}" + object_id.ljust(object_width)
            row = {c.policy: c for c in cells if (c.r, c.object_id) == (r, object_id)}
            for policy in policies:
                cell = row.get(policy)
                if cell is None:
                    line += "-".rjust(width)
                    continue
                others = [o for p, o in row.items() if p != policy]
                text = f"{cell.reward_mean:.1f} / {100 * cell.success_rate:.1f}%{_marker(cell, others, alpha)}"
                line += text.rjust(width)
            out.append(line)
        out.append("")
    out.append(f"{BETTER} significantly better reward (p < {alpha:g}), {EQUAL} no significant difference")
    return "\n".join(out) + "\n"
