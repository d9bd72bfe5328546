"""Evaluation of trained policies and comparison of two runs."""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from loguru import logger

from src.config import settings
from src.database.connection import create_engine, create_session_pool, init_db
from src.policy.base import DialoguePolicy
from src.policy.checkpoint import load_policies
from src.policy.errors import CheckpointError

from .episode_log import EpisodeLog, write_logs
from .metrics import Aggregate, MetricsRow, MetricsTable, StatisticsError, Verdict, rows_from_logs, significance
from .run_config import RunConfig
from .session import Resources, episode_rng, run_dialogue
from .store import store_episodes
from .training import checkpoint_path, log_path, map_seeds, new_policies, train

METRICS_CSV = "metrics.csv"


@dataclass
class SeedEvaluation:
    seed: int
    rows: list[MetricsRow]
    logs: list[EpisodeLog]


def policies_for_seed(config: RunConfig, seed: int, checkpoint_dir: Optional[Path]) -> dict[str, DialoguePolicy]:
    """
    Policies to evaluate for one seed; fresh (untrained) when no object is trainable.

    Raises:
        CheckpointError: If a needed checkpoint is missing or does not fit the world
    """
    if not config.trainable:
        return new_policies(config)
    if checkpoint_dir is None:
        raise CheckpointError("a checkpoint directory is required for trainable policies")
    path = checkpoint_path(checkpoint_dir, seed)
    if not path.exists():
        raise CheckpointError(f"missing checkpoint {path}")
    policies = load_policies(path)
    for obj in config.world:
        policy = policies.get(obj.id)
        if policy is None:
            raise CheckpointError(f"{path} has no policy for '{obj.id}'")
        if policy.kind != config.policies[obj.id]:
            raise CheckpointError(f"{path}: '{obj.id}' is a {policy.kind} policy, config wants {config.policies[obj.id]}")
    return {obj.id: policies[obj.id] for obj in config.world}


def evaluate_seed(
    config: RunConfig, seed: int, checkpoint_dir: Optional[Path], output_dir: Path
) -> SeedEvaluation:
    """Run the test dialogues of one seed without exploration or learning."""
    resources = Resources.from_config(config)
    policies = policies_for_seed(config, seed, checkpoint_dir)
    logs = [
        run_dialogue(
            config,
            policies,
            episode_rng(seed, "test", episode),
            resources,
            episode=episode,
            phase="test",
            seed=seed,
            snapshots=True,
        )
        for episode in range(config.test_dialogues)
    ]
    write_logs(log_path(output_dir, "test", seed), logs)
    rows = rows_from_logs(config, seed, logs)
    for row in rows:
        logger.info(
            f"Seed {seed} object {row.object_position} ({row.object_id}, {row.policy}): "
            f"reward {row.reward_mean:.2f}, success {row.success_rate:.3f}, relation acts {row.relation_act_rate:.3f}"
        )
    return SeedEvaluation(seed, rows, logs)


def evaluate(
    config: RunConfig,
    checkpoint_dir: Optional[Path] = None,
    seeds: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
    output_dir: Optional[Path] = None,
) -> MetricsTable:
    """
    Evaluate every seed, write ``metrics.csv`` and store per-episode results.

    Raises:
        CheckpointError: If a checkpoint is missing
    """
    seeds = list(seeds if seeds is not None else config.seeds)
    output_dir = Path(output_dir or config.resolved_output_dir())
    if checkpoint_dir is None and config.trainable:
        checkpoint_dir = output_dir / "checkpoints"
    for seed in seeds if config.trainable else ():
        if not checkpoint_path(checkpoint_dir, seed).exists():
            raise CheckpointError(f"missing checkpoint {checkpoint_path(checkpoint_dir, seed)}")

    results = map_seeds(evaluate_seed, config, seeds, workers or settings.workers, checkpoint_dir, output_dir)

    table = MetricsTable()
    engine = create_engine(output_dir=output_dir)
    init_db(engine)
    session_pool = create_session_pool(engine)
    with session_pool() as session:
        for result in results:
            table.extend(result.rows)
            store_episodes(session, config, result.seed, result.logs)
    engine.dispose()
    table.to_csv(output_dir / METRICS_CSV)
    logger.info(f"Wrote {len(table)} metric rows to {output_dir / METRICS_CSV}")
    return table


def run_experiment(config: RunConfig, workers: Optional[int] = None) -> MetricsTable:
    """Train (when anything is trainable) and evaluate all seeds of ``config``."""
    output_dir = config.resolved_output_dir()
    if config.trainable:
        train(config, workers=workers, output_dir=output_dir)
    return evaluate(config, output_dir / "checkpoints", workers=workers, output_dir=output_dir)


def compare_tables(a: MetricsTable, b: MetricsTable, label_a: str = "A", label_b: str = "B") -> str:
    """Significance of ``a`` against ``b`` for every (object position, object) both tables cover."""
    cells_a = {(agg.object_position, agg.object_id): agg for agg in _collapse(a.aggregate())}
    cells_b = {(agg.object_position, agg.object_id): agg for agg in _collapse(b.aggregate())}
    lines = []
    for position, object_id in sorted(set(cells_a) & set(cells_b)):
        agg_a, agg_b = cells_a[(position, object_id)], cells_b[(position, object_id)]
        header = (
            f"object {position} {object_id}: {label_a} {agg_a.reward_mean:.2f} / {100 * agg_a.success_rate:.1f}% vs "
            f"{label_b} {agg_b.reward_mean:.2f} / {100 * agg_b.success_rate:.1f}%"
        )
        try:
            result = significance(agg_a, agg_b)
        except StatisticsError as e:
            lines.append(f"{header}: {e}")
            continue
        lines.append(
            f"{header}: reward {_verdict_text(result.reward.verdict, label_a, label_b)} (t={result.reward.statistic:.3f}, "
            f"p={result.reward.p_value:.4f}); success {_verdict_text(result.success.verdict, label_a, label_b)} "
            f"(z={result.success.statistic:.3f}, p={result.success.p_value:.4f})"
        )
    return "\n".join(lines) + "\n"


def _collapse(aggregates: list[Aggregate]) -> list[Aggregate]:
    """One aggregate per (object position, object); a single run has exactly one of each."""
    seen: dict[tuple[int, str], Aggregate] = {}
    for agg in aggregates:
        cell = (agg.object_position, agg.object_id)
        if cell in seen:
            raise StatisticsError(
                f"metrics mix several runs for object {agg.object_id} at position {agg.object_position}"
            )
        seen[cell] = agg
    return list(seen.values())


def _verdict_text(verdict: Verdict, label_a: str, label_b: str) -> str:
    if verdict == Verdict.A_BETTER:
        return f"{label_a} better"
    if verdict == Verdict.B_BETTER:
        return f"{label_b} better"
    return verdict.value
