"""Storing evaluation outcomes and re-aggregating metrics from the store."""

from collections import defaultdict
from collections.abc import Sequence

from loguru import logger
from sqlalchemy import delete, select
from sqlalchemy.orm import Session, selectinload

from src.database.models import EpisodeResult, ExperimentRun

from .episode_log import EpisodeLog
from .metrics import MetricsRow, MetricsTable
from .run_config import RunConfig


def store_episodes(
    session: Session, config: RunConfig, seed: int, logs: Sequence[EpisodeLog], phase: str = "test"
) -> ExperimentRun:
    """Replace the stored results of (config, seed, phase) with ``logs``."""
    config_hash = config.config_hash()
    stale = (ExperimentRun.config_hash == config_hash, ExperimentRun.seed == seed, ExperimentRun.phase == phase)
    session.execute(delete(EpisodeResult).where(EpisodeResult.run_id.in_(select(ExperimentRun.id).where(*stale))))
    session.execute(delete(ExperimentRun).where(*stale))
    run = ExperimentRun(
        experiment=config.experiment,
        env=config.env_name,
        r=config.relation_probability,
        config_hash=config_hash,
        seed=seed,
        phase=phase,
    )
    for log in logs:
        for object_id in log.order:
            run.episodes.append(
                EpisodeResult(
                    episode=log.episode,
                    object_id=object_id,
                    object_position=log.position(object_id),
                    policy=config.policies[object_id],
                    success=log.success[object_id],
                    turns=log.turn_counts[object_id],
                    reward=log.returns[object_id],
                    relation_act=log.has_relation_act,
                )
            )
    session.add(run)
    session.commit()
    logger.debug(f"Stored {len(logs)} episodes for {config.experiment} seed {seed} ({phase})")
    return run


def metrics_from_store(session: Session, phase: str = "test") -> MetricsTable:
    """Per-seed metric rows recomputed from stored episode results."""
    runs = session.scalars(
        select(ExperimentRun)
        .where(ExperimentRun.phase == phase)
        .options(selectinload(ExperimentRun.episodes))
        .order_by(ExperimentRun.experiment, ExperimentRun.env, ExperimentRun.r, ExperimentRun.seed)
    ).all()
    table = MetricsTable()
    for run in runs:
        groups: dict[tuple[int, str], list[EpisodeResult]] = defaultdict(list)
        for result in sorted(run.episodes, key=lambda e: e.episode):
            groups[(result.object_position, result.object_id)].append(result)
        for (position, object_id), results in sorted(groups.items()):
            n = len(results)
            table.extend(
                [
                    MetricsRow(
                        experiment=run.experiment,
                        env=run.env,
                        r=run.r,
                        policy=results[0].policy,
                        seed=run.seed,
                        object_position=position,
                        object_id=object_id,
                        reward_mean=sum(e.reward for e in results) / n,
                        success_rate=sum(e.success for e in results) / n,
                        n=n,
                        relation_act_rate=sum(e.relation_act for e in results) / n,
                    )
                ]
            )
    return table
