"""Policy training: one fresh set of policies per seed, trained on simulated dialogues."""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence, TypeVar

from loguru import logger

from src.config import settings
from src.policy.base import DialoguePolicy
from src.policy.checkpoint import make_policy, save_policies

from .episode_log import write_logs
from .run_config import RunConfig
from .session import Resources, episode_rng, run_dialogue

PROGRESS_EVERY = 500

T = TypeVar("T")


def checkpoint_path(directory: Path, seed: int) -> Path:
    return Path(directory) / f"seed_{seed}.json"


def log_path(output_dir: Path, phase: str, seed: int) -> Path:
    return Path(output_dir) / "logs" / f"{phase}_seed_{seed}.log"


def new_policies(config: RunConfig) -> dict[str, DialoguePolicy]:
    return {obj.id: make_policy(config.policies[obj.id], config.learner) for obj in config.world}


def train_seed(config: RunConfig, seed: int, output_dir: Optional[Path] = None) -> Path:
    """
    Train fresh policies for one seed and write their checkpoint.

    Raises:
        CheckpointError: If the checkpoint cannot be written
    """
    output_dir = Path(output_dir or config.resolved_output_dir())
    resources = Resources.from_config(config)
    policies = new_policies(config)
    logs = []
    total = config.train_dialogues
    logger.info(f"Training seed {seed}: {total} dialogues ({config.experiment}, {config.env_name}, r={config.relation_probability})")

    successes = 0
    for episode in range(total):
        progress = episode / max(total - 1, 1)
        for policy in policies.values():
            policy.anneal(progress)
        log = run_dialogue(
            config,
            policies,
            episode_rng(seed, "train", episode),
            resources,
            episode=episode,
            phase="train",
            seed=seed,
            learn=True,
            snapshots=config.train_logs,
        )
        successes += all(log.success.values())
        if config.train_logs:
            logs.append(log)
        if (episode + 1) % PROGRESS_EVERY == 0:
            logger.info(f"Seed {seed}: {episode + 1}/{total} dialogues, success {successes / (episode + 1):.3f}")

    if config.train_logs:
        write_logs(log_path(output_dir, "train", seed), logs)
    meta = {
        "config_hash": config.config_hash(),
        "experiment": config.experiment,
        "env": config.env_name,
        "r": config.relation_probability,
        "seed": seed,
        "train_dialogues": total,
    }
    return save_policies(checkpoint_path(output_dir / "checkpoints", seed), policies, meta)


def map_seeds(
    function: Callable[..., T], config: RunConfig, seeds: Sequence[int], workers: int, *args
) -> list[T]:
    """Apply ``function(config, seed, *args)`` per seed, in a process pool when ``workers > 1``."""
    if workers <= 1 or len(seeds) <= 1:
        return [function(config, seed, *args) for seed in seeds]
    with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
        futures = [pool.submit(function, config, seed, *args) for seed in seeds]
        return [future.result() for future in futures]


def train(
    config: RunConfig,
    seeds: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
    output_dir: Optional[Path] = None,
) -> dict[int, Path]:
    """Train every seed; returns the checkpoint path per seed."""
    seeds = list(seeds if seeds is not None else config.seeds)
    output_dir = Path(output_dir or config.resolved_output_dir())
    paths = map_seeds(train_seed, config, seeds, workers or settings.workers, output_dir)
    return dict(zip(seeds, paths))
