"""Experiment harness: run configs, simulated dialogues, training, evaluation and metrics."""

from .episode_log import EpisodeLog, TurnRecord, write_logs
from .evaluation import compare_tables, evaluate, policies_for_seed, run_experiment
from .interactive import InteractiveSession, run_repl
from .metrics import (
    CSV_HEADER,
    Aggregate,
    MetricsRow,
    MetricsTable,
    SignificanceResult,
    StatisticsError,
    Verdict,
    format_table,
    proportion_test,
    relation_act_rate,
    rows_from_logs,
    significance,
    welch_test,
)
from .plotting import plot_reward_vs_r
from .run_config import RunConfig, load_run_config, parse_run_config
from .session import Resources, SystemAgent, episode_rng, run_dialogue
from .store import metrics_from_store, store_episodes
from .training import train, train_seed

__all__ = [
    "CSV_HEADER",
    "Aggregate",
    "EpisodeLog",
    "InteractiveSession",
    "MetricsRow",
    "MetricsTable",
    "Resources",
    "RunConfig",
    "SignificanceResult",
    "StatisticsError",
    "SystemAgent",
    "TurnRecord",
    "Verdict",
    "compare_tables",
    "episode_rng",
    "evaluate",
    "format_table",
    "load_run_config",
    "metrics_from_store",
    "parse_run_config",
    "plot_reward_vs_r",
    "policies_for_seed",
    "proportion_test",
    "relation_act_rate",
    "rows_from_logs",
    "run_dialogue",
    "run_experiment",
    "run_repl",
    "significance",
    "store_episodes",
    "train",
    "train_seed",
    "write_logs",
]
