"""Command-line entry point: ``cedm train|eval|compare|interact|gen-kb|report``."""

import argparse
import asyncio
import sys
from pathlib import Path
from typing import Optional, Sequence

from loguru import logger

from src.config import DEFAULT_ONTOLOGY_PATH, settings
from src.errors import CedmError, ConfigError
from src.log import add_file_sink, setup_logging, setup_sentry


def _run_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="run only this seed (overrides the config's seeds)")
    parser.add_argument("--r", type=float, dest="r", help="relation probability (overrides the config)")
    parser.add_argument("--workers", type=int, help="worker processes (default: CEDM_WORKERS)")
    parser.add_argument("--output", type=Path, help="output directory (default: the config's, see CEDM_OUTPUT_ROOT)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cedm", description="Conversational entity dialogue experiments.")
    parser.add_argument("--log-level", help="override CEDM_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train policies for every seed")
    p.add_argument("--config", type=Path, required=True)
    _run_args(p)

    p = sub.add_parser("eval", help="evaluate trained policies and write metrics")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--checkpoints", type=Path, help="checkpoint directory (default: <output>/checkpoints)")
    _run_args(p)

    p = sub.add_parser("compare", help="train and evaluate two configs, then test for significance")
    p.add_argument("--configs", type=Path, nargs=2, required=True, metavar=("A", "B"))
    p.add_argument("--skip-train", action="store_true", help="reuse existing checkpoints")
    _run_args(p)

    p = sub.add_parser("interact", help="talk to trained policies in semantic acts")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--checkpoint", type=Path, help="checkpoint directory (default: <output>/checkpoints)")
    p.add_argument("--seed", type=int, help="seed whose checkpoint is used (default: the config's first)")
    p.add_argument("--telegram", action="store_true", help="serve the dialogue through the Telegram bot")

    p = sub.add_parser("gen-kb", help="generate a synthetic knowledge base")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ontology", type=Path, default=DEFAULT_ONTOLOGY_PATH)
    p.add_argument("--size", action="append", default=[], metavar="TYPE=N", help="records per type")
    p.add_argument("--output", type=Path, required=True)

    p = sub.add_parser("report", help="summary table and reward plot from metrics CSVs")
    p.add_argument("--metrics", type=Path, nargs="+", required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--position", type=int, default=2, help="object position to report (0 for all)")
    return parser


def _load(path: Path, args: argparse.Namespace):
    from src.harness.run_config import load_run_config

    config = load_run_config(path)
    return config.with_overrides(seed=getattr(args, "seed", None), relation_probability=getattr(args, "r", None))


def _output_dir(config, args: argparse.Namespace) -> Path:
    return Path(args.output) if getattr(args, "output", None) else config.resolved_output_dir()


def cmd_train(args: argparse.Namespace) -> int:
    from src.harness.training import train

    config = _load(args.config, args)
    output_dir = _output_dir(config, args)
    add_file_sink(output_dir)
    paths = train(config, workers=args.workers, output_dir=output_dir)
    for seed, path in paths.items():
        print(f"seed {seed}: {path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    from src.harness.evaluation import evaluate
    from src.harness.metrics import format_table

    config = _load(args.config, args)
    output_dir = _output_dir(config, args)
    add_file_sink(output_dir)
    table = evaluate(config, args.checkpoints, workers=args.workers, output_dir=output_dir)
    print(format_table(table.aggregate(), position=None), end="")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    from src.harness.evaluation import compare_tables, evaluate
    from src.harness.metrics import MetricsTable, format_table
    from src.harness.training import train

    tables = []
    for path in args.configs:
        config = _load(path, args)
        output_dir = _output_dir(config, args) / config.config_hash() if args.output else config.resolved_output_dir()
        add_file_sink(output_dir)
        if config.trainable and not args.skip_train:
            train(config, workers=args.workers, output_dir=output_dir)
        tables.append(evaluate(config, output_dir / "checkpoints", workers=args.workers, output_dir=output_dir))
    label_a, label_b = (p.stem for p in args.configs)
    print(format_table(MetricsTable(tables[0].rows + tables[1].rows).aggregate(), position=None), end="")
    print(compare_tables(tables[0], tables[1], label_a, label_b), end="")
    return 0


def cmd_interact(args: argparse.Namespace) -> int:
    from src.harness.evaluation import policies_for_seed
    from src.harness.interactive import InteractiveSession, run_repl
    from src.harness.run_config import RunConfig

    config = _load(args.config, args) if args.config else RunConfig()
    checkpoint_dir = args.checkpoint or config.resolved_output_dir() / "checkpoints"
    if args.telegram:
        from src.bot import main as bot_main

        asyncio.run(bot_main(config, checkpoint_dir))
        return 0
    seed = config.seeds[0] if args.seed is None else args.seed
    session = InteractiveSession(config, policies_for_seed(config, seed, checkpoint_dir), seed=seed)
    run_repl(session)
    return 0


def _sizes(items: Sequence[str]) -> Optional[dict[str, int]]:
    if not items:
        return None
    sizes = {}
    for item in items:
        name, sep, count = item.partition("=")
        if not sep or not count.isdigit():
            raise ConfigError(f"expected TYPE=N, got '{item}'", location="--size")
        sizes[name] = int(count)
    return sizes


def cmd_gen_kb(args: argparse.Namespace) -> int:
    from src.ontology.generator import generate_kb
    from src.ontology.loader import load_ontology, write_ontology

    types, _ = load_ontology(args.ontology)
    kb = generate_kb(args.seed, _sizes(args.size), types)
    path = write_ontology(args.output, types, kb)
    print(f"wrote {sum(len(kb.records(t.name)) for t in types)} records to {path}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from src.harness.metrics import MetricsTable, format_table
    from src.harness.plotting import plot_reward_vs_r

    table = MetricsTable.from_csv(*args.metrics)
    aggregates = table.aggregate()
    position = args.position or None
    text = format_table(aggregates, position=position)
    args.output.mkdir(parents=True, exist_ok=True)
    (args.output / "summary.txt").write_text(text, encoding="utf-8")
    plot_reward_vs_r(aggregates, args.output / "reward_vs_r.png", position=position)
    print(text, end="")
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "interact": cmd_interact,
    "gen-kb": cmd_gen_kb,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one CLI command.

    Returns:
        0 on success, 2 on usage or domain errors, 1 on unexpected failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    setup_logging(args.log_level.upper() if args.log_level else settings.log_level)
    setup_sentry()
    try:
        return COMMANDS[args.command](args)
    except CedmError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
