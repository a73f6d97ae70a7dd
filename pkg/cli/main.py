"""
Command-line front end.

    svda_main.py generate|train|assimilate|report|all [--config PATH | --preset NAME]
                 [--seed U64] [--oracle-stub] [--repeat S] [--out DIR] [--log-level LEVEL]
"""

import argparse
import logging
import os
from pathlib import Path

from cli.commands import cmd_all, cmd_assimilate, cmd_generate, cmd_repeat, cmd_report, cmd_train
from cli.config import available_presets, load_config, load_preset, validate
from utils.exceptions import ConfigError, SVDAError

logger = logging.getLogger(__name__)

COMMANDS = ("generate", "train", "assimilate", "report", "all")
DEFAULT_RUN_ROOT = "runs"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="svda",
        description="Heat-plate state estimation with PBDW and LSTM-predicted observations.",
    )
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", metavar="PATH", help="JSON experiment config")
    source.add_argument("--preset", metavar="NAME",
                        help=f"built-in config ({', '.join(available_presets())})")
    parser.add_argument("--seed", type=int, help="training seed (unsigned 64-bit)")
    parser.add_argument("--oracle-stub", action="store_true",
                        help="assimilate true observations instead of predictions")
    parser.add_argument("--repeat", type=int, default=1, metavar="S",
                        help="run S consecutive seeds in parallel and write median errors")
    parser.add_argument("--out", metavar="DIR", help="run directory")
    parser.add_argument("--log-level", default=None,
                        help="logging level (default: $SVDA_LOG_LEVEL or INFO)")
    return parser


def resolve_config(args):
    if args.config:
        config = load_config(args.config)
    else:
        config = load_preset(args.preset or "desk")
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"seed {args.seed} is not an unsigned 64-bit integer")
        config = config.with_seed(args.seed)
    if args.out:
        config = config.with_output_dir(args.out)
    return validate(config)


def run_directory(config, run_root=None):
    if config.output_dir:
        return Path(config.output_dir)
    root = run_root or os.environ.get("SVDA_OUTPUT_DIR", DEFAULT_RUN_ROOT)
    return Path(root) / config.name


def run(args, run_root=None):
    """Execute one parsed command line; returns the process exit status."""
    try:
        if args.command == "report" and (args.out and not (args.config or args.preset)):
            cmd_report(args.out)
            return 0
        config = resolve_config(args)
        out_dir = run_directory(config, run_root)
        if args.repeat < 1:
            raise ConfigError(f"--repeat must be positive, got {args.repeat}")
        if args.repeat > 1:
            if args.command not in ("assimilate", "all"):
                raise ConfigError("--repeat applies to the assimilate and all commands")
            cmd_repeat(config, out_dir, args.repeat)
            return 0

        if args.command == "generate":
            cmd_generate(config, out_dir)
        elif args.command == "train":
            cmd_train(config, out_dir)
        elif args.command == "assimilate":
            cmd_assimilate(config, out_dir, args.oracle_stub)
        elif args.command == "report":
            cmd_report(out_dir)
        else:
            cmd_all(config, out_dir, args.oracle_stub)
    except SVDAError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    return 0


def main(argv=None, run_root=None):
    args = build_parser().parse_args(argv)
    level = args.log_level or os.environ.get("SVDA_LOG_LEVEL", "INFO")
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return run(args, run_root)
