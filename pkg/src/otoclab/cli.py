"""Command-line front end: run a preset or custom config, list the registry,
or validate a config without executing it.

Exit codes: 0 success, 2 config error, 3 resource refusal or I/O failure,
4 numerical-validation failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .config import check_memory, load_config, resolve_output_dir
from .errors import ConfigError, NumericalValidationError, ResourceError
from .experiments import REGISTRY, list_experiments, run_experiment


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otoclab",
        description="dense-matrix OTOC experiments with CSV/JSON reports")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one experiment config")
    run.add_argument("config", help="path to a YAML run config")
    run.add_argument("--output-dir", default=None,
                     help="override the output directory")
    run.add_argument("--seed", type=int, default=None,
                     help="override the config seed")
    run.add_argument("--threads", type=int, default=None,
                     help="override the time-grid worker count")
    run.add_argument("--memory-cap", type=float, default=None, metavar="GIB",
                     help="override the dense-matrix memory cap in GiB")
    run.set_defaults(func=_cmd_run)

    lst = sub.add_parser("list", help="list registry experiments")
    lst.set_defaults(func=_cmd_list)

    val = sub.add_parser("validate",
                         help="parse and validate a config without running")
    val.add_argument("config", help="path to a YAML run config")
    val.set_defaults(func=_cmd_validate)
    return parser


def _apply_overrides(cfg, args):
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be a positive integer")
        cfg.threads = args.threads
    if args.memory_cap is not None:
        if args.memory_cap <= 0:
            raise ConfigError("--memory-cap must be positive")
        cfg.memory_cap_bytes = int(args.memory_cap * 1024 ** 3)
    return cfg


def _cmd_run(args) -> int:
    cfg = load_config(args.config, known_experiments=set(REGISTRY))
    cfg = _apply_overrides(cfg, args)
    out_dir = resolve_output_dir(cfg, args.output_dir)
    report = run_experiment(cfg, out_dir)
    for name in report["series_files"]:
        print(f"wrote {out_dir}/{name}")
    print(f"wrote {out_dir}/report.json")
    return 0


def _cmd_list(args) -> int:
    for line in list_experiments():
        print(line)
    return 0


def _cmd_validate(args) -> int:
    cfg = load_config(args.config, known_experiments=set(REGISTRY))
    report = check_memory(cfg)
    print(f"ok: {args.config}")
    print(f"experiment {cfg.experiment}: dimension {report['dimension']}, "
          f"dense matrix {report['bytes_per_matrix']} bytes "
          f"(cap {report['cap_bytes']} bytes)")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
