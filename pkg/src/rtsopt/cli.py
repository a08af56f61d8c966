"""``rtsopt`` command line: ``rtsopt run [options]``.

Every option may also be given in a flat ``key=value`` file passed with
``--config``; command-line flags override file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .bench import ExperimentConfig, emit, run_experiment

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


class ConfigError(Exception):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _center(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rtsopt", description="Regular Tree Search benchmarks")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a replicated experiment")
    run.add_argument("--config", help="flat key=value file with defaults for any flag")
    run.add_argument("--objective", default="rastrigin")
    run.add_argument("--dim", type=int, default=2)
    run.add_argument("--sense", default=None, help="min or max (default: objective's own)")
    run.add_argument("--lower", type=float, default=None, help="domain lower bound (all coords)")
    run.add_argument("--upper", type=float, default=None, help="domain upper bound (all coords)")
    run.add_argument("--center", type=_center, default=None, help="optimum location, comma-separated")
    run.add_argument("--noise", default="gaussian", choices=["gaussian", "uniform", "none"])
    run.add_argument("--noise-scale", type=float, default=1.0)
    run.add_argument("--budget", type=int, default=1000)
    run.add_argument("--n0", type=int, default=300)
    run.add_argument("--alpha", type=float, default=0.1)
    run.add_argument("--kappa", type=float, default=0.1)
    run.add_argument("--beta", type=float, default=1 / 3)
    run.add_argument("--cp", type=float, default=2.0)
    run.add_argument("--fmin", type=int, default=15)
    run.add_argument("--reps", type=int, default=100)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--baseline", default="none", choices=["none", "uniform_random"])
    run.add_argument("--out", default="results")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--dump-tree", action="store_true", default=False)
    run.add_argument("--dump-samples", action="store_true", default=False)
    run.add_argument("-v", "--verbose", action="store_true")
    return ap


def read_config_file(path: str, parser: argparse.ArgumentParser) -> dict:
    """Parse ``key=value`` lines into typed defaults for ``parser``."""
    actions = {a.dest: a for a in parser._actions if a.dest not in ("help", "config")}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            dest = key.lstrip("-").replace("-", "_")
            if dest not in actions:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            action = actions[dest]
            try:
                if isinstance(action, argparse._StoreTrueAction):
                    values[dest] = _bool(val)
                elif action.type is not None:
                    values[dest] = action.type(val)
                else:
                    values[dest] = val
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
            if action.choices and values[dest] not in action.choices:
                raise ConfigError(f"{path}:{lineno}: {key} must be one of {action.choices}")
    return values


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    run_parser = parser._subparsers._group_actions[0].choices["run"]
    try:
        if args.config:
            run_parser.set_defaults(**read_config_file(args.config, run_parser))
            args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        known = {f.name for f in fields(ExperimentConfig)}
        cfg = ExperimentConfig(**{k: v for k, v in vars(args).items() if k in known})
    except (ConfigError, ValueError, OSError) as exc:
        print(f"rtsopt: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg)
        table = emit(result, cfg.out)
    except OSError as exc:
        print(f"rtsopt: I/O error: {exc}", file=sys.stderr)
        return 1
    print(table)
    return 0


if __name__ == "__main__":
    sys.exit(main())
