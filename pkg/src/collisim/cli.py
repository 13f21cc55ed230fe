"""Command-line interface.

    collisim run <config-or-experiment> [--seed N] [--out PATH] [--threads N]
    collisim verify [--seed N] [--out PATH]
    collisim list

``run`` accepts either a config file path (flat ``key = value`` lines) or a
bare experiment id from the registry.  COLLISIM_SEED overrides the default
seed; an explicit --seed wins over everything.  --threads changes wall time
only, never results.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .acceptance import run_all, to_jsonl
from .errors import CollisimError, ConfigError
from .experiments import REGISTRY, build_config, parse_config_text, run


def _cmd_run(args) -> int:
    target = args.config
    path = Path(target)
    if path.exists():
        raw = parse_config_text(path.read_text())
    elif target in REGISTRY:
        raw = {"experiment": target}
    else:
        raise ConfigError(
            f"{target!r} is neither a config file nor a registered experiment"
        )
    config = build_config(
        raw,
        seed_override=args.seed,
        out_override=args.out,
        threads=args.threads,
    )
    paths = run(config)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 12345
    results = run_all(seed=seed)
    report = to_jsonl(results)
    if args.out:
        Path(args.out).write_text(report)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.id}: measured={result.measured}"
              f" expected={result.expected} tolerance={result.tolerance}")
        if not result.passed:
            print(f"       {result.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def _cmd_list(_args) -> int:
    width = max(len(name) for name in REGISTRY)
    for name, definition in REGISTRY.items():
        print(f"{name:<{width}}  {definition.description}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="collisim",
        description="collision-model simulator and dissipative classifier",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and write CSV output")
    p_run.add_argument("config", help="config file path or experiment id")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the acceptance criteria")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--out", default=None, help="JSON-lines report path")
    p_verify.set_defaults(func=_cmd_verify)

    p_list = sub.add_parser("list", help="list registered experiments")
    p_list.set_defaults(func=_cmd_list)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CollisimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
