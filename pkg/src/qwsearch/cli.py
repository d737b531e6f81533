"""``qwsearch`` command line.

    qwsearch search --n 1000 --p 0.1 --seed 42 --out runs/search
    qwsearch ensemble --task spectrum --n 300 --p 0.5 --size 100 --out runs/l1
    qwsearch figure1 --out runs/fig1

Exit status: 0 on success, 1 if any ensemble instance failed, 2 on an
invalid parameter, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as xp

EXIT_INSTANCE_FAILED = 1
EXIT_BAD_PARAMETER = 2
EXIT_IO = 3

# flag dest -> (config field, converter)
_FIELDS = {
    "model": ("model", str),
    "n": ("n", int),
    "p": ("p", float),
    "d": ("d", int),
    "seed": ("seed", int),
    "gamma": ("gamma", str),
    "w": ("w", int),
    "endpoints": ("endpoints", lambda s: tuple(int(v) for v in str(s).replace(" ", "").split(","))),
    "tmax": ("t_max", float),
    "t_max": ("t_max", float),
    "steps": ("steps", int),
    "size": ("ensemble_size", int),
    "ensemble_size": ("ensemble_size", int),
    "task": ("task", str),
    "bins": ("bins", int),
    "p_list": ("p_list", lambda s: tuple(float(v) for v in str(s).replace(" ", "").split(","))),
    "jobs": ("jobs", int),
    "out": ("output_dir", Path),
    "output_dir": ("output_dir", Path),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file; flags override it")
    common.add_argument("--model", choices=["erdos_renyi", "random_regular", "complete"],
                        help="graph model (default: inferred from --p / --d)")
    common.add_argument("--n", help="vertex count")
    common.add_argument("--p", help="edge probability (Erdos-Renyi)")
    common.add_argument("--d", help="degree (random regular)")
    common.add_argument("--seed", help=f"RNG seed (default {xp.DEFAULT_SEED})")
    common.add_argument("--gamma", help="exact | meanfield | manual:<x> (default: meanfield for G(n,p), else exact)")
    common.add_argument("--w", help="marked vertex / Charlie's vertex (0-indexed)")
    common.add_argument("--endpoints", help="comma-separated protocol endpoints, e.g. 3,17")
    common.add_argument("--tmax", help="end of the time grid")
    common.add_argument("--steps", help="time-grid points")
    common.add_argument("--size", help="ensemble size")
    common.add_argument("--task", help="ensemble task: spectrum | search | transfer | bell")
    common.add_argument("--bins", help="histogram bins")
    common.add_argument("--p-list", dest="p_list", help="figure1 edge probabilities, comma-separated")
    common.add_argument("--jobs", help="parallel ensemble workers")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qwsearch", description="Quantum-walk search on random graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in xp.COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> xp.ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw.update(xp.read_config_file(args.config))
    for dest in _FIELDS:
        value = getattr(args, dest, None)
        if value is not None:
            raw[dest] = value
    values, explicit = {}, set()
    for key, value in raw.items():
        if key not in _FIELDS:
            raise ValueError(f"{key}: unknown parameter")
        name, conv = _FIELDS[key]
        try:
            values[name] = conv(value)
        except ValueError:
            raise ValueError(f"{key}: cannot parse value {value!r}") from None
        explicit.add(name)
    cfg = xp.ExperimentConfig(command=args.command, **values)
    return xp.figure_defaults(cfg, explicit)


def dispatch(cfg: xp.ExperimentConfig) -> int:
    if cfg.command == "generate":
        paths = xp.run_generate(cfg)
    elif cfg.command == "spectrum":
        paths = xp.run_spectrum(cfg)
    elif cfg.command == "search":
        paths = xp.run_search_command(cfg)
    elif cfg.command in ("transfer", "bell"):
        paths = xp.run_protocol_command(cfg, cfg.command)
    elif cfg.command == "ensemble":
        summary = xp.run_ensemble(cfg)
        for path in ("ensemble_records.jsonl", "ensemble_aggregate.json"):
            print(cfg.output_dir / path)
        if summary.failures:
            print(f"{len(summary.failures)} of {len(summary.records)} instances failed", file=sys.stderr)
            return EXIT_INSTANCE_FAILED
        return 0
    elif cfg.command == "figure1":
        paths = xp.run_figure1(cfg)
    else:
        paths = xp.run_figure2(cfg)
    for path in paths:
        print(path)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        return dispatch(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
