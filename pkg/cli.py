#!/usr/bin python3
"""
Veronese limit sets Command Line Interface
==========================================

Command-line access to the library: embeddings of CP^1 points, representation
matrices of words, limit set samples, verify suites, orbit accumulation and the
proper discontinuity check. Every run is fixed by a configuration file plus flags,
and identical configurations produce byte-identical output.

Subcommands:
- embed:       embedded coordinates of CP^1 points ([x:y], one per line or as arguments)
- rep:         representation matrix of a word, singular values, class and gap ratios
- limitset:    myrberg | ecg | cp1 limit set sample, one record per limit point
- verify:      run a property suite, exit code 1 if any check fails
- accumulate:  orbit accumulation of a random compact sample
- proper:      words moving a complement sample onto itself

Usage:
    python cli.py embed "[1:1]" "[1:0]" --n 2
    python cli.py rep "g h^-1" --config config.ini
    python cli.py limitset myrberg --lmax 8 --format csv --out out/myrberg.csv
    python cli.py verify --suite equivariance --n 4

Configuration:
- config.ini: [MAIN], [GROUP], [TOLERANCES], [OUTPUT] (see sources/config.py)
- VERONESE_THREADS (environment or .env): worker threads for word-level work
- VERONESE_LOG_DIR: log directory, .logs by default

Exit codes: 0 success, 1 failed verify suite, 2 error (structured record on stderr).
"""

import argparse
import json
import os
import sys

from sources.commands import (
    cmd_accumulate,
    cmd_embed,
    cmd_limitset,
    cmd_proper,
    cmd_rep,
    cmd_verify,
)
from sources.config import load_config
from sources.errors import VeroneseError
from sources.logger import Logger
from sources.suites import SUITES
from sources.utility import pretty_print

logger = Logger("cli.log")

DEFAULT_CONFIG = "config.ini"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help=f"INI run configuration (default: {DEFAULT_CONFIG} if present)")
    common.add_argument("--n", type=int, default=None, help="degree of the Veronese embedding")
    common.add_argument("--lmax", type=int, default=None, help="word length budget")
    common.add_argument("--seed", type=int, default=None, help="seed of every random sample")
    common.add_argument("--samples", type=int, default=None, help="sample count for suites and compact sets")
    common.add_argument("--preset", default=None, help="group preset, overrides the config group")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="veronese", description="Limit sets of Veronese groups")
    sub = parser.add_subparsers(dest="command", required=True)
    embed = sub.add_parser("embed", parents=[common], help="embed CP^1 points into CP^n")
    embed.add_argument("points", nargs="*", help='points such as "[1:1]"')
    embed.add_argument("--input", default=None, help="file with one point per line ('-' for stdin)")
    rep = sub.add_parser("rep", parents=[common], help="representation matrix of a word")
    rep.add_argument("word", help='word such as "g h^-1 g^2"')
    limitset = sub.add_parser("limitset", parents=[common], help="limit set sample")
    limitset.add_argument("which", choices=["myrberg", "ecg", "cp1"])
    verify = sub.add_parser("verify", parents=[common], help="run a verify suite")
    verify.add_argument("--suite", required=True, choices=list(SUITES))
    sub.add_parser("accumulate", parents=[common], help="orbit accumulation of a compact sample")
    sub.add_parser("proper", parents=[common], help="proper discontinuity check")
    return parser


def resolve_config(args: argparse.Namespace):
    path = args.config
    if path is None and os.path.exists(DEFAULT_CONFIG):
        path = DEFAULT_CONFIG
    overrides = {key: getattr(args, key) for key in ("n", "lmax", "seed", "samples", "format", "out", "preset")}
    return load_config(path, overrides)


def read_points_text(args: argparse.Namespace) -> str:
    if args.points:
        return "\n".join(args.points)
    if args.input and args.input != "-":
        with open(args.input, "r", encoding="utf-8") as f:
            return f.read()
    return sys.stdin.read()


def dispatch(args: argparse.Namespace, config):
    if args.command == "embed":
        return cmd_embed(config, read_points_text(args))
    if args.command == "rep":
        return cmd_rep(config, args.word)
    if args.command == "limitset":
        return cmd_limitset(config, args.which)
    if args.command == "verify":
        return cmd_verify(config, args.suite, progress=sys.stderr.isatty())
    if args.command == "accumulate":
        return cmd_accumulate(config)
    return cmd_proper(config)


def report_error(record: dict) -> int:
    pretty_print(f"{record['error']}: {record['message']}", color="failure")
    sys.stderr.write(json.dumps(record) + "\n")
    logger.error(f"{record['error']}: {record['message']} {record['details']}")
    return 2


def main(argv=None) -> int:
    """
    Command-line entry point. Returns the process exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        logger.info(f"{args.command}: {config}")
        result = dispatch(args, config)
        result.write(config)
    except VeroneseError as e:
        return report_error(e.jsonify())
    except OSError as e:
        return report_error({"error": "IOError", "message": str(e), "details": {"path": e.filename}})
    if config.output.path:
        result.show()
        pretty_print(f"wrote {len(result.records)} records to {config.output.path}", color="status")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
