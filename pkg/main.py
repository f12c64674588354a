# main.py

import argparse
import asyncio
import logging
import os
import sys

from config import ConfigError, load_settings, resolve_experiment
from harness import (
    __version__,
    HarnessFailure,
    cmd_calibrate,
    cmd_link,
    cmd_pattern,
    cmd_proto_trace,
    cmd_search,
)
from utils import configure_logging

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3
EXIT_IO = 4

COMMANDS = {
    "pattern": cmd_pattern,
    "search": cmd_search,
    "link": cmd_link,
    "calibrate": cmd_calibrate,
    "proto-trace": cmd_proto_trace,
}


def seed_value(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dma-twin",
        description="62 GHz dynamic metasurface antenna testbed: patterns, codebooks, DVB link and beam control.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON settings merged over config/settings.json")
    common.add_argument("--seed", type=seed_value, help="64-bit run seed (overrides harness.seed)")
    common.add_argument("--out", help="Output directory (overrides harness.out_dir)")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("pattern", parents=[common], help="Pattern cut and beam summary per code")
    sub.add_parser("search", parents=[common], help="Enumerate every code and rank those meeting the beam spec")
    sub.add_parser("link", parents=[common], help="Run the DVB link towards the receiver angles")
    sub.add_parser("calibrate", parents=[common], help="Fit guide and element parameters to lobe targets")
    trace = sub.add_parser("proto-trace", parents=[common], help="Replay a control byte file on the emulator")
    trace.add_argument("trace_file", nargs="?", help="Byte file (overrides control_proto.trace_file)")
    return parser


async def run(args):
    settings = load_settings(args.config)
    exp = resolve_experiment(settings, seed=args.seed, out_dir=args.out)
    os.makedirs(exp.out_dir, exist_ok=True)
    log_file = os.path.join(exp.out_dir, exp.log_file) if exp.log_file else None
    configure_logging(log_file, logging.DEBUG if args.verbose else logging.INFO)
    if args.command == "proto-trace":
        await cmd_proto_trace(exp, args.trace_file)
    else:
        await COMMANDS[args.command](exp)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        asyncio.run(run(args))
    except ConfigError as e:
        logging.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except HarnessFailure as e:
        logging.error(f"Experiment failed: {e}")
        return EXIT_FAILURE
    except OSError as e:
        logging.error(f"I/O error: {e}")
        return EXIT_IO
    except ValueError as e:
        logging.error(f"Invalid input: {e}")
        return EXIT_CONFIG
    logging.info("Run complete.")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
