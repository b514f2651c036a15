"""Command-line entry point: ``fluxmech <command> --config run.yaml``."""

import argparse
import logging

from pydantic import ValidationError

from fluxmech import __version__
from fluxmech.cli.commands import bifurcate, map as map_command, response, selftest, simulate
from fluxmech.core.exceptions import FluxMechError
from fluxmech.core.logging import configure_logging

logger = logging.getLogger(__name__)

COMMANDS = (simulate, response, bifurcate, map_command, selftest)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluxmech", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Override FLUXMECH_LOG_LEVEL")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration or a manifest to replay")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="Override one configuration value")
    common.add_argument("--output-dir", default=None, help="Override FLUXMECH_OUTPUT_DIR")
    common.add_argument("--workers", type=int, default=None, help="Override FLUXMECH_WORKERS")

    for command in COMMANDS:
        command.register(subparsers, common)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.verbose, args.quiet)
    try:
        return args.handler(args)
    except ValidationError as exc:
        logger.error(f"Invalid parameters: {exc}")
        return 2
    except FluxMechError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
