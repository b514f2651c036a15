import argparse

from fluxmech.core.exceptions import ConfigError


def require_config(args: argparse.Namespace) -> None:
    if not args.config:
        raise ConfigError("--config is required for this command", field="config")
