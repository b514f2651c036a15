import logging

from fluxmech.core.config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None, verbose: bool = False, quiet: bool = False) -> None:
    """Configure root logging once for CLI runs."""
    if verbose:
        name = "DEBUG"
    elif quiet:
        name = "WARNING"
    else:
        name = level or LOG_LEVEL
    logging.basicConfig(level=getattr(logging, name.upper(), logging.INFO), format=LOG_FORMAT, force=True)
