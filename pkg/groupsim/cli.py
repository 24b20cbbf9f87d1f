from __future__ import annotations

import argparse
import logging
from typing import Optional

from . import __version__
from .commands import register_all
from .core.exceptions import (
    ArtifactIOError,
    ConfigurationError,
    GroupSimError,
    OracleError,
    PathValidationError,
    ResourceError,
    ValidationError,
)
from .core.logging import get_logger, setup_logging

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_ORACLE = 3
EXIT_IO = 4

log = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Build and return the argument parser for the groupsim CLI."""
    parser = argparse.ArgumentParser(
        prog="groupsim", description="Group-agent social network simulation"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all(subparsers)
    return parser


def exit_code_for(exc: BaseException) -> int:
    """Map an exception onto the documented exit codes."""
    if isinstance(exc, (ArtifactIOError, PathValidationError, FileNotFoundError, OSError)):
        return EXIT_IO
    if isinstance(exc, OracleError):
        return EXIT_ORACLE
    if isinstance(exc, (ValidationError, ConfigurationError, ResourceError)):
        return EXIT_VALIDATION
    return EXIT_FAILURE


def run_cli(argv: Optional[list[str]] = None) -> int:
    """Run the groupsim command-line interface."""
    parser = build_parser()
    args = parser.parse_args(argv)

    verbose = bool(getattr(args, "verbose", False))
    setup_logging(
        logging.DEBUG if verbose else logging.WARNING,
        json_output=bool(getattr(args, "json_logs", False)),
    )

    if not hasattr(args, "func"):
        parser.error("No handler registered for the selected command")

    try:
        return int(args.func(args))
    except (GroupSimError, OSError) as exc:
        code = exit_code_for(exc)
        log.error("%s", exc, exc_info=verbose)
        print(f"Error: {exc}")
        return code
