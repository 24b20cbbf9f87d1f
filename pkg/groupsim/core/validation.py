"""Input validation module for groupsim.

Validation for the values that cross the CLI and config boundary: country
codes, option names, seed lists, probabilities, worker counts and paths.
Every function raises a specific exception from groupsim.core.exceptions.
"""

from __future__ import annotations

import math
import os
import re
from pathlib import Path
from typing import Iterable, Optional, Union

from .exceptions import (
    DuplicateSeed,
    InvalidConfigurationError,
    InvalidIdentifierError,
    PathValidationError,
    TooFewReplicates,
)

# =============================================================================
# Constants
# =============================================================================

COUNTRY_PATTERN = re.compile(r"^[A-Z]{2}$")

# Option names and group names end up in CSV cells and file names.
OPTION_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9 _.-]*$")
OPTION_MAX_LENGTH = 64

MAX_HORIZON_DAYS = 365


# =============================================================================
# Identifier Validation
# =============================================================================


def validate_country_code(value: str) -> str:
    """Validate an ISO-3166 alpha-2 country code and return it upper-cased.

    Raises:
        InvalidIdentifierError: If the code is not two ASCII letters.
    """
    if not isinstance(value, str):
        raise InvalidIdentifierError("country", str(value), "must be a string")

    code = value.strip().upper()
    if not code:
        raise InvalidIdentifierError("country", code, "cannot be empty")
    if not COUNTRY_PATTERN.match(code):
        raise InvalidIdentifierError("country", code, "must be a two-letter ISO code")
    return code


def validate_option_name(value: str) -> str:
    """Validate one prediction option label."""
    if not isinstance(value, str):
        raise InvalidIdentifierError("option", str(value), "must be a string")

    name = value.strip()
    if not name:
        raise InvalidIdentifierError("option", name, "cannot be empty")
    if len(name) > OPTION_MAX_LENGTH:
        raise InvalidIdentifierError(
            "option", name, f"exceeds maximum length of {OPTION_MAX_LENGTH} characters"
        )
    if not OPTION_PATTERN.match(name):
        raise InvalidIdentifierError(
            "option", name, "must start alphanumeric and avoid separators"
        )
    return name


def validate_option_list(options_input: Union[str, Iterable[str]]) -> list[str]:
    """Parse and validate comma-separated (or listed) prediction options.

    Order is preserved and duplicates are rejected.
    """
    parts = options_input.split(",") if isinstance(options_input, str) else list(options_input)

    options: list[str] = []
    for part in parts:
        if not str(part).strip():
            continue
        name = validate_option_name(str(part))
        if name in options:
            raise InvalidIdentifierError("option", name, "listed more than once")
        options.append(name)

    if not options:
        raise InvalidIdentifierError("option", str(options_input), "no valid options provided")
    return options


# =============================================================================
# Numeric Validation
# =============================================================================


def validate_probability(value: Union[float, str, None], field_name: str) -> float:
    """Validate a finite real in [0, 1]."""
    try:
        prob = float(value)  # type: ignore[arg-type]
    except (ValueError, TypeError):
        raise InvalidConfigurationError(field_name, value, "must be a number")

    if not math.isfinite(prob) or prob < 0.0 or prob > 1.0:
        raise InvalidConfigurationError(field_name, prob, "must lie in [0, 1]")
    return prob


def validate_positive_int(
    value: Union[int, str, None],
    field_name: str,
    *,
    min_value: int = 1,
    max_value: Optional[int] = None,
    default: Optional[int] = None,
) -> int:
    """Validate an integer bounded below (and optionally above)."""
    if value is None:
        if default is None:
            raise InvalidConfigurationError(field_name, value, "is required")
        return default

    if isinstance(value, bool):
        raise InvalidConfigurationError(field_name, value, "must be a valid integer")
    try:
        number = int(value)
    except (ValueError, TypeError):
        raise InvalidConfigurationError(field_name, value, "must be a valid integer")

    if number < min_value:
        raise InvalidConfigurationError(field_name, number, f"must be at least {min_value}")
    if max_value is not None and number > max_value:
        raise InvalidConfigurationError(field_name, number, f"cannot exceed {max_value}")
    return number


def validate_workers(value: Union[int, str, None], field_name: str = "workers") -> int:
    """Validate worker count for intra-day agent parallelism."""
    return validate_positive_int(value, field_name, min_value=1, max_value=64, default=1)


def validate_layer(value: Union[int, str, None]) -> int:
    """Validate a hierarchy layer number."""
    return validate_positive_int(value, "layer", min_value=1, default=1)


def validate_horizon(value: Union[int, str, None]) -> int:
    """Validate a simulation horizon in days."""
    return validate_positive_int(
        value, "horizon", min_value=1, max_value=MAX_HORIZON_DAYS, default=7
    )


def validate_seed_list(seeds: Iterable[Union[int, str]], *, min_count: int = 1) -> list[int]:
    """Validate run seeds: non-negative integers, all distinct.

    Raises:
        DuplicateSeed: If a seed appears twice.
        TooFewReplicates: If fewer than ``min_count`` seeds are given.
    """
    result: list[int] = []
    for raw in seeds:
        seed = validate_positive_int(raw, "seed", min_value=0)
        if seed in result:
            raise DuplicateSeed(seed)
        result.append(seed)

    if len(result) < min_count:
        raise TooFewReplicates(len(result))
    return result


def parse_seed_input(seed_input: str, *, min_count: int = 1) -> list[int]:
    """Parse "1,2,3" or an inclusive range "1-5" into a validated seed list."""
    seed_input = seed_input.strip()
    match = re.fullmatch(r"(\d+)\s*-\s*(\d+)", seed_input)
    if match:
        start, stop = int(match.group(1)), int(match.group(2))
        if stop < start:
            raise InvalidConfigurationError("seeds", seed_input, "range end precedes start")
        return validate_seed_list(range(start, stop + 1), min_count=min_count)

    parts = [p.strip() for p in seed_input.split(",") if p.strip()]
    return validate_seed_list(parts, min_count=min_count)


# =============================================================================
# Path Validation
# =============================================================================


def validate_path_exists(
    path: Union[str, Path],
    *,
    must_be_file: bool = False,
    must_be_dir: bool = False,
    description: str = "path",
) -> Path:
    """Validate that a path exists and optionally check its type.

    Returns:
        Resolved Path object.

    Raises:
        PathValidationError: If path is invalid or doesn't meet requirements.
    """
    if isinstance(path, str):
        if not path.strip():
            raise PathValidationError(path, f"{description} cannot be empty")
        path = Path(path)

    path = path.expanduser()

    if not path.exists():
        raise PathValidationError(str(path), f"{description} does not exist")
    if must_be_file and not path.is_file():
        raise PathValidationError(str(path), f"{description} must be a file")
    if must_be_dir and not path.is_dir():
        raise PathValidationError(str(path), f"{description} must be a directory")

    return path.resolve()


def validate_output_dir(path: Union[str, Path], description: str = "output directory") -> Path:
    """Create the output directory and any missing parents; check it is writable.

    Raises:
        PathValidationError: If the path or an ancestor is a file, the nearest
            existing ancestor is not writable, or creation fails.
    """
    if isinstance(path, str):
        if not path.strip():
            raise PathValidationError(path, f"{description} cannot be empty")
        path = Path(path)
    path = path.expanduser()

    if path.exists() and not path.is_dir():
        raise PathValidationError(str(path), f"{description} is not a directory")
    if not path.exists():
        ancestor = path.parent
        while not ancestor.exists():
            ancestor = ancestor.parent
        if not ancestor.is_dir():
            raise PathValidationError(str(path), f"ancestor is not a directory: {ancestor}")
        if not os.access(ancestor, os.W_OK):
            raise PathValidationError(str(path), f"ancestor is not writable: {ancestor}")
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise PathValidationError(str(path), exc.strerror or str(exc)) from exc
    elif not os.access(path, os.W_OK):
        raise PathValidationError(str(path), f"{description} is not writable")

    return path.resolve()
