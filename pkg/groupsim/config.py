from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any, Mapping, Optional, TypedDict

from dotenv import load_dotenv

from .core.exceptions import InvalidConfigurationError, MissingCredentialsError
from .core.logging import mask_sensitive
from .core.models import HEAT_SCHEDULES, FadingConfig, Sentiment
from .core.validation import (
    validate_horizon,
    validate_layer,
    validate_probability,
    validate_seed_list,
    validate_workers,
)


class OracleSettings(TypedDict):
    """Oracle dispatch settings.

    Attributes:
        mode: "stub" (deterministic rules) or "remote" (chat-completions endpoint)
        endpoint: Remote endpoint URL (ORACLE_ENDPOINT)
        api_key: Bearer token for the endpoint (ORACLE_API_KEY)
        model: Model name sent with each request (ORACLE_MODEL)
        temperature: Sampling temperature (default 0.1)
        timeout: Per-request timeout in seconds (default 60)
        max_retries: Retries after the first attempt (default 3)
        max_inflight: Concurrent requests allowed through the gateway
    """

    mode: str
    endpoint: str
    api_key: str
    model: str
    temperature: float
    timeout: int
    max_retries: int
    max_inflight: int


class PerceptionSettings(TypedDict):
    """Event heat settings shared by every agent."""

    initial_heat: float
    feedback_gain: float
    heat_schedule: str
    sentiment: str


class StubSettings(TypedDict):
    """Coefficients of the deterministic stub oracle."""

    emotion_gain: float
    decay_base: float
    emotion_jitter: float
    base_view_rate: float
    intensity_gain: float
    visibility: float
    engagement_jitter: float
    like_rate: float
    comment_ratio: float
    share_ratio: float
    action_boost: float


class EngagementSettings(TypedDict):
    heated: bool
    strict: bool


class RunConfig(TypedDict):
    """Everything a run needs besides the event itself.

    Attributes:
        oracle: Oracle dispatch settings
        fading: Mixing, fading, forgetting and amplitude parameters
        perception: Heat schedule and feedback
        stub: Stub oracle coefficients
        engagement: Ordering-law switches
        use_memory: Include the memory term and memory updates
        use_state: Include the persistence term
        layer: Group-tree layer agents are instantiated from
        horizon: Days to simulate
        seeds: Run seeds, distinct
        workers: Threads used for agents within one day
        output_dir: Directory artefacts are written to
        options: Prediction options (empty disables the predict round)
    """

    oracle: OracleSettings
    fading: FadingConfig
    perception: PerceptionSettings
    stub: StubSettings
    engagement: EngagementSettings
    use_memory: bool
    use_state: bool
    layer: int
    horizon: int
    seeds: list[int]
    workers: int
    output_dir: str
    options: list[str]


# Defaults
DEFAULT_ORACLE_MODE = "stub"
DEFAULT_TEMPERATURE = 0.1
DEFAULT_ORACLE_TIMEOUT = 60
DEFAULT_MAX_RETRIES = 3
DEFAULT_MAX_INFLIGHT = 8

DEFAULT_INITIAL_HEAT = 1.0
DEFAULT_FEEDBACK_GAIN = 0.05
DEFAULT_HEAT_SCHEDULE = "single_peak_day2"
DEFAULT_SENTIMENT = Sentiment.NEGATIVE.value

DEFAULT_STUB: StubSettings = StubSettings(
    emotion_gain=0.5,
    decay_base=0.9,
    emotion_jitter=0.1,
    base_view_rate=0.08,
    intensity_gain=0.2,
    visibility=0.1,
    engagement_jitter=0.05,
    like_rate=0.06,
    comment_ratio=0.3,
    share_ratio=0.2,
    action_boost=1.25,
)

DEFAULT_LAYER = 1
DEFAULT_HORIZON = 7
DEFAULT_SEEDS = [0]
DEFAULT_WORKERS = 1
DEFAULT_OUTPUT_DIR = "runs"

ORACLE_MODES = {"stub", "remote"}


def _str_to_bool(value: Optional[str], default: bool = True) -> bool:
    if value is None:
        return default
    value_norm = str(value).strip().lower()
    if value_norm in {"1", "true", "yes", "y", "on"}:
        return True
    if value_norm in {"0", "false", "no", "n", "off"}:
        return False
    return default


def _parse_int(value: Optional[str], default: int) -> int:
    """Parse a string to an integer with a fallback default."""
    if value is None:
        return default
    try:
        return int(str(value).strip())
    except ValueError:
        return default


def _number(section: Mapping[str, Any], key: str, default: float, prefix: str) -> float:
    raw = section.get(key, default)
    if isinstance(raw, bool):
        raise InvalidConfigurationError(f"{prefix}.{key}", raw, "must be a number")
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise InvalidConfigurationError(f"{prefix}.{key}", raw, "must be a number")


def _section(data: Mapping[str, Any], name: str) -> Mapping[str, Any]:
    value = data.get(name) or {}
    if not isinstance(value, Mapping):
        raise InvalidConfigurationError(name, value, "must be an object")
    return value


def _read_config_file(config_path: Path) -> dict[str, Any]:
    p = Path(config_path).expanduser()
    if not p.exists():
        raise FileNotFoundError(f"Config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfigurationError(str(p), exc.msg, f"invalid JSON at line {exc.lineno}")
    if not isinstance(data, dict):
        raise InvalidConfigurationError(str(p), type(data).__name__, "top level must be an object")
    return data


def _load_env(env_path: Optional[Path]) -> None:
    if env_path:
        p = Path(env_path).expanduser()
        if not p.exists():
            raise FileNotFoundError(f"Environment file not found: {p}")
        load_dotenv(p, override=True)
    else:
        default_env = Path.cwd() / ".env"
        if default_env.exists():
            load_dotenv(default_env, override=False)


def build_oracle_settings(section: Mapping[str, Any]) -> OracleSettings:
    """Merge the ``oracle`` config section with secrets from the environment.

    Environment variables win for the endpoint, key and model; every other
    field comes from the file or its default.
    """
    mode = str(section.get("mode", DEFAULT_ORACLE_MODE)).strip().lower()
    if mode not in ORACLE_MODES:
        raise InvalidConfigurationError(
            "oracle.mode", mode, f"must be one of: {', '.join(sorted(ORACLE_MODES))}"
        )

    temperature = _number(section, "temperature", DEFAULT_TEMPERATURE, "oracle")
    if not 0.0 <= temperature <= 2.0:
        raise InvalidConfigurationError("oracle.temperature", temperature, "must lie in [0, 2]")

    settings = OracleSettings(
        mode=mode,
        endpoint=os.getenv("ORACLE_ENDPOINT") or str(section.get("endpoint", "")),
        api_key=os.getenv("ORACLE_API_KEY") or "",
        model=os.getenv("ORACLE_MODEL") or str(section.get("model", "")),
        temperature=temperature,
        timeout=_parse_int(section.get("timeout"), DEFAULT_ORACLE_TIMEOUT),
        max_retries=_parse_int(section.get("max_retries"), DEFAULT_MAX_RETRIES),
        max_inflight=validate_workers(
            section.get("max_inflight", DEFAULT_MAX_INFLIGHT), "oracle.max_inflight"
        ),
    )
    if settings["timeout"] < 1:
        raise InvalidConfigurationError("oracle.timeout", settings["timeout"], "must be >= 1")
    if settings["max_retries"] < 0:
        raise InvalidConfigurationError(
            "oracle.max_retries", settings["max_retries"], "must be >= 0"
        )
    return settings


def build_fading_config(section: Mapping[str, Any]) -> FadingConfig:
    """Build the validated FadingConfig from the ``reasoning`` section."""
    kwargs: dict[str, Any] = {}
    if "alpha" in section:
        alpha = section["alpha"]
        if not isinstance(alpha, (list, tuple)):
            raise InvalidConfigurationError("reasoning.alpha", alpha, "must be a list of three")
        kwargs["alpha"] = tuple(alpha)
    if "fading_rate" in section:
        kwargs["fading_rate"] = section["fading_rate"]
    if "amplitude" in section:
        kwargs["amplitude"] = section["amplitude"]
    if "forgetting_p" in section:
        kwargs["forgetting_p"] = validate_probability(
            section["forgetting_p"], "reasoning.forgetting_p"
        )
    if "memory_capacity" in section:
        kwargs["memory_capacity"] = section["memory_capacity"]
    return FadingConfig.create(**kwargs)


def build_perception_settings(section: Mapping[str, Any]) -> PerceptionSettings:
    schedule = str(section.get("heat_schedule", DEFAULT_HEAT_SCHEDULE))
    if schedule not in HEAT_SCHEDULES:
        raise InvalidConfigurationError(
            "perception.heat_schedule",
            schedule,
            f"must be one of: {', '.join(sorted(HEAT_SCHEDULES))}",
        )
    sentiment = str(section.get("sentiment", DEFAULT_SENTIMENT)).lower()
    try:
        Sentiment(sentiment)
    except ValueError:
        raise InvalidConfigurationError("perception.sentiment", sentiment, "unknown sentiment")

    initial_heat = _number(section, "initial_heat", DEFAULT_INITIAL_HEAT, "perception")
    if initial_heat < 0:
        raise InvalidConfigurationError("perception.initial_heat", initial_heat, "must be >= 0")

    return PerceptionSettings(
        initial_heat=initial_heat,
        feedback_gain=_number(section, "feedback_gain", DEFAULT_FEEDBACK_GAIN, "perception"),
        heat_schedule=schedule,
        sentiment=sentiment,
    )


def build_stub_settings(section: Mapping[str, Any]) -> StubSettings:
    merged: dict[str, float] = {}
    for key, default in DEFAULT_STUB.items():
        value = _number(section, key, float(default), "stub")
        if value < 0:
            raise InvalidConfigurationError(f"stub.{key}", value, "must be >= 0")
        merged[key] = value
    unknown = set(section) - set(DEFAULT_STUB)
    if unknown:
        raise InvalidConfigurationError("stub", sorted(unknown), "unknown keys")
    return StubSettings(**merged)  # type: ignore[typeddict-item]


def load_run_config(
    config_path: Optional[Path] = None,
    env_path: Optional[Path] = None,
    *,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Load the run configuration.

    Behavior:
        - If env_path is provided, load that .env file with override=True (it overrides OS env).
        - Else, if a .env exists in the current working directory, load it with override=False.
        - Non-secret settings come from the JSON file at config_path (all optional).
        - ``overrides`` holds top-level keys from the command line and wins over the file.

    Secrets (environment only):
        ORACLE_ENDPOINT: Chat-completions URL for remote mode
        ORACLE_API_KEY: Bearer token
        ORACLE_MODEL: Model name

    Returns:
        RunConfig dictionary with all configuration values.

    Raises:
        FileNotFoundError: If an explicit config or env path does not exist.
        InvalidConfigurationError: If a value is out of range.
        MissingCredentialsError: If remote mode is selected without an endpoint.
    """
    _load_env(env_path)
    data = _read_config_file(config_path) if config_path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    oracle_section = dict(_section(data, "oracle"))
    if data.get("oracle_mode"):
        oracle_section["mode"] = data["oracle_mode"]
    oracle = build_oracle_settings(oracle_section)
    if oracle["mode"] == "remote" and not oracle["endpoint"]:
        raise MissingCredentialsError(["ORACLE_ENDPOINT"])

    engagement_section = _section(data, "engagement")
    options = data.get("options") or []
    if isinstance(options, str):
        options = [o for o in options.split(",") if o.strip()]

    return RunConfig(
        oracle=oracle,
        fading=build_fading_config(_section(data, "reasoning")),
        perception=build_perception_settings(_section(data, "perception")),
        stub=build_stub_settings(_section(data, "stub")),
        engagement=EngagementSettings(
            heated=_str_to_bool(engagement_section.get("heated"), default=False),
            strict=_str_to_bool(engagement_section.get("strict"), default=False),
        ),
        use_memory=_str_to_bool(data.get("use_memory"), default=True),
        use_state=_str_to_bool(data.get("use_state"), default=True),
        layer=validate_layer(data.get("layer", DEFAULT_LAYER)),
        horizon=validate_horizon(data.get("horizon", DEFAULT_HORIZON)),
        seeds=validate_seed_list(data.get("seeds", DEFAULT_SEEDS)),
        workers=validate_workers(data.get("workers", DEFAULT_WORKERS)),
        output_dir=str(data.get("output_dir", DEFAULT_OUTPUT_DIR)),
        options=[str(o).strip() for o in options],
    )


def default_run_config() -> RunConfig:
    """Defaults only, no file and no environment lookups."""
    return RunConfig(
        oracle=OracleSettings(
            mode=DEFAULT_ORACLE_MODE,
            endpoint="",
            api_key="",
            model="",
            temperature=DEFAULT_TEMPERATURE,
            timeout=DEFAULT_ORACLE_TIMEOUT,
            max_retries=DEFAULT_MAX_RETRIES,
            max_inflight=DEFAULT_MAX_INFLIGHT,
        ),
        fading=FadingConfig.create(),
        perception=PerceptionSettings(
            initial_heat=DEFAULT_INITIAL_HEAT,
            feedback_gain=DEFAULT_FEEDBACK_GAIN,
            heat_schedule=DEFAULT_HEAT_SCHEDULE,
            sentiment=DEFAULT_SENTIMENT,
        ),
        stub=copy.deepcopy(DEFAULT_STUB),
        engagement=EngagementSettings(heated=False, strict=False),
        use_memory=True,
        use_state=True,
        layer=DEFAULT_LAYER,
        horizon=DEFAULT_HORIZON,
        seeds=list(DEFAULT_SEEDS),
        workers=DEFAULT_WORKERS,
        output_dir=DEFAULT_OUTPUT_DIR,
        options=[],
    )


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    """JSON-ready rendering of a config with the API key masked."""
    oracle = dict(cfg["oracle"])
    oracle["api_key"] = mask_sensitive(oracle["api_key"]) if oracle["api_key"] else ""
    return {
        "oracle": oracle,
        "reasoning": cfg["fading"].to_dict(),
        "perception": dict(cfg["perception"]),
        "stub": dict(cfg["stub"]),
        "engagement": dict(cfg["engagement"]),
        "use_memory": cfg["use_memory"],
        "use_state": cfg["use_state"],
        "layer": cfg["layer"],
        "horizon": cfg["horizon"],
        "seeds": list(cfg["seeds"]),
        "workers": cfg["workers"],
        "output_dir": cfg["output_dir"],
        "options": list(cfg["options"]),
    }
