"""Preset files: a network config plus gain settings as key-value text.

The format is line-based ``key = value`` with a fixed key order and a
``version`` field, so serialized presets are stable, diffable, and safe
to hand-edit. Parsing is strict: every key must be present exactly once,
unknown keys and versions are errors, and field values go through the
same validation as NetworkConfig construction. ``#`` starts a comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .config import NetworkConfig
from .errors import ConfigurationError, PresetError

PRESET_VERSION = 1

# Serialization order: version, architecture, then engine settings.
_CONFIG_KEYS = [f.name for f in fields(NetworkConfig)]
_ENGINE_KEYS = ["input_gain_db", "output_gain_db", "mix", "dc_blocker"]


@dataclass(frozen=True)
class Preset:
    """Everything needed to reproduce an effect bit-exactly."""

    config: NetworkConfig = NetworkConfig()
    input_gain_db: float = 0.0
    output_gain_db: float = 0.0
    mix: float = 1.0
    dc_blocker: bool = True
    name: str = ""

    def __post_init__(self):
        for field in ("input_gain_db", "output_gain_db", "mix"):
            v = getattr(self, field)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigurationError(f"{field} must be a finite number, got {v!r}")
        if not 0.0 <= self.mix <= 1.0:
            raise ConfigurationError(f"mix must be in [0, 1], got {self.mix}")
        if not isinstance(self.dc_blocker, bool):
            raise ConfigurationError("dc_blocker must be a bool")
        if not isinstance(self.name, str):
            raise ConfigurationError(f"name must be a string, got {self.name!r}")
        norm = self.name.strip()
        if any(c in norm for c in "#\n\r"):
            raise ConfigurationError("name must be a single line without '#'")
        if len(norm) > 100:
            raise ConfigurationError(f"name is too long ({len(norm)} > 100 characters)")
        object.__setattr__(self, "name", norm)


DEFAULT_PRESET = Preset()


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "default"
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


def serialize_preset(preset: Preset) -> str:
    lines = [f"version = {PRESET_VERSION}"]
    for key in _CONFIG_KEYS:
        lines.append(f"{key} = {_format_value(getattr(preset.config, key))}")
    for key in _ENGINE_KEYS:
        lines.append(f"{key} = {_format_value(getattr(preset, key))}")
    lines.append(f"name = {preset.name}".rstrip())
    return "\n".join(lines) + "\n"


def _parse_bool(key: str, raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise PresetError(f"{key} must be true or false, got {raw!r}")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise PresetError(f"{key} must be an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise PresetError(f"{key} must be a number, got {raw!r}") from None


def parse_preset(text: str) -> Preset:
    """Parse preset text; inverse of serialize_preset.

    Raises PresetError for structural problems (bad syntax, unknown or
    duplicate or missing keys, unsupported version) and ConfigurationError
    for values that fail field validation.
    """
    seen: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PresetError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise PresetError(f"line {lineno}: duplicate key {key!r}")
        if not seen and key != "version":
            # version gates interpretation of everything else, so it must
            # come first; future versions are rejected before field parsing
            raise PresetError(f"line {lineno}: first key must be 'version', got {key!r}")
        seen[key] = value

    if "version" not in seen:
        raise PresetError("missing required key 'version'")
    if _parse_int("version", seen.pop("version")) != PRESET_VERSION:
        raise PresetError(f"unsupported preset version; expected {PRESET_VERSION}")

    expected = _CONFIG_KEYS + _ENGINE_KEYS + ["name"]
    for key in expected:
        if key not in seen:
            raise PresetError(f"missing required key {key!r}")
    for key in seen:
        if key not in expected:
            raise PresetError(f"unknown key {key!r}")

    int_keys = {"num_layers", "kernel_size", "dilation_growth", "channel_width",
                "in_channels", "out_channels", "seed"}
    bool_keys = {"depthwise", "use_bias", "dc_blocker"}

    values: dict[str, object] = {}
    for key, raw in seen.items():
        if key in int_keys:
            values[key] = _parse_int(key, raw)
        elif key in bool_keys:
            values[key] = _parse_bool(key, raw)
        elif key == "init_param":
            values[key] = None if raw == "default" else _parse_float(key, raw)
        elif key in ("input_gain_db", "output_gain_db", "mix"):
            values[key] = _parse_float(key, raw)
        else:
            values[key] = raw  # activation, init_scheme

    config = NetworkConfig(**{k: values[k] for k in _CONFIG_KEYS})
    return Preset(config=config, name=str(values["name"]),
                  **{k: values[k] for k in _ENGINE_KEYS})


def load_preset(path) -> Preset:
    with open(path, "r", encoding="utf-8") as f:
        return parse_preset(f.read())


def save_preset(path, preset: Preset) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_preset(preset))
