"""Flat ``key=value`` configuration with dotted keys.

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

DEFAULTS = {
    "lex.doubly_transitive": None,  # None: bundled list
    "lex.incomplete_verbs": None,
    "lex.call_particles": None,
    "filter.min_score": 0.0,
    "filter.max_unaligned": 1.0,
    "filter.min_one_to_one": 0.0,
    "filter.tree": None,
    "tokens.speaker_m": "<SPKR_M>",
    "tokens.speaker_f": "<SPKR_F>",
    "tokens.listener_m": "<LSTR_M>",
    "tokens.listener_f": "<LSTR_F>",
    "trigger.patterns": None,
}

_FLOAT_KEYS = {"filter.min_score", "filter.max_unaligned", "filter.min_one_to_one"}


class ConfigError(ValueError):
    pass


def _coerce(key: str, value):
    if key not in DEFAULTS:
        raise ConfigError(f"unknown config key {key!r}")
    if value is None:
        return None
    if key in _FLOAT_KEYS:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {value!r}") from None
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{key} must lie in [0, 1], got {value}")
        return value
    value = str(value)
    if not value:
        raise ConfigError(f"{key} must not be empty")
    return value


def parse_config(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        try:
            values[key] = _coerce(key, value.strip())
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path=None, overrides: dict | None = None) -> dict:
    config = dict(DEFAULTS)
    if path is not None:
        with open(path, encoding="utf-8") as f:
            config.update(parse_config(f.read(), str(path)))
    for key, value in (overrides or {}).items():
        if value is not None:
            config[key] = _coerce(key, value)
    return config
