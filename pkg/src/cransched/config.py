"""Flat ``key = value`` configuration files.

One key per line; ``#`` starts a comment; blank lines are ignored. Network
keys are the :class:`~cransched.network.NetworkConfig` field names. Sweep
files take the same keys plus::

    swept_parameter      U | Z | B | C
    sweep_values         comma-separated positive integers, increasing
    trials               trials per sweep point
    modes                comma-separated subset of hybrid, signal, sched
    solver               exact | greedy (default: exact while every point has
                         at most 20 slots, greedy beyond)
    users_per_cloud      true | false (with swept_parameter = C, num_users
                         is read as users per cloud)
    local_search_passes  greedy local-search passes

Unknown or repeated keys are errors, reported as ``path:line: message``.
"""

from __future__ import annotations

import re
from dataclasses import fields
from pathlib import Path

from .graph import CoordinationMode
from .network import Fading, NetworkConfig

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")

NETWORK_KEYS = tuple(f.name for f in fields(NetworkConfig))
SWEEP_KEYS = ("swept_parameter", "sweep_values", "trials", "modes", "solver",
              "users_per_cloud", "local_search_passes")
_INT_KEYS = {"num_clouds", "num_bs_per_cloud", "num_pz_per_bs", "num_users", "rng_seed",
             "trials", "local_search_passes"}
_REQUIRED = ("num_clouds", "num_bs_per_cloud", "num_pz_per_bs", "num_users")


class ConfigError(ValueError):
    pass


def _parse_bool(text):
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_int_list(text):
    values = [int(x) for x in text.split(",") if x.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of integers")
    return tuple(values)


def _convert(key, raw):
    if key in _INT_KEYS:
        return int(raw)
    if key == "fading":
        return Fading(raw.lower())
    if key == "users_per_cloud":
        return _parse_bool(raw)
    if key == "sweep_values":
        return _parse_int_list(raw)
    if key == "modes":
        return tuple(CoordinationMode(m.strip()) for m in raw.split(",") if m.strip())
    if key in ("swept_parameter", "solver"):
        return raw
    return float(raw)


def parse_text(text: str, source: str = "<config>", allowed=NETWORK_KEYS):
    """Parse into ``{key: (value, line_number)}``."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _LINE.match(stripped)
        if not m:
            raise ConfigError(f"{source}:{lineno}: expected `key = value`, got {line.strip()!r}")
        key, raw = m.group(1), m.group(2)
        if key not in allowed:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            out[key] = (_convert(key, raw), lineno)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return out


def _network_from(entries, source, seed=None):
    missing = [k for k in _REQUIRED if k not in entries]
    if missing:
        raise ConfigError(f"{source}:0: missing required key(s): {', '.join(missing)}")
    kwargs = {k: v for k, (v, _) in entries.items() if k in NETWORK_KEYS}
    if seed is not None:
        kwargs["rng_seed"] = seed
    try:
        return NetworkConfig(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        key = msg.split(" ", 1)[0]
        lineno = entries.get(key, (None, 0))[1]
        raise ConfigError(f"{source}:{lineno}: {msg}") from None


def load_config(path, seed: int | None = None) -> NetworkConfig:
    """Read a network configuration; ``seed`` overrides ``rng_seed``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}:0: cannot read file: {exc.strerror}") from None
    return _network_from(parse_text(text, str(path)), str(path), seed)


def load_sweep_spec(path, seed: int | None = None):
    from .sim import SweepSpec

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}:0: cannot read file: {exc.strerror}") from None
    entries = parse_text(text, str(path), NETWORK_KEYS + SWEEP_KEYS)
    base = _network_from(entries, str(path), seed)
    if "swept_parameter" not in entries or "sweep_values" not in entries:
        raise ConfigError(f"{path}:0: sweep files need swept_parameter and sweep_values")
    kwargs = {k: v for k, (v, _) in entries.items() if k in SWEEP_KEYS}
    try:
        return SweepSpec(base_config=base, **kwargs)
    except ValueError as exc:
        msg = str(exc)
        lineno = entries.get(msg.split(" ", 1)[0], (None, 0))[1]
        raise ConfigError(f"{path}:{lineno}: {msg}") from None
