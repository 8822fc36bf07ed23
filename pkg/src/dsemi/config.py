"""Run configuration: a plain key = value file with exact decimal strings."""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigInvalid

PRECISION_ENV = "DSEMI_PRECISION"

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _decimal(key: str, value: str) -> str:
    if not _DECIMAL.match(value):
        raise ConfigInvalid(f"{key}: expected a decimal string, got {value!r}")
    return value


def _int(key: str, value: str, lo: int = 0) -> int:
    try:
        v = int(value)
    except ValueError:
        raise ConfigInvalid(f"{key}: expected an integer, got {value!r}") from None
    if v < lo:
        raise ConfigInvalid(f"{key}: must be >= {lo}")
    return v


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 60
    q: str = "0.5"
    a1: str = "0.1"
    a2: str = "0.2"
    a3: str = "0.3"
    a4: str = "0.4"
    alpha: str = "0.35"
    t: str = "1.3"
    rng_seed: int = 20100
    suites: tuple | None = None
    n_max: int = 3
    orbit_steps: int = 4
    orbit_n: int = 0
    output_path: str | None = None
    source: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def a(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4)

    def canonical(self) -> str:
        """Normalised key = value text; the config hash is taken over this."""
        lines = []
        for f in fields(self):
            if f.name in ("source", "output_path"):
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(v)
            lines.append(f"{f.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def with_precision(self, digits: int | None) -> "RunConfig":
        if digits is None:
            return self
        if digits < 10:
            raise ConfigInvalid("precision_digits must be at least 10")
        return replace(self, precision_digits=digits)


_PARSERS = {
    "precision_digits": lambda k, v: _int(k, v, 10),
    "rng_seed": _int,
    "n_max": lambda k, v: _int(k, v, 2),
    "orbit_steps": _int,
    "orbit_n": _int,
    "output_path": lambda k, v: v or None,
    "suites": lambda k, v: tuple(s.strip() for s in v.split(",") if s.strip()),
}
for _k in ("q", "a1", "a2", "a3", "a4", "alpha", "t"):
    _PARSERS[_k] = _decimal


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
        values[key] = _PARSERS[key](key, value)
    return RunConfig(**values, source=dict(values))


def load_config(path: str | None, precision: int | None = None) -> RunConfig:
    """Read a config file (or the defaults when path is None) and apply precision overrides.

    The environment variable takes effect only when no explicit precision is given.
    """
    if path is None:
        cfg = RunConfig()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from None
    if precision is None and os.environ.get(PRECISION_ENV):
        precision = _int(PRECISION_ENV, os.environ[PRECISION_ENV], 10)
    return cfg.with_precision(precision)
