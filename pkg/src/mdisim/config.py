"""Sweep configuration files.

The format is INI-style: ``key = value`` lines grouped under ``[section]``
headers, ``#`` or ``;`` comments.  Recognized sections and keys::

    [source]            family, trigger_efficiency, trigger_dark, correlation
    [source.alice]      same keys; overrides [source] for Alice
    [source.bob]        same keys; overrides [source] for Bob
    [channel]           loss_start_db, loss_stop_db, loss_step_db,
                        detector_efficiency, alice_loss_fraction,
                        loss_db_alice, loss_db_bob
    [detector]          dark_rate
    [protocol]          misalignment, mu, mu_prime_start, mu_prime_stop,
                        mu_prime_step, f_ec
    [numerics]          cutoff, tail_tolerance
    [output]            path

Losses are total Alice-to-Bob losses split between the arms by
``alice_loss_fraction`` (0.5 puts the relay in the middle).  The explicit
per-arm keys ``loss_db_alice``/``loss_db_bob`` override the split for the
``point`` command.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DomainError, MDISimError
from .sources import DEFAULT_CUTOFF, DEFAULT_TAIL_TOL, SourceSpec

_SOURCE_KEYS = {
    "family": str,
    "trigger_efficiency": float,
    "trigger_dark": float,
    "correlation": float,
}

_SCHEMA = {
    "channel": {
        "loss_start_db": float, "loss_stop_db": float, "loss_step_db": float,
        "detector_efficiency": float, "alice_loss_fraction": float,
        "loss_db_alice": float, "loss_db_bob": float,
    },
    "detector": {"dark_rate": float},
    "protocol": {
        "misalignment": float, "mu": float, "mu_prime_start": float,
        "mu_prime_stop": float, "mu_prime_step": float, "f_ec": float,
    },
    "numerics": {"cutoff": int, "tail_tolerance": float},
    "output": {"path": str},
}


def frange(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid, rounded so repeated runs agree bit for bit."""
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


@dataclass(frozen=True)
class SweepConfig:
    source_a: SourceSpec = field(default_factory=lambda: SourceSpec("weak-coherent"))
    source_b: SourceSpec = field(default_factory=lambda: SourceSpec("weak-coherent"))
    loss_start_db: float = 0.0
    loss_stop_db: float = 80.0
    loss_step_db: float = 1.0
    detector_efficiency: float = 1.0
    alice_loss_fraction: float = 0.5
    loss_db_alice: Optional[float] = None
    loss_db_bob: Optional[float] = None
    dark_rate: float = 3e-6
    misalignment: float = 0.015
    mu: float = 0.05
    mu_prime_start: float = 0.1
    mu_prime_stop: float = 1.0
    mu_prime_step: float = 0.01
    f_ec: float = 1.16
    cutoff: int = DEFAULT_CUTOFF
    tail_tolerance: float = DEFAULT_TAIL_TOL
    path: Optional[str] = None

    def __post_init__(self):
        if not self.loss_step_db > 0:
            raise ConfigError("channel.loss_step_db must be > 0")
        if self.loss_start_db < 0 or self.loss_stop_db < self.loss_start_db:
            raise ConfigError("channel: need 0 <= loss_start_db <= loss_stop_db")
        if not 0 < self.detector_efficiency <= 1:
            raise ConfigError("channel.detector_efficiency must lie in (0, 1]")
        if not 0 <= self.alice_loss_fraction <= 1:
            raise ConfigError("channel.alice_loss_fraction must lie in [0, 1]")
        for name in ("loss_db_alice", "loss_db_bob"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"channel.{name} must be >= 0")
        if not 0 <= self.dark_rate < 1:
            raise ConfigError("detector.dark_rate must lie in [0, 1)")
        if not 0 <= self.misalignment <= 1:
            raise ConfigError("protocol.misalignment must lie in [0, 1]")
        if not self.mu_prime_step > 0:
            raise ConfigError("protocol.mu_prime_step must be > 0")
        if self.mu_prime_stop < self.mu_prime_start:
            raise ConfigError("protocol: need mu_prime_start <= mu_prime_stop")
        if not 0 <= self.mu < self.mu_prime_start:
            raise ConfigError("protocol: need 0 <= mu < mu_prime_start")
        if not self.f_ec >= 1:
            raise ConfigError("protocol.f_ec must be >= 1")
        if not 0 <= self.cutoff <= 64:
            raise ConfigError("numerics.cutoff must lie in [0, 64]")
        if not 0 < self.tail_tolerance < 1:
            raise ConfigError("numerics.tail_tolerance must lie in (0, 1)")

    @property
    def losses(self) -> tuple[float, ...]:
        return frange(self.loss_start_db, self.loss_stop_db, self.loss_step_db)

    @property
    def mu_prime_grid(self) -> tuple[float, ...]:
        return frange(self.mu_prime_start, self.mu_prime_stop, self.mu_prime_step)


def _line_numbers(text: str) -> dict[tuple[str, str], int]:
    lines = {}
    section = ""
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
        elif "=" in s and not s.startswith(("#", ";")):
            lines.setdefault((section, s.split("=", 1)[0].strip()), no)
    return lines


def parse_config(text: str, source: str = "<config>") -> SweepConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    lines = _line_numbers(text)

    def where(section, key):
        no = lines.get((section, key))
        return f"{source}:{no}: [{section}] {key}" if no else f"{source}: [{section}] {key}"

    def convert(section, key, kind):
        raw = parser.get(section, key)
        try:
            return kind(raw)
        except ValueError:
            raise ConfigError(f"{where(section, key)}: cannot read {raw!r} as "
                              f"{kind.__name__}") from None

    known = {"source", "source.alice", "source.bob", *_SCHEMA}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"{source}: unknown section [{section}]")
        allowed = _SOURCE_KEYS if section.startswith("source") else _SCHEMA[section]
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"{where(section, key)}: unknown key")

    common = {}
    if parser.has_section("source"):
        common = {k: convert("source", k, t) for k, t in _SOURCE_KEYS.items()
                  if parser.has_option("source", k)}
    specs = []
    for side in ("source.alice", "source.bob"):
        kw = dict(common)
        if parser.has_section(side):
            kw.update({k: convert(side, k, t) for k, t in _SOURCE_KEYS.items()
                       if parser.has_option(side, k)})
        if "family" not in kw:
            raise ConfigError(f"{source}: no source family given for {side.split('.')[1]}")
        try:
            specs.append(SourceSpec(**kw))
        except DomainError as exc:
            raise ConfigError(f"{source}: [{side}] {exc}") from None

    kw = {}
    for section, keys in _SCHEMA.items():
        for key, kind in keys.items():
            if parser.has_option(section, key):
                kw[key] = convert(section, key, kind)
    try:
        return SweepConfig(source_a=specs[0], source_b=specs[1], **kw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def dump_config(cfg: SweepConfig) -> str:
    """Canonical text form; ``parse_config(dump_config(c)) == c``."""
    out = []
    for section, spec in (("source.alice", cfg.source_a), ("source.bob", cfg.source_b)):
        out.append(f"[{section}]")
        out += [f"{f.name} = {_fmt(getattr(spec, f.name))}" for f in fields(spec)]
        out.append("")
    for section, keys in _SCHEMA.items():
        body = [f"{k} = {_fmt(getattr(cfg, k))}" for k in keys if getattr(cfg, k) is not None]
        if body:
            out += [f"[{section}]", *body, ""]
    return "\n".join(out)


def with_overrides(cfg: SweepConfig, **changes) -> SweepConfig:
    try:
        return replace(cfg, **changes)
    except MDISimError as exc:
        raise ConfigError(str(exc)) from None
