"""Run configuration: INI-style file plus command-line overrides."""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import DomainError
from .minorant import Minorant


@dataclass(frozen=True)
class RunConfig:
    s: float = 1.0
    minorant: str = "logpower:1,1"
    depth: int = 5
    m_floor: int = 1
    sample_density: int = 4
    max_blocks: int = 64
    aperture: float = 2.0
    star_t: float = 0.1
    quad_tolerance: float = 1e-10
    decay_ratio: float = 0.8
    flat_ratio: float = 0.97
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError("s must be positive")
        if self.depth < 1:
            raise DomainError("depth K must be >= 1")
        if self.m_floor < 0:
            raise DomainError("m_floor must be >= 0")
        if self.sample_density < 1 or self.max_blocks < 2:
            raise DomainError("sample_density >= 1 and max_blocks >= 2 required")
        for name in ("quad_tolerance", "decay_ratio", "flat_ratio", "aperture", "star_t"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.aperture <= 1:
            raise DomainError("aperture must exceed 1")
        if not 0 < self.star_t < 1:
            raise DomainError("star_t must lie in (0, 1)")
        Minorant.parse(self.minorant)

    @property
    def M(self) -> Minorant:
        return Minorant.parse(self.minorant)

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)

    def echo(self) -> dict:
        """Configuration as recorded in reports; the output location is not an input."""
        d = asdict(self)
        d.pop("out")
        return d


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def parse_config_text(text: str) -> RunConfig:
    """Keys may sit in any section; unknown keys are an error."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[run]\n" + text)
    except configparser.Error as exc:
        raise DomainError(f"config parse error: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            key = key.replace("-", "_")
            if key not in _TYPES:
                raise DomainError(f"unknown config key {key!r}")
            try:
                values[key] = _CASTS[_TYPES[key]](raw.strip())
            except ValueError as exc:
                raise DomainError(f"bad value for {key}: {raw!r}") from exc
    return RunConfig(**values)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)
