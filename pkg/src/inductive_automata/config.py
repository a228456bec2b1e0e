"""
Learner and bench configuration.

Both configurations are frozen dataclasses that validate themselves. They can
be built from plain mappings or from a YAML file; command-line flags are
applied on top with with_overrides.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

import yaml

from .constants import (DEFAULT_BENCH_CONFIGS, DEFAULT_BENCH_REPEATS,
                        DEFAULT_BENCH_TIMEOUT_SECS, DEFAULT_CORE_SHRINK,
                        DEFAULT_MAX_REFINEMENTS, DEFAULT_PREFER_SHARP,
                        DEFAULT_RS_STRATEGY, DEFAULT_SAT_BACKEND,
                        DEFAULT_TIMEOUT_SECS, SAT_BACKENDS, TEACHER_KINDS)
from .logger.logger import log_message
from .utils import InductiveAutomataError


class ConfigError(InductiveAutomataError):
    category = "Configuration Error"


class RsStrategy(str, Enum):
    OFF = "off"
    SMALL = "small"
    SHORT = "short"


class CoreShrink(str, Enum):
    OFF = "off"
    ONE_PASS = "one-pass"
    FIXPOINT = "fixpoint"


def _coerce_enum(enum_type, value: Any, name: str):
    # YAML 1.1 reads a bare `off` as false
    if value is False and "off" in {member.value for member in enum_type}:
        value = "off"
    try:
        return enum_type(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_type)
        raise ConfigError(f"{name} must be one of {choices}, got {value!r}") from None


@dataclass(frozen=True)
class LearnerConfig:
    rs_strategy: RsStrategy = RsStrategy(DEFAULT_RS_STRATEGY)
    core_shrink: CoreShrink = CoreShrink(DEFAULT_CORE_SHRINK)
    max_refinements: int = DEFAULT_MAX_REFINEMENTS
    timeout: Optional[float] = DEFAULT_TIMEOUT_SECS
    sat_backend: str = DEFAULT_SAT_BACKEND
    prefer_sharp: bool = DEFAULT_PREFER_SHARP
    check_refinements: bool = False
    refinement_bound: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "rs_strategy", _coerce_enum(RsStrategy, self.rs_strategy, "rs_strategy"))
        object.__setattr__(self, "core_shrink", _coerce_enum(CoreShrink, self.core_shrink, "core_shrink"))
        if not isinstance(self.max_refinements, int) or self.max_refinements < 1:
            raise ConfigError(f"max_refinements must be a positive integer, got {self.max_refinements!r}")
        if self.timeout is not None:
            if float(self.timeout) <= 0:
                raise ConfigError(f"timeout must be positive, got {self.timeout!r}")
            object.__setattr__(self, "timeout", float(self.timeout))
        if self.sat_backend not in SAT_BACKENDS:
            raise ConfigError(f"sat_backend must be one of {', '.join(SAT_BACKENDS)}, got {self.sat_backend!r}")
        if self.refinement_bound is not None and self.refinement_bound < 0:
            raise ConfigError(f"refinement_bound must be non-negative, got {self.refinement_bound!r}")

    @classmethod
    def from_mapping(cls, data: Optional[Mapping[str, Any]]) -> "LearnerConfig":
        data = dict(data or {})
        known = {field.name for field in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown learner settings: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_yaml(cls, path) -> "LearnerConfig":
        data = _load_yaml(path)
        section = data.get("learner", data)
        return cls.from_mapping(section)

    def with_overrides(self, **overrides: Any) -> "LearnerConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})


@dataclass(frozen=True)
class BenchConfig:
    configs: Tuple[str, ...] = DEFAULT_BENCH_CONFIGS
    repeats: int = DEFAULT_BENCH_REPEATS
    timeout: float = DEFAULT_BENCH_TIMEOUT_SECS
    workers: int = 1
    max_refinements: int = DEFAULT_MAX_REFINEMENTS

    def __post_init__(self):
        configs = tuple(self.configs)
        object.__setattr__(self, "configs", configs)
        for entry in configs:
            parse_bench_entry(entry)
        if self.repeats < 1:
            raise ConfigError(f"repeats must be at least 1, got {self.repeats}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def from_yaml(cls, path) -> "BenchConfig":
        data = _load_yaml(path).get("bench", {})
        known = {field.name for field in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown bench settings: {', '.join(unknown)}")
        return cls(**data)

    def with_overrides(self, **overrides: Any) -> "BenchConfig":
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})


def parse_bench_entry(entry: str) -> Tuple[RsStrategy, str]:
    """Split an `rs[:teacher]` bench entry."""
    strategy, _, teacher = entry.partition(":")
    teacher = teacher or "idmat"
    if teacher not in TEACHER_KINDS:
        raise ConfigError(f"unknown teacher {teacher!r} in bench config {entry!r}")
    return _coerce_enum(RsStrategy, strategy, "bench rs strategy"), teacher


def _load_yaml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except (OSError, yaml.YAMLError) as error:
        log_message("error", f"Cannot load configuration {path}: {error}", "load_config", "config")
        raise ConfigError(f"cannot load configuration {path}: {error}") from error
    if not isinstance(data, dict):
        raise ConfigError(f"configuration {path} must be a mapping")
    log_message("debug", f"Loaded configuration from {path}", "load_config", "config", keys=sorted(data))
    return data
