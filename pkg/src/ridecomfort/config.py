"""Run configuration, loadable from a JSON document.

Example::

    {
      "time_constant": 0.5,
      "filter_orientation": "paper",
      "gravity": 9.80665,
      "thresholds": {"accel_x": 5.0, "lateral_y": 0.75},
      "alignment": {"window_s": 2.0, "turn_rate": 0.1},
      "weights": {"Pothole": 2.0}
    }

Every key is optional; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .alignment import AlignmentParams
from .core import GRAVITY
from .detect import DEFAULT_WEIGHTS, EventKind, Thresholds
from .errors import ConfigError, RideComfortError
from .filtering import FilterParams


@dataclass(frozen=True)
class Config:
    time_constant: float = 0.5
    filter_orientation: str = "paper"
    gravity: float = GRAVITY
    thresholds: Thresholds = field(default_factory=Thresholds)
    alignment: AlignmentParams = field(default_factory=AlignmentParams)
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        try:
            FilterParams(self.time_constant, self.filter_orientation)
        except RideComfortError as exc:
            raise ConfigError(str(exc)) from exc
        if not (math.isfinite(self.gravity) and self.gravity > 0):
            raise ConfigError(f"gravity must be > 0, got {self.gravity}")
        weights = dict(DEFAULT_WEIGHTS)
        for k, v in self.weights.items():
            try:
                kind = EventKind(k)
            except ValueError:
                raise ConfigError(f"unknown event kind in weights: {k!r}") from None
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ConfigError(f"weight for {kind.value} must be >= 0, got {v!r}")
            weights[kind] = float(v)
        object.__setattr__(self, "weights", weights)
        # a single gravity value drives both alignment and gravity removal
        if self.alignment.gravity != self.gravity:
            object.__setattr__(self, "alignment", dataclasses.replace(self.alignment, gravity=self.gravity))

    @property
    def filter_params(self) -> FilterParams:
        return FilterParams(self.time_constant, self.filter_orientation)

    def with_overrides(self, **changes) -> "Config":
        """Copy with top-level fields or threshold fields replaced; ``None`` values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        th_names = {f.name for f in dataclasses.fields(Thresholds)}
        th = {k: changes.pop(k) for k in list(changes) if k in th_names}
        try:
            thresholds = dataclasses.replace(self.thresholds, **th)
            return dataclasses.replace(self, thresholds=thresholds, **changes)
        except RideComfortError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        top = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - top
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(d)
        try:
            if "thresholds" in kwargs:
                kwargs["thresholds"] = _build(Thresholds, kwargs["thresholds"], "thresholds")
            if "alignment" in kwargs:
                section = dict(kwargs["alignment"])
                if "gravity_gate" in section:
                    section["gravity_gate"] = tuple(section["gravity_gate"])
                kwargs["alignment"] = _build(AlignmentParams, section, "alignment")
            return cls(**kwargs)
        except ConfigError:
            raise
        except (RideComfortError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _build(cls, section, name):
    if not isinstance(section, dict):
        raise ConfigError(f"{name} must be an object")
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}")
    return cls(**section)
