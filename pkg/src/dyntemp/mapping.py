"""Diversity-score -> temperature mappings with mean-score calibration.

Three monotone nonincreasing strategies (plus an identity baseline):

    linear           T(s) = t0 - h*s
    exponential      T(s) = h^s + t0           (h < 1)
    inverse_sigmoid  T(s) = h/(h + e^(s/h)) + t0   (h <= 1)

The offset t0 is chosen so T(s_mean) = 1, where s_mean is the corpus mean
diversity score.  Internally the map is evaluated as
1 + (f(s) - f(s_mean)), which makes T(s_mean) == 1.0 exact in floating
point; t0 = 1 - f(s_mean) is persisted for serialization.  Results clamp
to [t_min, t_max]; the raw map can otherwise go nonpositive, which is not
a valid temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError

STRATEGIES = ("linear", "exponential", "inverse_sigmoid", "identity")

DEFAULT_SHARPNESS = {"linear": 5.0, "exponential": 0.01, "inverse_sigmoid": 0.02}


@dataclass(frozen=True)
class MappingConfig:
    strategy: str = "inverse_sigmoid"
    sharpness: float = 0.02
    t_min: float = 0.05
    t_max: float = 2.0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidInputError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not self.t_min < self.t_max:
            raise InvalidInputError(f"need t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.t_min <= 0.0:
            raise InvalidInputError("t_min must be positive")
        if self.sharpness <= 0.0:
            raise InvalidInputError("sharpness must be positive")
        if self.strategy == "exponential" and self.sharpness >= 1.0:
            raise InvalidInputError("exponential mapping needs sharpness < 1")
        if self.strategy == "inverse_sigmoid" and self.sharpness > 1.0:
            raise InvalidInputError("inverse_sigmoid mapping needs sharpness <= 1")

    @classmethod
    def with_default_sharpness(cls, strategy: str, t_min: float = 0.05, t_max: float = 2.0) -> "MappingConfig":
        return cls(strategy, DEFAULT_SHARPNESS.get(strategy, 1.0), t_min, t_max)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "sharpness": self.sharpness,
            "t_min": self.t_min,
            "t_max": self.t_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MappingConfig":
        return cls(d["strategy"], d["sharpness"], d.get("t_min", 0.05), d.get("t_max", 2.0))


@dataclass(frozen=True)
class MappingCalibration:
    """Mean score of the calibration corpus and the offset that puts the
    mapped temperature at 1 there."""

    s_mean: float
    t0: float

    def to_dict(self) -> dict:
        return {"s_mean": self.s_mean, "t0": self.t0}

    @classmethod
    def from_dict(cls, d: dict) -> "MappingCalibration":
        return cls(d["s_mean"], d["t0"])


def _raw(strategy: str, sharpness: float, s: float) -> float:
    """The uncalibrated, strictly decreasing part of each map."""
    if strategy == "linear":
        return -sharpness * s
    if strategy == "exponential":
        return sharpness**s
    if strategy == "inverse_sigmoid":
        try:
            e = math.exp(s / sharpness)
        except OverflowError:
            e = math.inf
        return sharpness / (sharpness + e)
    return 0.0  # identity


def calibrate(config: MappingConfig, scores: list[float]) -> MappingCalibration:
    """Calibration from a nonempty list of diversity scores in [0, 1]."""
    if len(scores) == 0:
        raise InvalidInputError("cannot calibrate on an empty score list")
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise InvalidInputError(f"diversity scores must be in [0, 1], got {s!r}")
    s_mean = math.fsum(scores) / len(scores)
    t0 = 1.0 - _raw(config.strategy, config.sharpness, s_mean)
    return MappingCalibration(s_mean=s_mean, t0=t0)


def map_score(config: MappingConfig, calib: MappingCalibration, s: float) -> float:
    """Temperature for diversity score `s`, clamped to [t_min, t_max].

    Evaluated relative to the calibration point so map_score(s_mean) is
    exactly 1.0, making the identity strategy and mean-score inputs
    reproduce plain T=1 sampling bit for bit.
    """
    if config.strategy == "identity":
        return 1.0
    t = 1.0 + (
        _raw(config.strategy, config.sharpness, float(s))
        - _raw(config.strategy, config.sharpness, calib.s_mean)
    )
    return min(max(t, config.t_min), config.t_max)
