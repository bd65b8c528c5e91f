"""Distribution truncation: top-k, top-p (nucleus) and locally typical.

All three keep a subset of the support and renormalize.  "Reaches the
threshold" is implemented as cumulative mass >= p (resp. tau).  When the
kept set is the whole support the input distribution is returned
unchanged.  Temperature shaping happens before truncation; `apply` is the
shape-then-cut pipeline used by every sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .core import as_distribution, as_logits, check_temperature, softmax_with_temperature
from .errors import InvalidInputError

KINDS = ("none", "top_k", "top_p", "typical")


@dataclass(frozen=True)
class TruncationConfig:
    """Which truncation runs after temperature shaping.

    Only the parameter of the active kind is used: k for top_k, p for
    top_p, tau for typical.  Defaults are k=3, p=0.9, tau=0.9.
    """

    kind: str = "none"
    k: int = 3
    p: float = 0.9
    tau: float = 0.9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"truncation kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "top_k" and self.k < 1:
            raise InvalidInputError(f"top_k needs k >= 1, got {self.k}")
        if self.kind == "top_p" and not 0.0 < self.p <= 1.0:
            raise InvalidInputError(f"top_p needs p in (0, 1], got {self.p}")
        if self.kind == "typical" and not 0.0 < self.tau <= 1.0:
            raise InvalidInputError(f"typical needs tau in (0, 1], got {self.tau}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "p": self.p, "tau": self.tau}

    @classmethod
    def from_dict(cls, d: dict) -> "TruncationConfig":
        return cls(**{k: d[k] for k in ("kind", "k", "p", "tau") if k in d})


def truncate_top_k(dist, k: int) -> np.ndarray:
    """Keep the k most probable tokens (ties to the lower index), renormalize."""
    arr = as_distribution(dist)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    return kernels.truncate_top_k(arr, int(k))


def truncate_top_p(dist, p: float) -> np.ndarray:
    """Keep the smallest probability-sorted prefix with cumulative mass >= p."""
    arr = as_distribution(dist)
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"p must be in (0, 1], got {p}")
    return kernels.truncate_top_p(arr, float(p))


def truncate_typical(dist, tau: float) -> np.ndarray:
    """Keep the tokens whose information content is closest to the entropy,
    shortest prefix with cumulative mass >= tau."""
    arr = as_distribution(dist)
    if not 0.0 < tau <= 1.0:
        raise InvalidInputError(f"tau must be in (0, 1], got {tau}")
    return kernels.truncate_typical(arr, float(tau))


def truncate(config: TruncationConfig, dist) -> np.ndarray:
    if config.kind == "none":
        return as_distribution(dist)
    if config.kind == "top_k":
        return truncate_top_k(dist, config.k)
    if config.kind == "top_p":
        return truncate_top_p(dist, config.p)
    return truncate_typical(dist, config.tau)


def apply(config: TruncationConfig, logits, t: float) -> np.ndarray:
    """Temperature softmax followed by the configured truncation."""
    probs = softmax_with_temperature(as_logits(logits), check_temperature(t))
    if config.kind == "none":
        return probs
    return truncate(config, probs)
