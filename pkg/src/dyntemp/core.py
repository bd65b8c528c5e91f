"""Distribution primitives: temperature softmax, entropy, sampling, argmax.

Temperature is applied to logits (divide, then softmax with max
subtraction).  Softmax at t=1 is plain softmax; dividing logits by t is
equivalent to raising the t=1 distribution to the 1/t power and
renormalizing, which is the standard reading of temperature-shaped
sampling.
"""

from __future__ import annotations

import numpy as np

from .backend import kernels
from .errors import InvalidInputError

DIST_ATOL = 1e-9


def as_logits(values, vocab_size: int | None = None) -> np.ndarray:
    """Validate and convert to a float64 logit vector."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("logits must be a nonempty 1-d vector")
    if vocab_size is not None and arr.size != vocab_size:
        raise InvalidInputError(f"expected {vocab_size} logits, got {arr.size}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("logits contain non-finite entries")
    return arr


def as_distribution(values) -> np.ndarray:
    """Validate a probability vector: entries in [0,1], sum 1 within 1e-9,
    nonempty support."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("distribution must be a nonempty 1-d vector")
    if not np.isfinite(arr).all() or (arr < 0.0).any() or (arr > 1.0).any():
        raise InvalidInputError("probabilities must be finite and in [0, 1]")
    total = float(arr.sum())
    if abs(total - 1.0) > DIST_ATOL:
        raise InvalidInputError(f"probabilities sum to {total!r}, not 1")
    if not (arr > 0.0).any():
        raise InvalidInputError("distribution has empty support")
    return arr


def check_temperature(t: float) -> float:
    t = float(t)
    if not np.isfinite(t) or t <= 0.0:
        raise InvalidInputError(f"temperature must be positive and finite, got {t!r}")
    return t


def softmax_with_temperature(logits, t: float) -> np.ndarray:
    """probs[i] = exp(logits[i]/t) / sum_j exp(logits[j]/t)."""
    arr = as_logits(logits)
    t = check_temperature(t)
    return kernels.softmax_temperature(arr, t)


def entropy(dist) -> float:
    """Shannon entropy in nats, summed over the nonzero support."""
    return kernels.entropy(as_distribution(dist))


def sample_categorical(dist, rng) -> int:
    """Draw one index with probability probs[i]; advances `rng` by one draw."""
    arr = as_distribution(dist)
    return kernels.sample_index(arr, rng.next_float())


def argmax_token(dist) -> int:
    """Smallest index attaining the maximum probability."""
    arr = as_distribution(dist)
    return int(np.argmax(arr))
