"""Decoding engine: fixed-temperature and adaptive (score-driven) sampling.

Three temperature modes:

  fixed             every step samples at config.fixed_t
  adaptive_sentence one score per context (hidden state at the context
                    EOS), mapped once to a temperature used for all steps
                    of all samples
  adaptive_token    a fresh score at every step, from the hidden state
                    that produces that step's logits, mapped to that
                    step's temperature

With the identity mapping both adaptive modes return exactly 1.0 per
step, so they reproduce fixed T=1 decoding token for token.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError
from .head import RegressionHeadParams, clamp_score, predict_sentence_score
from .backend import kernels
from .mapping import MappingCalibration, MappingConfig, map_score
from .model import TinyLmParams, context_window, generate
from .rng import RngState
from .truncation import TruncationConfig
from .vocab import EOS_ID, Vocabulary

MODES = ("fixed", "adaptive_sentence", "adaptive_token")


@dataclass(frozen=True)
class DecodeConfig:
    truncation: TruncationConfig = TruncationConfig(kind="none")
    mode: str = "fixed"
    fixed_t: float = 1.0
    mapping: MappingConfig | None = None
    calibration: MappingCalibration | None = None
    max_len: int = 16
    num_samples: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "fixed" and (self.mapping is None or self.calibration is None):
            raise InvalidInputError("adaptive modes require mapping and calibration")
        if self.fixed_t <= 0:
            raise InvalidInputError("fixed_t must be positive")
        if self.num_samples < 1 or self.max_len < 1:
            raise InvalidInputError("num_samples and max_len must be >= 1")

    def to_dict(self) -> dict:
        return {
            "truncation": self.truncation.to_dict(),
            "mode": self.mode,
            "fixed_t": self.fixed_t,
            "mapping": self.mapping.to_dict() if self.mapping else None,
            "calibration": self.calibration.to_dict() if self.calibration else None,
            "max_len": self.max_len,
            "num_samples": self.num_samples,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecodeConfig":
        return cls(
            truncation=TruncationConfig.from_dict(d.get("truncation", {"kind": "none"})),
            mode=d.get("mode", "fixed"),
            fixed_t=d.get("fixed_t", 1.0),
            mapping=MappingConfig.from_dict(d["mapping"]) if d.get("mapping") else None,
            calibration=MappingCalibration.from_dict(d["calibration"]) if d.get("calibration") else None,
            max_len=d.get("max_len", 16),
            num_samples=d.get("num_samples", 5),
            seed=d.get("seed", 0),
        )


@dataclass
class DecodeResult:
    responses: list[str]
    mode: str
    score: float | None = None  # sentence-level diversity score, if any
    temperature: float | None = None  # constant per-context temperature, if any
    traces: list[list[tuple[int, float, float]]] = field(default_factory=list)


def decode_fixed(
    lm: TinyLmParams, vocab: Vocabulary, context: str, config: DecodeConfig, rng: RngState
) -> DecodeResult:
    """num_samples independent generations, all steps at the fixed temperature."""
    t = config.fixed_t
    responses = [
        vocab.decode(
            generate(lm, vocab, context, config.truncation, lambda s, h: t, rng.spawn(i), config.max_len)
        )
        for i in range(config.num_samples)
    ]
    return DecodeResult(responses, "fixed", temperature=t)


def decode_adaptive_sentence(
    lm: TinyLmParams,
    head: RegressionHeadParams,
    vocab: Vocabulary,
    context: str,
    config: DecodeConfig,
    rng: RngState,
) -> DecodeResult:
    """Score the context once; every step of every sample uses the mapped T."""
    s = predict_sentence_score(lm, head, vocab, context)
    t = map_score(config.mapping, config.calibration, s)
    responses = [
        vocab.decode(
            generate(lm, vocab, context, config.truncation, lambda st, h: t, rng.spawn(i), config.max_len)
        )
        for i in range(config.num_samples)
    ]
    return DecodeResult(responses, "adaptive_sentence", score=s, temperature=t)


def decode_adaptive_token(
    lm: TinyLmParams,
    head: RegressionHeadParams,
    vocab: Vocabulary,
    context: str,
    config: DecodeConfig,
    rng: RngState,
) -> DecodeResult:
    """Map a fresh score to a temperature at every generation step."""
    mapping, calib = config.mapping, config.calibration

    def temp_fn(step, hidden):
        s = clamp_score(kernels.head_score(head.w1, head.b1, head.w2, head.b2, hidden))
        return map_score(mapping, calib, s)

    responses = [
        vocab.decode(
            generate(lm, vocab, context, config.truncation, temp_fn, rng.spawn(i), config.max_len)
        )
        for i in range(config.num_samples)
    ]
    return DecodeResult(responses, "adaptive_token")


def decode_context(
    lm: TinyLmParams,
    head: RegressionHeadParams | None,
    vocab: Vocabulary,
    context: str,
    config: DecodeConfig,
    rng: RngState,
) -> DecodeResult:
    if config.mode == "fixed":
        return decode_fixed(lm, vocab, context, config, rng)
    if head is None:
        raise InvalidInputError("adaptive decoding requires a trained head")
    if config.mode == "adaptive_sentence":
        return decode_adaptive_sentence(lm, head, vocab, context, config, rng)
    return decode_adaptive_token(lm, head, vocab, context, config, rng)


def temperature_trace(
    lm: TinyLmParams,
    head: RegressionHeadParams,
    vocab: Vocabulary,
    context: str,
    config: DecodeConfig,
) -> list[tuple[int, float, float]]:
    """Deterministic (step, score, temperature) trace along a greedy prefix.

    Sentence mode yields a single entry; token mode yields one entry per
    greedily generated token, without any sampling involved.
    """
    if config.mode == "fixed":
        raise InvalidInputError("temperature_trace needs an adaptive mode")
    if config.mode == "adaptive_sentence":
        s = predict_sentence_score(lm, head, vocab, context)
        return [(0, s, map_score(config.mapping, config.calibration, s))]

    window = context_window(vocab, lm.window, context).copy()
    trace = []
    for step in range(config.max_len):
        logits, hidden = kernels.forward_step(lm.emb, lm.w_h, lm.b_h, lm.w_o, lm.b_o, window)
        idx = int(logits.argmax())
        if idx == EOS_ID:
            break  # one entry per emitted token; the EOS step emits nothing
        s = clamp_score(kernels.head_score(head.w1, head.b1, head.w2, head.b2, hidden))
        trace.append((step, s, map_score(config.mapping, config.calibration, s)))
        window[:-1] = window[1:]
        window[-1] = idx
    return trace
