"""Automatic diversity-score labeling and extreme-score filtering.

For each context the model samples m candidate responses; the label is
the mean pairwise similarity over all m(m-1)/2 unordered pairs.  A high
score means the candidates agree, i.e. the decoding space is narrow.

The default similarity scorer is a deterministic character-n-gram cosine
(n = 1..3 averaged).  Any callable with the same symmetric contract can
be plugged in instead, e.g. a learned sentence embedder.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Protocol

from .errors import InvalidInputError
from .model import DialogueExample, TinyLmParams, generate
from .rng import RngState
from .truncation import TruncationConfig
from .vocab import Vocabulary

# scenario-tagged filter thresholds: drop qa below, chitchat above
QA_MIN_SCORE = 0.6
CHITCHAT_MAX_SCORE = 0.7


class SimilarityScorer(Protocol):
    def __call__(self, a: str, b: str) -> float: ...


def _ngram_counts(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def _cosine(u: Counter, v: Counter) -> float:
    dot = sum(c * v[g] for g, c in u.items())
    if dot == 0:
        return 0.0
    nu = math.sqrt(sum(c * c for c in u.values()))
    nv = math.sqrt(sum(c * c for c in v.values()))
    return dot / (nu * nv)


def ngram_cosine_similarity(a: str, b: str, max_n: int = 3) -> float:
    """Cosine of character n-gram count vectors, averaged over n = 1..max_n.

    Orders where neither string has any n-gram are skipped; if both
    strings are empty the score is 1, if exactly one is empty it is 0.
    """
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    values = []
    for n in range(1, max_n + 1):
        cu, cv = _ngram_counts(a, n), _ngram_counts(b, n)
        if not cu and not cv:
            continue
        values.append(_cosine(cu, cv))
    return sum(values) / len(values) if values else 1.0


def mean_pairwise_similarity(texts: list[str], scorer: SimilarityScorer) -> float:
    """Mean scorer value over unordered pairs, clamped to [0, 1].

    This is the single aggregation used both for labeling and for the
    self-similarity evaluation metric.
    """
    if len(texts) < 2:
        raise InvalidInputError("pairwise similarity needs at least 2 texts")
    pairs = list(combinations(texts, 2))
    total = math.fsum(scorer(a, b) for a, b in pairs)
    return min(max(total / len(pairs), 0.0), 1.0)


@dataclass(frozen=True)
class LabelingConfig:
    """How candidates are sampled for labeling.

    Defaults: m=5 candidates, plain temperature-1 sampling (no
    truncation), so the label reflects the model's unmodified decoding
    space.
    """

    m: int = 5
    sampler: TruncationConfig = TruncationConfig(kind="none")
    temperature: float = 1.0
    max_len: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise InvalidInputError("labeling needs m >= 2 candidates")
        if self.temperature <= 0:
            raise InvalidInputError("labeling temperature must be positive")
        if self.max_len < 1:
            raise InvalidInputError("max_len must be >= 1")

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "sampler": self.sampler.to_dict(),
            "temperature": self.temperature,
            "max_len": self.max_len,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelingConfig":
        return cls(
            m=d.get("m", 5),
            sampler=TruncationConfig.from_dict(d.get("sampler", {"kind": "none"})),
            temperature=d.get("temperature", 1.0),
            max_len=d.get("max_len", 16),
            seed=d.get("seed", 0),
        )


@dataclass
class LabeledExample:
    context: str
    response: str
    scenario: str
    candidates: list[str]
    score: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "context": self.context,
                "response": self.response,
                "scenario": self.scenario,
                "candidates": self.candidates,
                "score": self.score,
            },
            sort_keys=True,
            ensure_ascii=False,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledExample":
        return cls(d["context"], d["response"], d["scenario"], list(d["candidates"]), float(d["score"]))


def score_context(
    lm: TinyLmParams,
    vocab: Vocabulary,
    context: str,
    config: LabelingConfig,
    scorer: SimilarityScorer,
    context_index: int = 0,
) -> tuple[list[str], float]:
    """Sample m candidates and score their mutual similarity.

    Candidate i draws from substream (context_index, i) of the config
    seed, so labeling is reproducible and order-independent across
    contexts.
    """
    base = RngState(config.seed).spawn(context_index)
    fixed_t = lambda step, hidden: config.temperature
    candidates = []
    for i in range(config.m):
        ids = generate(lm, vocab, context, config.sampler, fixed_t, base.spawn(i), config.max_len)
        candidates.append(vocab.decode(ids))
    return candidates, mean_pairwise_similarity(candidates, scorer)


def label_dataset(
    lm: TinyLmParams,
    dataset: list[DialogueExample],
    config: LabelingConfig,
    scorer: SimilarityScorer,
    vocab: Vocabulary,
) -> list[LabeledExample]:
    """Attach candidates and diversity scores to every example, in order."""
    labeled = []
    for i, ex in enumerate(dataset):
        candidates, score = score_context(lm, vocab, ex.context, config, scorer, context_index=i)
        labeled.append(LabeledExample(ex.context, ex.response, ex.scenario, candidates, score))
    return labeled


def filter_extremes(
    labeled: list[LabeledExample],
    qa_min: float = QA_MIN_SCORE,
    chitchat_max: float = CHITCHAT_MAX_SCORE,
) -> list[LabeledExample]:
    """Drop qa examples scoring below `qa_min` and chitchat examples above
    `chitchat_max` (strict inequalities; boundary values are kept)."""
    kept = []
    for ex in labeled:
        if ex.scenario == "qa":
            if ex.score < qa_min:
                continue
        elif ex.scenario == "chitchat":
            if ex.score > chitchat_max:
                continue
        else:
            raise InvalidInputError(f"example has unknown scenario {ex.scenario!r}")
        kept.append(ex)
    return kept


def save_labeled(path: str | Path, labeled: list[LabeledExample]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in labeled:
            f.write(ex.to_json() + "\n")


def load_labeled(path: str | Path) -> list[LabeledExample]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(LabeledExample.from_dict(json.loads(line)))
    return out
