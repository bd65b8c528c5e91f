"""Automatic evaluation metrics.

Accuracy-oriented (QA): BLEU-n with add-one smoothing on zero counts,
ROUGE-1/2/L, bag-of-tokens F1, exact match.  Diversity-oriented
(chit-chat): Distinct-n, n-gram entropy in bits, and self-similarity
(mean pairwise scorer value over the samples for one context, shared
with the labeling aggregation).

Tokens are whitespace units.  Distinct-n and entropy_n pool n-grams over
whatever list of responses the caller passes; the evaluation pipeline
pools the num_samples responses of one context and averages per-context
values over the corpus.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInputError
from .labeling import SimilarityScorer, mean_pairwise_similarity


def _tokens(text) -> list[str]:
    if isinstance(text, str):
        return text.split()
    return list(text)


def _ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def bleu_n(candidate, reference, max_n: int = 4) -> float:
    """Geometric mean of modified n-gram precisions times brevity penalty.

    Zero match counts are add-one smoothed: (m+1)/(c+1).  An empty
    candidate scores 0 by convention.
    """
    cand, ref = _tokens(candidate), _tokens(reference)
    if not ref:
        raise InvalidInputError("reference must be nonempty")
    if not 1 <= max_n <= 4:
        raise InvalidInputError("max_n must be in 1..4")
    if not cand:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_ng = Counter(_ngrams(cand, n))
        ref_ng = Counter(_ngrams(ref, n))
        matches = sum(min(c, ref_ng[g]) for g, c in cand_ng.items())
        total = sum(cand_ng.values())
        if matches == 0:
            precision = (matches + 1.0) / (total + 1.0)
        else:
            precision = matches / total
        log_sum += math.log(precision)
    bp = 1.0 if len(cand) >= len(ref) else math.exp(1.0 - len(ref) / len(cand))
    return bp * math.exp(log_sum / max_n)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rouge(candidate, reference, variant) -> float:
    """ROUGE-1/2 (n-gram overlap F1) or ROUGE-L (LCS F1); variant in {1, 2, "L"}."""
    cand, ref = _tokens(candidate), _tokens(reference)
    if not ref:
        raise InvalidInputError("reference must be nonempty")
    if variant not in (1, 2, "L", "l"):
        raise InvalidInputError(f"rouge variant must be 1, 2 or 'L', got {variant!r}")
    if not cand:
        return 0.0
    if variant in ("L", "l"):
        lcs = _lcs_length(cand, ref)
        return _f1(lcs / len(cand), lcs / len(ref))
    n = int(variant)
    cand_ng = Counter(_ngrams(cand, n))
    ref_ng = Counter(_ngrams(ref, n))
    overlap = sum(min(c, ref_ng[g]) for g, c in cand_ng.items())
    cand_total, ref_total = sum(cand_ng.values()), sum(ref_ng.values())
    if cand_total == 0 or ref_total == 0:
        return 0.0
    return _f1(overlap / cand_total, overlap / ref_total)


def _lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def token_f1(candidate, reference) -> float:
    """Harmonic mean of bag-of-tokens (multiset) precision and recall."""
    cand, ref = _tokens(candidate), _tokens(reference)
    if not ref:
        raise InvalidInputError("reference must be nonempty")
    if not cand:
        return 0.0
    overlap = sum((Counter(cand) & Counter(ref)).values())
    return _f1(overlap / len(cand), overlap / len(ref))


def exact_match(candidate, reference) -> float:
    """1.0 when the token sequences are identical."""
    return 1.0 if _tokens(candidate) == _tokens(reference) else 0.0


def distinct_n(responses, n: int) -> float:
    """Unique n-grams across all responses divided by total n-gram count."""
    if not 1 <= n <= 3:
        raise InvalidInputError("n must be in 1..3")
    all_ngrams: list[tuple[str, ...]] = []
    for r in responses:
        all_ngrams.extend(_ngrams(_tokens(r), n))
    if not all_ngrams:
        return 0.0
    return len(set(all_ngrams)) / len(all_ngrams)


def entropy_n(responses, n: int) -> float:
    """Shannon entropy (bits) of the pooled empirical n-gram distribution."""
    if not 1 <= n <= 3:
        raise InvalidInputError("n must be in 1..3")
    counts = Counter()
    for r in responses:
        counts.update(_ngrams(_tokens(r), n))
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def self_similarity(responses: list[str], scorer: SimilarityScorer) -> float:
    """Mean pairwise similarity of the responses; lower means more diverse."""
    if len(responses) < 2:
        raise InvalidInputError("self_similarity needs at least 2 responses")
    return mean_pairwise_similarity(responses, scorer)


@dataclass
class MetricReport:
    dataset_id: str
    config_id: str
    values: dict[str, float] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        for name, v in self.values.items():
            if not math.isfinite(v):
                raise InvalidInputError(f"metric {name} is not finite")
            if (name.startswith("distinct_") or name == "self_similarity") and not 0.0 <= v <= 1.0:
                raise InvalidInputError(f"metric {name}={v} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "config_id": self.config_id,
            "values": self.values,
            "metadata": self.metadata,
        }

    def save(self, path: str | Path) -> None:
        self.validate()
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "MetricReport":
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(d["dataset_id"], d["config_id"], d["values"], d.get("metadata", {}))


def format_table(rows: list[tuple[str, dict[str, float]]], columns: list[str]) -> str:
    """Aligned text table: one row per decoding strategy, one column per metric."""
    header = ["strategy"] + columns
    body = [[name] + [f"{vals.get(c, float('nan')):.4f}" for c in columns] for name, vals in rows]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"
