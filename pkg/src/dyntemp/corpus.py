"""Synthetic two-scenario dialogue corpus.

QA examples are attribute lookups over a closed fact table (person ->
place / job / age), so every question has exactly one correct answer and
the knowledge needed at test time is present in the training data.
Chit-chat contexts fan out to several valid replies whose first word
carries the branching and whose tails are near-deterministic phrases.

Pool sizes are derived from the target vocabulary size; everything is a
deterministic function of (spec, seed).
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInputError
from .model import DialogueExample
from .rng import RngState
from .vocab import Vocabulary

QA_TEMPLATES = [
    ("where does {p} live", "in {place}"),
    ("what job does {p} do", "a {job}"),
    ("how old is {p}", "{age} years"),
]

CHITCHAT_TEMPLATES = [
    "i like {topic}",
    "lets talk about {topic}",
    "{topic} is great right",
]

CHITCHAT_REPLIES = [
    "me too {topic} is fun",
    "really i prefer other things",
    "oh that sounds wonderful friend",
    "hmm i do not care for {topic}",
    "tell me more about that please",
    "yes {topic} always cheers me up",
]

AGE_LOW, AGE_HIGH = 18, 97

_SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    qa_templates: int = 3
    chitchat_templates: int = 3
    chitchat_fanout: int = 5
    vocab_size: int = 1100
    train_size: int | None = None  # None: every pair once, QA three times
    valid_size: int = 200
    test_size: int = 1000  # held-out contexts per scenario

    def __post_init__(self):
        if not 1 <= self.qa_templates <= len(QA_TEMPLATES):
            raise InvalidInputError(f"qa_templates must be in 1..{len(QA_TEMPLATES)}")
        if not 1 <= self.chitchat_templates <= len(CHITCHAT_TEMPLATES):
            raise InvalidInputError(f"chitchat_templates must be in 1..{len(CHITCHAT_TEMPLATES)}")
        if not 3 <= self.chitchat_fanout <= len(CHITCHAT_REPLIES):
            raise InvalidInputError(f"chitchat_fanout must be in 3..{len(CHITCHAT_REPLIES)}")
        if self.valid_size < 0 or self.test_size < 1:
            raise InvalidInputError("valid_size must be >= 0 and test_size >= 1")

    def to_dict(self) -> dict:
        return {
            "qa_templates": self.qa_templates,
            "chitchat_templates": self.chitchat_templates,
            "chitchat_fanout": self.chitchat_fanout,
            "vocab_size": self.vocab_size,
            "train_size": self.train_size,
            "valid_size": self.valid_size,
            "test_size": self.test_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticCorpusSpec":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass
class SyntheticCorpus:
    train: list[DialogueExample]
    valid: list[DialogueExample]
    test: list[DialogueExample]
    vocab: Vocabulary


def _glue_words() -> list[str]:
    words: dict[str, None] = {}
    for templates in (QA_TEMPLATES, [(t, "") for t in CHITCHAT_TEMPLATES], [(r, "") for r in CHITCHAT_REPLIES]):
        for ctx, resp in templates:
            for w in (ctx + " " + resp).split():
                if not (w.startswith("{") and w.endswith("}")):
                    words[w] = None
    return list(words)


def _name_pools(spec: SyntheticCorpusSpec, rng: RngState) -> tuple[list[str], ...]:
    """Distinct two-syllable names, partitioned into persons/places/jobs/topics."""
    glue = _glue_words()
    ages = [str(a) for a in range(AGE_LOW, AGE_HIGH + 1)]
    fixed = 4 + len(string.ascii_lowercase) + len(string.digits) + len(glue) + len(ages)
    budget = spec.vocab_size - fixed
    if budget < 40:
        raise InvalidInputError(f"vocab_size {spec.vocab_size} leaves no room for entity pools")
    n_person = int(budget * 0.40)
    n_place = int(budget * 0.15)
    n_job = int(budget * 0.08)
    n_topic = budget - n_person - n_place - n_job

    taken: dict[str, None] = {w: None for w in glue}
    names: list[str] = []
    need = n_person + n_place + n_job + n_topic
    while len(names) < need:
        a = _SYLLABLES[int(rng.next_float() * len(_SYLLABLES))]
        b = _SYLLABLES[int(rng.next_float() * len(_SYLLABLES))]
        name = a + b
        if name not in taken:
            taken[name] = None
            names.append(name)
    persons = names[:n_person]
    places = names[n_person : n_person + n_place]
    jobs = names[n_person + n_place : n_person + n_place + n_job]
    topics = names[n_person + n_place + n_job :]
    return persons, places, jobs, topics, glue, ages


def _shuffle(items: list, rng: RngState) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.next_float() * (i + 1))
        out[i], out[j] = out[j], out[i]
    return out


def build_corpus(spec: SyntheticCorpusSpec, seed: int) -> SyntheticCorpus:
    root = RngState(seed)
    persons, places, jobs, topics, glue, ages = _name_pools(spec, root.spawn(0))
    attr_rng = root.spawn(1)

    facts = {
        p: {
            "place": places[int(attr_rng.next_float() * len(places))],
            "job": jobs[int(attr_rng.next_float() * len(jobs))],
            "age": ages[int(attr_rng.next_float() * len(ages))],
        }
        for p in persons
    }

    qa_pairs: list[DialogueExample] = []
    for p in persons:
        for ctx_t, resp_t in QA_TEMPLATES[: spec.qa_templates]:
            ctx = ctx_t.format(p=p)
            resp = resp_t.format(place=facts[p]["place"], job=facts[p]["job"], age=facts[p]["age"])
            qa_pairs.append(DialogueExample(ctx, resp, "qa"))

    chitchat_contexts: list[str] = []
    cc_pairs: list[DialogueExample] = []
    cc_refs: dict[str, str] = {}
    i = 0
    for topic in topics:
        for t in CHITCHAT_TEMPLATES[: spec.chitchat_templates]:
            ctx = t.format(topic=topic)
            chitchat_contexts.append(ctx)
            variants = [
                CHITCHAT_REPLIES[(i + k) % len(CHITCHAT_REPLIES)].format(topic=topic)
                for k in range(spec.chitchat_fanout)
            ]
            for v in variants:
                cc_pairs.append(DialogueExample(ctx, v, "chitchat"))
            cc_refs[ctx] = variants[0]
            i += 1

    qa_contexts = [ex.context for ex in qa_pairs]
    if len(qa_contexts) < spec.test_size:
        raise InvalidInputError(
            f"only {len(qa_contexts)} distinct qa contexts but test_size={spec.test_size}; raise vocab_size"
        )
    if len(chitchat_contexts) < spec.test_size:
        raise InvalidInputError(
            f"only {len(chitchat_contexts)} distinct chitchat contexts but test_size={spec.test_size}; raise vocab_size"
        )

    # train: every chitchat (context, reply) pair once, every qa pair three
    # times (facts need the exposure), deterministically shuffled
    base = qa_pairs * 3 + cc_pairs
    train = _shuffle(base, root.spawn(2))
    if spec.train_size is not None:
        if spec.train_size < len(base):
            raise InvalidInputError(
                f"train_size={spec.train_size} cannot cover the {len(base)} base pairs"
            )
        extra_rng = root.spawn(3)
        extras = [base[int(extra_rng.next_float() * len(base))] for _ in range(spec.train_size - len(base))]
        train = _shuffle(base + extras, root.spawn(2))

    valid_pool = _shuffle(qa_pairs + cc_pairs, root.spawn(4))
    valid = valid_pool[: spec.valid_size]

    test_qa = _shuffle(qa_pairs, root.spawn(5))[: spec.test_size]
    test_cc_ctx = _shuffle(chitchat_contexts, root.spawn(6))[: spec.test_size]
    test_cc = [DialogueExample(c, cc_refs[c], "chitchat") for c in test_cc_ctx]
    test = test_qa + test_cc

    words: dict[str, None] = {}
    for ch in string.ascii_lowercase + string.digits:
        words[ch] = None
    for w in glue + ages + persons + places + jobs + topics:
        words[w] = None
    vocab = Vocabulary.from_words(list(words))

    return SyntheticCorpus(train=train, valid=valid, test=test, vocab=vocab)


def save_examples(path: str | Path, examples: list[DialogueExample]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(
                json.dumps(
                    {"context": ex.context, "response": ex.response, "scenario": ex.scenario},
                    sort_keys=True,
                )
                + "\n"
            )


def load_examples(path: str | Path) -> list[DialogueExample]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                d = json.loads(line)
                out.append(DialogueExample(d["context"], d["response"], d["scenario"]))
    return out
