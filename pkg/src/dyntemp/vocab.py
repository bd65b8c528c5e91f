"""Token vocabulary with reserved control tokens and file serialization.

File format: newline-delimited UTF-8, line number == token id, and the
first four lines are the reserved BOS, EOS, PAD, UNK tokens in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInputError

BOS_TOKEN = "<bos>"
EOS_TOKEN = "<eos>"
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
RESERVED = (BOS_TOKEN, EOS_TOKEN, PAD_TOKEN, UNK_TOKEN)

BOS_ID = 0
EOS_ID = 1
PAD_ID = 2
UNK_ID = 3


@dataclass
class Vocabulary:
    """Ordered token set; ids 0..3 are BOS, EOS, PAD, UNK."""

    tokens: list[str]
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.tokens) < 4 or tuple(self.tokens[:4]) != RESERVED:
            raise InvalidInputError(
                f"vocabulary must start with the reserved tokens {RESERVED}"
            )
        self._index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self._index) != len(self.tokens):
            dupes = sorted({t for t in self.tokens if self.tokens.count(t) > 1})
            raise InvalidInputError(f"duplicate tokens in vocabulary: {dupes[:5]}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def id_of(self, token: str) -> int:
        return self._index[token]

    def token_of(self, token_id: int) -> str:
        return self.tokens[token_id]

    @classmethod
    def from_words(cls, words: list[str]) -> "Vocabulary":
        """Vocabulary over `words` plus reserved tokens, input order preserved."""
        seen: dict[str, None] = {}
        for w in words:
            if w not in seen and w not in RESERVED:
                seen[w] = None
        return cls(list(RESERVED) + list(seen))

    def encode_word(self, word: str) -> list[int]:
        """Word id, or character ids for unseen words, UNK for unseen characters."""
        if word in self._index:
            return [self._index[word]]
        return [self._index.get(ch, UNK_ID) for ch in word]

    def encode_text(self, text: str) -> list[int]:
        """Whitespace tokenization; unseen words fall back to characters."""
        ids: list[int] = []
        for word in text.split():
            ids.extend(self.encode_word(word))
        return ids

    def encode_context(self, text: str) -> list[int]:
        """Context encoding: BOS, tokens, then the EOS that closes the context."""
        ids = self.encode_text(text)
        if not ids:
            raise InvalidInputError("context is empty after tokenization")
        return [BOS_ID] + ids + [EOS_ID]

    def encode_response(self, text: str) -> list[int]:
        """Response encoding: tokens followed by the terminating EOS."""
        ids = self.encode_text(text)
        if not ids:
            raise InvalidInputError("response is empty after tokenization")
        return ids + [EOS_ID]

    def decode(self, ids: list[int]) -> str:
        """Space-joined tokens, reserved ids skipped."""
        return " ".join(self.tokens[i] for i in ids if i >= 4)

    def save(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.tokens) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(lines)
