"""Story records, tokenization and sentence segmentation.

The benchmark story corpora arrive pre-tokenized (``she did n't intend to buy
anything .``), so whitespace is the primary delimiter. Punctuation glued to a
word (``evening.``, ``"Hi``) is split off so that already-normalized text and
raw text tokenize the same way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInput

SENTENCE_TERMINATORS = frozenset({".", "!", "?"})
CLOSING_QUOTES = frozenset({'"', "'", "''", "”", "’", "`"})

_TRAILING = set(".,!?;:\"')]}”’")
_LEADING = set("\"'([{“‘`")
_WS = re.compile(r"\S+")


@dataclass(frozen=True)
class ConditionedStory:
    """A story ``s`` together with the condition ``c`` it was generated from."""

    id: str
    condition: str
    story: str
    system: str | None = None

    def __post_init__(self):
        if not self.story.strip():
            raise InvalidInput(f"story {self.id!r} is empty")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenizedStory:
    """Word tokens with character offsets into ``text`` plus sentence ranges.

    ``sentences`` holds half-open ``(start, stop)`` token-index ranges that
    partition ``tokens``.
    """

    text: str
    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...] = field(default=())

    @property
    def words(self) -> list[str]:
        return [t.text for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


def _split_chunk(chunk: str, offset: int) -> list[Token]:
    if not any(ch.isalnum() for ch in chunk):
        return [Token(chunk, offset, offset + len(chunk))]
    lead: list[Token] = []
    i, j = 0, len(chunk)
    # peel leading brackets/quotes while a non-punctuation core remains
    while i < j - 1 and chunk[i] in _LEADING:
        lead.append(Token(chunk[i], offset + i, offset + i + 1))
        i += 1
    trail: list[Token] = []
    while j - 1 > i and chunk[j - 1] in _TRAILING:
        if chunk[j - 1] == ".":
            # keep an ellipsis together as one token
            k = j - 1
            while k - 1 > i and chunk[k - 1] == ".":
                k -= 1
            trail.append(Token(chunk[k:j], offset + k, offset + j))
            j = k
        else:
            trail.append(Token(chunk[j - 1], offset + j - 1, offset + j))
            j -= 1
    core = [Token(chunk[i:j], offset + i, offset + j)]
    return lead + core + trail[::-1]


def tokenize(text: str) -> TokenizedStory:
    if not text or not text.strip():
        raise InvalidInput("cannot tokenize empty text")
    tokens: list[Token] = []
    for m in _WS.finditer(text):
        tokens.extend(_split_chunk(m.group(), m.start()))
    words = [t.text for t in tokens]
    return TokenizedStory(text, tuple(tokens), tuple(segment_sentences(words)))


def segment_sentences(tokens: Sequence[str] | Sequence[Token]) -> list[tuple[int, int]]:
    """Split a token list into sentence ranges.

    A sentence ends at a token that is exactly ``.``, ``!`` or ``?``, plus any
    closing quotes right after it. Trailing tokens without a terminator form
    the final sentence. An empty list yields no ranges.
    """
    words = [t.text if isinstance(t, Token) else t for t in tokens]
    ranges = []
    start = 0
    i = 0
    n = len(words)
    while i < n:
        if words[i] in SENTENCE_TERMINATORS:
            i += 1
            while i < n and words[i] in CLOSING_QUOTES:
                i += 1
            ranges.append((start, i))
            start = i
        else:
            i += 1
    if start < n:
        ranges.append((start, n))
    return ranges


def detokenize(tokens: Iterable[str] | TokenizedStory) -> str:
    """Join tokens with single spaces (the corpus normalization)."""
    if isinstance(tokens, TokenizedStory):
        tokens = tokens.words
    return " ".join(tokens)


def normalize(text: str) -> str:
    return detokenize(tokenize(text))


def replace_spans(text: str, tokens: Sequence[Token], replacements: dict[int, str]) -> str:
    """Rewrite selected tokens in place, leaving all other characters untouched."""
    out = []
    pos = 0
    for idx in sorted(replacements):
        tok = tokens[idx]
        out.append(text[pos:tok.start])
        out.append(replacements[idx])
        pos = tok.end
    out.append(text[pos:])
    return "".join(out)
