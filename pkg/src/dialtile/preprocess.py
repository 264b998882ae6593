"""Tokenization, stop-word filtering, and grouping utterances into spans.

Spans are the units over which lexical scores are computed: a greedy
left-to-right pass groups whole utterances so that each span's token count
lands as close as possible to a target ``w``. Span sizing counts ALL tokens
(stop words included); scoring later uses only the content tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Utterance
from .stemmer import porter_stem
from .stopwords import STOPWORDS

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Trailing wrappers ignored when checking whether an utterance ends with '?'.
_TRAILING_WRAPPERS = "\"'’”)]}»"


@dataclass(frozen=True)
class PreprocessOptions:
    stemming: bool = False
    stopwords: frozenset[str] = STOPWORDS


@dataclass(frozen=True)
class TokenizedUtterance:
    utterance_index: int
    speaker: str
    tokens: tuple[str, ...]
    content_tokens: tuple[str, ...]
    ends_with_question: bool


def ends_with_question(text: str) -> bool:
    """True iff the text, trimmed of trailing quotes/parentheses, ends in '?'."""
    return text.rstrip().rstrip(_TRAILING_WRAPPERS).rstrip().endswith("?")


def tokenize(utterance: Utterance, options: PreprocessOptions = PreprocessOptions()) -> TokenizedUtterance:
    """Lowercase and split on non-alphanumeric characters ("don't" -> "don", "t")."""
    tokens = tuple(_TOKEN_RE.findall(utterance.text.lower()))
    content = [tok for tok in tokens if tok not in options.stopwords]
    if options.stemming:
        content = [porter_stem(tok) for tok in content]
    return TokenizedUtterance(
        utterance_index=utterance.index,
        speaker=utterance.speaker,
        tokens=tokens,
        content_tokens=tuple(content),
        ends_with_question=ends_with_question(utterance.text),
    )


@dataclass(frozen=True)
class Span:
    """A contiguous utterance group of roughly ``w`` tokens."""

    span_index: int
    first: int
    last: int
    token_count: int
    content_tokens: tuple[str, ...]
    speaker_counts: Mapping[str, int]


def build_spans(tokenized: Sequence[TokenizedUtterance], w: int) -> tuple[Span, ...]:
    """Greedy grouping: close the current span before adding the next utterance
    whenever doing so leaves the token count at least as close to ``w``."""
    if not tokenized:
        raise ValueError("cannot build spans from an empty document")
    if w < 1:
        raise ValueError(f"span target w must be >= 1, got {w}")

    groups: list[list[TokenizedUtterance]] = []
    current: list[TokenizedUtterance] = []
    count = 0
    for tu in tokenized:
        if current and abs(count - w) <= abs(count + len(tu.tokens) - w):
            groups.append(current)
            current = []
            count = 0
        current.append(tu)
        count += len(tu.tokens)
    groups.append(current)

    spans = []
    for idx, group in enumerate(groups):
        speaker_counts: dict[str, int] = {}
        content: list[str] = []
        for tu in group:
            content.extend(tu.content_tokens)
            if tu.speaker:
                speaker_counts[tu.speaker] = speaker_counts.get(tu.speaker, 0) + 1
        spans.append(
            Span(
                span_index=idx,
                first=group[0].utterance_index,
                last=group[-1].utterance_index,
                token_count=sum(len(tu.tokens) for tu in group),
                content_tokens=tuple(content),
                speaker_counts=speaker_counts,
            )
        )
    return tuple(spans)


def series_index_by_utterance_gap(spans: Sequence[Span]) -> dict[int, int]:
    """Map utterance gap -> index into a per-span-gap score series.

    Span gap ``i`` (between spans ``i - 1`` and ``i``) sits at utterance gap
    ``spans[i].first`` and is stored at series index ``i - 1``. Utterance gaps
    that fall inside a span have no series position and are absent.
    """
    return {spans[i].first: i - 1 for i in range(1, len(spans))}
