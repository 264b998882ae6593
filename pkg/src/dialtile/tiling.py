"""TextTiling core: lexical scores per gap, smoothing, depth scores, boundaries.

For ``m`` spans there are ``m - 1`` span gaps; gap ``i`` separates span
``i - 1`` from span ``i``. A ScoreSeries stores one value per gap, with
``values[j]`` holding the score of span gap ``j + 1``.

Two lexical scores are available. Block comparison measures the overlap of
content-token types between the blocks of ``k`` spans on each side of a gap.
Vocabulary introduction measures how many token occurrences around a gap are
"new", i.e. their type did not occur within the last ``memory`` utterances;
the stored score is ``1 - newness`` so that, like block comparison, low
values signal a topic shift.

Depth scores measure how deep each (smoothed) lexical score sits in its
local valley: scanning outward while values keep rising, ``hl``/``hr`` are
the first peaks reached on each side and the depth is the mean of the two
rises, ``((hl - s) + (hr - s)) / 2``. Gaps whose depth is a local maximum
and clears ``mean - threshold_sigma * stddev`` become boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean, pstdev
from typing import Sequence

from .metrics import Segmentation
from .preprocess import Span, TokenizedUtterance

SERIES_KINDS = ("lexical", "smoothed", "depth", "combined")
SIMILARITIES = ("jaccard", "cosine")
METHODS = ("bc", "vi", "bc+vi")


@dataclass(frozen=True)
class ScoreSeries:
    values: tuple[float, ...]
    kind: str = "lexical"

    def __post_init__(self):
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError("score series contains a non-finite value")
            if v < 0 and self.kind in ("lexical", "depth"):
                raise ValueError(f"{self.kind} score is negative: {v}")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class TilingConfig:
    w: int = 12
    k: int = 6
    memory: int = 20
    smoothing_window: int = 3
    smoothing_rounds: int = 1
    threshold_sigma: float = 0.5
    method: str = "bc"
    similarity: str = "jaccard"

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.memory < 0:
            raise ValueError(f"memory must be >= 0, got {self.memory}")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ValueError(f"smoothing window must be odd >= 1, got {self.smoothing_window}")
        if self.smoothing_rounds < 0:
            raise ValueError(f"smoothing rounds must be >= 0, got {self.smoothing_rounds}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r} (expected one of {METHODS})")
        if self.similarity not in SIMILARITIES:
            raise ValueError(f"unknown similarity {self.similarity!r}")


# ---------------------------------------------------------------------------
# Lexical scores
# ---------------------------------------------------------------------------

def _jaccard(left: Sequence[str], right: Sequence[str]) -> float:
    left_types = set(left)
    right_types = set(right)
    if not left_types or not right_types:
        return 0.0
    inter = len(left_types & right_types)
    union = len(left_types | right_types)
    return inter / union


def _cosine(left: Sequence[str], right: Sequence[str]) -> float:
    counts_l: dict[str, int] = {}
    counts_r: dict[str, int] = {}
    for tok in left:
        counts_l[tok] = counts_l.get(tok, 0) + 1
    for tok in right:
        counts_r[tok] = counts_r.get(tok, 0) + 1
    dot = sum(c * counts_r.get(tok, 0) for tok, c in counts_l.items())
    norm_sq = sum(c * c for c in counts_l.values()) * sum(c * c for c in counts_r.values())
    if norm_sq == 0:
        return 0.0
    # Single sqrt over the exact integer product: proportional blocks score
    # exactly 1.0 instead of accumulating float dust that the depth scan
    # would mistake for relief.
    return dot / math.sqrt(norm_sq)


def block_scores(bags: Sequence[Sequence[str]], k: int, similarity: str = "jaccard") -> tuple[float, ...]:
    """Per-gap block similarity over any sequence of token bags.

    For gap ``i`` the left block is bags ``[max(0, i - k), i - 1]`` and the
    right block is ``[i, min(m - 1, i + k - 1)]``, truncated at the edges.
    """
    if similarity not in SIMILARITIES:
        raise ValueError(f"unknown similarity {similarity!r}")
    score = _jaccard if similarity == "jaccard" else _cosine
    m = len(bags)
    values = []
    for i in range(1, m):
        left: list[str] = []
        for bag in bags[max(0, i - k): i]:
            left.extend(bag)
        right: list[str] = []
        for bag in bags[i: min(m, i + k)]:
            right.extend(bag)
        values.append(score(left, right))
    return tuple(values)


def block_comparison_scores(
    spans: Sequence[Span], k: int, similarity: str = "jaccard"
) -> ScoreSeries:
    """Similarity of the content-token blocks on each side of every span gap."""
    if len(spans) < 2:
        raise ValueError("block comparison needs at least 2 spans")
    return ScoreSeries(
        block_scores([span.content_tokens for span in spans], k, similarity), "lexical"
    )


def occurrence_newness(
    tokenized: Sequence[TokenizedUtterance], memory: int
) -> list[list[bool]]:
    """Per content-token occurrence: is its type absent from the ``memory``
    preceding utterances (and from earlier positions of the same utterance)?"""
    last_seen: dict[str, int] = {}
    flags: list[list[bool]] = []
    for u, tu in enumerate(tokenized):
        seen_here: set[str] = set()
        row = []
        for tok in tu.content_tokens:
            prev = last_seen.get(tok)
            row.append(tok not in seen_here and (prev is None or prev < u - memory))
            seen_here.add(tok)
        flags.append(row)
        for tok in seen_here:
            last_seen[tok] = u
    return flags


def vocab_introduction_scores(
    tokenized: Sequence[TokenizedUtterance],
    spans: Sequence[Span],
    k: int,
    memory: int,
) -> ScoreSeries:
    """1 - (new occurrences / all content occurrences) over the 2k spans
    centred on each gap; an empty interval scores 1 (no evidence of novelty)."""
    if len(spans) < 2:
        raise ValueError("vocabulary introduction needs at least 2 spans")
    if memory < 0:
        raise ValueError(f"memory must be >= 0, got {memory}")
    flags = occurrence_newness(tokenized, memory)
    # Prefix sums over utterances of (new, total) occurrence counts.
    new_prefix = [0]
    total_prefix = [0]
    for row in flags:
        new_prefix.append(new_prefix[-1] + sum(row))
        total_prefix.append(total_prefix[-1] + len(row))

    m = len(spans)
    values = []
    for i in range(1, m):
        first_utt = spans[max(0, i - k)].first
        last_utt = spans[min(m, i + k) - 1].last
        total = total_prefix[last_utt + 1] - total_prefix[first_utt]
        if total == 0:
            values.append(1.0)
            continue
        new = new_prefix[last_utt + 1] - new_prefix[first_utt]
        values.append(1.0 - new / total)
    return ScoreSeries(tuple(values), "lexical")


# ---------------------------------------------------------------------------
# Smoothing, depth, boundary selection
# ---------------------------------------------------------------------------

def smooth(series: ScoreSeries, window: int = 3, rounds: int = 1) -> ScoreSeries:
    """Centered moving average, truncated at the edges, applied ``rounds`` times."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"smoothing window must be odd >= 1, got {window}")
    if rounds < 0:
        raise ValueError(f"smoothing rounds must be >= 0, got {rounds}")
    values = list(series.values)
    half = window // 2
    for _ in range(rounds):
        if window == 1:
            break
        values = [
            fmean(values[max(0, i - half): i + half + 1])
            for i in range(len(values))
        ]
    return ScoreSeries(tuple(values), "smoothed")


def depth_scores(series: ScoreSeries) -> ScoreSeries:
    """Valley depth of every gap: mean rise to the nearest peak on each side.

    The outward scan keeps moving while values are non-decreasing (plateaus
    included) and stops at the first descent or the series edge. A strict
    local maximum therefore has depth 0.
    """
    s = series.values
    out = []
    for i in range(len(s)):
        lpeak = s[i]
        j = i - 1
        while j >= 0 and s[j] >= lpeak:
            lpeak = s[j]
            j -= 1
        rpeak = s[i]
        j = i + 1
        while j < len(s) and s[j] >= rpeak:
            rpeak = s[j]
            j += 1
        out.append(((lpeak - s[i]) + (rpeak - s[i])) / 2.0)
    return ScoreSeries(tuple(out), "depth")


def local_maximum_indices(values: Sequence[float]) -> list[int]:
    """Strict local maxima; a plateau yields its leftmost index. A plateau
    spanning the whole series is not a peak."""
    maxima = []
    n = len(values)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left_ok = i == 0 or values[i - 1] < values[i]
        right_ok = j == n - 1 or values[j + 1] < values[i]
        if left_ok and right_ok and not (i == 0 and j == n - 1):
            maxima.append(i)
        i = j + 1
    return maxima


def select_gap_indices(depth: ScoreSeries, threshold_sigma: float) -> list[int]:
    """Series indices of depth local maxima clearing the cutoff
    ``mean - threshold_sigma * stddev`` (``inf`` disables the cutoff)."""
    candidates = local_maximum_indices(depth.values)
    if not candidates:
        return []
    if math.isinf(threshold_sigma):
        return candidates
    cutoff = fmean(depth.values) - threshold_sigma * pstdev(depth.values)
    return [i for i in candidates if depth.values[i] >= cutoff]


def select_boundaries(
    depth: ScoreSeries, spans: Sequence[Span], threshold_sigma: float = 0.5
) -> Segmentation:
    """Map selected span gaps to utterance gaps (first utterance of the right span)."""
    n_utterances = spans[-1].last + 1
    if len(spans) < 2:
        return Segmentation.make(n_utterances, ())
    if len(depth) != len(spans) - 1:
        raise ValueError(f"depth series length {len(depth)} != {len(spans) - 1} gaps")
    picked = select_gap_indices(depth, threshold_sigma)
    return Segmentation.make(n_utterances, (spans[j + 1].first for j in picked))


# ---------------------------------------------------------------------------
# Method composition
# ---------------------------------------------------------------------------

def minmax_normalize(series: ScoreSeries) -> ScoreSeries:
    """Rescale to [0, 1]; a constant series maps to all zeros."""
    if not series.values:
        return series
    lo = min(series.values)
    hi = max(series.values)
    if hi == lo:
        return ScoreSeries(tuple(0.0 for _ in series.values), series.kind)
    return ScoreSeries(tuple((v - lo) / (hi - lo) for v in series.values), series.kind)


def lexical_depth(
    tokenized: Sequence[TokenizedUtterance],
    spans: Sequence[Span],
    config: TilingConfig,
) -> ScoreSeries:
    """Depth series for the configured method; "bc+vi" averages the two
    min-max-normalized depth series gap by gap."""

    def depth_of(raw: ScoreSeries) -> ScoreSeries:
        return depth_scores(smooth(raw, config.smoothing_window, config.smoothing_rounds))

    if config.method == "bc":
        return depth_of(block_comparison_scores(spans, config.k, config.similarity))
    if config.method == "vi":
        return depth_of(vocab_introduction_scores(tokenized, spans, config.k, config.memory))
    bc = minmax_normalize(depth_of(block_comparison_scores(spans, config.k, config.similarity)))
    vi = minmax_normalize(
        depth_of(vocab_introduction_scores(tokenized, spans, config.k, config.memory))
    )
    return ScoreSeries(
        tuple((b + v) / 2.0 for b, v in zip(bc.values, vi.values)), "combined"
    )
