"""Dialogue-specific depth-score modifications applied before boundary selection.

Four optional features reshape the lexical depth series:

  * speaker depth (sd): per-speaker turn-proportion change across each gap,
    turned into depth scores and blended with the lexical depth 2:1;
  * speaker introduction (si): the gap before a speaker's first turn gets its
    depth multiplied by a boost factor;
  * questions (q): the gap right after a question is zeroed, on the
    assumption that a topic shift does not directly follow a question;
  * coreference (co): gaps inside a coreference chain are smoothed and
    attenuated, since a shift is unlikely between mentions of one referent.

All features operate on the span-gap score series. A triggering utterance
gap that falls inside a span (no series position) is a no-op for that
trigger. Composition order in the pipeline is fixed: sd, si, co, q.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import SpeakerTable, Utterance
from .errors import CorpusError, ParseError
from .preprocess import Span, TokenizedUtterance
from .stopwords import STOPWORDS
from . import tiling
from .tiling import ScoreSeries

log = logging.getLogger(__name__)

COREF_HEURISTIC = "heuristic"
COREF_FILE = "file"

FEATURE_FLAGS = ("sd", "si", "q", "co")


@dataclass(frozen=True)
class FeatureConfig:
    speaker_depth: bool = False
    speaker_intro: bool = False
    questions: bool = False
    coref: bool = False
    boost_factor: float = 1.5
    depth_weights: tuple[float, float] = (2.0, 1.0)  # lexical : speaker
    coref_source: str = COREF_HEURISTIC
    coref_file: str | None = None
    coref_scale: float = 0.5

    def __post_init__(self):
        if self.boost_factor <= 1:
            raise ValueError(f"boost factor must be > 1, got {self.boost_factor}")
        if any(w <= 0 for w in self.depth_weights):
            raise ValueError(f"depth weights must be > 0, got {self.depth_weights}")
        if self.coref_source not in (COREF_HEURISTIC, COREF_FILE):
            raise ValueError(f"unknown coref source {self.coref_source!r}")
        if self.coref_source == COREF_FILE and not self.coref_file:
            raise ValueError("coref source 'file' requires a chain file path")
        if not 0 < self.coref_scale <= 1:
            raise ValueError(f"coref scale must be in (0, 1], got {self.coref_scale}")

    @property
    def any_enabled(self) -> bool:
        return self.speaker_depth or self.speaker_intro or self.questions or self.coref

    @classmethod
    def from_flags(cls, flags: str, **overrides) -> "FeatureConfig":
        """Build from a comma set like "sd,q". Empty string enables nothing."""
        wanted = {f.strip() for f in flags.split(",") if f.strip()}
        unknown = wanted - set(FEATURE_FLAGS)
        if unknown:
            raise ValueError(f"unknown feature flags: {sorted(unknown)}")
        return cls(
            speaker_depth="sd" in wanted,
            speaker_intro="si" in wanted,
            questions="q" in wanted,
            coref="co" in wanted,
            **overrides,
        )


@dataclass(frozen=True)
class CorefChain:
    """Utterance indices mentioning one referent, first to last.

    Well-formed chains have >= 2 mentions; shorter ones are representable so
    that annotation files can be loaded as-is, and are skipped downstream.
    """

    chain_id: str
    mentions: tuple[int, ...]

    def __post_init__(self):
        if not self.mentions:
            raise ValueError(f"chain {self.chain_id}: no mentions")
        if list(self.mentions) != sorted(set(self.mentions)):
            raise ValueError(f"chain {self.chain_id}: mentions not strictly ascending")


# ---------------------------------------------------------------------------
# Depth-series transformations
# ---------------------------------------------------------------------------

def speaker_intro_boost(
    depth: ScoreSeries,
    speaker_table: SpeakerTable,
    span_map: Mapping[int, int],
    factor: float = 1.5,
) -> ScoreSeries:
    """Multiply the depth at the gap preceding each speaker's first turn."""
    if factor <= 1:
        raise ValueError(f"boost factor must be > 1, got {factor}")
    values = list(depth.values)
    for first_turn in speaker_table.first_appearance.values():
        if first_turn == 0:
            continue  # no gap precedes the first utterance
        j = span_map.get(first_turn)
        if j is not None:
            values[j] *= factor
    return ScoreSeries(tuple(values), depth.kind)


def speaker_depth_scores(
    spans: Sequence[Span],
    k: int,
    smoothing_window: int = 3,
    smoothing_rounds: int = 1,
) -> ScoreSeries:
    """Mean over speakers of the depth of their turn-proportion similarity.

    For speaker ``s`` and gap ``i``, similarity is
    ``1 - |prop_s(left block) - prop_s(right block)|`` with blocks as in
    block comparison and proportions over turns (a block with no turns
    contributes proportion 0). Each speaker's series is smoothed and run
    through the depth computation, then averaged gap by gap.
    """
    if len(spans) < 2:
        raise ValueError("speaker depth needs at least 2 spans")
    speakers = sorted({s for span in spans for s in span.speaker_counts})
    gaps = len(spans) - 1
    if not speakers:
        return ScoreSeries(tuple(0.0 for _ in range(gaps)), "depth")

    turn_prefix: dict[str, list[int]] = {s: [0] for s in speakers}
    total_prefix = [0]
    for span in spans:
        total = 0
        for s in speakers:
            count = span.speaker_counts.get(s, 0)
            turn_prefix[s].append(turn_prefix[s][-1] + count)
            total += count
        total_prefix.append(total_prefix[-1] + total)

    def proportion(s: str, lo: int, hi: int) -> float:
        total = total_prefix[hi] - total_prefix[lo]
        if total == 0:
            return 0.0
        return (turn_prefix[s][hi] - turn_prefix[s][lo]) / total

    m = len(spans)
    per_speaker_depths = []
    for s in speakers:
        sims = []
        for i in range(1, m):
            left = proportion(s, max(0, i - k), i)
            right = proportion(s, i, min(m, i + k))
            sims.append(1.0 - abs(left - right))
        smoothed = tiling.smooth(ScoreSeries(tuple(sims), "lexical"), smoothing_window, smoothing_rounds)
        per_speaker_depths.append(tiling.depth_scores(smoothed).values)

    mean_depth = tuple(
        sum(d[i] for d in per_speaker_depths) / len(per_speaker_depths)
        for i in range(gaps)
    )
    return ScoreSeries(mean_depth, "depth")


def combine_depth(
    lexical_depth: ScoreSeries,
    speaker_depth: ScoreSeries,
    weights: tuple[float, float] = (2.0, 1.0),
) -> ScoreSeries:
    """Weighted mean of the two min-max-normalized series (lexical : speaker).

    A constant input series is not normalizable and contributes 0.
    """
    if len(lexical_depth) != len(speaker_depth):
        raise ValueError(
            f"depth series length mismatch: {len(lexical_depth)} != {len(speaker_depth)}"
        )
    wl, ws = weights
    if wl <= 0 or ws <= 0:
        raise ValueError(f"weights must be > 0, got {weights}")
    lex = tiling.minmax_normalize(lexical_depth)
    spk = tiling.minmax_normalize(speaker_depth)
    values = tuple(
        (wl * a + ws * b) / (wl + ws) for a, b in zip(lex.values, spk.values)
    )
    return ScoreSeries(values, "combined")


def question_suppress(
    depth: ScoreSeries,
    tokenized: Sequence[TokenizedUtterance],
    span_map: Mapping[int, int],
) -> ScoreSeries:
    """Zero the depth at the gap immediately following every question."""
    values = list(depth.values)
    for tu in tokenized:
        if not tu.ends_with_question:
            continue
        j = span_map.get(tu.utterance_index + 1)
        if j is not None:
            values[j] = 0.0
    return ScoreSeries(tuple(values), depth.kind)


def coref_smooth(
    depth: ScoreSeries,
    chains: Sequence[CorefChain],
    span_map: Mapping[int, int],
    scale: float = 0.5,
    window: int = 3,
) -> ScoreSeries:
    """Replace gaps strictly inside each chain by the window-3 moving average
    of the original series over that range, scaled down; overlapping chains
    touch each gap at most once."""
    original = depth.values
    values = list(depth.values)
    modified: set[int] = set()
    for chain in chains:
        if len(chain.mentions) < 2:
            log.warning("skipping malformed coref chain %s (single mention)", chain.chain_id)
            continue
        first, last = chain.mentions[0], chain.mentions[-1]
        indices = [span_map[g] for g in range(first + 1, last + 1) if g in span_map]
        if not indices:
            continue
        window_avg = tiling.smooth(
            ScoreSeries(tuple(original[j] for j in indices), "lexical"), window, 1
        ).values
        for pos, j in enumerate(indices):
            if j not in modified:
                values[j] = window_avg[pos] * scale
                modified.add(j)
    return ScoreSeries(tuple(values), depth.kind)


# ---------------------------------------------------------------------------
# Coreference chain providers
# ---------------------------------------------------------------------------

_THIRD_PERSON_PRONOUNS = frozenset(
    "he him his himself she her hers herself it its itself "
    "they them their theirs themselves".split()
)

_CAPITALIZED_RE = re.compile(r"\b[A-Z][a-zA-Z]*\b")
_WORD_RE = re.compile(r"[A-Za-z']+")

PRONOUN_LOOKBACK = 5


def _candidate_mentions(text: str) -> list[str]:
    """Capitalized words that are neither pronouns nor stop words."""
    out = []
    for word in _CAPITALIZED_RE.findall(text):
        lower = word.lower()
        if lower in _THIRD_PERSON_PRONOUNS or lower in STOPWORDS:
            continue
        out.append(word)
    return out


def heuristic_chains(utterances: Sequence[Utterance]) -> list[CorefChain]:
    """Recency-based pronoun linking.

    A third-person pronoun links to the most recent preceding capitalized
    non-pronoun mention within the last ``PRONOUN_LOOKBACK`` utterances;
    links sharing an antecedent word merge into one chain. Only chains with
    >= 2 mentions are returned, ordered by first mention.
    """
    mentions_by_utt = [_candidate_mentions(u.text) for u in utterances]
    chain_utts: dict[str, set[int]] = {}

    for u, utt in enumerate(utterances):
        has_pronoun = any(
            w.lower().strip("'") in _THIRD_PERSON_PRONOUNS
            for w in _WORD_RE.findall(utt.text)
        )
        if not has_pronoun:
            continue
        for back in range(u - 1, max(-1, u - 1 - PRONOUN_LOOKBACK), -1):
            if mentions_by_utt[back]:
                antecedent = mentions_by_utt[back][-1]
                chain_utts.setdefault(antecedent, set()).update((back, u))
                break

    chains = [
        CorefChain(chain_id=name, mentions=tuple(sorted(utts)))
        for name, utts in chain_utts.items()
        if len(utts) >= 2
    ]
    chains.sort(key=lambda c: (c.mentions[0], c.chain_id))
    return chains


def load_chains_jsonl(path: str | Path) -> dict[str, list[CorefChain]]:
    """Read an annotation sidecar: JSONL of {doc_id, chain_id, mentions}."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"coreference chain file does not exist: {path}")
    chains: dict[str, list[CorefChain]] = {}
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, lineno, f"invalid JSON: {exc.msg}") from exc
            try:
                chain = CorefChain(
                    chain_id=str(record["chain_id"]),
                    mentions=tuple(sorted(set(record["mentions"]))),
                )
                doc_id = record["doc_id"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, lineno, f"bad chain record: {exc}") from exc
            chains.setdefault(doc_id, []).append(chain)
    return chains
