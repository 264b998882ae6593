"""End-to-end segmentation of one transcript.

Fixed composition order: tokenize, build spans, lexical depth (block
comparison / vocabulary introduction / their combination), then the enabled
features in the order speaker depth, speaker introduction, coreference
smoothing, question suppression, and finally boundary selection. With every
feature disabled the result is exactly the tiling core's output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import SpeakerTable, Transcript
from .features import (
    CorefChain,
    FeatureConfig,
    coref_smooth,
    combine_depth,
    heuristic_chains,
    question_suppress,
    speaker_depth_scores,
    speaker_intro_boost,
)
from .metrics import Segmentation
from .preprocess import (
    PreprocessOptions,
    Span,
    build_spans,
    series_index_by_utterance_gap,
    tokenize,
)
from .tiling import ScoreSeries, TilingConfig, lexical_depth, select_boundaries


@dataclass(frozen=True)
class PipelineResult:
    segmentation: Segmentation
    spans: tuple[Span, ...] = ()
    lexical_depth: ScoreSeries | None = None
    final_depth: ScoreSeries | None = None
    # Whether zeroing post-question gaps changed the selected boundaries
    # (None when the question feature is disabled).
    question_changed_boundaries: bool | None = None
    coref_gaps_modified: int = 0


def segment_transcript(
    transcript: Transcript,
    tiling_config: TilingConfig = TilingConfig(),
    feature_config: FeatureConfig = FeatureConfig(),
    preprocess_options: PreprocessOptions = PreprocessOptions(),
    chains: Sequence[CorefChain] | None = None,
) -> PipelineResult:
    """Segment one transcript. ``chains`` overrides the heuristic coreference
    provider (used when chains come from an annotation file)."""
    tokenized = tuple(tokenize(u, preprocess_options) for u in transcript.utterances)
    spans = build_spans(tokenized, tiling_config.w)
    if len(spans) < 2:
        return PipelineResult(
            segmentation=Segmentation.make(transcript.n, ()), spans=spans
        )

    lex = lexical_depth(tokenized, spans, tiling_config)
    depth = lex
    span_map = series_index_by_utterance_gap(spans)

    if feature_config.speaker_depth:
        speaker = speaker_depth_scores(
            spans,
            tiling_config.k,
            tiling_config.smoothing_window,
            tiling_config.smoothing_rounds,
        )
        depth = combine_depth(depth, speaker, feature_config.depth_weights)

    if feature_config.speaker_intro:
        depth = speaker_intro_boost(
            depth,
            SpeakerTable.from_transcript(transcript),
            span_map,
            feature_config.boost_factor,
        )

    coref_gaps = 0
    if feature_config.coref:
        if chains is None:
            chains = heuristic_chains(transcript.utterances)
        before = depth.values
        depth = coref_smooth(depth, chains, span_map, scale=feature_config.coref_scale)
        coref_gaps = sum(1 for a, b in zip(before, depth.values) if a != b)

    question_changed: bool | None = None
    if feature_config.questions:
        before_selection = select_boundaries(depth, spans, tiling_config.threshold_sigma)
        depth = question_suppress(depth, tokenized, span_map)
        segmentation = select_boundaries(depth, spans, tiling_config.threshold_sigma)
        question_changed = segmentation != before_selection
    else:
        segmentation = select_boundaries(depth, spans, tiling_config.threshold_sigma)

    return PipelineResult(
        segmentation=segmentation,
        spans=spans,
        lexical_depth=lex,
        final_depth=depth,
        question_changed_boundaries=question_changed,
        coref_gaps_modified=coref_gaps,
    )
