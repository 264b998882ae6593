import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialtile.corpus import SpeakerTable, Transcript, Utterance
from dialtile.features import (
    CorefChain,
    FeatureConfig,
    combine_depth,
    coref_smooth,
    heuristic_chains,
    question_suppress,
    speaker_depth_scores,
    speaker_intro_boost,
)
from dialtile.preprocess import Span, tokenize
from dialtile.tiling import ScoreSeries, minmax_normalize


def singleton_spans(n, speakers=None):
    speakers = speakers or ["S"] * n
    return [
        Span(span_index=i, first=i, last=i, token_count=1,
             content_tokens=(f"t{i}",), speaker_counts={speakers[i]: 1})
        for i in range(n)
    ]


def singleton_map(n):
    return {i: i - 1 for i in range(1, n)}


def transcript_of(speakers, texts=None):
    texts = texts or [f"word{i} thing{i}" for i in range(len(speakers))]
    return Transcript(
        doc_id="t",
        utterances=tuple(
            Utterance(index=i, speaker=s, text=texts[i]) for i, s in enumerate(speakers)
        ),
    )


class TestSpeakerIntroBoost:
    def test_no_new_speakers_leaves_series_unchanged(self):
        transcript = transcript_of(["A"] * 6)
        depth = ScoreSeries((0.1, 0.2, 0.3, 0.4, 0.5), "depth")
        result = speaker_intro_boost(
            depth, SpeakerTable.from_transcript(transcript), singleton_map(6), 1.5
        )
        assert result.values == depth.values

    def test_new_speaker_boosts_preceding_gap(self):
        transcript = transcript_of(["A", "A", "A", "A", "A", "B", "A", "A"])
        depth = ScoreSeries((0.1,) * 4 + (0.4,) + (0.1,) * 2, "depth")
        result = speaker_intro_boost(
            depth, SpeakerTable.from_transcript(transcript), singleton_map(8), 1.5
        )
        assert result.values[4] == pytest.approx(0.6)  # gap 5 precedes utterance 5
        assert result.values[:4] == (0.1,) * 4
        assert result.values[5:] == (0.1,) * 2

    def test_speaker_first_at_utterance_zero_is_ignored(self):
        transcript = transcript_of(["A", "B"])
        depth = ScoreSeries((0.3,), "depth")
        boosted = speaker_intro_boost(
            depth, SpeakerTable.from_transcript(transcript), singleton_map(2), 2.0
        )
        # B's first turn at utterance 1 boosts gap 1; A's at utterance 0 cannot.
        assert boosted.values == (0.6,)

    def test_gap_inside_a_span_is_a_no_op(self):
        transcript = transcript_of(["A", "B", "A", "A"])
        depth = ScoreSeries((0.3,), "depth")
        span_map = {2: 0}  # spans (0-1) and (2-3): gap 1 is mid-span
        result = speaker_intro_boost(
            depth, SpeakerTable.from_transcript(transcript), span_map, 1.5
        )
        assert result.values == depth.values

    def test_double_application_squares_only_boosted_gaps(self):
        transcript = transcript_of(["A", "A", "B", "A"])
        depth = ScoreSeries((0.2, 0.2, 0.2), "depth")
        table = SpeakerTable.from_transcript(transcript)
        once = speaker_intro_boost(depth, table, singleton_map(4), 1.5)
        twice = speaker_intro_boost(once, table, singleton_map(4), 1.5)
        assert twice.values[1] == pytest.approx(0.2 * 1.5 * 1.5)
        assert twice.values[0] == once.values[0] == 0.2

    def test_rejects_factor_at_most_one(self):
        with pytest.raises(ValueError):
            speaker_intro_boost(
                ScoreSeries((0.1,), "depth"),
                SpeakerTable(speakers=(), first_appearance={}),
                {},
                factor=1.0,
            )


class TestSpeakerDepthScores:
    def test_single_speaker_document_is_all_zero(self):
        spans = singleton_spans(5)
        result = speaker_depth_scores(spans, k=2)
        assert result.values == (0.0,) * 4

    def test_uniform_alternation_is_zero_away_from_edges(self):
        # A B A B ...: every full block has proportions 1/2, so interior
        # similarities are constant 1; truncated edge blocks dip.
        spans = singleton_spans(8, speakers=["A", "B"] * 4)
        result = speaker_depth_scores(spans, k=2, smoothing_window=1)
        assert all(v == pytest.approx(0.0) for v in result.values[1:-1])

    def test_half_split_peaks_at_middle_gap(self):
        spans = singleton_spans(4, speakers=["A", "A", "B", "B"])
        result = speaker_depth_scores(spans, k=2, smoothing_window=1)
        # Hand-computed: per-speaker similarities (0.5, 0, 0.5) give depth
        # (0, 0.5, 0) for both speakers.
        assert result.values == (0.0, 0.5, 0.0)
        assert result.values[1] > max(result.values[0], result.values[2])

    def test_narration_only_document_is_all_zero(self):
        spans = [
            Span(span_index=i, first=i, last=i, token_count=1,
                 content_tokens=("x",), speaker_counts={})
            for i in range(4)
        ]
        assert speaker_depth_scores(spans, k=2).values == (0.0,) * 3

    @settings(max_examples=50)
    @given(
        speakers=st.lists(st.sampled_from(["A", "B", "C"]), min_size=2, max_size=14),
        k=st.integers(min_value=1, max_value=4),
    )
    def test_length_and_nonnegativity(self, speakers, k):
        spans = singleton_spans(len(speakers), speakers=speakers)
        result = speaker_depth_scores(spans, k=k)
        assert len(result) == len(spans) - 1
        assert all(v >= 0 for v in result.values)


class TestCombineDepth:
    def test_zero_speaker_series_scales_lexical(self):
        lex = ScoreSeries((0.0, 0.6, 0.3), "depth")
        spk = ScoreSeries((0.0, 0.0, 0.0), "depth")
        combined = combine_depth(lex, spk)
        normalized = minmax_normalize(lex)
        assert combined.values == tuple(pytest.approx(2 * v / 3) for v in normalized.values)

    def test_identical_series_combine_to_themselves(self):
        series = ScoreSeries((0.0, 1.0, 0.25), "depth")
        combined = combine_depth(series, series)
        assert combined.values == minmax_normalize(series).values

    def test_two_to_one_weighting(self):
        lex = ScoreSeries((0.0, 1.0), "depth")
        spk = ScoreSeries((1.0, 0.0), "depth")
        combined = combine_depth(lex, spk)
        assert combined.values == (pytest.approx(1 / 3), pytest.approx(2 / 3))

    def test_length_mismatch_is_an_error(self):
        with pytest.raises(ValueError):
            combine_depth(ScoreSeries((0.1,), "depth"), ScoreSeries((0.1, 0.2), "depth"))

    @settings(max_examples=50)
    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=2, max_size=15))
    def test_constant_speaker_series_preserves_argmax_gaps(self, lex_values):
        lex = ScoreSeries(tuple(lex_values), "depth")
        spk = ScoreSeries((0.5,) * len(lex_values), "depth")
        combined = combine_depth(lex, spk)
        normalized = minmax_normalize(lex)
        top = max(normalized.values)
        expected = {i for i, v in enumerate(normalized.values) if v == top}
        top_combined = max(combined.values)
        assert {i for i, v in enumerate(combined.values) if v == top_combined} == expected


class TestQuestionSuppress:
    def make_tokenized(self, texts):
        return [
            tokenize(Utterance(index=i, speaker="S", text=t)) for i, t in enumerate(texts)
        ]

    def test_no_questions_leaves_series_unchanged(self):
        tokenized = self.make_tokenized(["alpha beta.", "gamma delta.", "epsilon zeta."])
        depth = ScoreSeries((0.4, 0.5), "depth")
        assert question_suppress(depth, tokenized, singleton_map(3)).values == depth.values

    def test_gap_after_question_is_zeroed(self):
        texts = ["alpha.", "beta.", "gamma.", "really, you did?", "delta.", "epsilon."]
        tokenized = self.make_tokenized(texts)
        depth = ScoreSeries((0.4,) * 5, "depth")
        result = question_suppress(depth, tokenized, singleton_map(6))
        assert result.values == (0.4, 0.4, 0.4, 0.0, 0.4)  # gap 4 follows utterance 3

    def test_question_at_final_utterance_is_a_no_op(self):
        tokenized = self.make_tokenized(["alpha.", "beta?"])
        depth = ScoreSeries((0.4,), "depth")
        assert question_suppress(depth, tokenized, singleton_map(2)).values == (0.4,)

    def test_idempotent(self):
        texts = ["alpha?", "beta.", "gamma?", "delta."]
        tokenized = self.make_tokenized(texts)
        depth = ScoreSeries((0.4, 0.5, 0.6), "depth")
        once = question_suppress(depth, tokenized, singleton_map(4))
        twice = question_suppress(once, tokenized, singleton_map(4))
        assert once.values == twice.values


class TestCorefSmooth:
    def test_no_chains_leaves_series_unchanged(self):
        depth = ScoreSeries((0.4, 0.5), "depth")
        assert coref_smooth(depth, [], singleton_map(3)).values == depth.values

    def test_single_mention_chain_is_skipped(self, caplog):
        depth = ScoreSeries((0.4, 0.5), "depth")
        chain = CorefChain(chain_id="x", mentions=(2,))
        with caplog.at_level(logging.WARNING):
            result = coref_smooth(depth, [chain], singleton_map(3))
        assert result.values == depth.values
        assert "malformed" in caplog.text

    def test_constant_interior_is_halved(self):
        depth = ScoreSeries((0.8,) * 5, "depth")
        chain = CorefChain(chain_id="x", mentions=(1, 4))
        result = coref_smooth(depth, [chain], singleton_map(6))
        # interior gaps 2, 3, 4 -> indices 1, 2, 3
        assert result.values == pytest.approx((0.8, 0.4, 0.4, 0.4, 0.8))

    def test_overlapping_chains_touch_each_gap_once(self):
        depth = ScoreSeries((0.1, 0.8, 0.8, 0.8, 0.8, 0.2, 0.3), "depth")
        chains = [
            CorefChain(chain_id="a", mentions=(1, 4)),
            CorefChain(chain_id="b", mentions=(3, 6)),
        ]
        result = coref_smooth(depth, chains, singleton_map(8))
        # chain a: gaps 2-4 averaged over (0.8, 0.8, 0.8) then halved;
        # chain b: gaps 4-6, but gap 4 is already modified, so only 5 and 6
        # change, using averages of the original series (0.8, 0.8, 0.2).
        assert result.values == pytest.approx((0.1, 0.4, 0.4, 0.4, 0.3, 0.25, 0.3))

    def test_chain_outside_span_map_is_a_no_op(self):
        depth = ScoreSeries((0.4,), "depth")
        chain = CorefChain(chain_id="x", mentions=(0, 2))
        result = coref_smooth(depth, [chain], {3: 0})
        assert result.values == depth.values

    def test_chain_validation(self):
        with pytest.raises(ValueError):
            CorefChain(chain_id="x", mentions=())
        with pytest.raises(ValueError):
            CorefChain(chain_id="x", mentions=(3, 1))


class TestHeuristicChains:
    def test_pronoun_links_to_recent_name(self):
        transcript = transcript_of(
            ["", "Monica"], texts=["Rachel enters.", "She searches the room."]
        )
        chains = heuristic_chains(transcript.utterances)
        assert len(chains) == 1
        assert chains[0].mentions == (0, 1)

    def test_no_pronouns_no_chains(self):
        transcript = transcript_of(
            ["A", "B"], texts=["Rachel enters.", "Rachel sits down."]
        )
        assert heuristic_chains(transcript.utterances) == []

    def test_antecedent_outside_lookback_window(self):
        texts = ["Rachel enters."] + ["nothing much happens."] * 5 + ["She searches."]
        transcript = transcript_of([""] * 7, texts=texts)
        assert heuristic_chains(transcript.utterances) == []

    def test_capitalized_stopword_is_not_an_antecedent(self):
        transcript = transcript_of(
            ["", ""], texts=["The door opens.", "She waves."]
        )
        assert heuristic_chains(transcript.utterances) == []

    def test_links_merge_into_maximal_chains(self):
        texts = [
            "Rachel enters.",
            "She looks around.",
            "nothing happens.",
            "Rachel waves.",
            "She smiles.",
        ]
        transcript = transcript_of([""] * 5, texts=texts)
        chains = heuristic_chains(transcript.utterances)
        assert len(chains) == 1
        assert chains[0].mentions == (0, 1, 3, 4)

    def test_deterministic_order(self):
        texts = ["Rachel enters.", "She waves.", "Joey eats.", "He chews."]
        transcript = transcript_of([""] * 4, texts=texts)
        chains = heuristic_chains(transcript.utterances)
        assert [c.mentions for c in chains] == [(0, 1), (2, 3)]


class TestFeatureConfig:
    def test_from_flags(self):
        config = FeatureConfig.from_flags("sd,q")
        assert config.speaker_depth and config.questions
        assert not config.speaker_intro and not config.coref
        assert not FeatureConfig.from_flags("").any_enabled

    def test_unknown_flag_rejected(self):
        with pytest.raises(ValueError):
            FeatureConfig.from_flags("sd,bert")

    def test_validation(self):
        with pytest.raises(ValueError):
            FeatureConfig(boost_factor=1.0)
        with pytest.raises(ValueError):
            FeatureConfig(depth_weights=(2.0, 0.0))
        with pytest.raises(ValueError):
            FeatureConfig(coref_source="file")
        with pytest.raises(ValueError):
            FeatureConfig(coref_scale=0.0)


class TestSeriesPreservation:
    """Every feature preserves series length and non-negativity."""

    @settings(max_examples=50)
    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=3, max_size=12))
    def test_all_features_preserve_length_and_sign(self, values):
        n = len(values) + 1
        depth = ScoreSeries(tuple(values), "depth")
        span_map = singleton_map(n)
        transcript = transcript_of(["A"] * (n - 1) + ["B"])
        tokenized = [tokenize(u) for u in transcript.utterances]

        results = [
            speaker_intro_boost(
                depth, SpeakerTable.from_transcript(transcript), span_map, 1.5
            ),
            question_suppress(depth, tokenized, span_map),
            coref_smooth(depth, [CorefChain("c", (0, n - 1))], span_map),
            combine_depth(depth, ScoreSeries(tuple(values[::-1]), "depth")),
        ]
        for result in results:
            assert len(result) == len(depth)
            assert all(v >= 0 for v in result.values)
