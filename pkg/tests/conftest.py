"""Shared fixtures, hypothesis strategies, and the acceptance summary hook."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from dialtile.corpus import Transcript, Utterance
from dialtile.metrics import Segmentation

WORDS = (
    "wedding dress married bride honeymoon lottery ticket million dollars "
    "jackpot coffee house apartment sofa window monkey duck chicken boat "
    "paddle island doctor museum dinosaur fossil exhibit"
).split()


@st.composite
def segmentations(draw, min_n=2, max_n=30, max_boundaries=8):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    limit = min(max_boundaries, n - 1)
    boundaries = draw(
        st.lists(st.integers(min_value=1, max_value=n - 1), max_size=limit, unique=True)
    )
    return Segmentation.make(n, boundaries)


@st.composite
def segmentation_pairs(draw, min_n=2, max_n=30, max_boundaries=8):
    gold = draw(segmentations(min_n, max_n, max_boundaries))
    limit = min(max_boundaries, gold.n - 1)
    pred_boundaries = draw(
        st.lists(st.integers(min_value=1, max_value=gold.n - 1), max_size=limit, unique=True)
    )
    return gold, Segmentation.make(gold.n, pred_boundaries)


@st.composite
def transcripts(draw, min_n=1, max_n=14):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    utterances = []
    for i in range(n):
        speaker = draw(st.sampled_from(["", "Alice", "Bob", "Carol"]))
        text = " ".join(draw(st.lists(st.sampled_from(WORDS), min_size=1, max_size=6)))
        if draw(st.booleans()):
            text += "?"
        utterances.append(Utterance(index=i, speaker=speaker, text=text))
    boundaries = frozenset(
        draw(st.lists(st.integers(min_value=1, max_value=n - 1), max_size=5, unique=True))
        if n > 1
        else []
    )
    scene_starts = sorted(
        draw(st.sets(st.sampled_from(sorted(boundaries)), max_size=len(boundaries)))
        if boundaries
        else []
    )
    spans = []
    start = 0
    for boundary in scene_starts:
        spans.append((start, boundary - 1))
        start = boundary
    spans.append((start, n - 1))
    return Transcript(
        doc_id=draw(st.sampled_from(["doc-a", "doc-b", "ep_01"])),
        utterances=tuple(utterances),
        gold_boundaries=boundaries,
        scene_spans=tuple(spans),
    )


def make_two_topic_transcript(
    doc_id: str = "synthetic",
    half: int = 20,
    tokens_per_utterance: int = 5,
    seed: int = 0,
    speakers: int = 3,
) -> Transcript:
    """Two vocabulary-disjoint halves; the only gold boundary is the switch.

    Every utterance is a shuffled copy of its half's vocabulary, so blocks
    inside one half always share the full vocabulary.
    """
    rng = random.Random(seed)
    pool = [f"w{seed}x{i}" for i in range(2 * tokens_per_utterance)]
    vocab_a = pool[:tokens_per_utterance]
    vocab_b = pool[tokens_per_utterance:]
    utterances = []
    for i in range(2 * half):
        vocab = list(vocab_a if i < half else vocab_b)
        rng.shuffle(vocab)
        utterances.append(
            Utterance(index=i, speaker=f"S{i % speakers}", text=" ".join(vocab) + ".")
        )
    return Transcript(
        doc_id=doc_id,
        utterances=tuple(utterances),
        gold_boundaries=frozenset({half}),
        scene_spans=((0, half - 1), (half, 2 * half - 1)),
    )


# ---------------------------------------------------------------------------
# Acceptance summary: one pass/fail line per criterion after the run.
# ---------------------------------------------------------------------------

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            report.outcome, report.outcome.upper()
        )
        if name not in _acceptance_results or outcome != "PASS":
            _acceptance_results[name] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_acceptance_results):
        terminalreporter.write_line(f"{_acceptance_results[name]:4s}  {name}")
