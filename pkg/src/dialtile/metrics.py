"""Segmentation evaluation: Pk error, boundary F1, and relaxed Fk.

All metrics compare a predicted segmentation against a gold one over the
same document of ``n`` utterances. Boundaries are gap indices in
``[1, n - 1]``; gap ``g`` separates utterance ``g - 1`` from utterance ``g``.

Pk slides a window over the document and counts positions where prediction
and gold disagree on whether the two window ends fall in the same segment
(lower is better). F1 scores exact boundary matches. Fk relaxes matching to
a tolerance of ``k`` utterances with one-to-one pairing (a gold boundary
cannot be matched twice) and weights precision twice as much as recall
(beta = 0.5): proposing wrong boundaries hurts more than missing some.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .errors import CorpusError, MetricError, ParseError


@dataclass(frozen=True)
class Segmentation:
    """A set of predicted or gold boundaries over a document of ``n`` utterances."""

    n: int
    boundaries: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"document size must be >= 1, got n={self.n}")
        previous = 0
        for g in self.boundaries:
            if not 1 <= g <= self.n - 1:
                raise ValueError(f"boundary {g} outside [1, {self.n - 1}]")
            if g <= previous:
                raise ValueError("boundaries must be strictly increasing")
            previous = g

    @classmethod
    def make(cls, n: int, boundaries: Iterable[int]) -> "Segmentation":
        return cls(n=n, boundaries=tuple(sorted(set(boundaries))))

    @property
    def segment_count(self) -> int:
        return len(self.boundaries) + 1


@dataclass(frozen=True)
class MatchDiagnostics:
    matched: int
    unmatched_pred: int
    unmatched_gold: int
    pairs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class EvalReport:
    pk: float
    f1: float
    fk: Mapping[int, float]
    diagnostics: Mapping[int, MatchDiagnostics] = field(default_factory=dict)
    doc_id: str | None = None
    n_docs: int = 1


def _check_pair(gold: Segmentation, pred: Segmentation) -> None:
    if gold.n != pred.n:
        raise MetricError(f"gold and prediction disagree on n: {gold.n} != {pred.n}")
    if gold.n < 2:
        raise MetricError("metrics are undefined for documents of fewer than 2 utterances")


def default_pk_window(gold: Segmentation) -> int:
    """Half the average gold segment length, never below 2."""
    return max(2, round(gold.n / (2 * gold.segment_count)))


def pk_score(gold: Segmentation, pred: Segmentation, window: int | None = None) -> float:
    _check_pair(gold, pred)
    if window is None:
        window = default_pk_window(gold)
    if window < 1:
        raise MetricError(f"pk window must be >= 1, got {window}")
    pairs = gold.n - window
    if pairs <= 0:
        return 0.0

    def segment_ids(seg: Segmentation) -> list[int]:
        return [bisect_right(seg.boundaries, i) for i in range(seg.n)]

    gid = segment_ids(gold)
    pid = segment_ids(pred)
    disagreements = 0
    for i in range(pairs):
        if (gid[i] == gid[i + window]) != (pid[i] == pid[i + window]):
            disagreements += 1
    return disagreements / pairs


def _precision_recall(matched: int, n_pred: int, n_gold: int) -> tuple[float, float]:
    if n_pred == 0:
        precision = 1.0 if n_gold == 0 else 0.0
    else:
        precision = matched / n_pred
    if n_gold == 0:
        recall = 1.0 if n_pred == 0 else 0.0
    else:
        recall = matched / n_gold
    return precision, recall


def f1_score(gold: Segmentation, pred: Segmentation) -> float:
    _check_pair(gold, pred)
    matched = len(set(gold.boundaries) & set(pred.boundaries))
    precision, recall = _precision_recall(matched, len(pred.boundaries), len(gold.boundaries))
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def max_boundary_matching(
    gold_boundaries: Sequence[int], pred_boundaries: Sequence[int], k: int
) -> tuple[tuple[int, int], ...]:
    """Maximum one-to-one matching of predictions to gold boundaries within
    tolerance ``k``, via augmenting paths. Returns (pred, gold) pairs."""
    golds = list(gold_boundaries)
    preds = list(pred_boundaries)
    owner: dict[int, int] = {}  # gold position -> pred position

    def try_assign(pi: int, visited: set[int]) -> bool:
        for gi, g in enumerate(golds):
            if gi in visited or abs(preds[pi] - g) > k:
                continue
            visited.add(gi)
            if gi not in owner or try_assign(owner[gi], visited):
                owner[gi] = pi
                return True
        return False

    for pi in range(len(preds)):
        try_assign(pi, set())
    return tuple(sorted((preds[pi], golds[gi]) for gi, pi in owner.items()))


def fk_score(gold: Segmentation, pred: Segmentation, k: int, beta: float = 0.5) -> float:
    """Relaxed F-measure: a prediction within ``k`` utterances of an unused
    gold boundary counts as correct; beta < 1 favours precision."""
    _check_pair(gold, pred)
    if k < 0:
        raise MetricError(f"fk tolerance must be >= 0, got {k}")
    pairs = max_boundary_matching(gold.boundaries, pred.boundaries, k)
    precision, recall = _precision_recall(len(pairs), len(pred.boundaries), len(gold.boundaries))
    b2 = beta * beta
    denominator = b2 * precision + recall
    if denominator == 0:
        return 0.0
    return (1 + b2) * precision * recall / denominator


def match_diagnostics(gold: Segmentation, pred: Segmentation, k: int) -> MatchDiagnostics:
    pairs = max_boundary_matching(gold.boundaries, pred.boundaries, k)
    return MatchDiagnostics(
        matched=len(pairs),
        unmatched_pred=len(pred.boundaries) - len(pairs),
        unmatched_gold=len(gold.boundaries) - len(pairs),
        pairs=pairs,
    )


def evaluate_document(
    gold: Segmentation,
    pred: Segmentation,
    fk_tolerances: Sequence[int] = (1, 2),
    beta: float = 0.5,
    pk_window: int | None = None,
    doc_id: str | None = None,
) -> EvalReport:
    return EvalReport(
        pk=pk_score(gold, pred, window=pk_window),
        f1=f1_score(gold, pred),
        fk={k: fk_score(gold, pred, k, beta=beta) for k in fk_tolerances},
        diagnostics={k: match_diagnostics(gold, pred, k) for k in fk_tolerances},
        doc_id=doc_id,
        n_docs=1,
    )


def aggregate(reports: Sequence[EvalReport]) -> EvalReport:
    """Corpus-level report: unweighted arithmetic mean of per-document metrics."""
    if not reports:
        raise MetricError("cannot aggregate an empty report list")
    keys = set(reports[0].fk)
    if any(set(r.fk) != keys for r in reports):
        raise MetricError("reports carry different fk tolerance sets")
    fk = {k: fmean(r.fk[k] for r in reports) for k in sorted(keys)}
    diagnostics = {
        k: MatchDiagnostics(
            matched=sum(r.diagnostics[k].matched for r in reports),
            unmatched_pred=sum(r.diagnostics[k].unmatched_pred for r in reports),
            unmatched_gold=sum(r.diagnostics[k].unmatched_gold for r in reports),
        )
        for k in sorted(keys)
        if all(k in r.diagnostics for r in reports)
    }
    return EvalReport(
        pk=fmean(r.pk for r in reports),
        f1=fmean(r.f1 for r in reports),
        fk=fk,
        diagnostics=diagnostics,
        doc_id=None,
        n_docs=sum(r.n_docs for r in reports),
    )


# ---------------------------------------------------------------------------
# Boundary-file interchange: JSONL of {doc_id, n, boundaries: [ints]}.
# ---------------------------------------------------------------------------

def write_boundaries_jsonl(segmentations: Mapping[str, Segmentation], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for doc_id in sorted(segmentations):
            seg = segmentations[doc_id]
            handle.write(json.dumps(
                {"doc_id": doc_id, "n": seg.n, "boundaries": list(seg.boundaries)}
            ) + "\n")


def read_boundaries_jsonl(path: str | Path) -> dict[str, Segmentation]:
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"boundary file does not exist: {path}")
    result: dict[str, Segmentation] = {}
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, lineno, f"invalid JSON: {exc.msg}") from exc
            try:
                doc_id = record["doc_id"]
                seg = Segmentation.make(record["n"], record["boundaries"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, lineno, f"bad boundary record: {exc}") from exc
            if doc_id in result:
                raise ParseError(path, lineno, f"duplicate doc_id {doc_id!r}")
            result[doc_id] = seg
    return result
