"""Transcript data model, corpus loading, and gold-boundary derivation.

A document is an ordered sequence of entries of two kinds: speech turns and
notes (stage directions, scene annotations). Notes are not part of the
segmentable utterance sequence; they act as boundary markers. Reference
("gold") topic boundaries are derived from two signals:

  * every scene start except the first induces a boundary, and
  * every note induces a boundary at the gap where the note occurred.

Boundary indexing convention, used uniformly across the package: boundary
``g`` separates utterance ``g - 1`` from utterance ``g``, so valid gaps are
``1 .. n - 1`` for a document of ``n`` utterances. Notes at the very start or
end of a document have no valid gap and are dropped; consecutive notes
collapse to a single boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, CorpusError, ParseError

NATIVE_JSONL = "native-jsonl"
CHARACTER_MINING = "character-mining-json"
CORPUS_FORMATS = (NATIVE_JSONL, CHARACTER_MINING)

_NATIVE_KEYS = frozenset({"doc_id", "index", "speaker", "text", "is_note", "scene_id"})


@dataclass(frozen=True)
class Utterance:
    """One speech turn. ``speaker`` is empty for in-scene narration lines."""

    index: int
    speaker: str
    text: str
    is_note: bool = False

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"utterance {self.index}: text is empty")


@dataclass(frozen=True)
class RawEntry:
    """A pre-derivation document entry: a speech turn or a note marker."""

    speaker: str
    text: str
    is_note: bool = False
    scene_id: int = 0


@dataclass(frozen=True)
class Transcript:
    doc_id: str
    utterances: tuple[Utterance, ...]
    gold_boundaries: frozenset[int] = frozenset()
    scene_spans: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id is empty")
        n = len(self.utterances)
        if n == 0:
            raise ValueError(f"{self.doc_id}: no utterances")
        for pos, utt in enumerate(self.utterances):
            if utt.index != pos:
                raise ValueError(f"{self.doc_id}: utterance indices not consecutive at {pos}")
            if utt.is_note:
                raise ValueError(f"{self.doc_id}: note retained in utterance sequence at {pos}")
        bad = [g for g in self.gold_boundaries if not 1 <= g <= n - 1]
        if bad:
            raise ValueError(f"{self.doc_id}: gold boundaries out of range: {sorted(bad)}")
        if not self.scene_spans:
            object.__setattr__(self, "scene_spans", ((0, n - 1),))
        expected_start = 0
        for first, last in self.scene_spans:
            if first != expected_start or last < first:
                raise ValueError(f"{self.doc_id}: scene spans do not partition the document")
            expected_start = last + 1
        if expected_start != n:
            raise ValueError(f"{self.doc_id}: scene spans do not cover the document")
        for first, _ in self.scene_spans[1:]:
            if first not in self.gold_boundaries:
                raise ValueError(f"{self.doc_id}: scene start {first} not a gold boundary")

    @property
    def n(self) -> int:
        return len(self.utterances)


@dataclass(frozen=True)
class SpeakerTable:
    """Distinct speakers of one transcript, in order of first appearance."""

    speakers: tuple[str, ...]
    first_appearance: dict[str, int]

    @classmethod
    def from_transcript(cls, transcript: Transcript) -> "SpeakerTable":
        first: dict[str, int] = {}
        for utt in transcript.utterances:
            if utt.speaker and utt.speaker not in first:
                first[utt.speaker] = utt.index
        return cls(speakers=tuple(first), first_appearance=first)


def derive_gold_boundaries(
    raw_entries: Sequence[RawEntry],
) -> tuple[tuple[Utterance, ...], frozenset[int], tuple[tuple[int, int], ...]]:
    """Strip notes from an entry sequence and derive gold boundaries.

    Returns ``(utterances, gold_boundaries, scene_spans)``. A boundary is
    recorded at the gap preceding the first utterance after each note, and at
    every scene change between consecutive speech turns. Scene spans are runs
    of consecutive utterances sharing a scene id.
    """
    utterances: list[Utterance] = []
    boundaries: set[int] = set()
    scene_spans: list[tuple[int, int]] = []
    pending_note = False
    prev_scene: int | None = None
    scene_start = 0

    for entry in raw_entries:
        if entry.is_note:
            pending_note = True
            continue
        index = len(utterances)
        utterances.append(
            Utterance(index=index, speaker=entry.speaker, text=entry.text)
        )
        if prev_scene is not None and entry.scene_id != prev_scene:
            boundaries.add(index)
            scene_spans.append((scene_start, index - 1))
            scene_start = index
        if pending_note and index > 0:
            boundaries.add(index)
        pending_note = False
        prev_scene = entry.scene_id

    if not utterances:
        raise CorpusError("document contains no speech turns")
    scene_spans.append((scene_start, len(utterances) - 1))
    return tuple(utterances), frozenset(boundaries), tuple(scene_spans)


def _build_transcript(doc_id: str, entries: Sequence[RawEntry]) -> Transcript:
    utterances, boundaries, scene_spans = derive_gold_boundaries(entries)
    return Transcript(
        doc_id=doc_id,
        utterances=utterances,
        gold_boundaries=boundaries,
        scene_spans=scene_spans,
    )


# ---------------------------------------------------------------------------
# native-jsonl: one JSON object per line with keys exactly
# {doc_id, index, speaker, text, is_note, scene_id}; a change of doc_id
# starts a new document; the index field counts entries (notes included)
# within a document, from 0.
# ---------------------------------------------------------------------------

def _parse_native_line(path: Path, lineno: int, line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(path, lineno, f"invalid JSON at column {exc.colno}: {exc.msg}") from exc
    if not isinstance(record, dict):
        raise ParseError(path, lineno, "record is not a JSON object")
    keys = set(record)
    if keys != _NATIVE_KEYS:
        missing = sorted(_NATIVE_KEYS - keys)
        extra = sorted(keys - _NATIVE_KEYS)
        raise ParseError(path, lineno, f"bad keys (missing={missing}, extra={extra})")
    if not isinstance(record["doc_id"], str) or not record["doc_id"]:
        raise ParseError(path, lineno, "doc_id must be a non-empty string")
    if not isinstance(record["index"], int) or isinstance(record["index"], bool):
        raise ParseError(path, lineno, "index must be an integer")
    if not isinstance(record["speaker"], str):
        raise ParseError(path, lineno, "speaker must be a string")
    if not isinstance(record["text"], str) or not record["text"].strip():
        raise ParseError(path, lineno, "text must be a non-empty string")
    if not isinstance(record["is_note"], bool):
        raise ParseError(path, lineno, "is_note must be a boolean")
    if not isinstance(record["scene_id"], int) or isinstance(record["scene_id"], bool):
        raise ParseError(path, lineno, "scene_id must be an integer")
    return record


def load_native_jsonl(path: str | Path) -> list[Transcript]:
    path = Path(path)
    transcripts: list[Transcript] = []
    seen_doc_ids: set[str] = set()
    current_id: str | None = None
    entries: list[RawEntry] = []
    entry_start_line = 1

    def flush():
        if current_id is None:
            return
        try:
            transcripts.append(_build_transcript(current_id, entries))
        except CorpusError as exc:
            raise ParseError(path, entry_start_line, f"document {current_id}: {exc}") from exc

    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = _parse_native_line(path, lineno, line)
            doc_id = record["doc_id"]
            if doc_id != current_id:
                flush()
                if doc_id in seen_doc_ids:
                    raise ParseError(path, lineno, f"doc_id {doc_id!r} repeats non-contiguously")
                seen_doc_ids.add(doc_id)
                current_id = doc_id
                entries = []
                entry_start_line = lineno
            if record["index"] != len(entries):
                raise ParseError(
                    path, lineno,
                    f"index {record['index']} out of order (expected {len(entries)})",
                )
            entries.append(
                RawEntry(
                    speaker=record["speaker"],
                    text=record["text"],
                    is_note=record["is_note"],
                    scene_id=record["scene_id"],
                )
            )
    flush()
    if not transcripts:
        raise CorpusError(f"{path}: no documents found")
    return transcripts


def write_native_jsonl(transcripts: Iterable[Transcript], path: str | Path) -> None:
    """Serialize transcripts so that reloading reproduces them exactly.

    Scene-induced boundaries are encoded by the scene_id column; every other
    gold boundary is encoded as a synthetic note entry before the utterance
    it precedes (original note text is not retained by Transcript).
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for transcript in transcripts:
            scene_of = {}
            for scene_idx, (first, last) in enumerate(transcript.scene_spans):
                for u in range(first, last + 1):
                    scene_of[u] = scene_idx
            scene_starts = {first for first, _ in transcript.scene_spans[1:]}
            index = 0
            for utt in transcript.utterances:
                if utt.index in transcript.gold_boundaries and utt.index not in scene_starts:
                    handle.write(json.dumps({
                        "doc_id": transcript.doc_id,
                        "index": index,
                        "speaker": "",
                        "text": "(note)",
                        "is_note": True,
                        "scene_id": scene_of[utt.index],
                    }) + "\n")
                    index += 1
                handle.write(json.dumps({
                    "doc_id": transcript.doc_id,
                    "index": index,
                    "speaker": utt.speaker,
                    "text": utt.text,
                    "is_note": False,
                    "scene_id": scene_of[utt.index],
                }) + "\n")
                index += 1


# ---------------------------------------------------------------------------
# character-mining-json: the published episode structure, a JSON file holding
# a season ({"episodes": [...]}) or a single episode ({"scenes": [...]}).
# Each scene holds utterances with "speakers" (list) and "transcript". Two
# annotations are read as note markers, both placed BEFORE the utterance that
# carries them:
#   * a non-null "transcript_with_note" differing from "transcript"
#     (also accepted under the key "note"), and
#   * an utterance with no speakers whose whole transcript is bracketed,
#     which is treated as a standalone stage direction.
# ---------------------------------------------------------------------------

def _is_bracketed(text: str) -> bool:
    text = text.strip()
    return len(text) >= 2 and text[0] in "([" and text[-1] in ")]"


def _episode_entries(episode: dict, path: Path) -> list[RawEntry]:
    entries: list[RawEntry] = []
    scenes = episode.get("scenes")
    if not isinstance(scenes, list):
        raise ParseError(path, None, f"episode {episode.get('episode_id')!r} has no scene list")
    for scene_idx, scene in enumerate(scenes):
        for utt in scene.get("utterances", ()):
            text = (utt.get("transcript") or "").strip()
            note = utt.get("transcript_with_note") or utt.get("note")
            if isinstance(note, list):
                note = " ".join(str(part) for part in note)
            has_note = isinstance(note, str) and note.strip() and note.strip() != text
            speakers = [s for s in (utt.get("speakers") or []) if s]
            if has_note:
                entries.append(RawEntry("", note.strip(), is_note=True, scene_id=scene_idx))
            if not text:
                continue
            if not speakers and _is_bracketed(text):
                entries.append(RawEntry("", text, is_note=True, scene_id=scene_idx))
            else:
                entries.append(RawEntry(" & ".join(speakers), text, scene_id=scene_idx))
    return entries


def load_character_mining(path: str | Path) -> list[Transcript]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if "episodes" in data:
        episodes = data["episodes"]
    elif "scenes" in data:
        episodes = [data]
    else:
        raise ParseError(path, None, "neither a season nor an episode object")
    transcripts = []
    for episode in episodes:
        doc_id = episode.get("episode_id") or episode.get("id")
        if not doc_id:
            raise ParseError(path, None, "episode without episode_id")
        entries = _episode_entries(episode, path)
        try:
            transcripts.append(_build_transcript(str(doc_id), entries))
        except CorpusError as exc:
            raise ParseError(path, None, f"episode {doc_id}: {exc}") from exc
    if not transcripts:
        raise CorpusError(f"{path}: no episodes found")
    return transcripts


def corpus_files(path: str | Path, format: str = NATIVE_JSONL) -> list[Path]:
    """Resolve a corpus path (file or directory) to the files it names."""
    if format not in CORPUS_FORMATS:
        raise ConfigError(f"unknown corpus format {format!r} (expected one of {CORPUS_FORMATS})")
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    if path.is_dir():
        pattern = "*.jsonl" if format == NATIVE_JSONL else "*.json"
        files = sorted(path.glob(pattern))
        if not files:
            raise CorpusError(f"no {pattern} files in {path}")
        return files
    return [path]


def load_corpus(path: str | Path, format: str = NATIVE_JSONL) -> list[Transcript]:
    """Load every document under ``path`` (a file or a directory of files)."""
    loader = load_native_jsonl if format == NATIVE_JSONL else load_character_mining
    transcripts: list[Transcript] = []
    for file in corpus_files(path, format):
        transcripts.extend(loader(file))
    return transcripts
