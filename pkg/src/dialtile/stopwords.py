"""Fixed English stop-word list.

Segmentation scores depend on exactly which tokens count as content, so the
list is shipped with the package and versioned rather than pulled from an
external resource. Entries are already in tokenizer form: lowercase, no
apostrophes (the tokenizer splits "don't" into "don" / "t", and both halves
appear here).
"""

from __future__ import annotations

from pathlib import Path

STOPWORDS_VERSION = "en-1"

STOPWORDS: frozenset[str] = frozenset(
    """
    i me my myself we our ours ourselves you your yours yourself yourselves
    he him his himself she her hers herself it its itself they them their
    theirs themselves what which who whom whose this that these those
    am is are was were be been being have has had having do does did doing
    will would should could shall may might must can cannot ought
    a an the and but if or because as until while although though unless
    whether since of at by for with about against between into through
    during before after above below to from up down in out on off over
    under upon within without across among toward towards onto via per
    again further then once here there when where why how whenever wherever
    whoever whatever whichever all any both each few more most other some
    such no nor not only own same so than too very just now
    s t d ll m o re ve y
    ain aren couldn didn doesn don hadn hasn haven isn ma mightn mustn
    needn shan shouldn wasn weren won wouldn
    """.split()
)


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stop-word list override: one word per line, '#' comments allowed."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.append(word)
    return frozenset(words)
