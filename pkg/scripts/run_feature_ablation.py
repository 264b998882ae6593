#!/usr/bin/env python3
"""Feature ablation over one corpus: block comparison and vocabulary
introduction alone and in combination with the dialogue features
(speaker introduction, speaker depth, questions, coreference, stemming)."""

import argparse
import sys

from dialtile.harness import config_from_dict, format_metrics_row, run_experiment

VARIANTS = [
    ("BC", {"segmenter": "bc"}),
    ("VI", {"segmenter": "vi"}),
    ("BC+VI", {"segmenter": "bc+vi"}),
    ("BC+SI", {"segmenter": "bc", "features": {"speaker_intro": True}}),
    ("BC+SD", {"segmenter": "bc", "features": {"speaker_depth": True}}),
    ("BC+SD+Q", {"segmenter": "bc", "features": {"speaker_depth": True, "questions": True}}),
    ("BC+SD+S", {"segmenter": "bc", "features": {"speaker_depth": True}, "stemming": True}),
    ("BC+VI+Co+SD", {
        "segmenter": "bc+vi",
        "features": {"speaker_depth": True, "coref": True},
    }),
]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", action="append", required=True)
    parser.add_argument("--format", default="native-jsonl")
    parser.add_argument("--doc-filter", default=None)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    base = {"corpus": args.corpus, "corpus_format": args.format, "seed": args.seed}
    if args.doc_filter:
        base["doc_filter"] = args.doc_filter

    rows = []
    for label, overrides in VARIANTS:
        result = run_experiment(config_from_dict({**base, **overrides}))
        row = format_metrics_row(result.corpus_report, label)
        if label == "BC+SD+Q":
            changed = sum(
                1 for o in result.outcomes if o.question_changed_boundaries
            )
            row.append(f"(question rule moved boundaries in {changed} docs)")
        rows.append(row)

    header = ["variant", "F1", "Fk1", "Fk2", "Pk"]
    widths = [
        max(len(r[c]) for r in [header] + rows if c < len(r))
        for c in range(len(header))
    ]
    for row in [header] + rows:
        cells = [cell.ljust(widths[c]) if c < len(widths) else cell
                 for c, cell in enumerate(row)]
        print("  ".join(cells).rstrip())
    return 0


if __name__ == "__main__":
    sys.exit(main())
