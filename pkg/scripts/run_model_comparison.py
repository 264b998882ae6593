#!/usr/bin/env python3
"""Compare segmenter variants on one corpus: feature-enhanced tiling vs the
original fixed-span algorithm vs the seeded random baseline.

Produces one table row per variant (metrics x100, 2 decimals)."""

import argparse
import sys

from dialtile.harness import config_from_dict, format_metrics_row, run_experiment

VARIANTS = [
    ("BC+SD", {"segmenter": "bc", "features": {"speaker_depth": True}}),
    ("BC", {"segmenter": "bc"}),
    ("OG TextTiling", {"segmenter": "og-texttiling"}),
    ("Random", {"segmenter": "random", "best_of": 10}),
]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", action="append", required=True)
    parser.add_argument("--format", default="native-jsonl")
    parser.add_argument("--doc-filter", default=None)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    base = {
        "corpus": args.corpus,
        "corpus_format": args.format,
        "seed": args.seed,
    }
    if args.doc_filter:
        base["doc_filter"] = args.doc_filter

    rows = []
    for label, overrides in VARIANTS:
        config = config_from_dict({**base, **overrides})
        result = run_experiment(config)
        rows.append(format_metrics_row(result.corpus_report, label))

    header = ["variant", "F1", "Fk1", "Fk2", "Pk"]
    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
    for row in [header] + rows:
        print("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
    return 0


if __name__ == "__main__":
    sys.exit(main())
