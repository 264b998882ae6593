"""Linear topic segmentation of multi-party dialogue transcripts.

A feature-enhanced TextTiling segmenter (utterance-aligned spans, block
comparison and memory-bounded vocabulary introduction, speaker and question
features) plus evaluation against gold boundaries with Pk, F1, and a relaxed
precision-weighted Fk.
"""

__version__ = "0.1.0"

from .corpus import (
    RawEntry,
    SpeakerTable,
    Transcript,
    Utterance,
    derive_gold_boundaries,
    load_corpus,
)
from .errors import ConfigError, CorpusError, DialtileError, MetricError, ParseError
from .features import CorefChain, FeatureConfig, heuristic_chains
from .metrics import (
    EvalReport,
    Segmentation,
    aggregate,
    evaluate_document,
    f1_score,
    fk_score,
    pk_score,
)
from .pipeline import PipelineResult, segment_transcript
from .preprocess import PreprocessOptions, Span, TokenizedUtterance, build_spans, tokenize
from .tiling import ScoreSeries, TilingConfig
from .harness import (
    ExperimentConfig,
    OgTextTilingConfig,
    og_texttiling_segment,
    random_baseline,
    run_experiment,
)

__all__ = [
    "__version__",
    "RawEntry", "SpeakerTable", "Transcript", "Utterance",
    "derive_gold_boundaries", "load_corpus",
    "ConfigError", "CorpusError", "DialtileError", "MetricError", "ParseError",
    "CorefChain", "FeatureConfig", "heuristic_chains",
    "EvalReport", "Segmentation", "aggregate", "evaluate_document",
    "f1_score", "fk_score", "pk_score",
    "PipelineResult", "segment_transcript",
    "PreprocessOptions", "Span", "TokenizedUtterance", "build_spans", "tokenize",
    "ScoreSeries", "TilingConfig",
    "ExperimentConfig", "OgTextTilingConfig",
    "og_texttiling_segment", "random_baseline", "run_experiment",
]
