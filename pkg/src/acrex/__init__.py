"""Acronym extraction toolkit: dataset handling, sentinel-template codec,
span grounding, a rule baseline, scoring, and pluggable generation backends.
"""

__version__ = "0.1.0"

from .backends import (BackendError, GenRequest, GenResponse, MockBackend,
                       ProcBackend, generate, load_mock_table, mock_from_gold,
                       parse_backend_spec)
from .baseline import (RuleConfig, baseline_prediction, detect_acronyms,
                       detect_long_forms)
from .corpus import (STAGE_MULTILINGUAL, STAGE_SINGLE_LANGUAGE, DatasetError,
                     DatasetSummary, Sample, Span, apportion, load_dataset,
                     mix_curriculum, parse_record, summarize, write_dataset)
from .extraction import (Prediction, extract, find_occurrences, load_predictions,
                         locate_spans, resolve_overlaps, write_predictions)
from .scoring import ScoreReport, TypeScore, score, score_per_sample
from .template import (LONG_SEP, NO_LONGS, NO_SHORTS, PROMPT_SUFFIX,
                       SECTION_SEP, SENTINELS, SHORT_SEP, FormLists,
                       MalformedOutput, build_prompt, decode_output,
                       encode_target, prompt_source)

__all__ = [
    "__version__",
    "BackendError", "GenRequest", "GenResponse", "MockBackend", "ProcBackend",
    "generate", "load_mock_table", "mock_from_gold", "parse_backend_spec",
    "RuleConfig", "baseline_prediction", "detect_acronyms", "detect_long_forms",
    "STAGE_MULTILINGUAL", "STAGE_SINGLE_LANGUAGE", "DatasetError",
    "DatasetSummary", "Sample", "Span", "apportion", "load_dataset",
    "mix_curriculum", "parse_record", "summarize", "write_dataset",
    "Prediction", "extract", "find_occurrences", "load_predictions",
    "locate_spans", "resolve_overlaps", "write_predictions",
    "ScoreReport", "TypeScore", "score", "score_per_sample",
    "LONG_SEP", "NO_LONGS", "NO_SHORTS", "PROMPT_SUFFIX", "SECTION_SEP",
    "SENTINELS", "SHORT_SEP", "FormLists", "MalformedOutput", "build_prompt",
    "decode_output", "encode_target", "prompt_source",
]
