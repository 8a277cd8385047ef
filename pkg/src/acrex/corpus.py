"""Boundary-labeled acronym datasets: loading, validation, statistics, mixing.

A dataset file is UTF-8 with one JSON record per line:

    {"id": "v1", "text": "mạng nơ-ron (NN)", "short": [[13, 15]], "long": [[0, 11]]}

Each record carries exactly one of "text" (span boundaries are character
offsets) or "tokens" (an array of strings; boundaries are token-index pairs
and get converted to character offsets after joining the tokens with single
spaces). Offsets count Unicode code points, never bytes.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence, TextIO

STAGE_MULTILINGUAL = "multilingual"
STAGE_SINGLE_LANGUAGE = "single-language"


class DatasetError(ValueError):
    """Malformed record, invalid span, or duplicate sample id."""


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character interval [start, end) in a sample's text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise DatasetError(f"span [{self.start}, {self.end}]: negative start")
        if self.start >= self.end:
            raise DatasetError(f"span [{self.start}, {self.end}]: start >= end")

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def pair(self) -> list[int]:
        return [self.start, self.end]


@dataclass
class Sample:
    """One document sentence with its gold short-form and long-form spans.

    Spans are normalized to start order. Within each form type they must be
    pairwise non-overlapping; a short span may overlap a long span.
    """

    id: str
    text: str
    shorts: tuple[Span, ...] = ()
    longs: tuple[Span, ...] = ()

    def __post_init__(self) -> None:
        self.shorts = _checked_spans(self.shorts, self.text, self.id, "short")
        self.longs = _checked_spans(self.longs, self.text, self.id, "long")

    def surface(self, span: Span) -> str:
        return self.text[span.start:span.end]


def _checked_spans(spans: Iterable[Span], text: str, sample_id: str,
                   kind: str) -> tuple[Span, ...]:
    ordered = tuple(sorted(spans))
    for span in ordered:
        if span.end > len(text):
            raise DatasetError(
                f"sample {sample_id!r}: {kind} span {span.pair()} out of bounds "
                f"for text of length {len(text)}")
    # sorted by start, so any overlap shows up between neighbours
    for left, right in zip(ordered, ordered[1:]):
        if left.overlaps(right):
            raise DatasetError(
                f"sample {sample_id!r}: {kind} spans {left.pair()} and "
                f"{right.pair()} overlap")
    return ordered


def parse_span_pairs(value: object, field: str) -> list[Span]:
    """Turn a JSON value of [start, end] pairs into spans."""
    if not isinstance(value, list):
        raise DatasetError(f"field {field!r}: expected a list of [start, end] pairs")
    spans = []
    for pair in value:
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(p, int) and not isinstance(p, bool) for p in pair)):
            raise DatasetError(f"field {field!r}: bad boundary pair {pair!r}")
        spans.append(Span(pair[0], pair[1]))
    return spans


def _token_pairs_to_char_spans(tokens: list[str], pairs: list[list[int]],
                               field: str) -> list[Span]:
    starts = []
    offset = 0
    for token in tokens:
        starts.append(offset)
        offset += len(token) + 1
    spans = []
    for pair in pairs:
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(p, int) and not isinstance(p, bool) for p in pair)):
            raise DatasetError(f"field {field!r}: bad boundary pair {pair!r}")
        ts, te = pair
        if not 0 <= ts < te <= len(tokens):
            raise DatasetError(
                f"field {field!r}: token span {pair!r} out of range for "
                f"{len(tokens)} tokens")
        spans.append(Span(starts[ts], starts[te - 1] + len(tokens[te - 1])))
    return spans


def parse_record(line: str, index: int, fmt: str = "auto") -> Sample:
    """Parse one dataset line; errors carry the record index and field."""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"record {index}: invalid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise DatasetError(f"record {index}: expected a JSON object")

    sample_id = record.get("id")
    if not isinstance(sample_id, str) or not sample_id:
        raise DatasetError(f"record {index}: missing or empty field 'id'")

    has_text = "text" in record
    has_tokens = "tokens" in record
    if has_text and has_tokens:
        raise DatasetError(
            f"record {index}: fields 'text' and 'tokens' are mutually exclusive")
    if not has_text and not has_tokens:
        raise DatasetError(f"record {index}: need field 'text' or 'tokens'")
    if fmt == "text" and has_tokens:
        raise DatasetError(f"record {index}: expected 'text' records, got 'tokens'")
    if fmt == "tokens" and has_text:
        raise DatasetError(f"record {index}: expected 'tokens' records, got 'text'")

    for field in ("short", "long"):
        if field not in record:
            raise DatasetError(f"record {index}: missing field {field!r}")

    try:
        if has_text:
            text = record["text"]
            if not isinstance(text, str):
                raise DatasetError("field 'text': expected a string")
            shorts = parse_span_pairs(record["short"], "short")
            longs = parse_span_pairs(record["long"], "long")
        else:
            tokens = record["tokens"]
            if (not isinstance(tokens, list)
                    or not all(isinstance(t, str) for t in tokens)):
                raise DatasetError("field 'tokens': expected a list of strings")
            text = " ".join(tokens)
            shorts = _token_pairs_to_char_spans(tokens, record["short"], "short")
            longs = _token_pairs_to_char_spans(tokens, record["long"], "long")
        return Sample(id=sample_id, text=text, shorts=tuple(shorts), longs=tuple(longs))
    except DatasetError as exc:
        raise DatasetError(f"record {index}: {exc}") from None


def load_dataset(path, fmt: str = "auto") -> list[Sample]:
    """Read and validate a dataset file.

    fmt selects the accepted record kind: "auto" takes both, "text" and
    "tokens" reject the other one.
    """
    if fmt not in ("auto", "text", "tokens"):
        raise ValueError(f"unknown format {fmt!r}; use auto, text, or tokens")
    samples: list[Sample] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            sample = parse_record(line, index, fmt)
            if sample.id in seen:
                raise DatasetError(f"record {index}: duplicate id {sample.id!r}")
            seen.add(sample.id)
            samples.append(sample)
    return samples


def write_dataset(samples: Iterable[Sample], destination) -> None:
    """Write samples in the canonical text-record form, one object per line."""
    if hasattr(destination, "write"):
        _write_records(samples, destination)
    else:
        with open(destination, "w", encoding="utf-8") as handle:
            _write_records(samples, handle)


def _write_records(samples: Iterable[Sample], handle: TextIO) -> None:
    for sample in samples:
        record = {
            "id": sample.id,
            "text": sample.text,
            "short": [s.pair() for s in sample.shorts],
            "long": [s.pair() for s in sample.longs],
        }
        handle.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class DatasetSummary:
    name: str
    samples: int
    ratio: float          # share of all samples, quantized to 4 decimals
    short_spans: int
    long_spans: int
    mean_spans: float     # (short + long spans) per sample


def _as_items(datasets) -> list[tuple[str, Sequence[Sample]]]:
    if isinstance(datasets, Mapping):
        return list(datasets.items())
    return list(datasets)


def apportion(counts: Sequence[int], places: int = 4) -> list[float]:
    """Quantize counts/total so the reported shares sum to exactly 1.

    Plain rounding can leave the shares at 0.9999 or 1.0001; leftover quanta
    go to the largest fractional remainders instead, the way percentage
    tables are usually balanced.
    """
    total = sum(counts)
    if total <= 0:
        raise ValueError("apportion needs a positive total")
    scale = 10 ** places
    floors = [count * scale // total for count in counts]
    remainders = [count * scale % total for count in counts]
    leftover = scale - sum(floors)
    for i in sorted(range(len(counts)), key=lambda i: remainders[i], reverse=True)[:leftover]:
        floors[i] += 1
    return [quanta / scale for quanta in floors]


def summarize(datasets) -> list[DatasetSummary]:
    """Per-split counts and ratios for named splits of one corpus."""
    items = _as_items(datasets)
    total = sum(len(samples) for _, samples in items)
    if total == 0:
        raise DatasetError("all splits are empty")
    ratios = apportion([len(samples) for _, samples in items])
    summaries = []
    for (name, samples), ratio in zip(items, ratios):
        shorts = sum(len(s.shorts) for s in samples)
        longs = sum(len(s.longs) for s in samples)
        mean = (shorts + longs) / len(samples) if samples else 0.0
        summaries.append(DatasetSummary(
            name=name, samples=len(samples), ratio=ratio,
            short_spans=shorts, long_spans=longs, mean_spans=mean))
    return summaries


def mix_curriculum(sources, stage: str, language: str | None = None,
                   seed: int = 0) -> list[Sample]:
    """Build one training file from named source datasets.

    The multilingual stage pools every source; the single-language stage
    keeps only the source named by the language tag. Either way the result
    is shuffled deterministically by seed and ids are prefixed with the
    source name so they stay unique after pooling.
    """
    items = _as_items(sources)
    names = [name for name, _ in items]
    if stage == STAGE_MULTILINGUAL:
        picked = items
    elif stage == STAGE_SINGLE_LANGUAGE:
        if language is None:
            raise DatasetError(
                f"stage {STAGE_SINGLE_LANGUAGE!r} requires a language tag; "
                f"available: {', '.join(names)}")
        if language not in names:
            raise DatasetError(
                f"unknown language tag {language!r}; available: {', '.join(names)}")
        picked = [(name, samples) for name, samples in items if name == language]
    else:
        raise DatasetError(
            f"unknown stage {stage!r}; use {STAGE_MULTILINGUAL!r} or "
            f"{STAGE_SINGLE_LANGUAGE!r}")

    mixed = [replace(sample, id=f"{name}:{sample.id}")
             for name, samples in picked for sample in samples]
    random.Random(seed).shuffle(mixed)
    return mixed
