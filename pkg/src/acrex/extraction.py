"""Map generated surface forms back onto character spans in the source text.

Every literal occurrence of every form is a candidate span; overlaps are
then resolved greedily, leftmost first and longest on ties, so the reported
spans are pairwise disjoint within each form type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import DatasetError, Span, parse_span_pairs
from .template import MalformedOutput, decode_output


@dataclass
class Prediction:
    """Predicted span sets for one sample, plus extraction diagnostics."""

    shorts: list[Span] = field(default_factory=list)
    longs: list[Span] = field(default_factory=list)
    malformed: bool = False   # output had no section separator
    unmatched: int = 0        # generated forms never found in the text


def find_occurrences(form: str, text: str) -> list[Span]:
    """All literal match positions of form in text, self-overlapping included."""
    if not form:
        return []
    spans = []
    at = text.find(form)
    while at >= 0:
        spans.append(Span(at, at + len(form)))
        at = text.find(form, at + 1)
    return spans


def resolve_overlaps(candidates: Iterable[Span]) -> list[Span]:
    """Greedy non-overlapping selection: start ascending, longest on ties.

    Duplicates collapse because a copy always overlaps the kept original.
    """
    kept: list[Span] = []
    for span in sorted(candidates, key=lambda s: (s.start, s.start - s.end)):
        if not any(span.overlaps(k) for k in kept):
            kept.append(span)
    return kept


def locate_spans(forms: Sequence[str], text: str) -> list[Span]:
    """Spans of all occurrences of the given forms, overlaps resolved."""
    candidates: list[Span] = []
    for form in forms:
        candidates.extend(find_occurrences(form, text))
    return resolve_overlaps(candidates)


def extract(sample_text: str, raw_output: str) -> Prediction:
    """Decode a generated target string and locate its forms in the text.

    Short and long forms are located independently; overlap between the two
    types is allowed. Unparseable output yields an empty prediction flagged
    as malformed.
    """
    try:
        forms = decode_output(raw_output)
    except MalformedOutput:
        return Prediction(malformed=True)
    unmatched = sum(1 for form in forms.shorts + forms.longs
                    if not find_occurrences(form, sample_text))
    return Prediction(
        shorts=locate_spans(forms.shorts, sample_text),
        longs=locate_spans(forms.longs, sample_text),
        unmatched=unmatched,
    )


def write_predictions(predictions: Iterable[tuple[str, Prediction]], handle) -> None:
    """Emit prediction records, the same span schema as gold labels."""
    for sample_id, prediction in predictions:
        record = {
            "id": sample_id,
            "short": [s.pair() for s in prediction.shorts],
            "long": [s.pair() for s in prediction.longs],
        }
        handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_predictions(path) -> dict[str, Prediction]:
    """Read a prediction file into an id -> Prediction map.

    Accepts bare prediction records and full dataset records alike, so a
    gold file can be scored against itself.
    """
    from .corpus import parse_record

    predictions: dict[str, Prediction] = {}
    with open(path, encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"record {index}: invalid JSON: {exc}") from None
            if not isinstance(record, dict):
                raise DatasetError(f"record {index}: expected a JSON object")
            if "text" in record or "tokens" in record:
                sample = parse_record(line, index)
                sample_id = sample.id
                prediction = Prediction(shorts=list(sample.shorts),
                                        longs=list(sample.longs))
            else:
                sample_id = record.get("id")
                if not isinstance(sample_id, str) or not sample_id:
                    raise DatasetError(f"record {index}: missing or empty field 'id'")
                try:
                    prediction = Prediction(
                        shorts=parse_span_pairs(record.get("short", []), "short"),
                        longs=parse_span_pairs(record.get("long", []), "long"))
                except DatasetError as exc:
                    raise DatasetError(f"record {index}: {exc}") from None
            if sample_id in predictions:
                raise DatasetError(f"record {index}: duplicate id {sample_id!r}")
            predictions[sample_id] = prediction
    return predictions
