"""Official metric: exact boundary matching, per-type P/R/F1, macro average.

A predicted span counts as a true positive only when both its start and its
end equal a gold span of the same sample and form type. Counts are summed
over the corpus per form type, one P/R/F1 is computed per type, and the
official score is the mean of the two F1 values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True)
class TypeScore:
    tp: int
    predicted: int
    gold: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ScoreReport:
    short: TypeScore
    long: TypeScore
    official: float

    def to_dict(self) -> dict:
        return {
            "short": {"p": self.short.precision, "r": self.short.recall,
                      "f1": self.short.f1},
            "long": {"p": self.long.precision, "r": self.long.recall,
                     "f1": self.long.f1},
            "official": self.official,
        }


def _prf(tp: int, predicted: int, gold: int) -> tuple[float, float, float]:
    if predicted == 0 and gold == 0:
        return 1.0, 1.0, 1.0
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def _check_ids(predictions: Mapping, gold: Mapping) -> None:
    extra = set(predictions) - set(gold)
    if extra:
        names = ", ".join(repr(i) for i in sorted(extra)[:5])
        raise ValueError(f"prediction ids not present in gold: {names}")


_EMPTY: tuple = ()


def _spans_of(record, kind: str) -> set:
    # predicted duplicates must not inflate tp, so spans are set-deduplicated
    return set(getattr(record, kind))


def score(predictions: Mapping, gold: Mapping) -> ScoreReport:
    """Corpus-level report over id-aligned prediction and gold maps.

    Samples without a prediction record count as empty predictions; a
    prediction id missing from gold is an error. Both maps may hold any
    objects with ``shorts`` and ``longs`` span collections, so gold can be
    scored against itself.
    """
    _check_ids(predictions, gold)
    scores = {}
    for kind in ("shorts", "longs"):
        tp = predicted = total_gold = 0
        for sample_id, gold_record in gold.items():
            gold_spans = _spans_of(gold_record, kind)
            pred = predictions.get(sample_id)
            pred_spans = _spans_of(pred, kind) if pred is not None else set()
            tp += len(pred_spans & gold_spans)
            predicted += len(pred_spans)
            total_gold += len(gold_spans)
        precision, recall, f1 = _prf(tp, predicted, total_gold)
        scores[kind] = TypeScore(tp, predicted, total_gold, precision, recall, f1)
    return ScoreReport(
        short=scores["shorts"], long=scores["longs"],
        official=(scores["shorts"].f1 + scores["longs"].f1) / 2)


def score_per_sample(predictions: Mapping, gold: Mapping) -> ScoreReport:
    """The per-sample macro reading: average sample-level P/R/F1 per type.

    Counts in the report stay corpus totals; precision, recall, and f1 are
    means over samples, with the same empty-empty guard applied per sample.
    """
    _check_ids(predictions, gold)
    if not gold:
        raise ValueError("gold map is empty")
    scores = {}
    for kind in ("shorts", "longs"):
        tp_total = predicted_total = gold_total = 0
        p_sum = r_sum = f_sum = 0.0
        for sample_id, gold_record in gold.items():
            gold_spans = _spans_of(gold_record, kind)
            pred = predictions.get(sample_id)
            pred_spans = _spans_of(pred, kind) if pred is not None else set()
            tp = len(pred_spans & gold_spans)
            precision, recall, f1 = _prf(tp, len(pred_spans), len(gold_spans))
            tp_total += tp
            predicted_total += len(pred_spans)
            gold_total += len(gold_spans)
            p_sum += precision
            r_sum += recall
            f_sum += f1
        n = len(gold)
        scores[kind] = TypeScore(tp_total, predicted_total, gold_total,
                                 p_sum / n, r_sum / n, f_sum / n)
    return ScoreReport(
        short=scores["shorts"], long=scores["longs"],
        official=(scores["shorts"].f1 + scores["longs"].f1) / 2)
