"""Rule-based extractor used as the task baseline.

Words whose letters are mostly uppercase are taken as acronyms; a run of
words just before an acronym whose initials spell it out, case-insensitively,
is taken as its long form. Scripts without case (Persian) yield nothing,
which is the honest behavior of this family of rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Span
from .extraction import Prediction, resolve_overlaps

_WORD = re.compile(r"\S+")


@dataclass
class RuleConfig:
    uppercase_ratio: float = 0.6        # strictly-more-than threshold
    long_form_window: int | None = None  # words scanned back; None = len(acronym) + 5

    def __post_init__(self) -> None:
        if not 0.0 < self.uppercase_ratio <= 1.0:
            raise ValueError("uppercase_ratio must be in (0, 1]")
        if self.long_form_window is not None and self.long_form_window < 1:
            raise ValueError("long_form_window must be >= 1")

    def window_for(self, acronym: str) -> int:
        if self.long_form_window is not None:
            return self.long_form_window
        return len(acronym) + 5


def _word_cores(text: str) -> list[Span]:
    """Whitespace tokens trimmed of surrounding non-alphanumerics.

    Punctuation-only tokens disappear, so "(" never shows up as a word.
    """
    cores = []
    for match in _WORD.finditer(text):
        start, end = match.start(), match.end()
        while start < end and not text[start].isalnum():
            start += 1
        while end > start and not text[end - 1].isalnum():
            end -= 1
        if end > start:
            cores.append(Span(start, end))
    return cores


def _is_acronym(core: str, threshold: float) -> bool:
    # ratio over letters only; digits and hyphens say nothing about casing
    if len(core) < 2:
        return False
    letters = [c for c in core if c.isalpha()]
    if not letters:
        return False
    upper = sum(1 for c in letters if c.isupper())
    return upper / len(letters) > threshold


def detect_acronyms(text: str, config: RuleConfig | None = None) -> list[Span]:
    """Short-form spans: words with more than the threshold share uppercase."""
    config = config or RuleConfig()
    return [core for core in _word_cores(text)
            if _is_acronym(text[core.start:core.end], config.uppercase_ratio)]


def detect_long_forms(text: str, acronym_spans: list[Span],
                      config: RuleConfig | None = None) -> list[tuple[Span, Span]]:
    """Pair each acronym with the word run just before it that spells it.

    The run must end immediately before the acronym (at most whitespace and
    one open parenthesis in between) and contain exactly one word per
    acronym character, initials matched case-insensitively in order.
    """
    config = config or RuleConfig()
    cores = _word_cores(text)
    pairs = []
    for acro in acronym_spans:
        acronym = text[acro.start:acro.end]
        wanted = [c.lower() for c in acronym]
        if not wanted or len(wanted) > config.window_for(acronym):
            continue
        preceding = [w for w in cores if w.end <= acro.start]
        if len(preceding) < len(wanted):
            continue
        run = preceding[-len(wanted):]
        if text[run[-1].end:acro.start].strip() not in ("", "("):
            continue
        initials = [text[w.start].lower() for w in run]
        if initials == wanted:
            pairs.append((Span(run[0].start, run[-1].end), acro))
    return pairs


def baseline_prediction(text: str, config: RuleConfig | None = None) -> Prediction:
    """Run both rules over one text and package the result like the extractor."""
    config = config or RuleConfig()
    acronyms = detect_acronyms(text, config)
    long_forms = [lf for lf, _ in detect_long_forms(text, acronyms, config)]
    # acronym spans are disjoint word cores already; long forms of nearby
    # acronyms can collide, so they go through the same resolver
    return Prediction(shorts=acronyms, longs=resolve_overlaps(long_forms))
