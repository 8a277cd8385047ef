"""Prompt construction and the sentinel-delimited target-string codec.

A generation target packs a sample's surface forms into one string: the
short forms joined by " <extra_id_1> ", then " <extra_id_3> ", then the long
forms joined by " <extra_id_2> ". An empty shorts section is written as
<extra_id_4>, an empty longs section as <extra_id_5>:

    "NN <extra_id_1> SDU <extra_id_3> <extra_id_5>"

decode_output() is the inverse and accepts arbitrary model output; the only
failure mode is the recoverable MalformedOutput when the section separator
is missing entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Sample

PROMPT_SUFFIX = "The acronyms and their meanings are:"

SHORT_SEP = "<extra_id_1>"
LONG_SEP = "<extra_id_2>"
SECTION_SEP = "<extra_id_3>"
NO_SHORTS = "<extra_id_4>"
NO_LONGS = "<extra_id_5>"
SENTINELS = (SHORT_SEP, LONG_SEP, SECTION_SEP, NO_SHORTS, NO_LONGS)


@dataclass
class FormLists:
    """Decoded surface strings for each form type, in generation order."""

    shorts: list[str] = field(default_factory=list)
    longs: list[str] = field(default_factory=list)


class MalformedOutput(ValueError):
    """Model output had no section separator; carries empty form lists."""

    def __init__(self, message: str):
        super().__init__(message)
        self.forms = FormLists()


def build_prompt(sample_text: str) -> str:
    """Append the fixed generation cue to the source text."""
    if not sample_text:
        raise ValueError("sample text is empty")
    return f"{sample_text} {PROMPT_SUFFIX}"


def prompt_source(prompt: str) -> str:
    """Recover the source text from a built prompt."""
    suffix = f" {PROMPT_SUFFIX}"
    if not prompt.endswith(suffix):
        raise ValueError("prompt does not end with the fixed suffix")
    return prompt[:-len(suffix)]


def _distinct_surfaces(sample: Sample, spans) -> list[str]:
    # spans are kept in start order, so this is document order; a form
    # mentioned at several positions is written once (all its positions are
    # re-found from the text later anyway)
    seen: set[str] = set()
    surfaces = []
    for span in spans:
        surface = sample.surface(span)
        if surface not in seen:
            seen.add(surface)
            surfaces.append(surface)
    return surfaces


def encode_target(sample: Sample) -> str:
    """Serialize a sample's gold surface forms into the target string."""
    shorts = _distinct_surfaces(sample, sample.shorts)
    longs = _distinct_surfaces(sample, sample.longs)
    left = f" {SHORT_SEP} ".join(shorts) if shorts else NO_SHORTS
    right = f" {LONG_SEP} ".join(longs) if longs else NO_LONGS
    return f"{left} {SECTION_SEP} {right}"


def _split_section(chunk: str, separator: str, none_marker: str) -> list[str]:
    if none_marker in chunk:
        return []
    forms = []
    for fragment in chunk.split(f" {separator} "):
        # empty fragments would match everywhere; fragments holding a stray
        # sentinel are junk the model emitted, not surface forms
        if fragment and not any(s in fragment for s in SENTINELS):
            forms.append(fragment)
    return forms


def decode_output(raw: str) -> FormLists:
    """Parse a generated string back into short and long surface forms.

    Raises MalformedOutput when no section separator is present; every other
    input decodes to something, possibly empty lists.
    """
    at = raw.find(SECTION_SEP)
    if at < 0:
        raise MalformedOutput("no section separator in model output")
    left = raw[:at].strip()
    right = raw[at + len(SECTION_SEP):].strip()
    return FormLists(
        shorts=_split_section(left, SHORT_SEP, NO_SHORTS),
        longs=_split_section(right, LONG_SEP, NO_LONGS),
    )
