"""Finnish vowel harmony constraints over segmental forms.

A form is written as letters with an optional ``-`` marking the boundary
between root and suffix, e.g. ``maa-nä``.  Every vowel letter is one vowel
token, so a long vowel contributes two tokens.  Backness classes:

    +back    a o u
    -back    ä ö y
    neutral  e i

Constraints, in tableau order:

*Int[+back]   one per vowel token standing between a [+back] vowel and the
              right word edge
*Int[-back]   the mirror image for [-back]
Ident-Root    one per root /a, ä/ token whose backness changed
Ident         one per /a, ä/ token whose backness changed

What counts as an intervener is a definition switch.  ``"non-agreeing"``
(the default) counts a vowel only if it does not itself carry the
triggering value, so a back vowel after a back vowel is harmless and neutral
vowels count.  ``"all-following"`` counts every vowel to the right of a
trigger.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

CONSTRAINTS = ("*Int[+back]", "*Int[-back]", "Ident-Root", "Ident")
BACK = set("aou")
FRONT = set("äöy")
NEUTRAL = set("ei")
VOWELS = BACK | FRONT | NEUTRAL
LETTERS_AE = set("aä")
INTERVENER_READINGS = ("non-agreeing", "all-following")


class SegmentalError(ValueError):
    pass


@dataclass(frozen=True)
class SegmentalForm:
    """Letters of a word, with the index where the suffix starts (if marked)."""

    letters: str
    root_end: int | None = None

    def __post_init__(self):
        if not any(ch in VOWELS for ch in self.letters):
            raise SegmentalError(f"form {self.letters!r} has no vowel")
        if self.root_end is not None and not 0 <= self.root_end <= len(self.letters):
            raise SegmentalError("root boundary out of range")

    @classmethod
    def parse(cls, text: str) -> "SegmentalForm":
        text = unicodedata.normalize("NFC", text.strip())
        if text.count("-") > 1:
            raise SegmentalError(f"more than one root boundary in {text!r}")
        if not text.replace("-", "").isalpha():
            raise SegmentalError(f"unexpected character in {text!r}")
        if "-" in text:
            i = text.index("-")
            return cls(text.replace("-", "").lower(), i)
        return cls(text.lower(), None)

    def vowels(self) -> list[tuple[int, str]]:
        return [(i, ch) for i, ch in enumerate(self.letters) if ch in VOWELS]

    def backness(self) -> list[str]:
        return ["+" if ch in BACK else "-" if ch in FRONT else "0" for _, ch in self.vowels()]

    def __str__(self):
        if self.root_end is None:
            return self.letters
        return self.letters[:self.root_end] + "-" + self.letters[self.root_end:]


def _interveners(marks: list[str], value: str, reading: str) -> int:
    seen = False
    count = 0
    for m in marks:
        if seen and (reading == "all-following" or m != value):
            count += 1
        if m == value:
            seen = True
    return count


_BACKNESS_PAIRS = {"a": "ä", "ä": "a", "o": "ö", "ö": "o", "u": "y", "y": "u"}


def eval_harmony_constraints(form: SegmentalForm, candidate: SegmentalForm,
                             interveners: str = "non-agreeing") -> tuple[int, ...]:
    """Violations of ``candidate`` as an output for underlying ``form``."""
    if interveners not in INTERVENER_READINGS:
        raise ValueError(f"unknown intervener reading {interveners!r}")
    if len(form.letters) != len(candidate.letters):
        raise SegmentalError(f"{candidate} is not aligned with /{form}/: lengths differ")
    for u, s in zip(form.letters, candidate.letters):
        if u != s and _BACKNESS_PAIRS.get(u) != s:
            raise SegmentalError(f"{candidate} is not aligned with /{form}/: {u!r} vs {s!r}")
    marks = candidate.backness()
    int_back = _interveners(marks, "+", interveners)
    int_front = _interveners(marks, "-", interveners)
    root_end = len(form.letters) if form.root_end is None else form.root_end
    ident = ident_root = 0
    for i, (u, s) in enumerate(zip(form.letters, candidate.letters)):
        if u in LETTERS_AE and u != s:
            ident += 1
            if i < root_end:
                ident_root += 1
    return (int_back, int_front, ident_root, ident)
