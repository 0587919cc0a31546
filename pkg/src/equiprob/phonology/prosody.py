"""Prosodic candidate notation.

Grammar (whitespace is not allowed inside a word)::

    word     := item+
    item     := foot | syllable
    foot     := "(" syllable ("." syllable)* ")"
    syllable := letters, separated from a following unfooted syllable by "."

Feet are trochaic: the first syllable of a foot is its head and carries
stress; the head of the leftmost foot carries primary stress.  An acute
accent marks primary and a grave accent secondary stress; when marks are
present they must sit on foot heads and override the default placement of
primary stress.

Weight and vowel sonority are read off the letters: a nucleus of two vowel
letters (long vowel or diphthong) or a coda consonant makes a syllable
heavy; the first vowel of the nucleus decides sonority (a, ä, o, ö low;
e, i, u, y high).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

VOWELS = set("aeiouyäöå")
LOW = set("aäoö")
ACUTE, GRAVE = "́", "̀"


class NotationError(ValueError):
    pass


@dataclass(frozen=True)
class Syllable:
    text: str
    heavy: bool
    heavy_source: str  # "long-vowel", "coda" or "none"
    sonority: str  # "low" or "high"
    stress: str  # "primary", "secondary" or "none"
    foot_position: str  # "head", "dependent" or "unfooted"
    foot: int | None = None

    @property
    def stressed(self) -> bool:
        return self.stress != "none"

    @property
    def long_vowel(self) -> bool:
        return self.heavy_source == "long-vowel"


@dataclass(frozen=True)
class ProsodicParse:
    syllables: tuple[Syllable, ...]

    @property
    def feet(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i, s in enumerate(self.syllables):
            if s.foot is not None:
                out.setdefault(s.foot, []).append(i)
        return [out[k] for k in sorted(out)]

    def notation(self) -> str:
        parts = []
        prev_unfooted = False
        for f, group in _groups(self.syllables):
            texts = [s.text for s in group]
            if f is None:
                for t in texts:
                    if prev_unfooted:
                        parts.append(".")
                    parts.append(t)
                    prev_unfooted = True
            else:
                parts.append("(" + ".".join(texts) + ")")
                prev_unfooted = False
        return "".join(parts)

    def __str__(self):
        return self.notation()


def _groups(syllables):
    out = []
    for s in syllables:
        key = s.foot
        if out and out[-1][0] == key and key is not None:
            out[-1][1].append(s)
        else:
            out.append((key, [s]))
    return out


def analyze_syllable(text: str) -> tuple[bool, str, str]:
    """Weight, weight source and sonority of one syllable."""
    letters = text.lower()
    first = next((i for i, ch in enumerate(letters) if ch in VOWELS), None)
    if first is None:
        raise NotationError(f"syllable {text!r} has no vowel")
    end = first
    while end < len(letters) and letters[end] in VOWELS:
        end += 1
    nucleus = letters[first:end]
    coda = letters[end:]
    if any(ch in VOWELS for ch in coda):
        raise NotationError(f"syllable {text!r} has two nuclei")
    sonority = "low" if nucleus[0] in LOW else "high"
    if len(nucleus) >= 2:
        return True, "long-vowel", sonority
    if coda:
        return True, "coda", sonority
    return False, "none", sonority


def parse_prosodic_candidate(notation: str) -> ProsodicParse:
    text = unicodedata.normalize("NFD", notation.strip())
    if not text:
        raise NotationError("empty notation")
    raw: list[tuple[str, int | None, str | None]] = []  # (letters, foot index, mark)
    foot = None
    nfeet = 0
    buf = ""
    mark = None
    pos = 0

    def flush(where):
        nonlocal buf, mark
        if not buf:
            raise NotationError(f"empty syllable at position {where}")
        raw.append((unicodedata.normalize("NFC", buf), foot, mark))
        buf, mark = "", None

    for pos, ch in enumerate(text):
        if ch == "(":
            if foot is not None:
                raise NotationError(f"nested foot at position {pos}")
            if buf:
                flush(pos)
            foot = nfeet
            nfeet += 1
        elif ch == ")":
            if foot is None:
                raise NotationError(f"unbalanced ')' at position {pos}")
            if not buf:
                raise NotationError(f"empty syllable or foot at position {pos}")
            flush(pos)
            foot = None
        elif ch == ".":
            flush(pos)
        elif ch in (ACUTE, GRAVE):
            if not buf:
                raise NotationError(f"stray accent at position {pos}")
            mark = "primary" if ch == ACUTE else "secondary"
        elif ch.isalpha() or (unicodedata.combining(ch) and buf):
            buf += ch
        else:
            raise NotationError(f"unexpected character {ch!r} at position {pos}")
    if foot is not None:
        raise NotationError("unbalanced '(': foot never closed")
    if buf:
        flush(pos)

    marked = any(m for _, _, m in raw)
    heads = set()
    seen_feet = set()
    for i, (_, f, _) in enumerate(raw):
        if f is not None and f not in seen_feet:
            seen_feet.add(f)
            heads.add(i)
    primary_at = None
    if marked:
        for i, (t, _, m) in enumerate(raw):
            if m and i not in heads:
                raise NotationError(f"stress mark on non-head syllable {t!r}")
        prim = [i for i, (_, _, m) in enumerate(raw) if m == "primary"]
        if len(prim) > 1:
            raise NotationError("more than one primary stress")
        primary_at = prim[0] if prim else None
    elif heads:
        primary_at = min(heads)

    syllables = []
    for i, (t, f, _) in enumerate(raw):
        heavy, source, son = analyze_syllable(t)
        if i in heads:
            pos_ = "head"
            stress = "primary" if i == primary_at else "secondary"
        elif f is not None:
            pos_, stress = "dependent", "none"
        else:
            pos_, stress = "unfooted", "none"
        syllables.append(Syllable(t, heavy, source, son, stress, pos_, f))
    return ProsodicParse(tuple(syllables))
