"""Foot-structure constraints for Finnish nouns.

Each constraint gloss is turned into a violation count over a
:class:`~equiprob.phonology.prosody.ProsodicParse`:

FtBin    one per foot that is not disyllabic
PkProm   one per unstressed light syllable (``pkprom="stressed-light"``
         switches to one per stressed light syllable)
Align-L  per foot, the number of syllables preceding it
*Rev     one per trochee whose head is high and whose dependent is low
*Flat    one per trochee whose head and dependent are both high
         (``flat="same-class"`` counts any trochee whose two vowels share a
         sonority class)
*H.X     one per heavy syllable adjacent to a stressed syllable, counted
         per stressed syllable (``hx="per-stress"`` counts each stressed
         syllable with a heavy neighbour once)
WSP      one per unstressed heavy syllable
WSP/VV   one per unstressed heavy syllable whose nucleus is a long vowel

The trochee of a foot is its head together with the syllable right after
it; monosyllabic feet have no trochee.
"""

from __future__ import annotations

from dataclasses import dataclass

from .prosody import ProsodicParse

CONSTRAINTS = ("FtBin", "PkProm", "Align-L", "*Rev", "*Flat", "*H.X", "WSP", "WSP/VV")
PKPROM_READINGS = ("unstressed-light", "stressed-light")
HX_READINGS = ("per-neighbor", "per-stress")
FLAT_READINGS = ("high-high", "same-class")


@dataclass(frozen=True)
class FinnishDefinitions:
    """Switches between readings of the one-line constraint glosses."""

    pkprom: str = "unstressed-light"
    hx: str = "per-neighbor"
    flat: str = "high-high"

    def __post_init__(self):
        if self.pkprom not in PKPROM_READINGS:
            raise ValueError(f"unknown PkProm reading {self.pkprom!r}")
        if self.hx not in HX_READINGS:
            raise ValueError(f"unknown *H.X reading {self.hx!r}")
        if self.flat not in FLAT_READINGS:
            raise ValueError(f"unknown *Flat reading {self.flat!r}")

    def to_json(self) -> dict:
        return {"pkprom": self.pkprom, "hx": self.hx, "flat": self.flat}


def eval_finnish_constraints(parse: ProsodicParse,
                             defs: FinnishDefinitions = FinnishDefinitions()) -> tuple[int, ...]:
    syl = parse.syllables
    feet = parse.feet

    ftbin = sum(1 for f in feet if len(f) != 2)
    if defs.pkprom == "unstressed-light":
        pkprom = sum(1 for s in syl if not s.heavy and not s.stressed)
    else:
        pkprom = sum(1 for s in syl if not s.heavy and s.stressed)
    align = sum(f[0] for f in feet)

    rev = flat = 0
    for f in feet:
        if len(f) < 2:
            continue
        head, dep = syl[f[0]], syl[f[1]]
        if head.sonority == "high" and dep.sonority == "low":
            rev += 1
        if head.sonority == dep.sonority and (defs.flat == "same-class" or head.sonority == "high"):
            flat += 1

    hx = 0
    for i, s in enumerate(syl):
        if not s.stressed:
            continue
        heavy_nbrs = sum(1 for j in (i - 1, i + 1) if 0 <= j < len(syl) and syl[j].heavy)
        hx += heavy_nbrs if defs.hx == "per-neighbor" else min(heavy_nbrs, 1)

    wsp = sum(1 for s in syl if s.heavy and not s.stressed)
    wspvv = sum(1 for s in syl if s.heavy and not s.stressed and s.long_vowel)
    return (ftbin, pkprom, align, rev, flat, hx, wsp, wspvv)
