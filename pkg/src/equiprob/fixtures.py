"""Bundled fixtures: the Finnish stress stem types and the vowel harmony pair.

The tableaux are derived by the phonological front end and then frozen as
JSON under ``equiprob/data``.  Analyses read the frozen files, so a change
to a constraint definition cannot silently move an acceptance result;
``derive_*`` regenerates a tableau for comparison.
"""

from __future__ import annotations

from importlib import resources

from .phonology import FinnishDefinitions, build_tableau
from .tableau import MappingId, Tableau, parse_tableau, serialize_tableau

FIXTURE_VERSION = 1

# The extra-candidate demonstration needs PkProm counting stressed light syllables.
EXTRA_CANDIDATE_DEFINITIONS = FinnishDefinitions(pkprom="stressed-light")

# stem type -> syllables of the stem as displayed (final stem vowel e/o as in the -ja forms)
FINNISH_STEMS = {
    "a": "ak.va.rel.lis.te",
    "b": "pro.pa.gan.dis.te",
    "c": "sym.po.si.u.me",
    "d": "lii.rum.laa.ru.me",
    "e": "po.ly.a.mi.de",
    "f": "in.ku.naa.be.le",
    "g": "o.pe.raa.ti.o",
    "h": "al.le.go.ri.o",
    "i": "kom.mu.ni.ke.o",
    "j": "kon.sul.taa.ti.o",
    "k": "ter.mos.taat.te",
    "l": "mar.ga.rii.ne",
    "m": "af.fri.kaat.to",
}

# corpus token percentages shown next to each parse; display annotations only
FINNISH_PERCENT = {
    "a": (100.0, 0.0), "b": (100.0, 0.0), "c": (98.6, 1.4), "d": (18.6, 81.4),
    "e": (95.7, 4.3), "f": (9.5, 90.5), "g": (0.0, 100.0), "h": (0.0, 100.0),
    "i": (0.3, 99.7), "j": (0.5, 99.5), "k": (100.0, None), "l": (100.0, None),
    "m": (99.7, None),
}

HARMONY_ENTRIES = (
    ("maa-nä", ("maana", "maanä")),
    ("kaava-nä", ("kaavana", "kaavanä")),
)
HARMONY_MAPPINGS = (MappingId("maa-nä", "maana"), MappingId("kaava-nä", "kaavana"))


def _render(sylls, feet, ending=()):
    """Feet as ``(start, size)``; remaining syllables unfooted."""
    out, i, loose = [], 0, False
    starts = dict(feet)
    sylls = list(sylls) + list(ending)
    while i < len(sylls):
        if i in starts:
            out.append("(" + ".".join(sylls[i:i + starts[i]]) + ")")
            i += starts[i]
            loose = False
        else:
            out.append(("." if loose else "") + sylls[i])
            i += 1
            loose = True
    return "".join(out)


def finnish_parses(stem_type: str) -> tuple[str, str | None]:
    """The displayed ``-ja`` deletion parse and ``-i.ta`` retention parse.

    Four-syllable stems (k, l, m) only come with the deletion parse.
    """
    s = FINNISH_STEMS[stem_type].split(".")
    if len(s) == 5:
        deletion = _render(s, [(0, 2), (2, 3)], ["ja"])
        retention = _render(s[:4] + [s[4] + "i", "ta"], [(0, 2), (2, 2), (4, 2)])
        return deletion, retention
    return _render(s, [(0, 2), (2, 2)], ["ja"]), None


def finnish_extra_deletion_parse(stem_type: str) -> str:
    """``(s1.s2)s3(s4.s5)ja``: the alternative footing of the extra-candidate fixture."""
    s = FINNISH_STEMS[stem_type].split(".")
    return _render(s, [(0, 2), (3, 2)], ["ja"])


def finnish_entries(extra_candidate: bool = False) -> list[tuple[str, list[str]]]:
    entries = []
    for k in FINNISH_STEMS:
        deletion, retention = finnish_parses(k)
        cands = [deletion] + ([retention] if retention else [])
        if extra_candidate and k in "cdef":
            cands.append(finnish_extra_deletion_parse(k))
        entries.append((k, cands))
    return entries


def finnish_mappings(stem_types: str = "abcdefghijklm") -> list[MappingId]:
    """Deletion and retention mappings of the displayed parses, in stem order."""
    out = []
    for k in stem_types:
        deletion, retention = finnish_parses(k)
        out.append(MappingId(k, deletion))
        if retention:
            out.append(MappingId(k, retention))
    return out


def finnish_annotations() -> dict[str, str]:
    """Corpus percentages keyed by mapping, for display next to each parse."""
    out = {}
    for k, pcts in FINNISH_PERCENT.items():
        for m, pct in zip(finnish_mappings(k), pcts):
            out[str(m)] = f"{pct:g}%"
    return out


def derive_finnish(definitions: FinnishDefinitions = FinnishDefinitions(),
                   extra_candidate: bool = False) -> Tableau:
    meta = {
        "fixture": "finnish-extra-candidate" if extra_candidate else "finnish",
        "fixture_version": FIXTURE_VERSION,
        "definitions": definitions.to_json(),
        "stems": {k: FINNISH_STEMS[k] for k in FINNISH_STEMS},
        "annotations": finnish_annotations(),
    }
    return build_tableau("finnish", finnish_entries(extra_candidate), meta,
                         finnish_definitions=definitions)


def derive_harmony(interveners: str = "non-agreeing") -> Tableau:
    meta = {"fixture": "harmony", "fixture_version": FIXTURE_VERSION,
            "definitions": {"interveners": interveners}}
    return build_tableau("harmony", HARMONY_ENTRIES, meta, interveners=interveners)


FIXTURES = {
    "finnish": "finnish.json",
    "finnish-extra-candidate": "finnish_extra_candidate.json",
    "harmony": "harmony.json",
}


def fixture_path(name: str):
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return resources.files("equiprob") / "data" / FIXTURES[name]


def load_fixture(name: str) -> Tableau:
    return parse_tableau(fixture_path(name).read_bytes())


def derive_fixture(name: str) -> Tableau:
    if name == "finnish":
        return derive_finnish()
    if name == "finnish-extra-candidate":
        return derive_finnish(EXTRA_CANDIDATE_DEFINITIONS, extra_candidate=True)
    if name == "harmony":
        return derive_harmony()
    raise KeyError(name)


def freeze_all(directory) -> list[str]:
    """Write every derived fixture into ``directory``; returns the file names."""
    from pathlib import Path
    written = []
    for name, fname in FIXTURES.items():
        Path(directory, fname).write_text(serialize_tableau(derive_fixture(name)), encoding="utf-8")
        written.append(fname)
    return written


