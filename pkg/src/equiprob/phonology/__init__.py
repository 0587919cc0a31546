"""Phonological front end: candidate notations in, tableaux out."""

from __future__ import annotations

from typing import Sequence

from ..tableau import Tableau, make_tableau
from . import finnish, harmony
from .finnish import FinnishDefinitions, eval_finnish_constraints
from .harmony import SegmentalForm, eval_harmony_constraints
from .prosody import NotationError, ProsodicParse, Syllable, parse_prosodic_candidate

CHOICES = ("finnish", "harmony")


def build_tableau(choice: str, entries: Sequence[tuple[str, Sequence[str]]],
                  metadata: dict | None = None, *,
                  finnish_definitions: FinnishDefinitions = FinnishDefinitions(),
                  interveners: str = "non-agreeing") -> Tableau:
    """Evaluate every candidate notation and assemble a tableau.

    For ``"finnish"`` each candidate is a prosodic notation such as
    ``(sym.po)(si.u.me)ja``; for ``"harmony"`` the UR and the candidates are
    segmental forms such as ``maa-nä`` and ``maana``.
    """
    if choice == "finnish":
        rows = {ur: [(c, eval_finnish_constraints(parse_prosodic_candidate(c), finnish_definitions))
                     for c in cands] for ur, cands in entries}
        names = finnish.CONSTRAINTS
    elif choice == "harmony":
        rows = {}
        for ur, cands in entries:
            form = SegmentalForm.parse(ur)
            rows[ur] = [(c, eval_harmony_constraints(form, SegmentalForm.parse(c), interveners))
                        for c in cands]
        names = harmony.CONSTRAINTS
    else:
        raise ValueError(f"constraint set must be one of {CHOICES}, got {choice!r}")
    if len(rows) != len(entries):
        raise ValueError("duplicate UR in entries")
    return make_tableau(names, rows, metadata or {})


__all__ = [
    "CHOICES", "FinnishDefinitions", "NotationError", "ProsodicParse", "SegmentalForm", "Syllable",
    "build_tableau", "eval_finnish_constraints", "eval_harmony_constraints",
    "parse_prosodic_candidate",
]
