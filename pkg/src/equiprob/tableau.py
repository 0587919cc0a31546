"""Constraint sets, tableaux, mappings and difference vectors.

A tableau lists, for every underlying form, a finite set of candidate
surface forms together with their integer violation profiles.  A mapping
picks one candidate of one input as the intended winner; every other
candidate of that input is a loser.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Iterable


class TableauError(ValueError):
    """Base class for tableau problems."""


class TableauParseError(TableauError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class TableauSchemaError(TableauError):
    pass


class MappingLookupError(TableauError, LookupError):
    pass


@dataclass(frozen=True)
class ConstraintSet:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise TableauSchemaError("constraint set must be nonempty")
        seen = set()
        for name in self.names:
            if not isinstance(name, str) or not name:
                raise TableauSchemaError(f"bad constraint name {name!r}")
            if name in seen:
                raise TableauSchemaError(f"duplicate constraint name {name!r}")
            seen.add(name)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class CandidateEntry:
    sr: str
    violations: tuple[int, ...]
    frequency: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))


@dataclass(frozen=True)
class InputEntry:
    ur: str
    candidates: tuple[CandidateEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))

    def candidate(self, sr: str) -> CandidateEntry:
        for cand in self.candidates:
            if cand.sr == sr:
                return cand
        raise MappingLookupError(f"input {self.ur!r} has no candidate {sr!r}")


@dataclass(frozen=True)
class MappingId:
    ur: str
    sr: str

    def __str__(self) -> str:
        return f"{self.ur} -> {self.sr}"

    @classmethod
    def parse(cls, text: str) -> "MappingId":
        """Read ``ur -> sr`` (or ``ur:sr`` when the labels contain no colon)."""
        if "->" in text:
            ur, sr = text.split("->", 1)
        elif text.count(":") == 1:
            ur, sr = text.split(":")
        else:
            raise ValueError(f"cannot read mapping {text!r}; use 'UR -> SR'")
        return cls(ur.strip(), sr.strip())


@dataclass(frozen=True)
class Tableau:
    constraints: ConstraintSet
    inputs: tuple[InputEntry, ...]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        problems = validate(self)
        if problems:
            raise TableauSchemaError("; ".join(problems))

    def __eq__(self, other):
        if not isinstance(other, Tableau):
            return NotImplemented
        return (self.constraints, self.inputs, self.metadata) == (
            other.constraints, other.inputs, other.metadata)

    __hash__ = None

    @property
    def n(self) -> int:
        return len(self.constraints)

    def input(self, ur: str) -> InputEntry:
        for entry in self.inputs:
            if entry.ur == ur:
                return entry
        raise MappingLookupError(f"no input {ur!r}")

    def resolve(self, mapping: MappingId) -> tuple[InputEntry, CandidateEntry]:
        entry = self.input(mapping.ur)
        return entry, entry.candidate(mapping.sr)

    def mappings(self) -> list[MappingId]:
        return [MappingId(e.ur, c.sr) for e in self.inputs for c in e.candidates]


DifferenceVector = tuple[int, ...]


def difference_vectors(tableau: Tableau, mapping: MappingId) -> list[tuple[str, DifferenceVector]]:
    """Loser minus winner violations for every loser of ``mapping``, in file order."""
    entry, winner = tableau.resolve(mapping)
    out = []
    for cand in entry.candidates:
        if cand.sr == winner.sr:
            continue
        out.append((cand.sr, tuple(z - y for z, y in zip(cand.violations, winner.violations))))
    return out


def diffvecs(tableau: Tableau, mapping: MappingId) -> list[DifferenceVector]:
    return [v for _, v in difference_vectors(tableau, mapping)]


def validate(tableau: Tableau) -> list[str]:
    """One diagnostic string per broken invariant; empty when well formed."""
    problems = []
    n = len(tableau.constraints)
    seen_urs = set()
    for entry in tableau.inputs:
        if entry.ur in seen_urs:
            problems.append(f"duplicate input label {entry.ur!r}")
        seen_urs.add(entry.ur)
        if not entry.candidates:
            problems.append(f"input {entry.ur!r}: candidate list is empty")
        seen_srs = set()
        for cand in entry.candidates:
            where = f"input {entry.ur!r}, candidate {cand.sr!r}"
            if cand.sr in seen_srs:
                problems.append(f"{where}: duplicate candidate label")
            seen_srs.add(cand.sr)
            if len(cand.violations) != n:
                problems.append(
                    f"{where}: expected {n} violations, got {len(cand.violations)}")
            for k, v in enumerate(cand.violations):
                cname = tableau.constraints.names[k] if k < n else f"#{k}"
                if isinstance(v, bool) or not isinstance(v, int):
                    problems.append(f"{where}, constraint {cname}: violations must be integers")
                elif v < 0:
                    problems.append(f"{where}, constraint {cname}: violations must be nonnegative")
            if cand.frequency is not None and cand.frequency < 0:
                problems.append(f"{where}: frequency must be nonnegative")
    return problems


def diagnose(data: dict) -> list[str]:
    """Validate raw (already JSON-decoded) tableau data without raising."""
    try:
        tableau = _from_obj(data, check=False)
    except TableauError as exc:
        return [str(exc)]
    return validate(tableau)


# -- canonical JSON format ---------------------------------------------------

def _from_obj(data: Any, check: bool = True) -> Tableau:
    if not isinstance(data, dict):
        raise TableauSchemaError("top level must be an object")
    unknown = set(data) - {"constraints", "inputs", "metadata"}
    if unknown:
        raise TableauSchemaError(f"unknown top-level keys {sorted(unknown)}")
    if "constraints" not in data or "inputs" not in data:
        raise TableauSchemaError("missing 'constraints' or 'inputs'")
    constraints = ConstraintSet(tuple(data["constraints"]))
    inputs = []
    for i, raw in enumerate(data["inputs"]):
        if not isinstance(raw, dict) or "ur" not in raw or "candidates" not in raw:
            raise TableauSchemaError(f"input #{i}: needs 'ur' and 'candidates'")
        cands = []
        for j, rc in enumerate(raw["candidates"]):
            if not isinstance(rc, dict) or "sr" not in rc or "violations" not in rc:
                raise TableauSchemaError(f"input {raw['ur']!r}, candidate #{j}: needs 'sr' and 'violations'")
            if not isinstance(rc["violations"], list):
                raise TableauSchemaError(f"input {raw['ur']!r}, candidate {rc['sr']!r}: violations must be a list")
            cands.append(CandidateEntry(str(rc["sr"]), tuple(rc["violations"]), rc.get("frequency")))
        inputs.append(InputEntry(str(raw["ur"]), tuple(cands)))
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise TableauSchemaError("'metadata' must be an object")
    if not check:
        tab = object.__new__(Tableau)
        object.__setattr__(tab, "constraints", constraints)
        object.__setattr__(tab, "inputs", tuple(inputs))
        object.__setattr__(tab, "metadata", metadata)
        return tab
    return Tableau(constraints, tuple(inputs), metadata)


def to_obj(tableau: Tableau) -> dict:
    inputs = []
    for entry in tableau.inputs:
        cands = []
        for c in entry.candidates:
            rc = {"sr": c.sr, "violations": list(c.violations)}
            if c.frequency is not None:
                rc["frequency"] = c.frequency
            cands.append(rc)
        inputs.append({"ur": entry.ur, "candidates": cands})
    return {"constraints": list(tableau.constraints.names), "inputs": inputs,
            "metadata": tableau.metadata}


def parse_tableau(source: bytes | str) -> Tableau:
    """Parse the canonical JSON tableau format (or the TSV import format)."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TableauParseError(f"not UTF-8: {exc}") from None
    if not source.lstrip().startswith("{"):
        return parse_tsv(source)
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise TableauParseError(exc.msg, exc.lineno, exc.colno) from None
    return _from_obj(data)


def serialize_tableau(tableau: Tableau) -> str:
    return json.dumps(to_obj(tableau), indent=2, ensure_ascii=False) + "\n"


def parse_tsv(source: str) -> Tableau:
    """Legacy spreadsheet layout: header ``UR<TAB>SR<TAB>C1...``, one row per candidate.

    An optional trailing ``frequency`` column is recognized by its header.
    Rows with an empty UR cell continue the previous input.
    """
    rows = list(csv.reader(io.StringIO(source), delimiter="\t"))
    rows = [(i + 1, r) for i, r in enumerate(rows) if any(cell.strip() for cell in r)]
    if not rows:
        raise TableauParseError("empty document", 1)
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 3:
        raise TableauParseError("header needs UR, SR and at least one constraint", header_line)
    has_freq = header[-1].lower() == "frequency"
    names = header[2:-1] if has_freq else header[2:]
    n = len(names)
    order: list[str] = []
    grouped: dict[str, list[CandidateEntry]] = {}
    current = None
    for line, row in rows[1:]:
        row = [cell.strip() for cell in row]
        if row[0]:
            current = row[0]
        if current is None:
            raise TableauParseError("first data row has no UR", line, 1)
        if len(row) < 2 or not row[1]:
            raise TableauParseError("missing SR", line, 2)
        cells = row[2:]
        freq = None
        if has_freq and len(cells) == n + 1:
            freq = float(cells[-1]) if cells[-1] else None
            cells = cells[:-1]
        if len(cells) != n:
            raise TableauSchemaError(
                f"input {current!r}, candidate {row[1]!r}: expected {n} violations, got {len(cells)}")
        viols = []
        for k, cell in enumerate(cells):
            try:
                viols.append(int(cell) if cell else 0)
            except ValueError:
                raise TableauParseError(f"violation {cell!r} is not an integer", line, k + 3) from None
        if current not in grouped:
            order.append(current)
            grouped[current] = []
        grouped[current].append(CandidateEntry(row[1], tuple(viols), freq))
    return Tableau(ConstraintSet(tuple(names)),
                   tuple(InputEntry(ur, tuple(grouped[ur])) for ur in order), {})


def serialize_tsv(tableau: Tableau) -> str:
    has_freq = any(c.frequency is not None for e in tableau.inputs for c in e.candidates)
    out = io.StringIO()
    w = csv.writer(out, delimiter="\t", lineterminator="\n")
    w.writerow(["UR", "SR", *tableau.constraints.names] + (["frequency"] if has_freq else []))
    for entry in tableau.inputs:
        for c in entry.candidates:
            row = [entry.ur, c.sr, *c.violations]
            if has_freq:
                row.append("" if c.frequency is None else c.frequency)
            w.writerow(row)
    return out.getvalue()


def load_tableau(path) -> Tableau:
    with open(path, "rb") as fh:
        return parse_tableau(fh.read())


def make_tableau(constraints: Iterable[str], inputs: dict[str, list[tuple[str, Iterable[int]]]],
                 metadata: dict | None = None) -> Tableau:
    """Convenience builder: ``{ur: [(sr, violations), ...]}``."""
    return Tableau(
        ConstraintSet(tuple(constraints)),
        tuple(InputEntry(ur, tuple(CandidateEntry(sr, tuple(v)) for sr, v in cands))
              for ur, cands in inputs.items()),
        metadata or {},
    )
