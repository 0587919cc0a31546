"""Uniform probability inequalities, equiprobability and T-orders.

Stochastic HG: ``P(a) <= P(b)`` for every weight vector iff every loser
difference vector of ``b`` lies in the cone region of ``a``'s difference
vectors (``a`` possible in HG).  MaxEnt: the same with the hull region is
only a necessary condition.  Equiprobability in MaxEnt holds iff the two
mappings have the same multiset of difference vectors; in stochastic HG
(equivalently in categorical HG) iff their nonredundant difference vectors
span the same rays.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import (MembershipCertificate, canonical_ray, cone_orthant_member,
                       hull_orthant_member, nonredundant_losers)
from .lp import FeasibilityProblem, solve_feasibility
from .tableau import MappingId, Tableau, difference_vectors

FRAMEWORKS = ("shg", "me-necessary")


@dataclass(frozen=True)
class Possibility:
    possible: bool
    witness: tuple[Fraction, ...] | None = None  # w >= 0 with w.c >= 1 for all losers
    farkas: tuple[Fraction, ...] | None = None   # y >= 0, sum y_i c_i <= 0 entrywise, sum y > 0

    def __bool__(self):
        return self.possible


@dataclass(frozen=True)
class UniformInequalityVerdict:
    framework: str  # "shg" or "me-necessary"
    a: MappingId
    b: MappingId
    holds: bool
    certificates: dict[str, MembershipCertificate] = field(default_factory=dict)
    vacuous: bool = False
    note: str = ""

    @property
    def exact(self) -> bool:
        """True when ``holds`` decides the uniform inequality both ways."""
        return self.framework == "shg" or not self.holds

    def to_json(self) -> dict:
        return {
            "framework": self.framework, "a": str(self.a), "b": str(self.b),
            "holds": self.holds, "vacuous": self.vacuous, "exact": self.exact,
            "note": self.note,
            "certificates": {sr: c.to_json() for sr, c in self.certificates.items()},
        }


@dataclass(frozen=True)
class EquiprobabilityVerdict:
    framework: str  # "me", "shg" or "hg"
    a: MappingId
    b: MappingId
    equal: bool
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"framework": self.framework, "a": str(self.a), "b": str(self.b),
                "equal": self.equal, "evidence": _jsonable(self.evidence)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, MappingId):
        return str(obj)
    return obj


def _diffs(t: Tableau, m: MappingId) -> list[tuple[int, ...]]:
    return [v for _, v in difference_vectors(t, m)]


def hg_possible(t: Tableau, a: MappingId) -> Possibility:
    """Is there ``w >= 0`` with ``w.c > 0`` for every loser difference vector ``c``?

    Decided through the scale-free system ``w.c >= 1``.
    """
    diffs = _diffs(t, a)
    if not diffs:
        return Possibility(True, witness=tuple(Fraction(0) for _ in range(t.n)))
    if any(all(x == 0 for x in c) for c in diffs):
        # w.0 = 0 never exceeds 0; y = e_i certifies
        y = tuple(Fraction(1 if all(x == 0 for x in c) and i == _first_zero(diffs) else 0)
                  for i, c in enumerate(diffs))
        return Possibility(False, farkas=y)
    res = solve_feasibility(FeasibilityProblem(t.n, inequalities=[(c, 1) for c in diffs]))
    if res.feasible:
        return Possibility(True, witness=res.x)
    return Possibility(False, farkas=res.y)


def _first_zero(diffs):
    return next(i for i, c in enumerate(diffs) if all(x == 0 for x in c))


def _has_zero(diffs) -> bool:
    return any(all(x == 0 for x in c) for c in diffs)


def shg_uniform_leq(t: Tableau, a: MappingId, b: MappingId) -> UniformInequalityVerdict:
    """Does ``P_SHG(a) <= P_SHG(b)`` hold at every nonnegative weight vector?"""
    da = _diffs(t, a)
    losers_b = difference_vectors(t, b)
    if not hg_possible(t, a):
        return UniformInequalityVerdict("shg", a, b, True, vacuous=True,
                                        note=f"{a} is impossible in HG; its probability is 0")
    if _has_zero([v for _, v in losers_b]):
        return UniformInequalityVerdict(
            "shg", a, b, False,
            note=f"{b} has a loser tying it on every constraint and is impossible in HG, "
                 f"while {a} is possible")
    certs = {sr: cone_orthant_member(v, da) for sr, v in losers_b}
    holds = all(c.member for c in certs.values())
    note = "" if losers_b else f"{b} has no losers; its probability is 1"
    return UniformInequalityVerdict("shg", a, b, holds, certs, vacuous=not losers_b, note=note)


def me_uniform_leq_necessary(t: Tableau, a: MappingId, b: MappingId) -> UniformInequalityVerdict:
    """Necessary condition for ``P_ME(a) <= P_ME(b)`` at every nonnegative weight vector.

    ``holds=False`` refutes the inequality; ``holds=True`` only marks a
    candidate arrow.
    """
    da = _diffs(t, a)
    losers_b = difference_vectors(t, b)
    if not da:
        holds = not losers_b
        note = (f"{a} has no losers, so its probability is identically 1; "
                + ("so is that of " + str(b) if holds else f"{b} has losers"))
        return UniformInequalityVerdict("me-necessary", a, b, holds, note=note)
    certs = {sr: hull_orthant_member(v, da) for sr, v in losers_b}
    holds = all(c.member for c in certs.values())
    note = "necessary condition only; pending numeric confirmation" if holds else ""
    return UniformInequalityVerdict("me-necessary", a, b, holds, certs, note=note)


def me_equiprobable(t: Tableau, a: MappingId, b: MappingId) -> EquiprobabilityVerdict:
    ma = Counter(_diffs(t, a))
    mb = Counter(_diffs(t, b))
    only_a = ma - mb
    only_b = mb - ma
    evidence = {
        "diffvecs_a": sorted(ma.elements()),
        "diffvecs_b": sorted(mb.elements()),
        "only_a": sorted(only_a.elements()),
        "only_b": sorted(only_b.elements()),
    }
    return EquiprobabilityVerdict("me", a, b, not only_a and not only_b, evidence)


def _ray_summary(diffs: Sequence[tuple[int, ...]]) -> tuple[list[int], dict]:
    keep = nonredundant_losers(diffs)
    return keep, {canonical_ray(diffs[i]): i for i in keep}


def shg_equiprobable(t: Tableau, a: MappingId, b: MappingId, framework: str = "shg") -> EquiprobabilityVerdict:
    da, db = _diffs(t, a), _diffs(t, b)
    pa, pb = hg_possible(t, a).possible, hg_possible(t, b).possible
    keep_a, rays_a = _ray_summary(da)
    keep_b, rays_b = _ray_summary(db)
    evidence = {
        "possible_a": pa, "possible_b": pb,
        "nonredundant_a": keep_a, "nonredundant_b": keep_b,
        "rays_a": sorted(rays_a), "rays_b": sorted(rays_b),
        "zero_losers_a": [i for i, c in enumerate(da) if canonical_ray(c) is None],
        "zero_losers_b": [i for i, c in enumerate(db) if canonical_ray(c) is None],
    }
    if not (pa and pb):
        evidence["reason"] = "HG-impossible mappings have probability 0"
        return EquiprobabilityVerdict(framework, a, b, pa == pb, evidence)
    matched = [(rays_a[r], rays_b[r]) for r in sorted(set(rays_a) & set(rays_b))]
    evidence["matched"] = matched
    evidence["unmatched_a"] = sorted(set(rays_a) - set(rays_b))
    evidence["unmatched_b"] = sorted(set(rays_b) - set(rays_a))
    return EquiprobabilityVerdict(framework, a, b, set(rays_a) == set(rays_b), evidence)


def hg_equivalent(t: Tableau, a: MappingId, b: MappingId) -> EquiprobabilityVerdict:
    return shg_equiprobable(t, a, b, framework="hg")


# -- T-orders ----------------------------------------------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # smaller index stays root so block order is stable
            self.parent[max(ri, rj)] = min(ri, rj)


@dataclass
class TOrderGraph:
    framework: str
    blocks: list[list[MappingId]]
    closure: set[tuple[int, int]]  # (i, j): block i <= block j, i != j

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Transitive reduction of the block order."""
        out = []
        for i, j in sorted(self.closure):
            if not any((i, k) in self.closure and (k, j) in self.closure
                       for k in range(len(self.blocks)) if k not in (i, j)):
                out.append((i, j))
        return out

    def block_of(self, m: MappingId) -> int:
        for i, block in enumerate(self.blocks):
            if m in block:
                return i
        raise KeyError(m)

    def leq(self, a: MappingId, b: MappingId) -> bool:
        i, j = self.block_of(a), self.block_of(b)
        return i == j or (i, j) in self.closure

    def chains(self) -> list[list[int]]:
        """Maximal paths through the reduced edge graph."""
        succ = {i: [] for i in range(len(self.blocks))}
        has_pred = set()
        for i, j in self.edges:
            succ[i].append(j)
            has_pred.add(j)
        out = []

        def walk(path):
            nxt = succ[path[-1]]
            if not nxt:
                out.append(path)
            for j in nxt:
                walk(path + [j])

        for i in range(len(self.blocks)):
            if i not in has_pred:
                walk([i])
        return out

    def to_json(self) -> dict:
        return {
            "framework": self.framework,
            "blocks": [[str(m) for m in b] for b in self.blocks],
            "edges": [list(e) for e in self.edges],
            "closure": sorted(list(e) for e in self.closure),
            "chains": self.chains(),
        }

    def to_dot(self) -> str:
        style = ' style=dashed label="necessary"' if self.framework == "me-necessary" else ""
        lines = [f'digraph torder {{', '  rankdir=LR;', '  node [shape=box];']
        for i, block in enumerate(self.blocks):
            label = "\\n".join(str(m).replace('"', '\\"') for m in block)
            lines.append(f'  b{i} [label="{label}"];')
        for i, j in self.edges:
            lines.append(f"  b{i} -> b{j} [{style.strip()}];" if style else f"  b{i} -> b{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def torder(t: Tableau, framework: str, mappings: Sequence[MappingId] | None = None) -> TOrderGraph:
    if framework not in FRAMEWORKS:
        raise ValueError(f"framework must be one of {FRAMEWORKS}")
    mappings = list(t.mappings() if mappings is None else mappings)
    for m in mappings:
        t.resolve(m)
    k = len(mappings)
    diffs = [_diffs(t, m) for m in mappings]
    if framework == "shg":
        possible = [hg_possible(t, m).possible for m in mappings]
        rays = [frozenset(_ray_summary(d)[1]) for d in diffs]

        def leq(i, j):
            if not possible[i]:
                return True
            if _has_zero(diffs[j]):
                return False
            return all(cone_orthant_member(v, diffs[i]).member for v in diffs[j])

        def same(i, j):
            if not (possible[i] and possible[j]):
                return possible[i] == possible[j]
            return rays[i] == rays[j]
    else:
        def leq(i, j):
            if not diffs[i]:
                return not diffs[j]
            return all(hull_orthant_member(v, diffs[i]).member for v in diffs[j])

        same = None

    rel = [[i == j or leq(i, j) for j in range(k)] for i in range(k)]
    uf = _UnionFind(k)
    for i in range(k):
        for j in range(i + 1, k):
            if (same(i, j) if same else rel[i][j] and rel[j][i]):
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(uf.find(i), []).append(i)
    members = sorted(groups.values(), key=lambda g: g[0])
    blocks = [[mappings[i] for i in g] for g in members]
    reps = [g[0] for g in members]
    closure = {(bi, bj) for bi, ri in enumerate(reps) for bj, rj in enumerate(reps)
               if bi != bj and rel[ri][rj]}
    # the uniform relation is transitive already; closing again only guards the display
    changed = True
    while changed:
        changed = False
        for (i, j) in list(closure):
            for (j2, l) in list(closure):
                if j2 == j and i != l and (i, l) not in closure:
                    closure.add((i, l))
                    changed = True
    return TOrderGraph(framework, blocks, closure)
