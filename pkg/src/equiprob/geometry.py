"""Polyhedral predicates over difference vectors, decided exactly.

Two regions matter.  The *cone region* of generators ``g_1..g_m`` is
``cone(g) + R^n_+``: every point at least as large, coordinate by
coordinate, as some nonnegative combination of the generators.  The *hull
region* ``conv(g) + R^n_+`` additionally requires the coefficients to sum
to one.  Membership in either is a small LP, solved by :mod:`equiprob.lp`.

Extreme points of the hull region are found by leave-one-out membership.
If ``g_i`` lies in the hull region of the other generators it is a convex
combination of points of the region, hence not extreme.  Conversely, since
``ext(conv(g) + R^n_+)`` is a subset of ``{g_1..g_m}``, the region is
``conv(ext) + R^n_+``; a generator outside the hull region of the others
is therefore not in ``conv`` of the remaining extreme points plus the
orthant, and a point of a polyhedron that is not a convex combination of
the other extreme points (plus recession directions) is itself extreme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lp import FeasibilityProblem, solve_feasibility

Vector = Sequence[int | Fraction]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipCertificate:
    """Witness for (non-)membership of ``target`` in a cone or hull region.

    Members carry ``lambdas`` and ``slack`` with
    ``target - sum(lambda_i g_i) == slack >= 0``.  Non-members carry a
    ``separator`` ``w >= 0`` and a ``threshold`` ``t`` such that
    ``w.target < t <= w.g`` for every generator; in cone mode ``t == 0``.
    """

    member: bool
    mode: str  # "cone" or "hull"
    lambdas: tuple[Fraction, ...] | None = None
    slack: tuple[Fraction, ...] | None = None
    separator: tuple[Fraction, ...] | None = None
    threshold: Fraction | None = None

    @property
    def kind(self) -> str:
        return "member" if self.member else "non-member"

    def to_json(self) -> dict:
        def enc(vals):
            return None if vals is None else [_frac_json(v) for v in vals]
        out = {"kind": self.kind, "mode": self.mode}
        if self.member:
            out["lambdas"] = enc(self.lambdas)
            out["slack"] = enc(self.slack)
        else:
            out["separator"] = enc(self.separator)
            out["threshold"] = _frac_json(self.threshold)
        return out


def _frac_json(x: Fraction) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _check_dims(target: Vector | None, generators: Sequence[Vector]) -> int | None:
    n = None if target is None else len(target)
    for g in generators:
        if n is None:
            n = len(g)
        elif len(g) != n:
            raise DimensionError(f"vector of length {len(g)} where {n} expected")
    return n


def _dot(a: Vector, b: Vector) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def _member(target: Vector, generators: Sequence[Vector], hull: bool) -> MembershipCertificate:
    n = _check_dims(target, generators)
    m = len(generators)
    mode = "hull" if hull else "cone"
    # rows: -sum_i lambda_i g_i[k] >= -target[k]  for each coordinate k
    ineqs = [([-Fraction(g[k]) for g in generators], -Fraction(target[k])) for k in range(n)]
    eqs = [([Fraction(1)] * m, Fraction(1))] if hull else []
    result = solve_feasibility(FeasibilityProblem(m, equalities=eqs, inequalities=ineqs))
    if result.feasible:
        lambdas = result.x
        slack = tuple(Fraction(target[k]) - sum((lam * g[k] for lam, g in zip(lambdas, generators)),
                                                 Fraction(0)) for k in range(n))
        return MembershipCertificate(True, mode, lambdas=lambdas, slack=slack)
    y = result.y
    if hull:
        mu, w = y[0], y[1:]
    else:
        mu, w = Fraction(0), y
    return MembershipCertificate(False, mode, separator=tuple(w), threshold=mu)


def cone_orthant_member(target: Vector, generators: Sequence[Vector]) -> MembershipCertificate:
    """Is ``target >= sum(lambda_i g_i)`` for some ``lambda >= 0``?"""
    return _member(target, generators, hull=False)


def hull_orthant_member(target: Vector, generators: Sequence[Vector]) -> MembershipCertificate:
    """Is ``target >= sum(lambda_i g_i)`` for some ``lambda >= 0`` summing to 1?"""
    if not generators:
        raise ValueError("the convex hull of no generators is empty")
    return _member(target, generators, hull=True)


def check_certificate(cert: MembershipCertificate, target: Vector,
                      generators: Sequence[Vector]) -> bool:
    """Re-verify a certificate with exact arithmetic, independently of the LP."""
    n = len(target)
    if cert.member:
        lam = cert.lambdas
        if lam is None or len(lam) != len(generators) or any(x < 0 for x in lam):
            return False
        if cert.mode == "hull" and sum(lam, Fraction(0)) != 1:
            return False
        for k in range(n):
            rest = Fraction(target[k]) - sum((x * g[k] for x, g in zip(lam, generators)), Fraction(0))
            if rest < 0 or rest != cert.slack[k]:
                return False
        return True
    w, t = cert.separator, cert.threshold
    if w is None or len(w) != n or any(x < 0 for x in w):
        return False
    if cert.mode == "cone" and t != 0:
        return False
    if not _dot(w, target) < t:
        return False
    return all(_dot(w, g) >= t for g in generators)


def canonical_ray(v: Vector) -> tuple[int, ...] | None:
    """Primitive integer representative of ``{c v : c > 0}``; ``None`` for the zero vector."""
    ints = []
    for x in v:
        x = Fraction(x)
        ints.append(x)
    if all(x == 0 for x in ints):
        return None
    denom = math.lcm(*(x.denominator for x in ints))
    nums = [int(x * denom) for x in ints]
    g = math.gcd(*nums)
    return tuple(x // g for x in nums)


def extreme_generators(generators: Sequence[Vector]) -> list[int]:
    """Indices of the extreme points of ``conv(generators) + R^n_+``.

    Copies of one value are all excluded from the leave-one-out test; the
    lowest index stands for the value.
    """
    _check_dims(None, generators)
    out = []
    seen = set()
    for i, g in enumerate(generators):
        key = tuple(Fraction(x) for x in g)
        if key in seen:
            continue
        seen.add(key)
        rest = [h for h in generators if tuple(Fraction(x) for x in h) != key]
        if not rest or not hull_orthant_member(g, rest).member:
            out.append(i)
    return out


def nonredundant_losers(diffvecs: Sequence[Vector]) -> list[int]:
    """Indices of difference vectors outside the cone region of the others.

    Vectors on a common ray are tested against the vectors off that ray and
    represented by their lowest index.
    """
    _check_dims(None, diffvecs)
    rays = [canonical_ray(v) for v in diffvecs]
    out = []
    seen = set()
    for i, v in enumerate(diffvecs):
        if rays[i] is None or rays[i] in seen:
            continue
        seen.add(rays[i])
        rest = [h for h, r in zip(diffvecs, rays) if r != rays[i]]
        if not cone_orthant_member(v, rest).member:
            out.append(i)
    return out
