"""Exact rational linear feasibility.

Phase-one simplex over :class:`fractions.Fraction` with Bland's rule.  A
feasible problem yields an assignment that satisfies every row exactly; an
infeasible one yields a Farkas multiplier vector ``y`` such that

* ``y[r] >= 0`` for every ``>=`` row (equality rows are unrestricted),
* ``sum_r y[r] * A[r][j] <= 0`` for every nonnegative variable ``j``,
* ``sum_r y[r] * A[r][j] == 0`` for every free variable ``j``,
* ``sum_r y[r] * b[r] > 0``.

Any feasible ``x`` would give ``0 >= sum_j x_j (y.A_j) >= y.b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Row = Sequence[Fraction | int]


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class FeasibilityProblem:
    """``A_eq x = b_eq``, ``A_ge x >= b_ge``, ``x_j >= 0`` where ``nonneg[j]``."""

    nvars: int
    equalities: list[tuple[Row, Fraction | int]] = field(default_factory=list)
    inequalities: list[tuple[Row, Fraction | int]] = field(default_factory=list)
    nonneg: list[bool] | None = None

    def __post_init__(self):
        if self.nonneg is None:
            self.nonneg = [True] * self.nvars
        if len(self.nonneg) != self.nvars:
            raise ValueError("nonnegativity flags must match the variable count")
        for row, _ in self.equalities + self.inequalities:
            if len(row) != self.nvars:
                raise ValueError(f"row length {len(row)} != variable count {self.nvars}")

    def rows(self):
        """All rows as ``(coeffs, rhs, is_equality)``, equalities first."""
        for row, rhs in self.equalities:
            yield [_q(a) for a in row], _q(rhs), True
        for row, rhs in self.inequalities:
            yield [_q(a) for a in row], _q(rhs), False


@dataclass(frozen=True)
class Feasible:
    x: tuple[Fraction, ...]
    feasible: bool = True


@dataclass(frozen=True)
class Infeasible:
    y: tuple[Fraction, ...]  # one multiplier per row, equalities first
    feasible: bool = False


def solve_feasibility(problem: FeasibilityProblem) -> Feasible | Infeasible:
    rows = list(problem.rows())
    nrows = len(rows)
    # standard form columns: x+ for every var, x- for free vars, surplus per >= row
    cols: list[tuple[str, int]] = []
    for j in range(problem.nvars):
        cols.append(("x", j))
        if not problem.nonneg[j]:
            cols.append(("neg", j))
    for r, (_, _, is_eq) in enumerate(rows):
        if not is_eq:
            cols.append(("surplus", r))
    ncols = len(cols)

    flips = []
    tab: list[list[Fraction]] = []
    for r, (coeffs, rhs, is_eq) in enumerate(rows):
        line = []
        for kind, j in cols:
            if kind == "x":
                line.append(coeffs[j])
            elif kind == "neg":
                line.append(-coeffs[j])
            else:
                line.append(Fraction(-1) if j == r else Fraction(0))
        s = -1 if rhs < 0 else 1
        flips.append(s)
        if s < 0:
            line = [-a for a in line]
            rhs = -rhs
        # artificial columns ncols..ncols+nrows-1, then the rhs
        art = [Fraction(0)] * nrows
        art[r] = Fraction(1)
        tab.append(line + art + [rhs])

    total = ncols + nrows
    basis = [ncols + r for r in range(nrows)]
    # phase-one objective: minimize sum of artificials; reduced costs row
    cost = [Fraction(0)] * ncols + [Fraction(1)] * nrows + [Fraction(0)]
    for r in range(nrows):
        for k in range(total + 1):
            cost[k] -= tab[r][k]

    while True:
        enter = next((k for k in range(total) if cost[k] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(nrows):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:  # cannot happen: phase one is bounded below by 0
            raise RuntimeError("unbounded phase-one problem")
        piv = tab[leave][enter]
        prow = [a / piv for a in tab[leave]]
        tab[leave] = prow
        for r in range(nrows):
            if r != leave and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [a - f * b for a, b in zip(tab[r], prow)]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, prow)]
        basis[leave] = enter

    objective = -cost[-1]
    if objective == 0:
        values = [Fraction(0)] * total
        for r, k in enumerate(basis):
            values[k] = tab[r][-1]
        x = [Fraction(0)] * problem.nvars
        for k, (kind, j) in enumerate(cols):
            if kind == "x":
                x[j] += values[k]
            elif kind == "neg":
                x[j] -= values[k]
        return Feasible(tuple(x))

    # reduced cost of artificial r is 1 - y_r in the flipped system
    y = tuple(flips[r] * (1 - cost[ncols + r]) for r in range(nrows))
    return Infeasible(y)


def check_assignment(problem: FeasibilityProblem, x: Sequence[Fraction]) -> bool:
    for j in range(problem.nvars):
        if problem.nonneg[j] and x[j] < 0:
            return False
    for coeffs, rhs, is_eq in problem.rows():
        lhs = sum((a * xj for a, xj in zip(coeffs, x)), Fraction(0))
        if (is_eq and lhs != rhs) or (not is_eq and lhs < rhs):
            return False
    return True


def check_farkas(problem: FeasibilityProblem, y: Sequence[Fraction]) -> bool:
    rows = list(problem.rows())
    if len(y) != len(rows):
        return False
    for yr, (_, _, is_eq) in zip(y, rows):
        if not is_eq and yr < 0:
            return False
    for j in range(problem.nvars):
        s = sum((yr * coeffs[j] for yr, (coeffs, _, _) in zip(y, rows)), Fraction(0))
        if s > 0 or (not problem.nonneg[j] and s != 0):
            return False
    return sum((yr * rhs for yr, (_, rhs, _) in zip(y, rows)), Fraction(0)) > 0
