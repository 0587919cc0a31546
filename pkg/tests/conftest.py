import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from equiprob.tableau import MappingId, make_tableau


def pair_tableau(losers_a, losers_b, n=None):
    """Two inputs ``A`` and ``B`` whose winners ``w`` have the given loser difference vectors.

    Violations are shifted so every count is nonnegative; the shift cancels
    in every difference vector.
    """
    vecs = list(losers_a) + list(losers_b)
    if n is None:
        n = len(vecs[0]) if vecs else 1
    base = [max([0] + [-v[k] for v in vecs]) for k in range(n)]

    def rows(losers):
        out = [("w", tuple(base))]
        out += [(f"z{i}", tuple(b + d for b, d in zip(base, v))) for i, v in enumerate(losers)]
        return out

    t = make_tableau([f"C{k}" for k in range(n)], {"A": rows(losers_a), "B": rows(losers_b)})
    return t, MappingId("A", "w"), MappingId("B", "w")


def vectors(n, lo=-3, hi=3, min_size=1, max_size=5):
    return st.lists(st.tuples(*[st.integers(lo, hi)] * n), min_size=min_size, max_size=max_size)


def solve_square(rows, rhs):
    """Exact Gaussian elimination; ``None`` when singular."""
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    k = len(m)
    for c in range(k):
        p = next((r for r in range(c, k) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        for r in range(k):
            if r != c and m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][k] / m[i][i] for i in range(k)]


def vertex_oracle(nvars, equalities, inequalities):
    """Feasibility of ``{x >= 0, Ex = e, Ax >= a}`` by enumerating basic solutions.

    The region sits in the nonnegative orthant, so it has a vertex when it
    is nonempty; every vertex makes ``nvars`` linearly independent
    constraints tight.
    """
    bounds = [([1 if j == i else 0 for j in range(nvars)], 0) for i in range(nvars)]
    rows = list(equalities) + list(inequalities) + bounds
    dense = np.array([r for r, _ in rows], dtype=float)
    rhs = np.array([float(b) for _, b in rows])
    neq = len(equalities)
    for tight in itertools.combinations(range(len(rows)), nvars):
        # float screen first; survivors are confirmed exactly
        a = dense[list(tight)]
        if abs(np.linalg.det(a)) < 1e-9:
            continue
        xf = np.linalg.solve(a, rhs[list(tight)])
        lhs = dense @ xf
        if (xf < -1e-7).any() or (np.abs(lhs[:neq] - rhs[:neq]) > 1e-7).any() \
                or (lhs[neq:] < rhs[neq:] - 1e-7).any():
            continue
        x = solve_square([rows[i][0] for i in tight], [rows[i][1] for i in tight])
        if x is None or any(v < 0 for v in x):
            continue
        if all(sum(Fraction(a) * v for a, v in zip(r, x)) == b for r, b in equalities) and \
                all(sum(Fraction(a) * v for a, v in zip(r, x)) >= b for r, b in inequalities):
            return True
    return False


def direction_extremes(gens, span=24):
    """Generators that uniquely minimize ``w.g`` for some strictly positive integer ``w``."""
    pts = np.array(gens, dtype=float)
    n = pts.shape[1]
    found = set()
    for w in itertools.product(range(1, span + 1), repeat=n):
        vals = pts @ np.array(w, dtype=float)
        best = vals.min()
        winners = np.flatnonzero(vals == best)
        uniq = {tuple(gens[i]) for i in winners}
        if len(uniq) == 1:
            found.add(uniq.pop())
    return found


@pytest.fixture(scope="session")
def finnish():
    from equiprob.fixtures import load_fixture
    return load_fixture("finnish")


@pytest.fixture(scope="session")
def harmony_tableau():
    from equiprob.fixtures import load_fixture
    return load_fixture("harmony")


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.acceptance_lines
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 10):
        terminalreporter.write_line(lines.get(k, f"criterion {k}: not run"))
