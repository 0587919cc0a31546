"""Numeric cross-checks of the symbolic verdicts.

MaxEnt probabilities are evaluated in closed form; stochastic HG
probabilities are Monte Carlo estimates.  Thresholds are expressed in
combined standard errors of a difference of two estimates: estimates drawn
from one shared sample (two candidates of one UR) use the multinomial
variance of the difference, estimates from different samples add their
variances.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .grammar import NoiseSpec, ProbabilityEstimate, me_probability_from_diffvecs, shg_estimate, stream
from .tableau import MappingId, Tableau, difference_vectors
from .typology import TOrderGraph, me_equiprobable, shg_equiprobable, shg_uniform_leq

WORKERS_ENV = "EQUIPROB_WORKERS"


class DomainError(ValueError):
    """Raised when a search is asked for something that cannot exist."""


@dataclass(frozen=True)
class SweepSpec:
    """Weight vectors to probe and how to evaluate them.

    Either ``grid`` (one list of values per constraint, expanded as a
    Cartesian product) or a random draw of ``count`` vectors with entries
    uniform on ``[0, max_weight]``, each entry zeroed with probability
    ``sparsity``.
    """

    grid: tuple[tuple[float, ...], ...] | None = None
    count: int = 20
    max_weight: float = 5.0
    sparsity: float = 0.0
    seed: int = 0
    frameworks: tuple[str, ...] = ("me", "shg")
    noise: NoiseSpec = NoiseSpec()
    trials: int = 100_000
    consistent_se: float = 3.0
    different_se: float = 5.0
    me_gap: float = 1e-6
    me_tolerance: float = 1e-12

    def __post_init__(self):
        if self.grid is None and self.count < 1:
            raise ValueError("a random sweep needs at least one weight vector")
        if self.grid is not None:
            if not self.grid or any(not vals for vals in self.grid):
                raise ValueError("every grid axis needs at least one value")
            if any(v < 0 for vals in self.grid for v in vals):
                raise ValueError("grid weights must be nonnegative")
        if self.max_weight < 0 or not 0 <= self.sparsity < 1:
            raise ValueError("max_weight must be >= 0 and sparsity in [0, 1)")
        unknown = set(self.frameworks) - {"me", "shg"}
        if unknown:
            raise ValueError(f"unknown frameworks {sorted(unknown)}")

    def weight_vectors(self, n: int) -> list[tuple[float, ...]]:
        if self.grid is not None:
            if len(self.grid) != n:
                raise ValueError(f"grid has {len(self.grid)} axes for {n} constraints")
            return [tuple(float(x) for x in w) for w in itertools.product(*self.grid)]
        rng = stream(self.seed, "weights", n)
        w = rng.uniform(0.0, self.max_weight, size=(self.count, n))
        if self.sparsity:
            w[rng.random((self.count, n)) < self.sparsity] = 0.0
        return [tuple(float(x) for x in row) for row in w]

    def to_json(self) -> dict:
        return {
            "grid": None if self.grid is None else [list(a) for a in self.grid],
            "count": self.count, "max_weight": self.max_weight, "sparsity": self.sparsity,
            "seed": self.seed, "frameworks": list(self.frameworks), "noise": self.noise.to_json(),
            "trials": self.trials, "consistent_se": self.consistent_se,
            "different_se": self.different_se, "me_gap": self.me_gap,
            "me_tolerance": self.me_tolerance,
        }


@dataclass
class PairRecord:
    a: MappingId
    b: MappingId
    relation: str  # "equiprobable" or "uniform-leq"
    verdicts: dict
    me_max_gap: float | None = None
    me_weights: tuple[float, ...] | None = None
    shg_max_z: float | None = None  # extreme standardized gap
    shg_gap: float | None = None
    shg_se: float | None = None
    shg_weights: tuple[float, ...] | None = None
    agreement: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)  # (weight index, me gap, shg gap, shg se)

    @property
    def agrees(self) -> bool:
        return all(self.agreement.values())

    def to_json(self) -> dict:
        return {
            "a": str(self.a), "b": str(self.b), "relation": self.relation,
            "verdicts": self.verdicts,
            "me": None if self.me_max_gap is None else
            {"max_gap": self.me_max_gap, "weights": list(self.me_weights)},
            "shg": None if self.shg_max_z is None else
            {"extreme_z": self.shg_max_z, "gap": self.shg_gap, "se": self.shg_se,
             "weights": list(self.shg_weights)},
            "agreement": self.agreement, "agrees": self.agrees,
        }


@dataclass
class Violation:
    kind: str  # "edge" or "block"
    a: MappingId
    b: MappingId
    weights: tuple[float, ...]
    weight_index: int
    gap: float
    se: float
    seed: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "a": str(self.a), "b": str(self.b),
                "weights": list(self.weights), "weight_index": self.weight_index,
                "gap": self.gap, "se": self.se, "seed": self.seed}


@dataclass
class VerificationReport:
    spec: SweepSpec
    weights: list[tuple[float, ...]]
    records: list[PairRecord] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def agrees(self) -> bool:
        return all(r.agrees for r in self.records) and not self.violations

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "weights": [list(w) for w in self.weights],
            "records": [r.to_json() for r in self.records],
            "violations": [v.to_json() for v in self.violations],
            "checked": self.checked,
            "agrees": self.agrees,
        }

    def plot_rows(self) -> list[dict]:
        """Gap-versus-weight traces, one row per (pair, weight vector)."""
        rows = []
        for p, rec in enumerate(self.records):
            for wi, me_gap, shg_gap, shg_se in rec.trace:
                row = {"pair": p, "a": str(rec.a), "b": str(rec.b), "weight_index": wi}
                row.update({f"w{k}": x for k, x in enumerate(self.weights[wi])})
                row.update({"me_gap": me_gap, "shg_gap": shg_gap, "shg_se": shg_se})
                rows.append(row)
        return rows


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _run_cells(fn: Callable, cells: Sequence, workers: int | None) -> list:
    """Evaluate ``fn`` on every cell; results come back in cell order."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells, chunksize=max(1, len(cells) // (4 * workers))))


def _diffs(t: Tableau, m: MappingId) -> list[tuple[int, ...]]:
    return [v for _, v in difference_vectors(t, m)]


def diff_se(ea: ProbabilityEstimate, eb: ProbabilityEstimate, shared: bool) -> float:
    """Standard error of ``ea.point - eb.point``.

    ``shared`` marks two candidates read off the same sample, whose
    estimates are negatively correlated.
    """
    pa, pb = ea.point, eb.point
    if shared:
        return math.sqrt(max(pa + pb - (pa - pb) ** 2, 0.0) / ea.trials)
    return math.sqrt(ea.standard_error ** 2 + eb.standard_error ** 2)


def standardized(gap: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if gap == 0.0 else math.copysign(math.inf, gap)
    return gap / se


def _shg_pair(t: Tableau, a: MappingId, b: MappingId, w, noise, trials, seed, key):
    """Point estimates of ``P(a)``, ``P(b)`` and the SE of their difference."""
    if a.ur == b.ur:
        est = shg_estimate(w, t.input(a.ur), noise, trials, seed, key)
        ea, eb = est[a.sr], est[b.sr]
        return ea, eb, diff_se(ea, eb, shared=True)
    ea = shg_estimate(w, t.input(a.ur), noise, trials, seed, key)[a.sr]
    eb = shg_estimate(w, t.input(b.ur), noise, trials, seed, key)[b.sr]
    return ea, eb, diff_se(ea, eb, shared=False)


@dataclass(frozen=True)
class _Cell:
    t: Tableau
    a: MappingId
    b: MappingId
    w: tuple[float, ...]
    wi: int
    spec: SweepSpec
    pair_index: int


def _eval_cell(cell: _Cell):
    spec = cell.spec
    me_gap = shg_gap = shg_se = None
    if "me" in spec.frameworks:
        pa = me_probability_from_diffvecs(cell.w, _diffs(cell.t, cell.a))
        pb = me_probability_from_diffvecs(cell.w, _diffs(cell.t, cell.b))
        me_gap = pa - pb
    if "shg" in spec.frameworks:
        ea, eb, se = _shg_pair(cell.t, cell.a, cell.b, cell.w, spec.noise, spec.trials,
                               spec.seed, ("sweep", cell.pair_index, cell.wi))
        shg_gap, shg_se = ea.point - eb.point, se
    return cell.wi, me_gap, shg_gap, shg_se


def sweep_compare(t: Tableau, pairs: Sequence[tuple[MappingId, MappingId]], spec: SweepSpec,
                  relation: str = "equiprobable", workers: int | None = None) -> VerificationReport:
    """Compare symbolic verdicts with probabilities at every swept weight vector.

    ``relation="equiprobable"``: an ME "equal" verdict agrees iff every gap
    is within ``me_tolerance``, a "not equal" one iff some gap exceeds
    ``me_gap``; an SHG "equal" verdict agrees iff every gap is within
    ``consistent_se`` standard errors, a "not equal" one iff some gap
    reaches ``different_se``.

    ``relation="uniform-leq"`` checks ``P_SHG(a) <= P_SHG(b)``: when the
    verdict holds it agrees iff no ``P(a) - P(b)`` reaches
    ``different_se``; when it fails, iff one does.
    """
    if relation not in ("equiprobable", "uniform-leq"):
        raise ValueError(f"unknown relation {relation!r}")
    for a, b in pairs:
        t.resolve(a)
        t.resolve(b)
    weights = spec.weight_vectors(t.n)
    if relation == "uniform-leq":
        spec = replace(spec, frameworks=("shg",))
    cells = [_Cell(t, a, b, w, wi, spec, p)
             for p, (a, b) in enumerate(pairs) for wi, w in enumerate(weights)]
    results = _run_cells(_eval_cell, cells, workers)
    report = VerificationReport(spec, weights)
    per_pair = len(weights)
    for p, (a, b) in enumerate(pairs):
        rows = results[p * per_pair:(p + 1) * per_pair]
        rec = PairRecord(a, b, relation, {}, trace=[tuple(r) for r in rows])
        if relation == "equiprobable":
            if "me" in spec.frameworks:
                v = me_equiprobable(t, a, b)
                rec.verdicts["me"] = v.equal
                wi, gap = max(((r[0], abs(r[1])) for r in rows), key=lambda x: x[1])
                rec.me_max_gap, rec.me_weights = gap, weights[wi]
                rec.agreement["me"] = gap <= spec.me_tolerance if v.equal else gap > spec.me_gap
            if "shg" in spec.frameworks:
                v = shg_equiprobable(t, a, b)
                rec.verdicts["shg"] = v.equal
                wi, g, se = max(((r[0], r[2], r[3]) for r in rows),
                                key=lambda x: abs(standardized(x[1], x[2])))
                z = abs(standardized(g, se))
                rec.shg_max_z, rec.shg_gap, rec.shg_se, rec.shg_weights = z, g, se, weights[wi]
                rec.agreement["shg"] = z <= spec.consistent_se if v.equal else z >= spec.different_se
        else:
            v = shg_uniform_leq(t, a, b)
            rec.verdicts["shg_uniform_leq"] = v.holds
            wi, g, se = max(((r[0], r[2], r[3]) for r in rows),
                            key=lambda x: standardized(x[1], x[2]))
            z = standardized(g, se)
            rec.shg_max_z, rec.shg_gap, rec.shg_se, rec.shg_weights = z, g, se, weights[wi]
            rec.agreement["shg"] = z < spec.different_se if v.holds else z >= spec.different_se
        report.records.append(rec)
    report.checked = len(cells)
    return report


# -- MaxEnt counterexamples ----------------------------------------------------

@dataclass
class CounterexampleResult:
    found: bool
    weights: tuple[float, ...] | None
    gap: float | None  # P(a) - P(b) at ``weights``
    evaluations: int
    trace: list = field(default_factory=list)  # (evaluation, weights, |gap|) at each improvement

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "weights": None if self.weights is None else list(self.weights),
            "gap": self.gap, "evaluations": self.evaluations,
            "trace": [{"evaluation": e, "weights": list(w), "abs_gap": g} for e, w, g in self.trace],
        }


def find_me_counterexample(t: Tableau, a: MappingId, b: MappingId, budget: int = 10_000,
                           seed: int = 0, threshold: float = 1e-6,
                           scales: Sequence[float] = (1.0, 4.0, 16.0)) -> CounterexampleResult:
    """Search for a weight vector where the two MaxEnt probabilities differ.

    Multi-start: the zero vector, then random starts at several scales with
    random sparsity patterns.  From each start, coordinate ascent on
    ``|P(a) - P(b)|`` with step halving.  Stops at the first weight vector
    whose gap exceeds ``threshold`` or when ``budget`` evaluations are spent.
    """
    if me_equiprobable(t, a, b).equal:
        raise DomainError(f"{a} and {b} have the same difference vectors; "
                          "their MaxEnt probabilities agree at every weight vector")
    da, db = _diffs(t, a), _diffs(t, b)
    n = t.n
    rng = stream(seed, "counterexample", str(a), str(b))
    used = 0
    best_w, best_gap = None, -1.0
    trace = []

    def evaluate(w):
        nonlocal used, best_w, best_gap
        used += 1
        g = me_probability_from_diffvecs(w, da) - me_probability_from_diffvecs(w, db)
        if abs(g) > best_gap:
            best_w, best_gap = tuple(float(x) for x in w), abs(g)
            trace.append((used, best_w, best_gap))
        return abs(g)

    def done():
        return best_gap > threshold or used >= budget

    start_no = 0
    while used < budget and not done():
        if start_no == 0:
            w = np.zeros(n)
        else:
            scale = scales[(start_no - 1) % len(scales)]
            w = rng.uniform(0.0, scale, n)
            w[rng.random(n) < 0.5] = 0.0
        start_no += 1
        cur = evaluate(w)
        step = max(1.0, float(w.max()) / 2)
        while step > 1e-3 and not done():
            improved = False
            for k in range(n):
                for cand in (w[k] + step, w[k] - step, 2 * w[k], 0.0):
                    if cand < 0 or cand == w[k] or done():
                        continue
                    trial = w.copy()
                    trial[k] = cand
                    g = evaluate(trial)
                    if g > cur:
                        w, cur, improved = trial, g, True
            if not improved:
                step /= 2
    if best_gap > threshold:
        sign = (me_probability_from_diffvecs(best_w, da)
                - me_probability_from_diffvecs(best_w, db))
        return CounterexampleResult(True, best_w, sign, used, trace)
    return CounterexampleResult(False, None, None, used, trace)


# -- Monte Carlo check of a T-order ------------------------------------------

def _mc_cell(args):
    t, mappings, w, wi, noise, trials, seed = args
    ests = {}
    by_ur: dict[str, list[MappingId]] = {}
    for m in mappings:
        by_ur.setdefault(m.ur, []).append(m)
    for ur in sorted(by_ur):
        est = shg_estimate(w, t.input(ur), noise, trials, seed, ("mc-torder", wi))
        for m in by_ur[ur]:
            ests[m] = est[m.sr]
    return ests


def mc_validate_torder(t: Tableau, graph: TOrderGraph, noise: NoiseSpec, trials: int,
                       weights: SweepSpec, workers: int | None = None,
                       consistent_se: float | None = None) -> VerificationReport:
    """Spot-check every edge and every block of ``graph`` by simulation.

    For each swept weight vector: an edge ``a <= b`` is violated when
    ``P(a) - P(b)`` exceeds the consistency threshold (3 standard errors by
    default); two mappings of one block are violated when ``|P(a) - P(b)|``
    does.
    """
    limit = weights.consistent_se if consistent_se is None else consistent_se
    ws = weights.weight_vectors(t.n)
    mappings = [m for block in graph.blocks for m in block]
    cells = [(t, mappings, w, wi, noise, trials, weights.seed) for wi, w in enumerate(ws)]
    estimates = _run_cells(_mc_cell, cells, workers)
    report = VerificationReport(replace(weights, noise=noise, trials=trials), ws)
    checks = []
    for i, j in graph.edges:
        for a in graph.blocks[i]:
            for b in graph.blocks[j]:
                checks.append(("edge", a, b))
    for block in graph.blocks:
        for a, b in itertools.combinations(block, 2):
            checks.append(("block", a, b))
    for wi, ests in enumerate(estimates):
        for kind, a, b in checks:
            ea, eb = ests[a], ests[b]
            gap = ea.point - eb.point
            se = diff_se(ea, eb, shared=a.ur == b.ur)
            z = standardized(gap if kind == "edge" else abs(gap), se)
            report.checked += 1
            if z > limit:
                report.violations.append(Violation(kind, a, b, ws[wi], wi, gap, se, weights.seed))
    return report


def me_check_torder(t: Tableau, graph: TOrderGraph, weights: SweepSpec) -> VerificationReport:
    """Evaluate a necessary-condition graph with exact MaxEnt probabilities.

    Hull tests only rule edges out, so an edge ``a <= b`` that
    survives may still fail somewhere; this looks for weight vectors where
    ``P(a) - P(b)`` exceeds ``me_tolerance`` (or where two block members
    differ by that much).  A violation refutes the edge; no violation
    corroborates it on the swept points only.
    """
    ws = weights.weight_vectors(t.n)
    mappings = [m for block in graph.blocks for m in block]
    diffs = {m: _diffs(t, m) for m in mappings}
    report = VerificationReport(replace(weights, frameworks=("me",)), ws)
    checks = [("edge", a, b) for i, j in graph.edges
              for a in graph.blocks[i] for b in graph.blocks[j]]
    checks += [("block", a, b) for block in graph.blocks for a, b in itertools.combinations(block, 2)]
    for wi, w in enumerate(ws):
        p = {m: me_probability_from_diffvecs(w, diffs[m]) for m in mappings}
        for kind, a, b in checks:
            gap = p[a] - p[b]
            report.checked += 1
            if (gap if kind == "edge" else abs(gap)) > weights.me_tolerance:
                report.violations.append(Violation(kind, a, b, w, wi, gap, 0.0, weights.seed))
    return report
