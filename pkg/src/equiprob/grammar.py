"""Categorical HG, MaxEnt and stochastic HG evaluated on tableau inputs."""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .tableau import ConstraintSet, InputEntry

CHUNK = 65536


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 1.0
    clip: bool = False
    distribution: str = "gaussian"

    def __post_init__(self):
        if self.distribution != "gaussian":
            raise ValueError(f"unsupported noise distribution {self.distribution!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def to_json(self) -> dict:
        return {"distribution": self.distribution, "sigma": self.sigma, "clip": self.clip}


@dataclass(frozen=True)
class ProbabilityEstimate:
    credit: Fraction  # total (fractional) wins over all trials
    trials: int

    @property
    def point(self) -> float:
        return float(self.credit / self.trials)

    @property
    def standard_error(self) -> float:
        p = self.point
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    def to_json(self) -> dict:
        return {"point": self.point, "standard_error": self.standard_error, "trials": self.trials}


def _check_weights(w: Sequence[float], n: int):
    if len(w) != n:
        raise ValueError(f"weight vector has length {len(w)}, expected {n}")


def harmony(w: Sequence[float], violations: Sequence[int]) -> float:
    _check_weights(w, len(violations))
    return -math.fsum(wk * ck for wk, ck in zip(w, violations))


def hg_winners(w: Sequence[float], entry: InputEntry) -> set[str]:
    """Candidates of maximal harmony (a singleton when the winner is strict)."""
    scores = [harmony(w, c.violations) for c in entry.candidates]
    best = max(scores)
    return {c.sr for c, h in zip(entry.candidates, scores) if h == best}


def me_distribution(w: Sequence[float], entry: InputEntry) -> dict[str, float]:
    scores = np.array([harmony(w, c.violations) for c in entry.candidates])
    expo = np.exp(scores - scores.max())
    probs = expo / expo.sum()
    return {c.sr: float(p) for c, p in zip(entry.candidates, probs)}


def me_probability_from_diffvecs(w: Sequence[float], diffvecs: Sequence[Sequence[int]]) -> float:
    """Winner probability ``1 / (1 + sum_i exp(-w.c_i))`` from the loser difference vectors."""
    if not diffvecs:
        return 1.0
    margins = -np.asarray(diffvecs, dtype=float) @ np.asarray(w, dtype=float)
    top = max(0.0, float(margins.max()))
    return float(math.exp(-top) / (math.exp(-top) + np.exp(margins - top).sum()))


def stream(seed: int, *key) -> np.random.Generator:
    """Counter-based generator for one named stream.

    Every stream is a Philox generator keyed by ``seed`` and a 64-bit digest
    of ``key`` (for instance the UR label and the sweep cell), so results do
    not depend on the order in which streams are consumed.
    """
    digest = hashlib.sha256(json.dumps([str(k) for k in key]).encode()).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & 0xFFFFFFFF, *words])))


def shg_estimate(w: Sequence[float], entry: InputEntry, noise: NoiseSpec, trials: int,
                 seed: int, key=()) -> dict[str, ProbabilityEstimate]:
    """Monte Carlo stochastic HG probabilities for every candidate of ``entry``.

    Each trial draws i.i.d. noise, evaluates the HG grammar at ``w + noise``
    (clipped at zero when ``noise.clip``) and splits one unit of credit
    evenly among the tied harmony maximizers.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    n = len(w)
    k = len(entry.candidates)
    if k == 1:
        return {entry.candidates[0].sr: ProbabilityEstimate(Fraction(trials), trials)}
    viol = np.array([c.violations for c in entry.candidates], dtype=float)
    _check_weights(w, viol.shape[1])
    base = np.asarray(w, dtype=float)
    rng = stream(seed, entry.ur, *key)
    # counts[j][d]: trials where candidate j tied with d-1 others at the top
    counts = [Counter() for _ in range(k)]
    done = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        eff = base + noise.sigma * rng.standard_normal((size, n))
        if noise.clip:
            np.maximum(eff, 0.0, out=eff)
        scores = -(eff @ viol.T)
        top = scores.max(axis=1, keepdims=True)
        winners = scores == top
        ties = winners.sum(axis=1)
        if ties.max() == 1:
            for j, c in enumerate(winners.sum(axis=0)):
                if c:
                    counts[j][1] += int(c)
            done += size
            continue
        for d in np.unique(ties):
            rows = winners[ties == d]
            col_counts = rows.sum(axis=0)
            for j in range(k):
                if col_counts[j]:
                    counts[j][int(d)] += int(col_counts[j])
        done += size
    out = {}
    for j, cand in enumerate(entry.candidates):
        credit = sum((Fraction(c, d) for d, c in counts[j].items()), Fraction(0))
        out[cand.sr] = ProbabilityEstimate(credit, trials)
    return out


def load_weights(text: str, constraints: ConstraintSet) -> tuple[float, ...]:
    """Weights from JSON ``{"name": value}`` or ``name value`` lines.

    Every constraint must be named exactly once; weights are nonnegative.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        raw = json.loads(stripped)
        pairs = [(str(k), v) for k, v in raw.items()]
    else:
        pairs = []
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace("=", " ").replace(":", " ").split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'name value'")
            pairs.append((parts[0], parts[1]))
    weights = {}
    for name, value in pairs:
        if name not in constraints.names:
            raise ValueError(f"unknown constraint {name!r}")
        if name in weights:
            raise ValueError(f"constraint {name!r} weighted twice")
        value = float(value)
        if not value >= 0 or math.isinf(value):
            raise ValueError(f"weight for {name!r} must be a finite nonnegative number")
        weights[name] = value
    missing = [c for c in constraints.names if c not in weights]
    if missing:
        raise ValueError(f"no weight given for {', '.join(missing)}")
    return tuple(weights[c] for c in constraints.names)
