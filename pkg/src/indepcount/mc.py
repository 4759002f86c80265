"""Monte Carlo estimation over a product sampling universe.

A set of variable-disjoint subformulas restricts the space we sample
from: each subformula contributes one of its own models, every variable
outside them is a fair coin.  The universe size U is exact integer
arithmetic; the estimator scales the empirical hit rate by U, so its
expectation is the true model count whenever the subformulas all appear
in the target formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .cnf import CnfFormula, PartialAssignment, bit_positions, clause_bitmasks, satisfied_rows

if TYPE_CHECKING:  # pragma: no cover
    from .structs import StructSet

CHERNOFF_FACTOR = 3
_SAMPLE_CHUNK = 1 << 18
_CELL_LIMIT = 200_000


@dataclass(frozen=True)
class Estimate:
    """Result record for a counting run.

    ``value`` is exact for exact routes and a rational for sampled ones
    (hits/samples times the universe size, kept unrounded).  Work counters
    accumulate over every phase that contributed to the result.
    """

    value: int | Fraction
    exact: bool
    epsilon: float
    delta: float
    samples: int = 0
    hits: int = 0
    seed: int | None = None
    under_sampled: bool = False
    decider_calls: int = 0
    branch_nodes: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("counts are non-negative")

    @property
    def value_float(self) -> float:
        return float(self.value)


class Universe:
    """Sampling space: one model per subformula, coins elsewhere."""

    def __init__(self, psi: "StructSet | Sequence", n: int | None = None, *,
                 variables: Sequence[int] | None = None):
        structs = tuple(getattr(psi, "structs", psi))
        if variables is not None:
            universe = tuple(sorted(set(variables)))
        elif n is not None:
            universe = tuple(range(1, n + 1))
        else:
            raise ValueError("need n or variables")
        varset = set(universe)
        claimed: set[int] = set()
        for sigma in structs:
            for v in sigma.vars:
                if v not in varset:
                    raise ValueError(f"subformula variable x{v} outside universe")
                if v in claimed:
                    raise ValueError(f"x{v} claimed by two subformulas")
                claimed.add(v)
        self.psi = psi
        self.structs = structs
        self.variables = universe
        self.n = len(universe)
        self.free_vars = tuple(v for v in universe if v not in claimed)
        size = 1 << len(self.free_vars)
        for sigma in structs:
            size *= sigma.l_sigma
        self.size = size

    # -- mask plumbing (fast path requires variable indices <= 64) ---------

    def _free_mask(self) -> int:
        mask = 0
        for v in self.free_vars:
            mask |= 1 << (v - 1)
        return mask

    def sample_words(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Vector of assignment words, bit (v-1) = value of x_v."""
        if self.size == 0:
            raise ValueError("cannot sample an empty universe")
        if self.variables and self.variables[-1] > 64:
            raise ValueError("word sampling limited to variable indices <= 64")
        words = rng.integers(0, 2 ** 64, size=count, dtype=np.uint64)
        words &= np.uint64(self._free_mask())
        for sigma in self.structs:
            models = sigma.satisfying_words()
            pick = rng.integers(0, len(models), size=count)
            words |= models[pick]
        return words

    def decode_word(self, word: int) -> PartialAssignment:
        word = int(word)
        return PartialAssignment(
            {v: bool((word >> (v - 1)) & 1) for v in self.variables})

    def enumerate_words(self, *, limit: int = _CELL_LIMIT) -> np.ndarray:
        """All assignment words in the universe (for uniformity checks)."""
        if self.size > limit:
            raise ValueError(f"universe of size {self.size} exceeds "
                             f"enumeration limit {limit}")
        if self.variables and self.variables[-1] > 64:
            raise ValueError("word enumeration limited to variable indices <= 64")
        free = np.zeros(1, dtype=np.uint64)
        for v in self.free_vars:
            bit = np.uint64(1 << (v - 1))
            free = np.concatenate([free, free | bit])
        cells = free
        for sigma in self.structs:
            models = sigma.satisfying_words()
            cells = (cells[:, None] | models[None, :]).reshape(-1)
        cells.sort()
        return cells


def sample_universe(universe: Universe, rng: np.random.Generator) -> PartialAssignment:
    """One uniform draw from the universe."""
    if universe.variables and universe.variables[-1] > 64:
        # generic path, no word packing
        bind: dict[int, bool] = {}
        for v in universe.free_vars:
            bind[v] = bool(rng.integers(0, 2))
        for sigma in universe.structs:
            models = sigma.satisfying_assignments()
            bind.update(models[rng.integers(0, len(models))])
        return PartialAssignment(bind)
    return universe.decode_word(int(universe.sample_words(1, rng)[0]))


def sample_size(universe_size: int, ell: int, eps: float, delta: float, *,
                factor: float = CHERNOFF_FACTOR) -> int:
    """Samples needed for a relative (eps, delta) guarantee given that the
    true count is at least ``ell``: ceil(factor * ln(2/delta) * U / (eps^2 ell)).
    """
    if universe_size < 0 or ell < 1:
        raise ValueError("need universe_size >= 0 and ell >= 1")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    ratio = Fraction(universe_size, ell)
    need = Fraction(factor) * Fraction(math.log(2.0 / delta)) * ratio \
        / Fraction(eps) ** 2
    return max(1, math.ceil(need))


def mc_estimate(phi: CnfFormula, psi, ell: int, eps: float, delta: float,
                rng: np.random.Generator | None = None, *,
                seed: int | None = None,
                sample_budget: int | None = None) -> Estimate:
    """Sampled count: draw from the universe, scale hit rate by its size.

    The (eps, delta) guarantee holds when the true count is >= ell.  If the
    prescribed sample count exceeds ``sample_budget`` the run is truncated
    and flagged ``under_sampled`` instead of silently weakening anything.
    """
    structs = tuple(getattr(psi, "structs", psi))
    phi_clauses = set(phi.clauses)
    for sigma in structs:
        for c in sigma.clauses:
            if c not in phi_clauses:
                raise ValueError("subformula clause missing from the formula")
    if rng is None:
        rng = np.random.default_rng(seed)

    universe = Universe(psi, variables=phi.variables)
    if universe.size == 0:
        return Estimate(value=0, exact=True, epsilon=eps, delta=delta, seed=seed)
    wanted = sample_size(universe.size, ell, eps, delta)
    t = wanted
    under = False
    if sample_budget is not None and wanted > sample_budget:
        t = sample_budget
        under = True

    positions = {v: v - 1 for v in phi.variables}
    pos, neg = clause_bitmasks(phi.clauses, positions)
    hits = 0
    done = 0
    while done < t:
        chunk = min(_SAMPLE_CHUNK, t - done)
        words = universe.sample_words(chunk, rng)
        hits += int(np.count_nonzero(satisfied_rows(pos, neg, words)))
        done += chunk
    value = Fraction(hits * universe.size, t)
    return Estimate(value=value, exact=False, epsilon=eps, delta=delta,
                    samples=t, hits=hits, seed=seed, under_sampled=under)


def median_boost(runs: Sequence[Estimate]) -> Estimate:
    """Median-of-runs amplification; expects an odd number of runs."""
    if not runs:
        raise ValueError("no runs given")
    if len(runs) % 2 == 0:
        raise ValueError("median boosting needs an odd number of runs")
    ordered = sorted(runs, key=lambda e: e.value)
    return ordered[len(ordered) // 2]
