"""Variable-disjoint subformula discovery and the reduction step.

The reduction grows a pool of pairwise variable-disjoint clause groups.
Each group designates some of its variables as *closed*: growth only
continues through clauses that avoid every closed variable, so a group
whose clauses each contain a closed variable never grows again.  A small
library of shapes assigns closed variables to the groups it recognises;
anything else closes completely.

The invariant bought by the loop: on exit every clause of the input
contains a closed variable.  Fixing all closed variables therefore
shortens every surviving clause, which is what makes the width-(k-1)
recursion below sound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cnf import Clause, CnfFormula, restrict
from .exact import GuardError
from .mc import Estimate

STRUCT_CAP = 16
_SCAN_GUARD = 28
_INDEX_LIMIT = 1 << 21
_CHUNK_BITS = 20


# ---------------------------------------------------------------------------
# model scans over a fixed variable tuple

def _scan_models(clauses: Sequence[Clause], over_vars: Sequence[int], *,
                 index_limit: int = _INDEX_LIMIT):
    """Count assignments of ``over_vars`` that falsify no clause.

    Clauses with variables outside ``over_vars`` can never be falsified by
    such a partial assignment and are ignored.  Returns (count, compact
    indices or None); indices are dropped once ``index_limit`` is exceeded.
    """
    t = len(over_vars)
    if t > _SCAN_GUARD:
        raise GuardError(f"refusing to enumerate 2^{t} assignments")
    positions = {v: i for i, v in enumerate(over_vars)}
    varset = set(over_vars)
    masks = []
    for c in clauses:
        if not c.vars <= varset:
            continue
        p = n = 0
        for lit in c:
            bit = 1 << positions[lit.var]
            if lit.negated:
                n |= bit
            else:
                p |= bit
        masks.append((np.uint64(p), np.uint64(n)))
    count = 0
    collected: list[np.ndarray] | None = []
    space = 1 << t
    step = min(space, 1 << _CHUNK_BITS)
    for base in range(0, space, step):
        idx = np.arange(base, base + step, dtype=np.uint64)
        ok = np.ones(step, dtype=bool)
        for p, n in masks:
            ok &= ~(((idx & p) == 0) & ((idx & n) == n))
        count += int(np.count_nonzero(ok))
        if collected is not None:
            if count > index_limit:
                collected = None
            else:
                collected.append(idx[ok])
    if collected is None:
        return count, None
    if not collected:
        return count, np.zeros(0, dtype=np.uint64)
    return count, np.concatenate(collected)


def _expand_words(indices: np.ndarray, over_vars: Sequence[int]) -> np.ndarray:
    """Compact scan indices -> assignment words with bit (v-1) per variable."""
    out = np.zeros(indices.shape, dtype=np.uint64)
    for i, v in enumerate(over_vars):
        if v > 64:
            raise GuardError("word packing limited to variable indices <= 64")
        out |= ((indices >> np.uint64(i)) & np.uint64(1)) << np.uint64(v - 1)
    return out


def _decode_index(index: int, over_vars: Sequence[int]) -> dict[int, bool]:
    return {v: bool((index >> i) & 1) for i, v in enumerate(over_vars)}


# ---------------------------------------------------------------------------

class Struct:
    """A variable-disjoint clause group with closed-variable bookkeeping.

    ``l_sigma`` counts models over the group's own variables; ``w_sigma``
    counts assignments of the closed variables alone that falsify no
    clause, and ``f_sigma`` is the number of closed variables.  A fully
    closed group has w = l and f = n.
    """

    __slots__ = ("clauses", "vars", "closed_vars", "n_sigma", "l_sigma",
                 "w_sigma", "f_sigma", "_model_idx", "_closed_idx", "_cache")

    def __init__(self, clauses: Sequence[Clause], closed_vars: Sequence[int]):
        cls_tuple = tuple(clauses)
        var_order = tuple(sorted({v for c in cls_tuple for v in c.vars}))
        closed = tuple(sorted(set(closed_vars)))
        if not set(closed) <= set(var_order):
            raise ValueError("closed variables must belong to the group")
        l_count, model_idx = _scan_models(cls_tuple, var_order)
        w_count, closed_idx = _scan_models(cls_tuple, closed)
        object.__setattr__(self, "clauses", cls_tuple)
        object.__setattr__(self, "vars", var_order)
        object.__setattr__(self, "closed_vars", closed)
        object.__setattr__(self, "n_sigma", len(var_order))
        object.__setattr__(self, "l_sigma", l_count)
        object.__setattr__(self, "w_sigma", w_count)
        object.__setattr__(self, "f_sigma", len(closed))
        object.__setattr__(self, "_model_idx", model_idx)
        object.__setattr__(self, "_closed_idx", closed_idx)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("Struct is immutable")

    @property
    def is_closed(self) -> bool:
        return self.f_sigma == self.n_sigma

    def satisfying_words(self) -> np.ndarray:
        """Models as assignment words (bit v-1 per variable), cached."""
        got = self._cache.get("words")
        if got is None:
            if self._model_idx is None:
                raise GuardError("too many models to materialise")
            got = _expand_words(self._model_idx, self.vars)
            self._cache["words"] = got
        return got

    def satisfying_assignments(self) -> tuple[dict[int, bool], ...]:
        got = self._cache.get("models")
        if got is None:
            got = tuple(self.iter_satisfying_assignments())
            self._cache["models"] = got
        return got

    def iter_satisfying_assignments(self):
        """Models over the group's variables, in scan order."""
        if self._model_idx is not None:
            for index in self._model_idx:
                yield _decode_index(int(index), self.vars)
            return
        # too many to keep around: rescan in chunks
        positions = {v: i for i, v in enumerate(self.vars)}
        varset = set(self.vars)
        space = 1 << self.n_sigma
        step = min(space, 1 << _CHUNK_BITS)
        masks = []
        for c in self.clauses:
            p = n = 0
            for lit in c:
                bit = 1 << positions[lit.var]
                if lit.negated:
                    n |= bit
                else:
                    p |= bit
            masks.append((np.uint64(p), np.uint64(n)))
        for base in range(0, space, step):
            idx = np.arange(base, base + step, dtype=np.uint64)
            ok = np.ones(step, dtype=bool)
            for p, n in masks:
                ok &= ~(((idx & p) == 0) & ((idx & n) == n))
            for index in idx[ok]:
                yield _decode_index(int(index), self.vars)

    def closed_ok_assignments(self) -> tuple[dict[int, bool], ...]:
        """Assignments of the closed variables that falsify nothing."""
        got = self._cache.get("closed_ok")
        if got is None:
            if self._closed_idx is None:
                raise GuardError("too many closed assignments to materialise")
            got = tuple(_decode_index(int(i), self.closed_vars)
                        for i in self._closed_idx)
            self._cache["closed_ok"] = got
        return got

    def __eq__(self, other):
        if not isinstance(other, Struct):
            return NotImplemented
        return (self.clauses == other.clauses
                and self.closed_vars == other.closed_vars)

    def __hash__(self):
        return hash((self.clauses, self.closed_vars))

    def __repr__(self):
        return (f"Struct({len(self.clauses)} clauses, n={self.n_sigma}, "
                f"l={self.l_sigma}, closed={self.closed_vars})")


def struct_stats(sigma: Struct, *, cap: int = STRUCT_CAP) -> tuple[int, int, int, int]:
    """Recompute (n, l, w, f) for a group by enumeration.

    Refuses groups larger than ``cap`` variables; the counts are exact.
    """
    if sigma.n_sigma > cap:
        raise GuardError(f"group has {sigma.n_sigma} variables, cap is {cap}")
    l_count, _ = _scan_models(sigma.clauses, sigma.vars)
    w_count, _ = _scan_models(sigma.clauses, sigma.closed_vars)
    return (sigma.n_sigma, l_count, w_count, sigma.f_sigma)


@dataclass(frozen=True)
class StructSet:
    """Pairwise variable-disjoint groups, in discovery order."""

    structs: tuple[Struct, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for sigma in self.structs:
            for v in sigma.vars:
                if v in seen:
                    raise ValueError(f"x{v} appears in two groups")
                seen.add(v)

    def __len__(self) -> int:
        return len(self.structs)

    def __iter__(self):
        return iter(self.structs)

    @property
    def all_vars(self) -> frozenset[int]:
        return frozenset(v for s in self.structs for v in s.vars)

    @property
    def closed_union(self) -> frozenset[int]:
        return frozenset(v for s in self.structs for v in s.closed_vars)

    def covers(self, phi: CnfFormula) -> bool:
        """Does every clause of ``phi`` contain a closed variable?"""
        closed = self.closed_union
        return all(c.vars & closed for c in phi.clauses)


EMPTY_STRUCT_SET = StructSet(())


# ---------------------------------------------------------------------------
# shape library

@dataclass(frozen=True)
class StructPattern:
    """A clause-group shape over letter variables with closed designations.

    Matching is up to renaming letters to variables and flipping each
    variable's polarity globally, so a shared variable matches only when
    its literals agree in sign across the group's clauses.
    """

    clauses: tuple[tuple[tuple[str, bool], ...], ...]
    closed_letters: tuple[str, ...]

    def __post_init__(self):
        letters = {l for cl in self.clauses for l, _ in cl}
        missing = set(self.closed_letters) - letters
        if missing:
            raise ValueError(f"closed letters {sorted(missing)} not in pattern")
        for cl in self.clauses:
            if not any(l in self.closed_letters for l, _ in cl):
                raise ValueError("every pattern clause needs a closed letter")

    def match(self, clauses: Sequence[Clause]) -> dict[str, int] | None:
        """First letter->variable binding that realises the shape, if any."""
        if len(clauses) != len(self.clauses):
            return None

        def bind_clause(pat, actual, letter_to, var_to):
            if not pat:
                return letter_to, var_to
            (letter, pat_neg), rest = pat[0], pat[1:]
            for i, lit in enumerate(actual):
                flip = lit.negated != pat_neg
                if letter in letter_to:
                    if letter_to[letter] != (lit.var, flip):
                        continue
                elif lit.var in var_to:
                    continue
                lt = dict(letter_to)
                vt = dict(var_to)
                lt[letter] = (lit.var, flip)
                vt[lit.var] = letter
                got = bind_clause(rest, actual[:i] + actual[i + 1:], lt, vt)
                if got is not None:
                    return got
            return None

        def walk(order, letter_to, var_to):
            if len(order) == len(self.clauses):
                return letter_to
            pat = self.clauses[len(order)]
            for j, actual in enumerate(clauses):
                if j in order:
                    continue
                if len(actual) != len(pat):
                    continue
                bound = bind_clause(pat, tuple(actual.literals), letter_to, var_to)
                if bound is None:
                    continue
                got = walk(order + (j,), *bound)
                if got is not None:
                    return got
            return None

        bound = walk((), {}, {})
        if bound is None:
            return None
        return {letter: var for letter, (var, _) in bound.items()}


def _parse_pattern_clause(text: str) -> tuple[tuple[str, bool], ...]:
    lits = []
    for tok in text.split():
        neg = tok.startswith("~")
        letter = tok[1:] if neg else tok
        if not letter.isalnum():
            raise ValueError(f"bad pattern literal {tok!r}")
        lits.append((letter, neg))
    if not lits:
        raise ValueError("empty pattern clause")
    return tuple(lits)


@dataclass(frozen=True)
class StructLibrary:
    """Shapes that stay partially open; everything else closes completely."""

    patterns: tuple[StructPattern, ...]
    cap: int = STRUCT_CAP

    @classmethod
    def from_text(cls, text: str, *, cap: int = STRUCT_CAP) -> "StructLibrary":
        patterns = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                head, body = line.split(":", 1)
                key, names = head.split("=", 1)
                if key.strip() != "close":
                    raise ValueError("expected 'close = letters : clauses'")
                closed = tuple(t.strip() for t in names.split(",") if t.strip())
                clauses = tuple(_parse_pattern_clause(part)
                                for part in body.split("|"))
                patterns.append(StructPattern(clauses, closed))
            except ValueError as exc:
                raise ValueError(f"library line {lineno}: {exc}") from exc
        return cls(tuple(patterns), cap=cap)

    def designate(self, clauses: Sequence[Clause]) -> tuple[int, ...]:
        """Closed variables for a clause group: matched shape or everything."""
        group_vars = sorted({v for c in clauses for v in c.vars})
        if len(group_vars) <= self.cap:
            for pattern in self.patterns:
                bound = pattern.match(clauses)
                if bound is not None:
                    return tuple(sorted(bound[l] for l in pattern.closed_letters))
        return tuple(group_vars)


DEFAULT_LIBRARY_TEXT = """\
# groups that keep growing candidates open, smallest first
close = c : a b c
close = a : a b c | a d e
close = a : a b c | a b d
close = a, b : a b c | a d e | b f g
close = d : a b c d
close = a : a b c d | a e f g
close = a, b : a b c d | a e f g | b h i j
"""

DEFAULT_LIBRARY = StructLibrary.from_text(DEFAULT_LIBRARY_TEXT)


def match_library(sigma: Struct | Sequence[Clause],
                  library: StructLibrary = DEFAULT_LIBRARY) -> tuple[int, ...]:
    """Closed-variable designation for a group (all of them when unmatched)."""
    clauses = sigma.clauses if isinstance(sigma, Struct) else tuple(sigma)
    return library.designate(clauses)


# ---------------------------------------------------------------------------
# reduction

RecursiveCounter = Callable[[CnfFormula, float, float], Estimate]


@dataclass(frozen=True)
class RedOutcome:
    """Either a usable group set or an already-finished estimate."""

    struct_set: StructSet | None = None
    estimate: Estimate | None = None

    def __post_init__(self):
        if (self.struct_set is None) == (self.estimate is None):
            raise ValueError("exactly one of struct_set/estimate must be set")


def _branch_delta(delta: float, n: int) -> float:
    return max(delta * 2.0 ** (-n), 1e-300)


def _recurse_branches(phi: CnfFormula, structs: Sequence[Struct], eps: float,
                      delta: float, recursive_counter: RecursiveCounter,
                      width_bound: int) -> Estimate:
    """Sum recursive counts over all non-falsifying closed assignments."""
    sub_delta = _branch_delta(delta, phi.num_vars)
    total = 0
    exact = True
    samples = hits = decider_calls = branch_nodes = 0
    for combo in itertools.product(*[s.closed_ok_assignments() for s in structs]):
        binding: dict[int, bool] = {}
        for part in combo:
            binding.update(part)
        sub = restrict(phi, binding)
        assert sub.k <= width_bound, "reduction must shorten every clause"
        est = recursive_counter(sub, eps, sub_delta)
        total = total + est.value
        exact = exact and est.exact
        samples += est.samples
        hits += est.hits
        decider_calls += est.decider_calls
        branch_nodes += est.branch_nodes
    return Estimate(value=total, exact=exact, epsilon=eps, delta=delta,
                    samples=samples, hits=hits, decider_calls=decider_calls,
                    branch_nodes=branch_nodes)


def red_structs(phi: CnfFormula, params, eps: float, delta: float,
                recursive_counter: RecursiveCounter, *,
                library: StructLibrary | None = None) -> RedOutcome:
    """Grow groups until every clause touches a closed variable, then either
    hand the group set onward or fall back to the width-(k-1) recursion.

    The comparison deciding between the two weighs the recursion's branch
    count (product of the w values, discounted per closed variable) against
    the cost profile of continuing at width k.
    """
    k = phi.k
    if k < 3:
        raise ValueError("reduction needs clause width at least 3")
    if library is None:
        library = DEFAULT_LIBRARY
    if any(len(c) == 0 for c in phi.clauses):
        # an empty clause can never gain a closed variable; the count is 0
        return RedOutcome(estimate=Estimate(
            value=0, exact=True, epsilon=eps, delta=delta))
    n = phi.num_vars

    pool: list[Struct] = []
    var_owner: dict[int, int] = {}
    closed_union: set[int] = set()
    while True:
        pick = None
        for c in phi.clauses:
            if not (c.vars & closed_union):
                pick = c
                break
        if pick is None:
            break
        absorbed = sorted({var_owner[v] for v in pick.vars if v in var_owner})
        merged: list[Clause] = []
        for i in absorbed:
            merged.extend(pool[i].clauses)
        merged.append(pick)
        closed = library.designate(merged)
        sigma = Struct(merged, closed)
        pool = [s for i, s in enumerate(pool) if i not in absorbed]
        pool.append(sigma)
        var_owner = {v: i for i, s in enumerate(pool) for v in s.vars}
        closed_union = {v for s in pool for v in s.closed_vars}

    if pool and all(s.w_sigma > 0 for s in pool):
        alpha_lo = params.alpha(k - 1)
        alpha_hi = params.alpha(k)
        log_lo = math.log(alpha_lo)
        score = n * log_lo + sum(
            math.log(s.w_sigma) - s.f_sigma * log_lo for s in pool)
        if score >= n * math.log(alpha_hi):
            return RedOutcome(struct_set=StructSet(tuple(pool)))
    elif not pool:
        # no clauses at all: nothing to cut, nothing to branch on
        return RedOutcome(struct_set=EMPTY_STRUCT_SET)

    estimate = _recurse_branches(phi, pool, eps, delta, recursive_counter, k - 1)
    return RedOutcome(estimate=estimate)


def red_clauses(phi: CnfFormula, m_hat: int, eps: float, delta: float,
                recursive_counter: RecursiveCounter) -> RedOutcome:
    """Greedy variable-disjoint clause picking, all picks fully closed.

    With at least ``m_hat`` picks the set is worth cutting over; otherwise
    branch over every model of the picked clauses (at most (2^k - 1) each)
    and recurse on the shortened formulas.
    """
    if m_hat < 0:
        raise ValueError("m_hat must be non-negative")
    chosen: list[Clause] = []
    used: set[int] = set()
    for c in phi.clauses:
        if not (c.vars & used):
            chosen.append(c)
            used.update(c.vars)
    pool = [Struct((c,), tuple(sorted(c.vars))) for c in chosen]
    if len(pool) >= m_hat:
        return RedOutcome(struct_set=StructSet(tuple(pool)))
    width_bound = max(phi.k - 1, 0)
    estimate = _recurse_branches(phi, pool, eps, delta, recursive_counter,
                                 width_bound)
    return RedOutcome(estimate=estimate)
