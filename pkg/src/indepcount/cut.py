"""Bounded search-tree exploration with a global leaf-count abort.

The tree fixes variables in blocks: whole subformula groups first (one
branch per model of the group), then clause-guided or single-variable
branching.  Every node is vetted by a satisfiability decider so that
falsified branches never expand.  A global counter accumulates, at each
clause-free node, the number of models below it; the run either finishes
(the counter is the exact model count, assuming no decider mistake) or
aborts once the counter reaches the threshold, certifying "at least that
many models".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cnf import CnfFormula, restrict
from .decide import DecisionOutcome, decide
from .structs import StructSet

Decider = Callable[[CnfFormula, float], DecisionOutcome]


class CutKind(enum.Enum):
    EXACT = "exact"
    AT_LEAST_ELL = "at-least-ell"


@dataclass(frozen=True)
class CutResult:
    kind: CutKind
    count: int
    branch_nodes: int
    decider_calls: int
    leaves: int
    pruned: int

    @property
    def completed(self) -> bool:
        return self.kind is CutKind.EXACT


class BranchKind(enum.Enum):
    BINARY = "binary"
    PRUNED_CLAUSE = "pruned-clause"
    STRUCT_GUIDED = "struct-guided"


@dataclass(frozen=True)
class BranchingStrategy:
    """How to pick the next block of variables to fix.

    ``binary`` walks a fixed variable order (most frequent first unless an
    explicit order is given); ``pruned_clause`` branches over the models of
    a shortest residual clause; ``struct_guided`` consumes the provided
    groups first and then falls back to clause branching.
    """

    kind: BranchKind
    elimination_order: tuple[int, ...] | None = None

    @classmethod
    def binary(cls, order: Sequence[int] | None = None) -> "BranchingStrategy":
        return cls(BranchKind.BINARY,
                   tuple(order) if order is not None else None)

    @classmethod
    def pruned_clause(cls) -> "BranchingStrategy":
        return cls(BranchKind.PRUNED_CLAUSE)

    @classmethod
    def struct_guided(cls) -> "BranchingStrategy":
        return cls(BranchKind.STRUCT_GUIDED)


class _Abort(Exception):
    pass


def _default_order(phi: CnfFormula) -> tuple[int, ...]:
    """Most frequent variable first; ties by index."""
    occur = {v: 0 for v in phi.variables}
    for c in phi.clauses:
        for lit in c:
            occur[lit.var] += 1
    return tuple(sorted(occur, key=lambda v: (-occur[v], v)))


def _clause_models(clause) -> list[dict[int, bool]]:
    """All assignments of the clause's variables that satisfy it."""
    lits = clause.literals
    out = []
    for pattern in range(1 << len(lits)):
        # bit i set = literal i true; skip the all-false pattern
        if pattern == 0:
            continue
        out.append({lit.var: (not lit.negated) if (pattern >> i) & 1 else lit.negated
                    for i, lit in enumerate(lits)})
    return out


def cut(phi: CnfFormula, psi: StructSet, ell: int, delta: float,
        strategy: BranchingStrategy, *, decider: Decider | None = None,
        rng: np.random.Generator | None = None,
        trace: list[str] | None = None) -> CutResult:
    """Explore until done or until ``ell`` models have been accounted for.

    Each node spends a failure budget of delta / 2^n on its decider call, so
    a full run errs with probability below delta (there are fewer than 2^n
    nodes).  A clause-free node contributes 2^(free variables) models.
    ``trace``, if given, receives one line per branch node.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    if strategy.kind is BranchKind.STRUCT_GUIDED:
        own = set(phi.clauses)
        for sigma in psi:
            for c in sigma.clauses:
                if c not in own:
                    raise ValueError("group clause missing from the formula")
    if decider is None:
        local_rng = rng if rng is not None else np.random.default_rng()

        def decider(sub: CnfFormula, bound: float) -> DecisionOutcome:
            return decide(sub, bound, local_rng)

    n = phi.num_vars
    node_budget = max(delta * 2.0 ** (-n), 1e-300)
    order = (strategy.elimination_order if strategy.elimination_order is not None
             else _default_order(phi))
    structs = tuple(psi.structs) if strategy.kind is BranchKind.STRUCT_GUIDED else ()
    check_reduction = bool(structs)
    width_bound = phi.k - 1

    state = {"count": 0, "branch_nodes": 0, "decider_calls": 0,
             "leaves": 0, "pruned": 0}

    def emit(depth: int, label: str, factor: int) -> None:
        if trace is not None:
            trace.append(f"{depth}\t{label}\t{factor}")

    def explore(sub: CnfFormula, depth: int, next_struct: int) -> None:
        state["decider_calls"] += 1
        outcome = decider(sub, node_budget)
        if not outcome.satisfiable:
            state["pruned"] += 1
            return
        if not sub.clauses:
            state["leaves"] += 1
            state["count"] += 1 << sub.num_vars
            if state["count"] >= ell:
                raise _Abort
            return

        if strategy.kind is BranchKind.BINARY:
            var = next(v for v in order if v in sub.varset)
            state["branch_nodes"] += 1
            emit(depth, f"x{var}", 2)
            for value in (False, True):
                explore(restrict(sub, {var: value}), depth + 1, next_struct)
            return

        if strategy.kind is BranchKind.STRUCT_GUIDED and next_struct < len(structs):
            sigma = structs[next_struct]
            state["branch_nodes"] += 1
            emit(depth, f"group{next_struct}", sigma.l_sigma)
            for model in sigma.iter_satisfying_assignments():
                explore(restrict(sub, model), depth + 1, next_struct + 1)
            return

        clause = min(sub.clauses, key=len)
        if check_reduction and next_struct >= len(structs):
            assert len(clause) <= width_bound, \
                "residual clause wider than expected after the groups"
        state["branch_nodes"] += 1
        emit(depth, " ".join(str(i) for i in clause.to_ints()), (1 << len(clause)) - 1)
        for model in _clause_models(clause):
            explore(restrict(sub, model), depth + 1, next_struct)

    try:
        explore(phi, 0, 0)
    except _Abort:
        return CutResult(kind=CutKind.AT_LEAST_ELL, count=state["count"],
                         branch_nodes=state["branch_nodes"],
                         decider_calls=state["decider_calls"],
                         leaves=state["leaves"], pruned=state["pruned"])
    return CutResult(kind=CutKind.EXACT, count=state["count"],
                     branch_nodes=state["branch_nodes"],
                     decider_calls=state["decider_calls"],
                     leaves=state["leaves"], pruned=state["pruned"])


def ell_for_cut(psi: StructSet, ell: int, k: int) -> int:
    """Depth (in branch blocks) at which the cut threshold binds.

    Multiplies group model counts in order until the running product
    reaches ``ell``; if the groups run out, residual clause branching
    (factor at most 2^(k-1) - 1) makes up the rest.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    blocks = 0
    product = 1
    for sigma in psi:
        if product >= ell:
            return blocks
        product *= sigma.l_sigma
        blocks += 1
    if product >= ell:
        return blocks
    base = (1 << (k - 1)) - 1
    if base < 2:
        raise ValueError("clause branching needs width at least 3")
    while product < ell:
        product *= base
        blocks += 1
    return blocks
