"""CNF formulas, DIMACS I/O, and restriction by partial assignments.

Variables are positive 1-based integers.  A formula carries the tuple of
variables its model count ranges over (its universe).  Restricting by a
partial assignment removes the fixed variables from the universe without
renumbering the survivors, so literals keep their original indices all
the way down a search tree and partial counts stay coherent.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np


class DimacsError(ValueError):
    """Malformed DIMACS input."""


class DimacsWarning(UserWarning):
    """Recoverable anomaly in DIMACS input (tautology, count mismatch)."""


@dataclass(frozen=True)
class Literal:
    """A variable occurrence, possibly negated."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")

    @classmethod
    def from_int(cls, code: int) -> "Literal":
        """Build from a signed DIMACS code (negative means negated)."""
        if code == 0:
            raise ValueError("0 terminates clauses and is not a literal")
        return cls(abs(code), code < 0)

    def to_int(self) -> int:
        return -self.var if self.negated else self.var

    def negate(self) -> "Literal":
        return Literal(self.var, not self.negated)

    def __repr__(self) -> str:
        return f"{'~' if self.negated else ''}x{self.var}"


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals over pairwise distinct variables."""

    literals: tuple[Literal, ...]

    def __post_init__(self):
        seen = set()
        for lit in self.literals:
            if lit.var in seen:
                raise ValueError(f"duplicate variable x{lit.var} in clause")
            seen.add(lit.var)

    @classmethod
    def from_ints(cls, codes: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(c) for c in codes))

    def to_ints(self) -> tuple[int, ...]:
        return tuple(lit.to_int() for lit in self.literals)

    @property
    def vars(self) -> frozenset[int]:
        return frozenset(lit.var for lit in self.literals)

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        return any(assignment[l.var] != l.negated for l in self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __repr__(self) -> str:
        return "(" + " | ".join(repr(l) for l in self.literals) + ")"


def _as_clause(obj) -> Clause:
    if isinstance(obj, Clause):
        return obj
    return Clause.from_ints(obj)


class CnfFormula:
    """Immutable CNF over an explicit variable universe.

    ``variables`` is the ascending tuple of free variables; ``num_vars`` is
    its length and the exponent in the 2^n model-count convention.  ``k``
    bounds clause length (the observed maximum unless overridden upward).
    """

    __slots__ = ("clauses", "variables", "k", "_varset", "_cache")

    def __init__(self, clauses, num_vars: int | None = None, *,
                 variables: Iterable[int] | None = None, k: int | None = None):
        cls_tuple = tuple(_as_clause(c) for c in clauses)
        if variables is not None:
            universe = tuple(sorted(set(variables)))
            if num_vars is not None and num_vars != len(universe):
                raise ValueError("num_vars disagrees with explicit variables")
        elif num_vars is not None:
            if num_vars < 0:
                raise ValueError("num_vars must be non-negative")
            universe = tuple(range(1, num_vars + 1))
        else:
            top = max((l.var for c in cls_tuple for l in c), default=0)
            universe = tuple(range(1, top + 1))
        varset = frozenset(universe)
        for c in cls_tuple:
            for lit in c:
                if lit.var not in varset:
                    raise ValueError(
                        f"literal {lit} outside the variable universe")
        width = max((len(c) for c in cls_tuple), default=0)
        if k is None:
            k = width
        elif k < width:
            raise ValueError(f"clause of length {width} exceeds declared k={k}")
        object.__setattr__(self, "clauses", cls_tuple)
        object.__setattr__(self, "variables", universe)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "_varset", varset)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("CnfFormula is immutable")

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def varset(self) -> frozenset[int]:
        return self._varset

    def int_clauses(self) -> tuple[tuple[int, ...], ...]:
        """Clauses as tuples of signed codes (cached)."""
        got = self._cache.get("ints")
        if got is None:
            got = tuple(c.to_ints() for c in self.clauses)
            self._cache["ints"] = got
        return got

    def __eq__(self, other) -> bool:
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return (self.clauses == other.clauses
                and self.variables == other.variables and self.k == other.k)

    def __hash__(self) -> int:
        return hash((self.clauses, self.variables, self.k))

    def __repr__(self) -> str:
        return (f"CnfFormula({self.num_clauses} clauses, "
                f"{self.num_vars} vars, k={self.k})")


class PartialAssignment(Mapping):
    """Immutable map from variable index to truth value."""

    __slots__ = ("_bind",)

    def __init__(self, bindings: Mapping[int, bool] | Iterable[tuple[int, bool]] = ()):
        bind = dict(bindings)
        for v, b in bind.items():
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"bad variable index {v!r}")
            if not isinstance(b, (bool, np.bool_)):
                raise ValueError(f"non-boolean value for x{v}")
        object.__setattr__(self, "_bind", {v: bool(b) for v, b in bind.items()})

    def __setattr__(self, name, value):
        raise AttributeError("PartialAssignment is immutable")

    def __getitem__(self, var: int) -> bool:
        return self._bind[var]

    def __iter__(self):
        return iter(self._bind)

    def __len__(self) -> int:
        return len(self._bind)

    def merged(self, other: Mapping[int, bool]) -> "PartialAssignment":
        """Union with ``other``; overlapping keys must agree."""
        out = dict(self._bind)
        for v, b in other.items():
            if v in out and out[v] != bool(b):
                raise ValueError(f"conflicting value for x{v}")
            out[v] = bool(b)
        return PartialAssignment(out)

    def __repr__(self) -> str:
        inner = ", ".join(f"x{v}={'1' if b else '0'}"
                          for v, b in sorted(self._bind.items()))
        return f"PartialAssignment({inner})"


# ---------------------------------------------------------------------------
# DIMACS

@dataclass
class ParseStats:
    """Counters for anomalies seen while parsing."""

    tautologies_dropped: int = 0
    duplicate_literals_merged: int = 0
    declared_clauses: int = 0
    parsed_clauses: int = 0

    @property
    def clause_count_mismatch(self) -> bool:
        return self.declared_clauses != self.parsed_clauses


def parse_dimacs(text: str, *, k: int | None = None,
                 stats: ParseStats | None = None) -> CnfFormula:
    """Parse DIMACS CNF text.

    Comment lines start with ``c`` (or ``%``).  Clauses are runs of signed
    integers terminated by ``0`` and may span lines.  Tautological clauses
    are dropped with a warning, duplicate literals inside a clause are
    merged, and a clause-count mismatch against the header is reported as
    a warning rather than an error.
    """
    if stats is None:
        stats = ParseStats()
    num_vars = None
    declared = 0
    tokens: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: repeated header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from exc
            if num_vars < 0 or declared < 0:
                raise DimacsError(f"line {lineno}: negative header counts")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before header")
        tokens.extend(line.split())

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    stats.declared_clauses = declared

    clauses: list[Clause] = []
    current: list[int] = []
    seen_vars: set[int] = set()
    taut = False
    for tok in tokens:
        try:
            code = int(tok)
        except ValueError as exc:
            raise DimacsError(f"bad token {tok!r} in clause data") from exc
        if code == 0:
            if not taut:
                clauses.append(Clause.from_ints(current))
            else:
                stats.tautologies_dropped += 1
            current, seen_vars, taut = [], set(), False
            continue
        var = abs(code)
        if var > num_vars:
            raise DimacsError(f"literal {code} outside [1, {num_vars}]")
        if var in seen_vars:
            if (-code) in current:
                taut = True
            else:
                stats.duplicate_literals_merged += 1
            continue
        seen_vars.add(var)
        current.append(code)
    if current:
        # unterminated trailing clause: accept it but complain
        clauses.append(Clause.from_ints(current))
        warnings.warn("final clause not terminated by 0", DimacsWarning)

    stats.parsed_clauses = len(clauses)
    if stats.tautologies_dropped:
        warnings.warn(
            f"dropped {stats.tautologies_dropped} tautological clause(s)",
            DimacsWarning)
    if stats.clause_count_mismatch:
        warnings.warn(
            f"header declares {declared} clauses, found {stats.parsed_clauses}",
            DimacsWarning)
    return CnfFormula(clauses, num_vars, k=k)


def serialize_dimacs(phi: CnfFormula, *, comment: str | None = None) -> str:
    """Render a formula as DIMACS text (dense universes round-trip)."""
    top = phi.variables[-1] if phi.variables else 0
    lines = []
    if comment:
        lines.extend(f"c {row}" for row in comment.splitlines())
    lines.append(f"p cnf {top} {phi.num_clauses}")
    for c in phi.clauses:
        lines.append(" ".join(str(i) for i in c.to_ints()) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Semantics

def evaluate(phi: CnfFormula, assignment: Mapping[int, bool]) -> bool:
    """Truth value of ``phi`` under a total assignment of its universe."""
    for v in phi.variables:
        if v not in assignment:
            raise ValueError(f"x{v} is unassigned")
    return all(c.evaluate(assignment) for c in phi.clauses)


def restrict(phi: CnfFormula, assignment: Mapping[int, bool]) -> CnfFormula:
    """Fix some variables and simplify.

    Clauses with a satisfied literal disappear; falsified literals are
    stripped (possibly leaving an empty, unsatisfiable clause).  The fixed
    variables leave the universe; the rest keep their indices.
    """
    for v in assignment:
        if v not in phi._varset:
            raise ValueError(f"x{v} is not free in this formula")
    new_clauses: list[Clause] = []
    for c in phi.clauses:
        keep: list[Literal] = []
        sat = False
        for lit in c:
            if lit.var in assignment:
                if bool(assignment[lit.var]) != lit.negated:
                    sat = True
                    break
            else:
                keep.append(lit)
        if not sat:
            new_clauses.append(Clause(tuple(keep)))
    remaining = tuple(v for v in phi.variables if v not in assignment)
    return CnfFormula(new_clauses, variables=remaining)


# ---------------------------------------------------------------------------
# Bit-parallel helpers (shared by the exact counter and the sampler)

def bit_positions(variables: Iterable[int]) -> dict[int, int]:
    """Map each variable to a distinct bit position, in sorted order."""
    return {v: i for i, v in enumerate(sorted(variables))}


def clause_bitmasks(clauses: Iterable[Clause],
                    positions: Mapping[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Per-clause masks of positive/negative literal positions as uint64.

    A word ``w`` encoding an assignment (bit set = variable true) satisfies
    clause ``j`` iff ``(w & pos[j]) != 0 or (~w & neg[j]) != 0``.
    """
    pos_list, neg_list = [], []
    for c in clauses:
        p = n = 0
        for lit in c:
            where = positions[lit.var]
            if where >= 64:
                raise ValueError("bitmask view limited to 64 positions")
            if lit.negated:
                n |= 1 << where
            else:
                p |= 1 << where
        pos_list.append(p)
        neg_list.append(n)
    return (np.array(pos_list, dtype=np.uint64),
            np.array(neg_list, dtype=np.uint64))


def satisfied_rows(pos: np.ndarray, neg: np.ndarray,
                   words: np.ndarray) -> np.ndarray:
    """Boolean vector: which assignment words satisfy every clause."""
    ok = np.ones(words.shape, dtype=bool)
    inv = ~words
    for j in range(pos.shape[0]):
        ok &= ((words & pos[j]) != 0) | ((inv & neg[j]) != 0)
        if not ok.any():
            break
    return ok
