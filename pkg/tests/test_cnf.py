import warnings

import pytest

from indepcount import (Clause, CnfFormula, DimacsError, Literal,
                        PartialAssignment, evaluate, parse_dimacs, restrict,
                        serialize_dimacs)
from indepcount.cnf import ParseStats
from indepcount.gen import GeneratorSpec, generate

from conftest import CHAIN3_TEXT


def test_literal_int_roundtrip():
    assert Literal.from_int(-7) == Literal(7, True)
    assert Literal.from_int(3).to_int() == 3
    assert Literal(5, True).negate() == Literal(5, False)
    with pytest.raises(ValueError):
        Literal.from_int(0)
    with pytest.raises(ValueError):
        Literal(0)


def test_clause_rejects_duplicate_variable():
    with pytest.raises(ValueError):
        Clause.from_ints((1, -1))
    with pytest.raises(ValueError):
        Clause.from_ints((2, 2))


def test_parse_chain3(chain3):
    assert chain3.num_vars == 3
    assert chain3.num_clauses == 2
    assert chain3.k == 2
    assert chain3.int_clauses() == ((-1, 2), (-2, 3))


def test_parse_serialize_reparse_fixpoint(chain3):
    text = serialize_dimacs(chain3)
    again = parse_dimacs(text)
    assert again == chain3
    assert serialize_dimacs(again) == text


def test_parse_empty_formula_keeps_universe():
    phi = parse_dimacs("p cnf 2 0\n")
    assert phi.num_vars == 2
    assert phi.clauses == ()
    assert serialize_dimacs(phi) == "p cnf 2 0\n"


def test_parse_clauses_may_span_lines():
    phi = parse_dimacs("p cnf 4 2\n1 2\n3 0 -2\n4 0\n")
    assert phi.int_clauses() == ((1, 2, 3), (-2, 4))


def test_parse_errors():
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf x 2\n1 0\n")
    with pytest.raises(DimacsError):
        parse_dimacs("1 2 0\n")  # clause before header
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 2 1\n3 0\n")  # literal out of range
    with pytest.raises(DimacsError):
        parse_dimacs("")


def test_parse_tautology_dropped_with_warning():
    stats = ParseStats()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        phi = parse_dimacs("p cnf 2 2\n1 -1 0\n1 2 0\n", stats=stats)
    assert phi.num_clauses == 1
    assert stats.tautologies_dropped == 1
    assert any("tautological" in str(w.message) for w in caught)


def test_parse_duplicate_literal_merged():
    stats = ParseStats()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi = parse_dimacs("p cnf 2 1\n1 1 2 0\n", stats=stats)
    assert phi.int_clauses() == ((1, 2),)
    assert stats.duplicate_literals_merged == 1


def test_parse_clause_count_mismatch_is_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        phi = parse_dimacs("p cnf 2 5\n1 2 0\n")
    assert phi.num_clauses == 1
    assert any("declares 5" in str(w.message) for w in caught)


def test_formula_rejects_literal_outside_universe():
    with pytest.raises(ValueError):
        CnfFormula([(1, 5)], 3)


def test_k_is_observed_max_unless_overridden():
    phi = CnfFormula([(1, 2), (3,)], 3)
    assert phi.k == 2
    assert CnfFormula([(1, 2)], 3, k=3).k == 3
    with pytest.raises(ValueError):
        CnfFormula([(1, 2, 3)], 3, k=2)


def test_evaluate(chain3):
    assert evaluate(chain3, {1: False, 2: False, 3: False})
    assert not evaluate(chain3, {1: True, 2: False, 3: False})
    assert evaluate(chain3, {1: True, 2: True, 3: True})
    with pytest.raises(ValueError):
        evaluate(chain3, {1: True, 2: False})  # x3 unassigned


def test_restrict_drops_satisfied_and_strips_false(chain3):
    sub = restrict(chain3, {2: True})
    # first clause satisfied, second loses its ~x2 literal
    assert sub.int_clauses() == ((3,),)
    assert sub.variables == (1, 3)
    assert sub.num_vars == 2


def test_restrict_can_produce_empty_clause():
    phi = CnfFormula([(1, 2)], 2)
    sub = restrict(phi, {1: False, 2: False})
    assert sub.int_clauses() == ((),)
    assert sub.num_vars == 0


def test_restrict_rejects_unknown_variable(chain3):
    with pytest.raises(ValueError):
        restrict(chain3, {9: True})
    sub = restrict(chain3, {1: True})
    with pytest.raises(ValueError):
        restrict(sub, {1: True})  # already gone


def test_restrict_composes_like_a_single_restriction():
    # random formulas: restrict(restrict(phi, a), b) == restrict(phi, a|b)
    for seed in range(25):
        phi = generate(GeneratorSpec(n=10, m=12, k=3, seed=seed))
        a = {1: bool(seed & 1), 4: True}
        b = {7: False, 10: bool(seed & 2)}
        two_step = restrict(restrict(phi, a), b)
        one_step = restrict(phi, {**a, **b})
        assert two_step.clauses == one_step.clauses
        assert two_step.variables == one_step.variables


def test_partial_assignment_is_immutable_mapping():
    pa = PartialAssignment({1: True, 2: False})
    assert pa[1] is True and len(pa) == 2
    with pytest.raises(TypeError):
        pa[3] = True  # type: ignore[index]
    merged = pa.merged({3: True})
    assert dict(merged) == {1: True, 2: False, 3: True}
    with pytest.raises(ValueError):
        pa.merged({1: False})
    with pytest.raises(ValueError):
        PartialAssignment({0: True})


def test_chain3_text_matches_fixture(chain3):
    assert parse_dimacs(CHAIN3_TEXT) == chain3
