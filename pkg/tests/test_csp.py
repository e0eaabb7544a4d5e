import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbreak.csp import (BudgetExceeded, CspModel, In, ModelError, Table, brute_force_solutions,
                          mask_of, oracle_dc, propagate_fixpoint, single_value, solve, values_of)
from symbreak.lex import LexLeq


def small_model():
    m = CspModel()
    for i in range(3):
        m.add_var(f"x{i}", (0, 1, 2))
    m.add(Table((0, 1), frozenset({(0, 1), (1, 2), (2, 0)})))
    m.add(In(2, (1, 2)))
    m.add(LexLeq((0, 1), (1, 2)))
    return m


def test_masks():
    assert values_of(mask_of([0, 3, 5])) == [0, 3, 5]
    assert single_value(0b1000) == 3
    assert single_value(0b1010) is None
    with pytest.raises(ModelError):
        mask_of([-1])


def test_empty_domain_rejected():
    with pytest.raises(ModelError):
        CspModel().add_var("x", [])


def test_unknown_variable_in_constraint():
    m = CspModel()
    m.add_var("x", (0, 1))
    with pytest.raises(ModelError):
        m.add(In(3, (0,)))


def test_solve_all_matches_brute_force():
    m = small_model()
    res = solve(m, limit=None)
    assert res.status == "sat"
    assert sorted(res.solutions) == sorted(brute_force_solutions(m))


def test_unsat_and_budget():
    m = CspModel()
    m.add_var("x", (0, 1))
    m.add(In(0, (0,)))
    m.add(In(0, (1,)))
    assert solve(m).status == "unsat"
    assert propagate_fixpoint(m) is None

    big = CspModel()
    for i in range(12):
        big.add_var(f"x{i}", (0, 1))
    big.add(LexLeq(tuple(range(6)), tuple(range(6, 12)), strict=True))
    # budget stops the enumeration part way: some solutions, not all
    res = solve(big, limit=None, max_nodes=40)
    assert res.status == "sat"
    assert 0 < len(res.solutions) < len(brute_force_solutions(big))
    assert solve(big, max_nodes=5).status == "unknown"


def test_empty_table_wipes_out_at_root():
    m = CspModel()
    for i in range(10):
        m.add_var(f"x{i}", (0, 1))
    m.add(Table(tuple(range(10)), frozenset()))
    res = solve(m, max_nodes=3)
    assert res.status == "unsat" and res.stats.nodes == 0


def test_oracle_dc_and_cap():
    m = small_model()
    d = oracle_dc(m)
    sols = brute_force_solutions(m)
    for v in range(3):
        assert values_of(d[v]) == sorted({s[v] for s in sols})
    with pytest.raises(BudgetExceeded):
        oracle_dc(m, cap=5)


def test_json_round_trip():
    m = small_model()
    text = m.dumps()
    back = CspModel.loads(text)
    assert back.dumps() == text
    assert '"schema_version": 1' in text


def test_unknown_kind():
    with pytest.raises(ModelError):
        CspModel.from_json({"variables": [{"name": "x", "domain": [0]}],
                            "constraints": [{"kind": "nope"}]})


@settings(max_examples=80, deadline=None)
@given(st.lists(st.sets(st.integers(0, 2), min_size=1), min_size=3, max_size=3),
       st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), max_size=10))
def test_table_fixpoint_is_sound(domains, tuples):
    m = CspModel()
    for i, d in enumerate(domains):
        m.add_var(f"x{i}", d)
    m.add(Table((0, 1, 2), frozenset(tuples)))
    exact = oracle_dc(m)
    got = propagate_fixpoint(m)
    # a single table is domain consistent on its own
    assert got == exact
