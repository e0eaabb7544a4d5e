import random
from pathlib import Path

import pytest

from symbreak.lex import Free
from symbreak.reduction import (DecodeError, Formula, FormulaError, GeometryError, all_formulas,
                                brute_force_models, build_gadget1, build_gadget2, build_instance,
                                check_gadget_properties, column_witnesses, decode_assignment,
                                detect_wrongly_ordered, encode_assignment, enumerate_gadget,
                                gadget_matrix, instance_json, instance_properties, parse_formula,
                                random_formula, verify_equivalence, zero_column_neutral)

GOLDEN = Path(__file__).parent / "golden"
RUNNING = Formula(4, ((1, 2, 3), (1, 2, 4)))


# formulas

def test_parse_formula():
    f = parse_formula("c demo\np one3 4 2\n1 2 3\n4 2 1 0\n")
    assert f == RUNNING
    assert f.occurrences(1) == [1, 2] and f.occurrences(3) == [1]


@pytest.mark.parametrize("text, line", [
    ("p one3 3 1\n1 2\n", 2),
    ("p one3 3 1\n1 2 2\n", 2),
    ("1 2 3\n", 1),
    ("p one3 3 1\n1 2 4\n", 2),
    ("p cnf 3 1\n1 2 3\n", 1),
])
def test_parse_formula_errors(text, line):
    with pytest.raises(FormulaError) as e:
        parse_formula(text)
    assert e.value.line == line


def test_formula_requires_every_variable():
    with pytest.raises(FormulaError):
        Formula(4, ((1, 2, 3),))


def test_brute_force_models():
    assert len(brute_force_models(Formula(3, ((1, 2, 3),)))) == 3
    assert brute_force_models(Formula(4, ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)))) == []


# wrongly ordered pairs

def test_detect_wrongly_ordered_examples():
    w = detect_wrongly_ordered((0, 0, 1), (None, 0, 0))
    assert (w.k, w.fix_set) == (3, (1,))
    assert detect_wrongly_ordered((0, 0), (0, 0)) is None
    assert detect_wrongly_ordered((1, 0), (0, 1)) is None
    # a fixed position already in order blocks later witnesses
    assert detect_wrongly_ordered((0, None, 1), (1, None, 0)) is None


# gadgets

def test_gadget1_golden():
    grid, lay = build_gadget1(1, 2, 0)
    assert gadget_matrix(grid).ascii() + "\n" == (GOLDEN / "gadget1_p2_r0.txt").read_text()
    assert (len(grid), len(grid[0])) == (8, 12)
    assert lay.t == (3, 7) and lay.f == (7, 12)
    assert lay.switcher == [(r, 1) for r in range(2, 8)]
    assert len(lay.free_cells) == 12


@pytest.mark.parametrize("p, r", [(1, 0), (1, 4), (2, 10), (3, 2)])
def test_gadget1_shape(p, r):
    grid, lay = build_gadget1(1, p, r)
    assert (len(grid), len(grid[0])) == (2 * p + 4, 4 * p + 4 + r)
    assert sum(isinstance(c, Free) for row in grid for c in row) == 4 * p + 4
    for row in grid:
        assert row[1] == 1
        assert all(c == 0 for c in row[2:r + 2])


def test_gadget1_bad_parameters():
    with pytest.raises(GeometryError):
        build_gadget1(1, 0, 0)


def test_gadget2_shape_and_errors():
    grid, lay = build_gadget2(0, 8, 10, 12, 14, n=2)
    assert len(grid) == 6 and len(grid[0]) == 14
    assert sum(isinstance(c, Free) for row in grid for c in row) == 7
    assert lay.switcher_col == 5
    assert all(grid[r][5] == 1 for r in range(6))
    with pytest.raises(GeometryError):
        build_gadget2(0, 5, 10, 12, 14, n=2)
    with pytest.raises(GeometryError):
        build_gadget2(0, 8, 9, 12, 14, n=2)
    with pytest.raises(GeometryError):
        build_gadget2(0, 8, 10, 14, 14, n=2)


def test_gadget1_exhaustive_p1():
    results = list(enumerate_gadget(build_gadget1(1, 1, 0)[1]))
    assert len(results) == 2 ** 8
    feasible = [props for _, props in results if props["row_feasible"]]
    assert feasible
    for props in feasible:
        assert props["switcher_sorted"] and props["indicator_set"] and props["dependents_follow"]


def test_gadget1_both_indicators_zero_is_row_infeasible():
    _, lay = build_gadget1(1, 2, 0)
    vals = {k: 0 for k in lay.free_ids.values()}
    props = check_gadget_properties(lay, vals)
    assert not props["row_feasible"]
    with pytest.raises(ValueError):
        check_gadget_properties(lay, {0: 1})


def test_gadget2_two_facing_ones_infeasible():
    _, lay = build_gadget2(0, 8, 10, 12, 14, n=2)
    for two in ((1, 1, 0), (1, 0, 1), (0, 1, 1)):
        for sw in range(16):
            vals = dict(enumerate(two + tuple(sw >> i & 1 for i in range(4))))
            assert not check_gadget_properties(lay, vals)["row_feasible"]


def test_zero_column_neutral():
    assert zero_column_neutral(1, 0, 3)
    assert zero_column_neutral(2, 1, 2)


def test_dependent_creates_one_column_witness():
    # the lone-gadget scenario: t and its dependents at 1
    matrix, plan = build_instance(RUNNING)
    assignment = {plan.cell_var("t1"): 1, plan.cell_var("t1^c1"): 1, plan.cell_var("t1^c2"): 1}
    wit = column_witnesses(matrix, assignment)
    cols = {plan.labels[lab][1] for lab in ("t1^c1", "t1^c2")}
    assert {left for left, _ in wit} == cols


# complete construction

def test_running_example_geometry():
    matrix, plan = build_instance(RUNNING)
    assert (matrix.rows, matrix.cols) == (68, 52)
    assert len(matrix.free_vars()) == sum(4 * p + 4 for p in (2, 2, 1, 1)) + 21 * 2
    assert plan.start_col == [0, 2, 4, 6]
    assert plan.clause_row == [29, 47]
    assert plan.header_rows == [65, 66, 67, 68]
    # header rows contain no free cells
    assert not any(isinstance(c, Free) for r in plan.header_rows for c in matrix.cells[r - 1])
    assert matrix.row_order == "reverse" and matrix.col_order == "lex"


def test_narrow_padding_is_rejected():
    # 2(n-1+m) leaves switcher columns inside the first body
    with pytest.raises(GeometryError):
        build_instance(RUNNING, r1=10)


def test_free_cell_census():
    for n in range(3, 6):
        for m in range(1, 4):
            for f in all_formulas(n, m):
                matrix, _ = build_instance(f)
                ps = [len(f.occurrences(i)) for i in range(1, n + 1)]
                assert len(matrix.free_vars()) == sum(4 * p + 4 for p in ps) + 21 * m


def test_instance_json_shape():
    matrix, plan = build_instance(Formula(3, ((1, 2, 3),)))
    data = instance_json(matrix, plan)
    assert data["schema_version"] == 1
    assert {"rows", "cols", "row_order", "col_order", "cells", "plan"} <= set(data)
    states = {s for _, _, s in data["cells"]}
    assert {"0", "1"} <= states and any(s.startswith("free:") for s in states)


def test_decode_examples():
    f = Formula(3, ((1, 2, 3),))
    _, plan = build_instance(f)
    n_vars = max(plan.var_of.values()) + 1
    sol = [0] * n_vars
    for i, truth in ((1, True), (2, False), (3, False)):
        sol[plan.cell_var(f"t{i}^c1")] = int(truth)
        sol[plan.cell_var(f"f{i}^c1")] = int(not truth)
    assert decode_assignment(f, plan, sol) == (True, False, False)
    sol[plan.cell_var("f1^c1")] = 1
    with pytest.raises(DecodeError):
        decode_assignment(f, plan, sol)


def test_every_model_extends_to_a_matrix_solution():
    matrix, plan = build_instance(RUNNING)
    model = matrix.to_model()
    for truth in brute_force_models(RUNNING):
        sol = encode_assignment(RUNNING, plan, matrix, truth)
        assert sol is not None and model.is_solution(sol)
        assert decode_assignment(RUNNING, plan, sol) == truth


def test_instance_properties_running_example():
    matrix, plan = build_instance(RUNNING)
    sols = [encode_assignment(RUNNING, plan, matrix, t) for t in brute_force_models(RUNNING)]
    bad = instance_properties(RUNNING, matrix, plan, sols)
    assert bad == {k: [] for k in bad}


def test_verify_single_clause():
    rep = verify_equivalence(Formula(3, ((1, 2, 3),)))
    assert rep.ok and rep.sat_models == 3
    assert rep.to_json()["agree"] is True


def test_verify_budget_is_inconclusive():
    rep = verify_equivalence(RUNNING, max_nodes=5)
    assert rep.matrix_status == "unknown" and rep.agree is None and not rep.ok


def test_random_formula_uses_every_variable():
    rng = random.Random(2)
    for _ in range(20):
        f = random_formula(5, 3, rng)
        assert {x for c in f.clauses for x in c} == set(range(1, 6))


@pytest.mark.slow
def test_unsat_formula_matrix_unsat():
    f = Formula(4, ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)))
    rep = verify_equivalence(f, max_nodes=10**7)
    assert rep.agree is True and rep.matrix_status == "unsat"
