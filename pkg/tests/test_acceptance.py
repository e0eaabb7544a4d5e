"""One test per acceptance criterion; each prints a PASS/FAIL line with its timing."""

import functools
import itertools
import random
import time

from symbreak.csp import CspModel, oracle_dc, solve, values_of
from symbreak.lex import (Free, LexChain, LexLeq, MatrixModel, ValueLexLeader, audit_completeness,
                          doublelex_complete_check, doublelex_propagate, lex_leader_from_generators,
                          lex_leq_propagate, value_lexleader_propagate)
from symbreak.perm import (GeneratingSet, Permutation, closure, is_member, parse_generators,
                           schreier_sims)
from symbreak.reduction import (Formula, all_formulas, brute_force_models, build_gadget1,
                                build_instance, encode_assignment, enumerate_gadget,
                                instance_properties, random_formula, verify_equivalence)


def model_of(n, domain, *constraints):
    m = CspModel()
    for i in range(n):
        m.add_var(f"X{i + 1}", domain)
    for c in constraints:
        m.add(c)
    return m


def test_criterion_1_s4_lex_leader(criterion):
    t = time.perf_counter()
    group = parse_generators("(1 2);perm[2,3,4,1]")
    gen_break = lex_leader_from_generators(group, "variable", range(4))
    kept = set(solve(model_of(4, (0, 1), *gen_break), limit=None).solutions)
    both = {(0, 1, 0, 1), (0, 0, 1, 1)} <= kept

    sgs = parse_generators("(1 2);(2 3);(3 4)", 4)
    sgs_break = lex_leader_from_generators(sgs, "variable", range(4))
    rep = audit_completeness(model_of(4, (0, 1)), group, "variable", sgs_break)
    sols = sorted(solve(model_of(4, (0, 1), *sgs_break), limit=None).solutions)
    sorted_tuples = [s for s in itertools.product((0, 1), repeat=4) if list(s) == sorted(s)]
    ok = both and rep.complete and sols == sorted_tuples and len(sols) == 5
    elapsed = time.perf_counter() - t
    assert criterion(1, "S4 generators vs SGS lex-leader", ok, elapsed, 1.0,
                     f"generators admit both={both}, sgs complete={rep.complete}, "
                     f"sgs solutions={len(sols)}")


def test_criterion_2_rotation(criterion):
    t = time.perf_counter()
    c4 = parse_generators("perm[2,3,4,1]")
    rot = lex_leader_from_generators(c4, "variable", range(4))
    kept = set(solve(model_of(4, (0, 1), *rot), limit=None).solutions)
    var_ok = {(0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0)} <= kept

    val = lex_leader_from_generators(c4, "value", range(4))
    vm = model_of(4, (1, 2, 3, 4), *val)
    root = value_lexleader_propagate(val[0], vm.initial_domains())
    pruned = [sorted(set(range(1, 5)) - set(values_of(d))) for d in root]
    prune_ok = pruned == [[4], [], [], []]
    kept_vals = set(solve(vm, limit=None).solutions)
    const_ok = {(1,) * 4, (2,) * 4, (3,) * 4} <= kept_vals and (4,) * 4 not in kept_vals
    ok = var_ok and prune_ok and const_ok
    elapsed = time.perf_counter() - t
    assert criterion(2, "rotation and value lex-leader on C4", ok, elapsed, 1.0,
                     f"pruned={pruned}")


def test_criterion_3_doublelex_gap(criterion):
    t = time.perf_counter()
    m = MatrixModel([[Free(0), Free(1)], [Free(2), 0]])
    d = [0b11] * 3
    dl = doublelex_propagate(m, d)
    chk = doublelex_complete_check(m, d)
    exact = oracle_dc(m.to_model())
    expected = [0b01, 0b11, 0b11]
    ok = dl == d and chk.domains == expected and exact == expected
    elapsed = time.perf_counter() - t
    assert criterion(3, "2x2 DoubleLex misses X11=1", ok, elapsed, 1.0,
                     f"doublelex={dl}, complete={chk.domains}, oracle={exact}")


def partials(n, options=(1, 2, 3)):
    return itertools.product(options, repeat=n)


def table_oracle(model, n):
    """Domain-consistent supports for every Boolean partial assignment.

    A partial store's supports are the union of the supports of its two
    children on any unfixed variable; full stores are decided by ``check``.
    """

    @functools.cache
    def sup(d):
        i = next((j for j, m in enumerate(d) if m == 3), None)
        if i is None:
            return d if model.is_solution(tuple(m - 1 for m in d)) else None
        lo = sup(d[:i] + (1,) + d[i + 1:])
        hi = sup(d[:i] + (2,) + d[i + 1:])
        if lo is None or hi is None:
            return lo or hi
        return tuple(a | b for a, b in zip(lo, hi))

    return sup


def test_criterion_4_oracle_equivalence(criterion):
    t = time.perf_counter()
    cases = mismatches = 0
    for L in range(1, 5):
        for strict in (False, True):
            c = LexLeq(tuple(range(L)), tuple(range(L, 2 * L)), strict)
            m = model_of(2 * L, (0, 1), c)
            for d in partials(2 * L):
                cases += 1
                mismatches += lex_leq_propagate(c, list(d)) != oracle_dc(m, list(d))
        # the rotation lex-leader shares variables between its two sides
        rot = LexLeq(tuple(range(L)), tuple(range(1, L)) + (0,))
        m = model_of(L, (0, 1), rot)
        for d in partials(L):
            cases += 1
            mismatches += lex_leq_propagate(rot, list(d)) != oracle_dc(m, list(d))

    # Boolean values are 1 and 2 so that theta can act on them
    for n in range(1, 5):
        for images in ((1, 2), (2, 1)):
            c = ValueLexLeader(tuple(range(n)), Permutation.from_images(images))
            m = model_of(n, (1, 2), c)
            for d in partials(n, (0b010, 0b100, 0b110)):
                cases += 1
                mismatches += value_lexleader_propagate(c, list(d)) != oracle_dc(m, list(d))

    sampled = 0
    rng = random.Random(0)
    for k in (1, 2, 3):
        for L in range(1, 5):
            vecs = tuple(tuple(range(j * L, (j + 1) * L)) for j in range(k))
            for direction in ("lex", "reverse"):
                c = LexChain(vecs, direction)
                m = model_of(k * L, (0, 1), c)
                sup = table_oracle(m, k * L)
                for d in partials(k * L):
                    cases += 1
                    out = c.filter(list(d))
                    got = None if out is None else tuple(out.get(i, x) for i, x in enumerate(d))
                    exact = sup(d)
                    mismatches += got != exact
                    # keep the table honest against the enumerating oracle
                    if rng.random() < 0.002:
                        sampled += 1
                        od = oracle_dc(m, list(d))
                        mismatches += (None if od is None else tuple(od)) != exact
                sup.cache_clear()
    elapsed = time.perf_counter() - t
    assert criterion(4, "propagators equal oracle_dc on all partial assignments",
                     mismatches == 0, elapsed, 300.0,
                     f"cases={cases}, mismatches={mismatches}, table cross-checks={sampled}")


def test_criterion_5_schreier_sims(criterion):
    t = time.perf_counter()
    rng = random.Random(5)
    groups = discrepancies = 0
    for _ in range(120):
        n = rng.randint(1, 7)
        gens = []
        for _ in range(rng.randint(1, 3)):
            im = list(range(1, n + 1))
            rng.shuffle(im)
            gens.append(Permutation.from_images(im))
        g = GeneratingSet(n, gens)
        groups += 1
        chain = schreier_sims(g)
        cl = closure(g)
        discrepancies += chain.order != len(cl)
        if n <= 5:
            probes = [Permutation.from_images(p) for p in itertools.permutations(range(1, n + 1))]
        else:
            probes = rng.sample(sorted(cl, key=lambda p: p.images), min(100, len(cl)))
            for _ in range(100):
                im = list(range(1, n + 1))
                rng.shuffle(im)
                probes.append(Permutation.from_images(im))
        discrepancies += sum(is_member(chain, p) != (p in cl) for p in probes)
    elapsed = time.perf_counter() - t
    assert criterion(5, "Schreier-Sims order and sifting vs closure", discrepancies == 0,
                     elapsed, 60.0, f"groups={groups}, discrepancies={discrepancies}")


def test_criterion_6_reduction_end_to_end(criterion):
    t = time.perf_counter()
    formulas = [f for n in (3, 4) for m in (1, 2) for f in all_formulas(n, m)]
    rng = random.Random(2024)
    formulas += [random_formula(5, 3, rng) for _ in range(20)]
    bad = []
    for f in formulas:
        rep = verify_equivalence(f, max_nodes=10**7)
        if not rep.ok:
            bad.append(rep.to_json())
    elapsed = time.perf_counter() - t
    assert criterion(6, "reduction agrees with the 2^n oracle and decodes", not bad,
                     elapsed, 1800.0, f"formulas={len(formulas)}, disagreements={len(bad)}"), bad


def test_criterion_7_gadget_properties(criterion):
    t = time.perf_counter()
    violations, checked = [], 0
    for p in (1, 2):
        for r in (0, 2):
            _, lay = build_gadget1(1, p, r)
            for vals, props in enumerate_gadget(lay):
                checked += 1
                if not all(props[k] for k in ("switcher_sorted", "indicator_set", "dependents_follow")):
                    violations.append(("g1", p, r, vals))
    f = Formula(4, ((1, 2, 3), (1, 2, 4)))
    matrix, plan = build_instance(f)
    for subs in plan.gadget2:
        for lay in subs:
            for vals, props in enumerate_gadget(lay):
                checked += 1
                if not (props["one_facing_cell"] and props["zeros_no_witness"]):
                    violations.append(("g2", lay.clause, lay.which, vals))
    sols = [encode_assignment(f, plan, matrix, truth) for truth in brute_force_models(f)]
    structural = instance_properties(f, matrix, plan, sols)
    violations += [(k, v) for k, vs in structural.items() for v in vs]
    elapsed = time.perf_counter() - t
    assert criterion(7, "gadget properties and the 3m witness count", not violations, elapsed,
                     300.0, f"enumerated={checked}, violations={len(violations)}"), violations[:5]


def test_criterion_8_interchangeable_values(criterion):
    t = time.perf_counter()
    incomplete = []
    audits = 0
    for k in range(1, 5):
        gens = [Permutation.from_cycles(k, [[i, i + 1]]) for i in range(1, k)]
        group = GeneratingSet(k, gens)
        for n in range(1, 5):
            model = model_of(n, range(1, k + 1))
            breaking = lex_leader_from_generators(group, "value", range(n))
            rep = audit_completeness(model, group, "value", breaking)
            audits += 1
            if not rep.complete:
                incomplete.append((k, n, rep.orbits_with_multiple_survivors[:2]))
    elapsed = time.perf_counter() - t
    assert criterion(8, "adjacent value swaps break value interchangeability", not incomplete,
                     elapsed, 60.0, f"audits={audits}, incomplete={len(incomplete)}"), incomplete
