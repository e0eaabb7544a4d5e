"""Command line front end: ``symbreak <subcommand> ...``.

Exit codes: 0 success / consistent, 1 wipeout or unsat, 2 usage or parse
error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import csp, lex, perm, reduction
from .csp import BudgetExceeded, CspModel, ModelError, values_of

EXIT_OK, EXIT_UNSAT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(data, fmt, text_lines, out):
    if fmt == "json":
        data = {"schema_version": csp.SCHEMA_VERSION, **data}
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno} col {e.colno}: {e.msg}") from e


def _load_model(path) -> CspModel:
    return CspModel.from_json(_load_json(path))


def _gens(args, degree=None):
    text = args.gens or ""
    if not text.strip():
        if degree is None:
            raise UsageError("--gens is empty and the degree is unknown")
        return perm.GeneratingSet(degree, [])
    return perm.parse_generators(text, degree)


def _vars_arg(text, model):
    if text is None:
        return list(range(len(model.variables)))
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(int(tok) if tok.isdigit() else model.var_index(tok))
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_group(args, out):
    g = _gens(args, args.degree)
    data, lines = {"degree": g.degree, "generators": [p.cycle_str() for p in g]}, []
    lines.append(f"degree {g.degree}, {len(g)} generators")
    chain = perm.schreier_sims(g, _int_list(args.sgs_base) if args.sgs_base else None)
    if args.order:
        data["order"] = chain.order
        lines.append(f"order {chain.order}")
    if args.irredundant:
        data["irredundant"] = perm.is_irredundant(g, args.cap)
        lines.append(f"irredundant {str(data['irredundant']).lower()}")
    if args.sgs_base:
        sgs = perm.canonical_sgs(chain)
        data["base"] = list(chain.base)
        data["sgs"] = [p.cycle_str() for p in sgs]
        lines.append("sgs " + " ; ".join(data["sgs"]))
    if args.member:
        answers = {}
        for text in args.member:
            p = perm.parse_perm(text, g.degree)
            answers[text] = perm.is_member(chain, p)
            lines.append(f"member {text}: {str(answers[text]).lower()}")
        data["member"] = answers
    _emit(data, args.format, lines, out)
    return EXIT_OK


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


def _breaking(g, kind, vars):
    if not len(g):
        return []
    return lex.lex_leader_from_generators(g, kind, vars)


def cmd_break(args, out):
    model = _load_model(args.model)
    vars = _vars_arg(args.vars, model)
    degree = len(vars) if args.kind == "variable" else None
    g = _gens(args, degree)
    for c in _breaking(g, args.kind, vars):
        model.add(c)
    out.write(model.dumps() + "\n")
    return EXIT_OK


def cmd_audit(args, out):
    model = _load_model(args.model)
    vars = _vars_arg(args.vars, model)
    degree = len(vars) if args.kind == "variable" else None
    g = _gens(args, degree)
    if args.break_gens is None:
        bg = g
    else:
        bg = perm.parse_generators(args.break_gens, g.degree) if args.break_gens.strip() \
            else perm.GeneratingSet(g.degree, [])
    report = lex.audit_completeness(model, g, args.kind, _breaking(bg, args.kind, vars),
                                    max_solutions=args.max_solutions)
    lines = [f"solutions {report.total_solutions}", f"survivors {report.surviving_solutions}",
             f"orbits {report.orbit_count}", f"complete: {str(report.complete).lower()}"]
    for key, surv in report.orbits_with_multiple_survivors:
        lines.append(f"orbit {key}: survivors {', '.join(map(str, surv))}")
    _emit(report.to_json(), args.format, lines, out)
    return EXIT_OK


def cmd_solve(args, out):
    model = _load_model(args.model)
    limit = None if args.all else args.limit
    res = csp.solve(model, limit=limit, max_nodes=args.max_nodes)
    data = {"status": res.status, "solutions": [list(s) for s in res.solutions],
            "nodes": res.stats.nodes}
    lines = [f"status {res.status}", f"nodes {res.stats.nodes}"]
    lines += [" ".join(map(str, s)) for s in res.solutions]
    _emit(data, args.format, lines, out)
    return {"sat": EXIT_OK, "unsat": EXIT_UNSAT, "unknown": EXIT_BUDGET}[res.status]


def _load_propagation_input(path):
    data = _load_json(path)
    if "cells" in data:
        matrix = lex.MatrixModel.from_json(data)
        return matrix.to_model(), matrix
    return CspModel.from_json(data), None


def cmd_propagate(args, out):
    model, matrix = _load_propagation_input(args.model)
    before = model.initial_domains()
    unknown = {}
    if args.engine == "oracle":
        after = csp.oracle_dc(model, cap=args.oracle_cap)
    elif args.engine == "chain":
        if matrix is not None:
            # one pass of each chain, no joint fixpoint
            after = lex.lexchain_propagate(matrix.row_vectors(), matrix.row_order, before)
            if after is not None:
                after = lex.lexchain_propagate(matrix.col_vectors(), matrix.col_order, after)
        else:
            after = csp.propagate_fixpoint(model)
    else:
        if matrix is None:
            raise UsageError(f"engine {args.engine} needs a matrix instance (with 'cells')")
        if args.engine == "double":
            after = lex.doublelex_propagate(matrix, before)
        else:
            chk = lex.doublelex_complete_check(matrix, before, free_cap=args.free_cap,
                                               max_nodes=args.max_nodes)
            after, unknown = chk.domains, chk.unknown
    if after is None:
        _emit({"engine": args.engine, "wipeout": True, "removed": {}}, args.format,
              ["wipeout"], out)
        return EXIT_UNSAT
    removed = {}
    for v, (b, a) in enumerate(zip(before, after)):
        gone = values_of(b & ~a)
        if gone:
            removed[model.variables[v].name] = gone
    lines = [f"{name}: removed {{{', '.join(map(str, vals))}}}" for name, vals in removed.items()]
    if not lines:
        lines = ["no removals"]
    data = {"engine": args.engine, "wipeout": False, "removed": removed,
            "domains": {model.variables[v].name: values_of(a) for v, a in enumerate(after)}}
    if unknown:
        data["unknown"] = {model.variables[v].name: values_of(mk) for v, mk in unknown.items()}
        lines.append("undecided: " + ", ".join(sorted(data["unknown"])))
    _emit(data, args.format, lines, out)
    return EXIT_BUDGET if unknown else EXIT_OK


def _verify_one(job):
    f, max_nodes = job
    return reduction.verify_equivalence(f, max_nodes=max_nodes)


def cmd_reduce(args, out):
    if args.gadget1 is not None:
        grid, _ = reduction.build_gadget1(1, args.gadget1, args.r)
        m = reduction.gadget_matrix(grid)
        if args.ascii:
            out.write(m.ascii() + "\n")
        else:
            out.write(json.dumps({"schema_version": csp.SCHEMA_VERSION, **m.to_json()},
                                 indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if args.random:
        n, m = _int_list(args.random)
        rng = random.Random(args.seed)
        formulas = [reduction.random_formula(n, m, rng) for _ in range(args.trials)]
    elif args.formula:
        formulas = [reduction.parse_formula(_read(args.formula))]
    else:
        raise UsageError("give a formula file, --random N,M or --gadget1 P")

    if not args.verify and not args.random:
        matrix, plan = reduction.build_instance(formulas[0])
        if args.ascii:
            out.write(matrix.ascii() + "\n")
        else:
            out.write(json.dumps(reduction.instance_json(matrix, plan), indent=2,
                                 sort_keys=True) + "\n")
        return EXIT_OK

    jobs = [(f, args.max_nodes) for f in formulas]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_verify_one, jobs))
    else:
        reports = [_verify_one(j) for j in jobs]
    code = EXIT_OK
    lines = []
    for rep in reports:
        verdict = "inconclusive" if rep.agree is None else ("ok" if rep.ok else "MISMATCH")
        lines.append(f"{rep.formula.clauses}: oracle {'sat' if rep.oracle_sat else 'unsat'}, "
                     f"matrix {rep.matrix_status}, nodes {rep.nodes}: {verdict}")
        if rep.agree is None:
            code = max(code, EXIT_BUDGET)
        elif not rep.ok:
            code = EXIT_UNSAT if code == EXIT_OK else code
    if args.ascii and len(formulas) == 1:
        matrix, _ = reduction.build_instance(formulas[0])
        lines.insert(0, matrix.ascii())
    data = {"reports": [r.to_json() for r in reports]}
    _emit(data, args.format, lines, out)
    return code


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="symbreak",
                                description="Symmetry breaking for CSPs: groups, lex-leader "
                                            "constraints, DoubleLex propagation and the "
                                            "1-in-3 SAT reduction.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    g = sub.add_parser("group", help="order, irredundancy, SGS and membership")
    g.add_argument("--gens", required=True, help='";"-separated generators, e.g. "(1 2);perm[2,3,4,1]"')
    g.add_argument("--degree", type=int)
    g.add_argument("--order", action="store_true")
    g.add_argument("--irredundant", action="store_true")
    g.add_argument("--sgs-base", help="comma-separated base, e.g. 4,3,2,1")
    g.add_argument("--member", action="append", help="permutation to test (repeatable)")
    g.add_argument("--cap", type=int, default=perm.DEFAULT_CLOSURE_CAP)
    common(g)
    g.set_defaults(func=cmd_group)

    b = sub.add_parser("break", help="append lex-leader constraints to a model")
    b.add_argument("model")
    b.add_argument("--gens", default="")
    b.add_argument("--kind", choices=("variable", "value"), default="variable")
    b.add_argument("--vars", help="comma-separated variable indices or names (default: all)")
    b.set_defaults(func=cmd_break)

    a = sub.add_parser("audit", help="count lex-leader survivors per solution orbit")
    a.add_argument("model")
    a.add_argument("--gens", default="", help="generators of the symmetry group")
    a.add_argument("--break-gens", help="generators to post lex-leaders for (default: --gens)")
    a.add_argument("--kind", choices=("variable", "value"), default="variable")
    a.add_argument("--vars")
    a.add_argument("--max-solutions", type=int, default=10**6)
    common(a)
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("solve", help="depth-first search")
    s.add_argument("model")
    s.add_argument("--all", action="store_true")
    s.add_argument("--limit", type=int, default=1)
    s.add_argument("--max-nodes", type=int)
    common(s)
    s.set_defaults(func=cmd_solve)

    pr = sub.add_parser("propagate", help="run one propagation engine at the root")
    pr.add_argument("model", help="CSP model JSON or matrix instance JSON")
    pr.add_argument("--engine", choices=("chain", "double", "complete", "oracle"), default="double")
    pr.add_argument("--oracle-cap", type=int, default=csp.DEFAULT_ORACLE_CAP)
    pr.add_argument("--free-cap", type=int, default=lex.DEFAULT_FREE_CAP)
    pr.add_argument("--max-nodes", type=int)
    common(pr)
    pr.set_defaults(func=cmd_propagate)

    r = sub.add_parser("reduce", help="build (and verify) the 1-in-3 SAT reduction")
    r.add_argument("formula", nargs="?", help="file with 'p one3 n m' and clause lines")
    r.add_argument("--verify", action="store_true")
    r.add_argument("--ascii", action="store_true")
    r.add_argument("--max-nodes", type=int, default=10**7)
    r.add_argument("--random", metavar="N,M", help="verify random formulas instead")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=20)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--gadget1", type=int, metavar="P", help="render a lone variable gadget")
    r.add_argument("--r", type=int, default=0, help="zero-column padding for --gadget1")
    common(r)
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (BudgetExceeded, perm.CapExceeded) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ModelError, perm.GroupError, reduction.FormulaError,
            reduction.GeometryError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
