"""Positive 1-in-3 SAT compiled into a partially filled DoubleLex matrix.

Coordinates are ``(row, col)``, 1-based, with row 1 at the bottom. Rows
must be in reverse lex order (row 1 is the largest) and columns in lex
order, columns being read from the top row down. Stored bottom-up, this
is a :class:`MatrixModel` with ``origin="bottom"`` and
``row_order="reverse"``.

Layout from bottom to top:

* one variable gadget per SAT variable, gadget ``i`` shifted ``2(i-1)``
  columns right and padded with zero columns so that the gadget bodies
  sit side by side;
* three clause sub-matrices of 6 rows per clause. Sub-matrix ``q``
  (counted from the bottom, ``1..3m``) owns the switcher column
  ``2n + 2q - 1`` and the all-ones column next to it;
* ``n`` header rows, header row ``i`` holding ones over the bodies of
  variable gadgets ``i..n``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field

from .csp import solve
from .lex import Free, LexChain, MatrixModel

SCHEMA_VERSION = 1


class FormulaError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


class GeometryError(ValueError):
    pass


class DecodeError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Formula:
    n: int
    clauses: tuple

    def __post_init__(self):
        cl = []
        for c in self.clauses:
            c = tuple(sorted(int(x) for x in c))
            if len(c) != 3 or len(set(c)) != 3:
                raise FormulaError(f"clause {c} must have three distinct variables")
            if not all(1 <= x <= self.n for x in c):
                raise FormulaError(f"clause {c} mentions a variable outside 1..{self.n}")
            cl.append(c)
        object.__setattr__(self, "clauses", tuple(cl))
        missing = set(range(1, self.n + 1)) - {x for c in cl for x in c}
        if missing:
            raise FormulaError(f"variables {sorted(missing)} occur in no clause")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self, i: int) -> list:
        """Clause numbers (1-based) containing variable i, in order."""
        return [k for k, c in enumerate(self.clauses, start=1) if i in c]

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i-1]`` is the truth value of x_i."""
        return all(sum(bool(assignment[x - 1]) for x in c) == 1 for c in self.clauses)

    def to_text(self) -> str:
        lines = [f"p one3 {self.n} {self.m}"]
        lines += [" ".join(map(str, c)) for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_formula(text: str) -> Formula:
    """Read ``p one3 <n> <m>`` followed by one clause of three positive literals per line.

    Blank lines and lines starting with ``c`` are ignored.
    """
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            m = re.fullmatch(r"p\s+one3\s+(\d+)\s+(\d+)", line)
            if not m or header is not None:
                raise FormulaError(f"bad header {line!r}", lineno)
            header = (int(m.group(1)), int(m.group(2)))
            continue
        if header is None:
            raise FormulaError("clause before the 'p one3' header", lineno)
        toks = line.split()
        if toks and toks[-1] == "0":
            toks = toks[:-1]
        if len(toks) != 3 or not all(t.isdigit() for t in toks):
            raise FormulaError(f"expected three positive integers, got {line!r}", lineno)
        lits = [int(t) for t in toks]
        if len(set(lits)) != 3 or not all(1 <= x <= header[0] for x in lits):
            raise FormulaError(f"bad clause {line!r}", lineno)
        clauses.append(lits)
    if header is None:
        raise FormulaError("missing 'p one3 <n> <m>' header")
    if len(clauses) != header[1]:
        raise FormulaError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Formula(header[0], tuple(tuple(c) for c in clauses))


def brute_force_models(f: Formula) -> list:
    return [a for a in itertools.product((False, True), repeat=f.n) if f.satisfied_by(a)]


def all_formulas(n: int, m: int):
    """Every formula with n variables and m clauses (as a multiset), all variables used."""
    triples = list(itertools.combinations(range(1, n + 1), 3))
    for combo in itertools.combinations_with_replacement(triples, m):
        if {x for c in combo for x in c} == set(range(1, n + 1)):
            yield Formula(n, combo)


def random_formula(n: int, m: int, rng: random.Random) -> Formula:
    while True:
        clauses = tuple(tuple(sorted(rng.sample(range(1, n + 1), 3))) for _ in range(m))
        if {x for c in clauses for x in c} == set(range(1, n + 1)):
            return Formula(n, clauses)


# --------------------------------------------------------------------------
# gadgets; grids are lists of rows, grid[row-1][col-1], row 1 at the bottom


def _blank(rows, cols):
    return [[0] * cols for _ in range(rows)]


def _fill(grid, row, c1, c2, value):
    for c in range(c1, c2 + 1):
        _set(grid, row, c, value)


def _set(grid, row, col, value):
    cur = grid[row - 1][col - 1]
    if isinstance(cur, Free) or (cur != 0 and cur != value):
        raise GeometryError(f"cell ({row},{col}) already holds {cur!r}, cannot set {value!r}")
    grid[row - 1][col - 1] = value


@dataclass
class Gadget1Layout:
    var: int
    p: int
    r: int
    rows: int
    cols: int
    t: tuple
    f: tuple
    t_deps: list
    f_deps: list
    switcher: list
    free_ids: dict = field(default_factory=dict)  # (row, col) -> local free id

    @property
    def free_cells(self) -> list:
        return [self.t, self.f] + self.t_deps + self.f_deps + self.switcher


def build_gadget1(i: int, p: int, r: int):
    """Variable gadget for x_i occurring in p clauses, with r zero columns.

    Returns ``(grid, layout)``. Free cells are ``Free(k)`` with local ids
    in the order t, f, t-dependents, f-dependents, switcher (bottom-up).
    """
    if p < 1 or r < 0:
        raise GeometryError(f"need p >= 1 and r >= 0, got p={p}, r={r}")
    H, W = 2 * p + 4, 4 * p + 4 + r
    g = _blank(H, W)
    t = (p + 1, r + 3 + 2 * p)
    f = (2 * p + 3, W)
    t_deps = [(k, r + 3 + 2 * (k - 1)) for k in range(1, p + 1)]
    f_deps = [(p + 2 + k, r + 4 + 2 * p + 2 * (k - 1)) for k in range(1, p + 1)]
    switcher = [(row, 1) for row in range(2, 2 * p + 4)]
    layout = Gadget1Layout(i, p, r, H, W, t, f, t_deps, f_deps, switcher)
    for k, cell in enumerate(layout.free_cells):
        g[cell[0] - 1][cell[1] - 1] = Free(k)
        layout.free_ids[cell] = k

    _set(g, 1, 1, 1)
    for row in range(1, H + 1):
        _set(g, row, 2, 1)
    # columns 3..r+2 and the cell under the switcher stay 0
    for row, col in t_deps + f_deps:
        if col + 3 <= W:
            _fill(g, row, col + 3, W, 1)
    _fill(g, t[0], t[1] + 1, W, 1)
    _fill(g, p + 2, r + 3 + 2 * p, W, 1)
    _set(g, H, W, 1)
    return g, layout


@dataclass
class Gadget2Layout:
    clause: int
    which: int  # 1: t-dependents, 2 and 3: f-dependents
    r_off: int
    switcher_col: int
    targets: tuple  # absolute columns of the three targeted dependents
    switcher: list
    cells: list  # free cells facing a, b, c
    free_ids: dict = field(default_factory=dict)
    width: int = 0
    n: int = 0

    @property
    def free_cells(self) -> list:
        return self.cells + self.switcher


def build_gadget2(r_off: int, a: int, b: int, c: int, width: int, n: int,
                  clause: int = 1, which: int = 1):
    """Clause sub-matrix facing dependents in absolute columns a < b < c.

    Switcher in column ``2n + r_off + 1`` rows 2-5, ones in the column after
    it, free cells at ``(2, a+1)``, ``(4, b+1)``, ``(6, c+1)`` and ones from
    ``col+2`` to ``width`` in the row pairs 1-2, 3-4, 5-6. Local free ids:
    the three facing cells, then the switcher bottom-up.
    """
    S = 2 * n + r_off + 1
    if not a < b < c:
        raise GeometryError(f"target columns must increase, got {a}, {b}, {c}")
    if a <= S + 1:
        raise GeometryError(f"target column {a} clashes with switcher columns {S}, {S + 1}")
    if b < a + 2 or c < b + 2:
        raise GeometryError(f"targets {a}, {b}, {c} too close: one-blocks and free cells overlap")
    if c + 1 > width:
        raise GeometryError(f"target column {c} leaves no room inside width {width}")
    g = _blank(6, width)
    cells = [(2, a + 1), (4, b + 1), (6, c + 1)]
    switcher = [(row, S) for row in range(2, 6)]
    layout = Gadget2Layout(clause, which, r_off, S, (a, b, c), switcher, cells,
                           width=width, n=n)
    for k, cell in enumerate(layout.free_cells):
        g[cell[0] - 1][cell[1] - 1] = Free(k)
        layout.free_ids[cell] = k
    _set(g, 1, S, 1)
    for row in range(1, 7):
        _set(g, row, S + 1, 1)
    for (r1, r2), col in zip(((1, 2), (3, 4), (5, 6)), (a, b, c)):
        for row in (r1, r2):
            if col + 2 <= width:
                _fill(g, row, col + 2, width, 1)
    return g, layout


# --------------------------------------------------------------------------
# complete construction


@dataclass
class ConstructionPlan:
    n: int
    m: int
    rows: int
    cols: int
    r: list  # padding per variable gadget
    start_row: list  # s^r_i
    start_col: list  # s^c_i, a column offset
    end_row: list
    end_col: list
    clause_row: list  # sc^r_k
    header_rows: list
    gadget1: list  # Gadget1Layout per variable
    gadget2: list  # [[Gadget2Layout x3] per clause]
    labels: dict  # label -> (row, col) absolute
    var_of: dict  # (row, col) absolute -> variable index
    body: list  # (first, last) absolute body columns per variable gadget

    def cell_var(self, label: str) -> int:
        return self.var_of[self.labels[label]]

    def dep_label(self, kind: str, i: int, k: int) -> str:
        return f"{kind}{i}^c{k}"

    def to_json(self) -> dict:
        return {
            "n": self.n, "m": self.m, "rows": self.rows, "cols": self.cols,
            "r": self.r, "start_row": self.start_row, "start_col": self.start_col,
            "end_row": self.end_row, "end_col": self.end_col,
            "clause_row": self.clause_row, "header_rows": self.header_rows,
            "body": [list(b) for b in self.body],
            "labels": {k: [*v, self.var_of[v]] for k, v in sorted(self.labels.items())},
        }


def build_instance(f: Formula, r1: int | None = None):
    """Compile ``f`` into ``(MatrixModel, ConstructionPlan)``.

    Variables are numbered: indicators t_1, f_1, ..., t_n, f_n first, then
    the dependents, the clause cells facing them, and finally the switchers
    in the order gadgets are placed. Search branches in this order. ``r1`` defaults to ``2(n - 1 + 3m)``, the least padding that
    keeps the first body clear of every switcher column.
    """
    n, m = f.n, f.m
    ps = [len(f.occurrences(i)) for i in range(1, n + 1)]
    need = 2 * (n - 1 + 3 * m)
    r1 = need if r1 is None else r1
    if r1 < need:
        raise GeometryError(f"r_1={r1} overlaps the switcher columns; need at least {need}")
    r = [r1]
    for i in range(1, n):
        r.append(r[-1] + 4 * ps[i - 1])
    start_col = [2 * (i - 1) for i in range(1, n + 1)]
    start_row, end_row, end_col, body = [], [], [], []
    row = 1
    for i in range(n):
        h = 2 * ps[i] + 4
        start_row.append(row)
        end_row.append(row + h - 1)
        end_col.append(start_col[i] + 4 * ps[i] + 4 + r[i])
        body.append((start_col[i] + r[i] + 3, end_col[i]))
        row += h
    width = end_col[-1]
    clause_row = [end_row[-1] + 1 + 18 * (k - 1) for k in range(1, m + 1)]
    header_base = (clause_row[-1] + 18) if m else end_row[-1] + 1
    header_rows = [header_base + i - 1 for i in range(1, n + 1)]
    height = header_rows[-1]

    grid = _blank(height, width)
    owner = {}  # absolute free cell -> (gadget key, local id)
    labels = {}
    g1_layouts = []
    for i in range(n):
        g, lay = build_gadget1(i + 1, ps[i], r[i])
        g1_layouts.append(lay)
        _paste(grid, g, start_row[i], start_col[i], owner, ("g1", i))
        occ = f.occurrences(i + 1)
        labels[f"t{i + 1}"] = _abs(lay.t, start_row[i], start_col[i])
        labels[f"f{i + 1}"] = _abs(lay.f, start_row[i], start_col[i])
        for k, cl in enumerate(occ):
            labels[f"t{i + 1}^c{cl}"] = _abs(lay.t_deps[k], start_row[i], start_col[i])
            labels[f"f{i + 1}^c{cl}"] = _abs(lay.f_deps[k], start_row[i], start_col[i])
    g2_layouts = []
    for k, clause in enumerate(f.clauses, start=1):
        subs = []
        for which, kind in ((1, "t"), (2, "f"), (3, "f")):
            cols = [labels[f"{kind}{x}^c{k}"][1] for x in clause]
            r_off = 6 * (k - 1) + 2 * (which - 1)
            g, lay = build_gadget2(r_off, *cols, width, n, clause=k, which=which)
            subs.append(lay)
            base = clause_row[k - 1] + 6 * (which - 1)
            _paste(grid, g, base, 0, owner, ("g2", k, which))
        g2_layouts.append(subs)
    for i in range(n):
        _fill(grid, header_rows[i], body[i][0], width, 1)

    # global variable numbering
    var_of = {}
    order = []
    for i in range(n):
        order += [labels[f"t{i + 1}"], labels[f"f{i + 1}"]]
    for i in range(n):
        for cl in f.occurrences(i + 1):
            order += [labels[f"t{i + 1}^c{cl}"], labels[f"f{i + 1}^c{cl}"]]
    for k, subs in enumerate(g2_layouts, start=1):
        for lay in subs:
            base = clause_row[k - 1] + 6 * (lay.which - 1)
            order += [_abs(cell, base, 0) for cell in lay.cells]
    rest = sorted(owner, key=lambda cell: (owner[cell][0][0], cell))
    seen = set(order)
    order += [c for c in rest if c not in seen]
    for v, cell in enumerate(order):
        var_of[cell] = v
        grid[cell[0] - 1][cell[1] - 1] = Free(v)
    for i, lay in enumerate(g1_layouts):
        for j, cell in enumerate(lay.switcher):
            labels[f"s{i + 1}_{j + 1}"] = _abs(cell, start_row[i], start_col[i])
    for k, subs in enumerate(g2_layouts, start=1):
        for lay in subs:
            base = clause_row[k - 1] + 6 * (lay.which - 1)
            for name, cell in zip("abc", lay.cells):
                labels[f"g2_{k}_{lay.which}_{name}"] = _abs(cell, base, 0)
            for j, cell in enumerate(lay.switcher):
                labels[f"g2_{k}_{lay.which}_s{j + 1}"] = _abs(cell, base, 0)

    matrix = MatrixModel(grid, row_order="reverse", col_order="lex", origin="bottom")
    plan = ConstructionPlan(n, m, height, width, r, start_row, start_col, end_row, end_col,
                            clause_row, header_rows, g1_layouts, g2_layouts, labels, var_of, body)
    return matrix, plan


def _abs(cell, row0, col_off):
    return (row0 + cell[0] - 1, col_off + cell[1])


def _paste(grid, sub, row0, col_off, owner, key):
    for lr, row in enumerate(sub, start=1):
        for lc, cell in enumerate(row, start=1):
            R, C = row0 + lr - 1, col_off + lc
            if C > len(grid[0]):
                if cell != 0:
                    raise GeometryError(f"gadget {key} spills past column {len(grid[0])}")
                continue
            if isinstance(cell, Free):
                if grid[R - 1][C - 1] != 0 or (R, C) in owner:
                    raise GeometryError(f"free cell ({R},{C}) of {key} overlaps")
                owner[(R, C)] = (key, cell.var)
                grid[R - 1][C - 1] = cell
            elif cell == 1:
                _set(grid, R, C, 1)


# --------------------------------------------------------------------------
# decoding and verification


def decode_assignment(f: Formula, plan: ConstructionPlan, solution) -> tuple:
    """x_i is true iff every t-dependent of x_i is 1.

    Raises :class:`DecodeError` when a variable's dependents are mixed,
    which a correct construction never allows.
    """
    out = []
    for i in range(1, f.n + 1):
        occ = f.occurrences(i)
        ts = [solution[plan.cell_var(f"t{i}^c{k}")] for k in occ]
        fs = [solution[plan.cell_var(f"f{i}^c{k}")] for k in occ]
        if all(ts) and not any(fs):
            out.append(True)
        elif all(fs) and not any(ts):
            out.append(False)
        else:
            raise DecodeError(f"x{i}: mixed dependents t={ts} f={fs}")
    return tuple(out)


def encode_assignment(f: Formula, plan: ConstructionPlan, matrix: MatrixModel, model) -> tuple:
    """Complete a 1-in-3 model into a full matrix solution by search.

    The dependents are fixed from the model; the remaining free cells are
    found by the solver. Returns the full variable assignment or ``None``.
    """
    csp = matrix.to_model()
    doms = csp.initial_domains()
    for i, val in enumerate(model, start=1):
        for k in f.occurrences(i):
            doms[plan.cell_var(f"t{i}^c{k}")] = 1 << int(val)
            doms[plan.cell_var(f"f{i}^c{k}")] = 1 << int(not val)
    res = solve(csp, limit=1, doms=doms, max_nodes=10**6)
    return res.solutions[0] if res.solutions else None


@dataclass
class EquivalenceReport:
    formula: Formula
    sat_models: int
    oracle_sat: bool
    matrix_status: str  # "sat", "unsat" or "unknown"
    decoded: tuple | None
    decoded_valid: bool | None
    nodes: int

    @property
    def agree(self) -> bool | None:
        if self.matrix_status == "unknown":
            return None
        return self.oracle_sat == (self.matrix_status == "sat")

    @property
    def ok(self) -> bool:
        return self.agree is True and (not self.oracle_sat or bool(self.decoded_valid))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "formula": [list(c) for c in self.formula.clauses], "n": self.formula.n,
            "sat_models": self.sat_models, "oracle_sat": self.oracle_sat,
            "matrix_status": self.matrix_status,
            "agree": self.agree,
            "decoded": None if self.decoded is None else list(self.decoded),
            "decoded_valid": self.decoded_valid, "nodes": self.nodes,
        }


def verify_equivalence(f: Formula, max_nodes: int = 10**7) -> EquivalenceReport:
    """Compare the 2^n brute force with a DoubleLex search on the built matrix."""
    models = brute_force_models(f)
    matrix, plan = build_instance(f)
    res = solve(matrix.to_model(), limit=1, max_nodes=max_nodes)
    decoded = valid = None
    if res.solutions:
        decoded = decode_assignment(f, plan, res.solutions[0])
        valid = f.satisfied_by(decoded)
    status = res.status if not res.solutions else "sat"
    return EquivalenceReport(f, len(models), bool(models), status, decoded, valid,
                             res.stats.nodes)


def instance_json(matrix: MatrixModel, plan: ConstructionPlan) -> dict:
    out = matrix.to_json()
    out["schema_version"] = SCHEMA_VERSION
    out["plan"] = plan.to_json()
    return out


# --------------------------------------------------------------------------
# wrongly ordered pairs


FREE = None  # cell marker for an unset cell in partially fixed vectors


@dataclass(frozen=True)
class WronglyOrderedWitness:
    kind: str  # "rows" or "columns" (or "vectors" when used directly)
    first: int
    second: int
    k: int  # 1-based position
    fix_set: tuple  # 1-based positions j < k


def detect_wrongly_ordered(v1, v2, kind="vectors", first=0, second=0):
    """Witness that ``v1 <=lex v2`` is violated at some k but repairable before k.

    Entries are 0, 1 or ``None`` (free). Returns the witness with the
    smallest qualifying k, or ``None``.
    """
    if len(v1) != len(v2):
        raise ValueError("vectors differ in length")
    J = []
    for k, (a, b) in enumerate(zip(v1, v2), start=1):
        if a is not None and b is not None and a > b and J:
            return WronglyOrderedWitness(kind, first, second, k, tuple(J))
        if a is not None and b is not None and a < b:
            return None
        if (a == 0 or a is None) and b is None:
            J.append(k)
    return None


def _partial(cell, assignment):
    if isinstance(cell, Free):
        if assignment is not None and cell.var in assignment:
            return assignment[cell.var]
        return None
    return cell


def oriented_rows(matrix: MatrixModel, assignment=None) -> list:
    """Row vectors ordered so that each must be <=lex the next one.

    Items are ``(row number, vector)``.
    """
    rows = [(i + 1, [_partial(c, assignment) for c in r]) for i, r in enumerate(matrix.cells)]
    return rows[::-1] if matrix.row_order == "reverse" else rows


def oriented_cols(matrix: MatrixModel, assignment=None) -> list:
    order = range(matrix.rows) if matrix.origin == "top" else range(matrix.rows - 1, -1, -1)
    cols = [(j + 1, [_partial(matrix.cells[i][j], assignment) for i in order])
            for j in range(matrix.cols)]
    return cols[::-1] if matrix.col_order == "reverse" else cols


def column_witnesses(matrix: MatrixModel, assignment=None) -> dict:
    """Adjacent column pairs that are wrongly ordered, keyed by (left, right)."""
    cols = oriented_cols(matrix, assignment)
    out = {}
    for (j1, c1), (j2, c2) in zip(cols, cols[1:]):
        w = detect_wrongly_ordered(c1, c2, "columns", j1, j2)
        if w is not None:
            out[(j1, j2)] = w
    return out


def row_witnesses(matrix: MatrixModel, assignment=None) -> dict:
    rows = oriented_rows(matrix, assignment)
    out = {}
    for (i1, r1), (i2, r2) in zip(rows, rows[1:]):
        w = detect_wrongly_ordered(r1, r2, "rows", i1, i2)
        if w is not None:
            out[(i1, i2)] = w
    return out


# --------------------------------------------------------------------------
# gadget properties


def gadget_matrix(grid) -> MatrixModel:
    """A stand-alone gadget grid under the construction's orientation."""
    return MatrixModel(grid, row_order="reverse", col_order="lex", origin="bottom")


def _local_values(layout, assignment) -> dict:
    if isinstance(assignment, dict):
        return dict(assignment)
    return dict(enumerate(assignment))


def gadget_grid(layout):
    if isinstance(layout, Gadget1Layout):
        return build_gadget1(layout.var, layout.p, layout.r)[0]
    if not layout.width:
        raise GeometryError("gadget 2 layout carries no width; pass the grid explicitly")
    a, b, c = layout.targets
    return build_gadget2(layout.r_off, a, b, c, layout.width, layout.n,
                         layout.clause, layout.which)[0]


def rows_feasible(grid, assignment) -> bool:
    """Do the gadget rows satisfy the row ordering under a full assignment?"""
    m = gadget_matrix(grid)
    chain = LexChain(m.row_vectors(), m.row_order)
    n = max(m.free_vars(), default=-1) + 1
    full = [0] * n
    for v, x in assignment.items():
        full[v] = x
    return chain.check(full)


def check_gadget_properties(layout, assignment, grid=None) -> dict:
    """Evaluate the local gadget properties on a full free-cell assignment.

    ``assignment`` maps local free ids to 0/1 (a sequence works too). Each
    property is read as "if the gadget rows are ordered then ...", so an
    assignment that breaks row order passes vacuously; ``row_feasible``
    reports which case applied.
    """
    grid = gadget_grid(layout) if grid is None else grid
    vals = _local_values(layout, assignment)
    ids = layout.free_ids
    if set(vals) != set(ids.values()):
        raise ValueError("assignment must cover every free cell of the gadget")
    feasible = rows_feasible(grid, vals)
    out = {"row_feasible": feasible}
    if isinstance(layout, Gadget1Layout):
        # read top-down the switcher is the prefix of the row vectors
        sw = [vals[ids[c]] for c in reversed(layout.switcher)]
        t, f = vals[ids[layout.t]], vals[ids[layout.f]]
        td = [vals[ids[c]] for c in layout.t_deps]
        fd = [vals[ids[c]] for c in layout.f_deps]
        out["switcher_sorted"] = not feasible or sw == sorted(sw)
        out["indicator_set"] = not feasible or bool(t or f)
        out["dependents_follow"] = not feasible or (t == 1 and all(td)) or (f == 1 and all(fd))
    else:
        facing = [vals[ids[c]] for c in layout.cells]
        out["one_facing_cell"] = not feasible or sum(facing) <= 1
        zeros = {ids[c]: 0 for c, x in zip(layout.cells, facing) if x == 0}
        out["zeros_no_witness"] = not column_witnesses(gadget_matrix(grid), zeros)
    return out


def enumerate_gadget(layout, grid=None):
    """Yield ``(assignment, properties)`` for every 0/1 free-cell assignment."""
    grid = gadget_grid(layout) if grid is None else grid
    k = len(layout.free_ids)
    for bits in itertools.product((0, 1), repeat=k):
        vals = dict(enumerate(bits))
        yield vals, check_gadget_properties(layout, vals, grid)


def zero_column_neutral(p: int, r: int, extra: int) -> bool:
    """On a stand-alone gadget, padding with ``extra`` more zero
    columns keeps the set of row-feasible assignments and only adds columns
    that are lex-smallest."""
    g1, lay1 = build_gadget1(1, p, r)
    g2, lay2 = build_gadget1(1, p, r + extra)
    k = len(lay1.free_ids)
    for bits in itertools.product((0, 1), repeat=k):
        vals = dict(enumerate(bits))
        if rows_feasible(g1, vals) != rows_feasible(g2, vals):
            return False
    # the inserted columns are all zero, so no column can precede them
    return all(g2[row][col] == 0 for row in range(len(g2)) for col in range(r + 2, r + 2 + extra))


def _dependent_columns(plan: ConstructionPlan, i: int) -> dict:
    """Absolute column of every dependent label of variable i."""
    return {lab: cell[1] for lab, cell in plan.labels.items()
            if "^c" in lab and int(lab[1:lab.index("^")]) == i}


def dependent_witnesses(matrix: MatrixModel, plan: ConstructionPlan, assignment) -> dict:
    """Column witnesses sitting at a dependent's column, keyed by dependent label."""
    wit = column_witnesses(matrix, assignment)
    out = {}
    for lab, cell in plan.labels.items():
        if "^c" in lab:
            w = wit.get((cell[1], cell[1] + 1))
            if w is not None:
                out[lab] = w
    return out


def _designated_cells(plan: ConstructionPlan, label: str) -> set:
    """Gadget-2 free cells that may repair the witness of a dependent."""
    kind = label[0]
    i = int(label[1:label.index("^")])
    k = int(label[label.index("^c") + 2:])
    slot = "abc"[plan_clause(plan, k).index(i)]
    subs = (1,) if kind == "t" else (2, 3)
    return {plan.labels[f"g2_{k}_{w}_{slot}"] for w in subs}


def plan_clause(plan: ConstructionPlan, k: int) -> tuple:
    a, b, c = plan.gadget2[k - 1][0].targets
    by_col = {}
    for lab, cell in plan.labels.items():
        if lab.startswith("t") and "^c" in lab and lab.endswith(f"^c{k}"):
            by_col[cell[1]] = int(lab[1:lab.index("^")])
    return tuple(by_col[x] for x in (a, b, c))


def _position_to_row(matrix: MatrixModel, pos: int) -> int:
    # column vectors are read from the top row down
    return matrix.rows - pos + 1 if matrix.origin == "bottom" else pos


def instance_properties(f: Formula, matrix: MatrixModel = None, plan: ConstructionPlan = None,
                        solutions=None) -> dict:
    """Structural checks of the properties that need the whole instance.

    Returns ``{name: list of violation strings}``; empty lists mean the
    property holds. ``solutions`` (full matrix assignments) feed the
    counting check.
    """
    if matrix is None:
        matrix, plan = build_instance(f)
    bad = {"padding_neutral": [], "witness_iff_set": [], "enough_witnesses": [], "strict_separation": [], "fix_set": [], "count": []}

    for lay in plan.gadget1:
        for extra in (1, 2):
            if not zero_column_neutral(lay.p, 0, extra):
                bad["padding_neutral"].append(f"x{lay.var}: padding by {extra} changes row feasibility")

    # witness checks: every row-feasible assignment of each variable gadget,
    # written into the instance with all other free cells left open
    for i, lay in enumerate(plan.gadget1):
        grid = build_gadget1(lay.var, lay.p, lay.r)[0]
        deps = _dependent_columns(plan, lay.var)
        local_label = {}
        for lab in deps:
            kind, k = lab[0], int(lab[lab.index("^c") + 2:])
            pos = f.occurrences(lay.var).index(k)
            cell = (lay.t_deps if kind == "t" else lay.f_deps)[pos]
            local_label[lab] = lay.free_ids[cell]
        for vals, props in enumerate_gadget(lay, grid):
            if not props["row_feasible"]:
                continue
            glob = {}
            for cell, lid in lay.free_ids.items():
                glob[plan.var_of[_abs(cell, plan.start_row[i], plan.start_col[i])]] = vals[lid]
            wit = dependent_witnesses(matrix, plan, glob)
            for lab, lid in local_label.items():
                if (vals[lid] == 1) != (lab in wit):
                    bad["witness_iff_set"].append(f"{lab}={vals[lid]} witness={lab in wit} at {vals}")
            if len(wit) < lay.p:
                bad["enough_witnesses"].append(f"x{lay.var}: {len(wit)} witnesses < p={lay.p} at {vals}")
            for lab, w in wit.items():
                rows = {(_position_to_row(matrix, j), w.second) for j in w.fix_set}
                if rows != _designated_cells(plan, lab):
                    bad["fix_set"].append(f"{lab}: fix set {sorted(rows)}")

    bad["strict_separation"] = cross_gadget_violations(matrix, plan)

    g1_vars = {plan.var_of[_abs(c, plan.start_row[i], plan.start_col[i])]
               for i, lay in enumerate(plan.gadget1) for c in lay.free_ids}
    for sol in solutions or ():
        part = {v: sol[v] for v in g1_vars}
        wit = dependent_witnesses(matrix, plan, part)
        if len(wit) != 3 * f.m:
            bad["count"].append(f"{len(wit)} dependent witnesses, expected {3 * f.m}")
        for lab, w in wit.items():
            repaired = any(sol[plan.var_of[cell]] == 1 for cell in _designated_cells(plan, lab))
            if not repaired:
                bad["count"].append(f"{lab}: witness not repaired")
    return bad


def _row_groups(plan: ConstructionPlan) -> dict:
    group = {}
    for i in range(plan.n):
        for row in range(plan.start_row[i], plan.end_row[i] + 1):
            group[row] = ("g1", i + 1)
    for k, base in enumerate(plan.clause_row, start=1):
        for w in range(3):
            for row in range(base + 6 * w, base + 6 * w + 6):
                group[row] = ("g2", k, w + 1)
    for i, row in enumerate(plan.header_rows, start=1):
        group[row] = ("header", i)
    return group


def _strictly_below(v1, v2) -> bool:
    """Is ``v1 <lex v2`` forced whatever the free cells (``None``) become?"""
    hi = [1 if x is None else x for x in v1]
    lo = [0 if x is None else x for x in v2]
    return hi < lo


def cross_gadget_violations(matrix: MatrixModel, plan: ConstructionPlan) -> list:
    """Check that fixed cells alone strictly order rows of different gadgets and
    columns of different variable-gadget bodies."""
    out = []
    group = _row_groups(plan)
    rows = oriented_rows(matrix)
    for x in range(len(rows)):
        for y in range(x + 1, len(rows)):
            (i1, r1), (i2, r2) = rows[x], rows[y]
            if group[i1] != group[i2] and not _strictly_below(r1, r2):
                out.append(f"rows {i1} and {i2} not strictly ordered")
    cols = oriented_cols(matrix)
    owner = {}
    for i, (a, b) in enumerate(plan.body, start=1):
        for c in range(a, b + 1):
            owner[c] = i
    body_cols = [(j, v) for j, v in cols if j in owner]
    for x in range(len(body_cols)):
        for y in range(x + 1, len(body_cols)):
            (j1, c1), (j2, c2) = body_cols[x], body_cols[y]
            if owner[j1] != owner[j2] and not _strictly_below(c1, c2):
                out.append(f"columns {j1} and {j2} not strictly ordered")
    return out
