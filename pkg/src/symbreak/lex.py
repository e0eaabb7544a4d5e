"""Lexicographic ordering constraints and their filters.

A vector entry is either a variable index (``int``) or a :class:`Const`.
Vectors of a chain or matrix must not share variables; a single lex pair
may, in which case its filter falls back to an explicit support search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .csp import (CONSTRAINT_KINDS, BudgetExceeded, Constraint, CspModel, ModelError,
                  propagate_fixpoint, register, solve, values_of)
from .perm import GeneratingSet, Permutation, orbit_of_assignment

DEFAULT_FREE_CAP = 30


class Const(NamedTuple):
    value: int


def _entry_mask(e, doms) -> int:
    if isinstance(e, Const):
        return 1 << e.value
    return doms[e]


def _entry_json(e):
    return {"const": e.value} if isinstance(e, Const) else e


def _entry_from_json(x):
    return Const(x["const"]) if isinstance(x, dict) else int(x)


def _vars_in(vec) -> list:
    return [e for e in vec if not isinstance(e, Const)]


def _entry_value(e, assignment):
    return e.value if isinstance(e, Const) else assignment[e]


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


# --------------------------------------------------------------------------
# single pair: positions carry a list of options (binding, left, right)


def _pair_dp(options: list, strict: bool):
    """Supported option indices per position for ``left <=lex right``.

    Requires that no variable occurs at two different positions. Returns
    ``None`` when no tuple satisfies the relation.
    """
    n = len(options)
    has_eq = [any(l == r for _, l, r in opts) for opts in options]
    has_lt = [any(l < r for _, l, r in opts) for opts in options]
    eq = [True] * (n + 1)
    for i in range(n):
        eq[i + 1] = eq[i] and has_eq[i]
    f = [False] * (n + 1)
    f[n] = not strict
    for i in range(n - 1, -1, -1):
        f[i] = has_lt[i] or (has_eq[i] and f[i + 1])
    if not f[0]:
        return None
    out = []
    free_from_here = False
    for i in range(n):
        if free_from_here:
            out.append(set(range(len(options[i]))))
            continue
        keep = set()
        if eq[i]:
            for k, (_, l, r) in enumerate(options[i]):
                if l < r or (l == r and f[i + 1]):
                    keep.add(k)
        out.append(keep)
        if eq[i] and has_lt[i]:
            free_from_here = True
    return out


def _apply_map(mapping, v):
    if mapping is None:
        return v
    if not 1 <= v <= mapping.degree:
        return None
    return mapping(v)


def _position_options(le, lmap, re_, rmap, doms):
    """All (binding, left value, right value) combinations at one position."""
    opts = []
    lvals = values_of(_entry_mask(le, doms))
    if not isinstance(le, Const) and not isinstance(re_, Const) and le == re_:
        for v in lvals:
            a, b = _apply_map(lmap, v), _apply_map(rmap, v)
            if a is not None and b is not None:
                opts.append((((le, v),), a, b))
        return opts
    rvals = values_of(_entry_mask(re_, doms))
    for v in lvals:
        a = _apply_map(lmap, v)
        if a is None:
            continue
        for w in rvals:
            b = _apply_map(rmap, w)
            if b is None:
                continue
            bind = []
            if not isinstance(le, Const):
                bind.append((le, v))
            if not isinstance(re_, Const):
                bind.append((re_, w))
            opts.append((tuple(bind), a, b))
    return opts


def _pair_filter(left, right, doms, strict=False, lmap=None, rmap=None):
    scope = sorted(set(_vars_in(left)) | set(_vars_in(right)))
    n = len(left)
    pos_vars = [set(_vars_in([left[i], right[i]])) for i in range(n)]
    seen = {}
    overlap = False
    for i, vs in enumerate(pos_vars):
        for v in vs:
            if seen.setdefault(v, i) != i:
                overlap = True
    if overlap:
        support = _pair_search(left, right, doms, strict, lmap, rmap, scope)
    else:
        options = [_position_options(left[i], lmap, right[i], rmap, doms) for i in range(n)]
        kept = _pair_dp(options, strict)
        if kept is None:
            return None
        support = {v: 0 for v in scope}
        for i in range(n):
            for k in kept[i]:
                for var, val in options[i][k][0]:
                    support[var] |= 1 << val
    out = {}
    for v in scope:
        new = doms[v] & support[v]
        if not new:
            return None
        if new != doms[v]:
            out[v] = new
    return out


def _pair_search(left, right, doms, strict, lmap, rmap, scope):
    """Support collection by branching on tie positions; handles shared variables."""
    support = {v: 0 for v in scope}
    n = len(left)

    def record(bind):
        for v in scope:
            support[v] |= (1 << bind[v]) if v in bind else doms[v]

    def rec(i, bind):
        if i == n:
            if not strict:
                record(bind)
            return
        le, re_ = left[i], right[i]
        lvals = [bind[le]] if le in bind and not isinstance(le, Const) else values_of(_entry_mask(le, doms))
        for v in lvals:
            a = _apply_map(lmap, v)
            if a is None:
                continue
            b1 = dict(bind)
            if not isinstance(le, Const):
                b1[le] = v
            if isinstance(re_, Const):
                rvals = [re_.value]
            elif re_ in b1:
                rvals = [b1[re_]]
            else:
                rvals = values_of(doms[re_])
            for w in rvals:
                b = _apply_map(rmap, w)
                if b is None or a > b:
                    continue
                b2 = dict(b1)
                if not isinstance(re_, Const):
                    b2[re_] = w
                if a < b:
                    record(b2)
                else:
                    rec(i + 1, b2)

    rec(0, {})
    return support


@register("lex_leq")
@dataclass(frozen=True)
class LexLeq(Constraint):
    """``left <=lex right`` (or ``<lex`` when ``strict``)."""

    left: tuple
    right: tuple
    strict: bool = False

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise ModelError(f"lex vectors differ in length: {len(self.left)} vs {len(self.right)}")

    @property
    def scope(self):
        return tuple(sorted(set(_vars_in(self.left)) | set(_vars_in(self.right))))

    def check(self, assignment):
        a = [_entry_value(e, assignment) for e in self.left]
        b = [_entry_value(e, assignment) for e in self.right]
        c = lex_compare(a, b)
        return c < 0 or (c == 0 and not self.strict)

    def filter(self, doms):
        return _pair_filter(self.left, self.right, doms, self.strict)

    def to_json(self):
        return {"kind": "lex_lt" if self.strict else "lex_leq",
                "left": [_entry_json(e) for e in self.left],
                "right": [_entry_json(e) for e in self.right]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(_entry_from_json(x) for x in data["left"]),
                   tuple(_entry_from_json(x) for x in data["right"]),
                   data["kind"] == "lex_lt")


CONSTRAINT_KINDS["lex_lt"] = LexLeq


@register("value_lexleader")
@dataclass(frozen=True)
class ValueLexLeader(Constraint):
    """``X_1..X_n <=lex theta(X_1)..theta(X_n)``; values outside 1..deg(theta) have no support."""

    vars: tuple
    theta: Permutation

    @property
    def scope(self):
        return tuple(sorted(set(self.vars)))

    def check(self, assignment):
        xs = [assignment[v] for v in self.vars]
        if any(not 1 <= x <= self.theta.degree for x in xs):
            return False
        return lex_compare(xs, [self.theta(x) for x in xs]) <= 0

    def filter(self, doms):
        return _pair_filter(self.vars, self.vars, doms, False, None, self.theta)

    def to_json(self):
        return {"kind": self.kind, "vars": list(self.vars), "theta": self.theta.image_str()}

    @classmethod
    def from_json(cls, data):
        from .perm import parse_perm
        return cls(tuple(data["vars"]), parse_perm(data["theta"]))


def lex_leq_propagate(c: LexLeq, doms: Sequence[int]):
    """Domain list after filtering ``c`` once, or ``None`` on wipeout."""
    return _apply(c.filter(doms), doms)


def value_lexleader_propagate(c: ValueLexLeader, doms: Sequence[int]):
    return _apply(c.filter(doms), doms)


def _apply(out, doms):
    if out is None:
        return None
    new = list(doms)
    for v, m in out.items():
        new[v] = m
    return new


# --------------------------------------------------------------------------
# bounded vectors and LexChain


class _Bounds:
    """DP over one vector with optional lower/upper lex bounds.

    State (tl, tu): the prefix still equals the lower bound / upper bound.
    """

    def __init__(self, masks, lower=None, upper=None, lower_strict=False, upper_strict=False):
        self.masks = masks
        self.lower = lower
        self.upper = upper
        n = len(masks)
        self.vals = [values_of(m) for m in masks]
        states = [(tl, tu) for tl in (False, True) for tu in (False, True)
                  if (lower is not None or not tl) and (upper is not None or not tu)]
        feas = [dict() for _ in range(n + 1)]
        for s in states:
            tl, tu = s
            feas[n][s] = not (tl and lower_strict) and not (tu and upper_strict)
        for c in range(n - 1, -1, -1):
            for s in states:
                feas[c][s] = any(
                    t is not None and feas[c + 1][t]
                    for t in (self.step(s, c, v) for v in self.vals[c]))
        self.feas = feas
        self.start = (lower is not None, upper is not None)

    def step(self, s, c, v):
        tl, tu = s
        if tl:
            a = self.lower[c]
            if v < a:
                return None
            tl = v == a
        if tu:
            b = self.upper[c]
            if v > b:
                return None
            tu = v == b
        return (tl, tu)

    @property
    def feasible(self) -> bool:
        return self.feas[0][self.start]

    def extreme(self, smallest: bool):
        if not self.feasible:
            return None
        s = self.start
        out = []
        for c in range(len(self.masks)):
            order = self.vals[c] if smallest else reversed(self.vals[c])
            for v in order:
                t = self.step(s, c, v)
                if t is not None and self.feas[c + 1][t]:
                    out.append(v)
                    s = t
                    break
        return tuple(out)

    def supported(self) -> list:
        if not self.feasible:
            return None
        reach = {self.start}
        out = []
        for c in range(len(self.masks)):
            m = 0
            nxt = set()
            for s in reach:
                for v in self.vals[c]:
                    t = self.step(s, c, v)
                    if t is not None and self.feas[c + 1][t]:
                        m |= 1 << v
                        nxt.add(t)
            out.append(m)
            reach = nxt
        return out


def _lowest(mask):
    return (mask & -mask).bit_length() - 1


def _above(mask, v):
    """Values of ``mask`` strictly greater than v."""
    return mask >> (v + 1) << (v + 1)


def _below(mask, v):
    return mask & ((1 << v) - 1)


def _lexmin_geq(masks, a):
    """Smallest x in the product of ``masks`` with x >=lex a (a may be None)."""
    n = len(masks)
    if a is None:
        return tuple(_lowest(m) for m in masks)
    L = next((j for j in range(n) if not masks[j] >> a[j] & 1), n)
    if L == n:
        return tuple(a)
    for q in range(L, -1, -1):
        up = _above(masks[q], a[q])
        if up:
            return tuple(a[:q]) + (_lowest(up),) + tuple(_lowest(m) for m in masks[q + 1:])
    return None


def _lexmax_leq(masks, b):
    n = len(masks)
    if b is None:
        return tuple(m.bit_length() - 1 for m in masks)
    L = next((j for j in range(n) if not masks[j] >> b[j] & 1), n)
    if L == n:
        return tuple(b)
    for q in range(L, -1, -1):
        down = _below(masks[q], b[q])
        if down:
            return tuple(b[:q]) + (down.bit_length() - 1,) + tuple(
                m.bit_length() - 1 for m in masks[q + 1:])
    return None


def _one_sided_support(masks, s, bound, lower):
    """Per-position support of x[s:] >=lex bound[s:] (or <=lex when not ``lower``).

    Returns a list of masks for positions s..n-1, or None if infeasible.
    """
    n = len(masks)
    beyond = _above if lower else _below
    L = next((j for j in range(s, n) if not masks[j] >> bound[j] & 1), n)
    # positions d in [s, L] where x can move strictly past the bound
    escapes = [d for d in range(s, min(L, n - 1) + 1) if beyond(masks[d], bound[d])]
    if L < n and not escapes:
        return None
    first = escapes[0] if escapes else None
    out = []
    later = set(escapes)
    # next_escape[c]: is there an escape in (c, L]
    has_after = [False] * (n + 1)
    for c in range(n - 1, s - 1, -1):
        has_after[c] = has_after[c + 1] or (c + 1 in later)
    for c in range(s, n):
        m = masks[c]
        if first is not None and first < c:
            out.append(m)
            continue
        if c > L:
            out.append(0)
            continue
        sup = beyond(m, bound[c])
        if c < L and (L == n or has_after[c]):
            sup |= m & (1 << bound[c])
        out.append(sup)
    return out


def _support_between(masks, a, b):
    """Per-position supported values of x with a <=lex x <=lex b (bounds optional)."""
    n = len(masks)
    if a is None and b is None:
        return list(masks)
    if a is None:
        return _one_sided_support(masks, 0, b, False)
    if b is None:
        return _one_sided_support(masks, 0, a, True)
    e = next((j for j in range(n) if a[j] != b[j]), n)
    if e < n and a[e] > b[e]:
        return None
    for j in range(e):
        if not masks[j] >> a[j] & 1:
            return None
    out = [1 << a[j] for j in range(e)]
    if e == n:
        return out
    me = masks[e]
    mid = _below(_above(me, a[e]), b[e])
    low = _one_sided_support(masks, e + 1, a, True) if me >> a[e] & 1 else None
    high = _one_sided_support(masks, e + 1, b, False) if me >> b[e] & 1 else None
    at_e = mid
    if low is not None:
        at_e |= 1 << a[e]
    if high is not None:
        at_e |= 1 << b[e]
    if not at_e:
        return None
    out.append(at_e)
    for c in range(e + 1, n):
        sup = masks[c] if mid else 0
        if low is not None:
            sup |= low[c - e - 1]
        if high is not None:
            sup |= high[c - e - 1]
        out.append(sup)
    return out


def _check_disjoint(vectors):
    seen = set()
    for vec in vectors:
        for v in _vars_in(vec):
            if v in seen:
                raise ModelError(f"variable {v} appears twice in a chain")
            seen.add(v)


def _vector_masks(vec, doms):
    return [1 << e.value if isinstance(e, Const) else doms[e] for e in vec]


def lexchain_filter(vectors, doms, direction="lex", strict=False, static=None):
    """Domain-consistent filter for ``V1 <=lex V2 <=lex ... <=lex Vk``.

    ``direction="reverse"`` orders the vectors decreasingly instead. The
    smallest feasible value of every prefix chain and the largest feasible
    value of every suffix chain are computed greedily; each vector is then
    filtered against the pair of bounds around it. O(k * n * d).

    ``static`` optionally holds precomputed masks (or None) per vector, in
    the order given, for vectors made only of constants.
    """
    if direction not in ("lex", "reverse"):
        raise ModelError(f"unknown direction {direction!r}")
    vecs = list(vectors)
    if static is None:
        masks = [_vector_masks(vec, doms) for vec in vecs]
    else:
        masks = [st if st is not None else _vector_masks(vec, doms)
                 for vec, st in zip(vecs, static)]
    if direction == "reverse":
        vecs.reverse()
        masks.reverse()
    k = len(vecs)
    if k == 0:
        return {}
    if strict:
        return _lexchain_filter_dp(vecs, masks, doms)
    lo = [None] * k
    hi = [None] * k
    prev = None
    for j in range(k):
        lo[j] = prev = _lexmin_geq(masks[j], prev)
        if prev is None:
            return None
    nxt = None
    for j in range(k - 1, -1, -1):
        hi[j] = nxt = _lexmax_leq(masks[j], nxt)
        if nxt is None:
            return None
    out = {}
    for j in range(k):
        if all(not m & (m - 1) for m in masks[j]):
            # a fixed vector equals both lo[j] and hi[j], so it is supported
            continue
        sup = _support_between(masks[j], lo[j - 1] if j > 0 else None,
                               hi[j + 1] if j + 1 < k else None)
        if sup is None:
            return None
        for e, m in zip(vecs[j], sup):
            if isinstance(e, Const):
                if not m:
                    return None
                continue
            new = doms[e] & m
            if not new:
                return None
            if new != doms[e]:
                out[e] = new
    return out


def _lexchain_filter_dp(vecs, masks, doms, strict=True):
    """Reference filter through the bounded-vector DP; used for strict chains."""
    k = len(vecs)
    lo = [None] * k
    hi = [None] * k
    prev = None
    for j in range(k):
        lo[j] = _Bounds(masks[j], lower=prev, lower_strict=strict).extreme(True)
        if lo[j] is None:
            return None
        prev = lo[j]
    nxt = None
    for j in range(k - 1, -1, -1):
        hi[j] = _Bounds(masks[j], upper=nxt, upper_strict=strict).extreme(False)
        if hi[j] is None:
            return None
        nxt = hi[j]
    out = {}
    for j in range(k):
        b = _Bounds(masks[j],
                    lower=lo[j - 1] if j > 0 else None,
                    upper=hi[j + 1] if j + 1 < k else None,
                    lower_strict=strict, upper_strict=strict)
        sup = b.supported()
        if sup is None:
            return None
        for e, m in zip(vecs[j], sup):
            if isinstance(e, Const):
                if not m:
                    return None
                continue
            new = doms[e] & m
            if not new:
                return None
            if new != doms[e]:
                out[e] = new
    return out


@register("lexchain")
@dataclass(frozen=True)
class LexChain(Constraint):
    vectors: tuple
    direction: str = "lex"
    strict: bool = False

    def __post_init__(self):
        lens = {len(v) for v in self.vectors}
        if len(lens) > 1:
            raise ModelError(f"lexchain vectors have different lengths {sorted(lens)}")
        _check_disjoint(self.vectors)
        static = tuple(None if _vars_in(vec) else tuple(1 << e.value for e in vec)
                       for vec in self.vectors)
        object.__setattr__(self, "_static", static)

    @property
    def scope(self):
        return tuple(sorted(v for vec in self.vectors for v in _vars_in(vec)))

    def check(self, assignment):
        rows = [[_entry_value(e, assignment) for e in vec] for vec in self.vectors]
        if self.direction == "reverse":
            rows.reverse()
        for a, b in zip(rows, rows[1:]):
            c = lex_compare(a, b)
            if c > 0 or (c == 0 and self.strict):
                return False
        return True

    def filter(self, doms):
        return lexchain_filter(self.vectors, doms, self.direction, self.strict, self._static)

    def to_json(self):
        return {"kind": self.kind, "direction": self.direction, "strict": self.strict,
                "vectors": [[_entry_json(e) for e in vec] for vec in self.vectors]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(tuple(_entry_from_json(x) for x in vec) for vec in data["vectors"]),
                   data.get("direction", "lex"), data.get("strict", False))


def lexchain_propagate(rows, direction, doms):
    return _apply(lexchain_filter(rows, doms, direction), doms)


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Free:
    var: int


def cell_str(cell) -> str:
    return f"free:{cell.var}" if isinstance(cell, Free) else str(cell)


def cell_from_str(text: str):
    if text.startswith("free:"):
        return Free(int(text[5:]))
    if text in ("0", "1"):
        return int(text)
    raise ModelError(f"bad cell state {text!r}")


@dataclass
class MatrixModel:
    """Grid of cells: 0, 1 or Free(var). Row/column chains ordered per direction.

    ``cells[0]`` is row 1. With ``origin="top"`` row 1 is the top row; with
    ``origin="bottom"`` it is the bottom row, so column vectors are read
    from the last row back to the first (top to bottom as drawn).
    """

    cells: list
    row_order: str = "lex"
    col_order: str = "lex"
    origin: str = "top"

    def __post_init__(self):
        widths = {len(r) for r in self.cells}
        if len(widths) > 1:
            raise ModelError("ragged matrix")
        seen = set()
        for r in self.cells:
            for c in r:
                if isinstance(c, Free):
                    if c.var in seen:
                        raise ModelError(f"variable {c.var} used by two cells")
                    seen.add(c.var)
                elif c not in (0, 1):
                    raise ModelError(f"bad cell {c!r}")

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def free_vars(self) -> list:
        return [c.var for r in self.cells for c in r if isinstance(c, Free)]

    @staticmethod
    def _entry(c):
        return c.var if isinstance(c, Free) else Const(c)

    def row_vectors(self):
        return tuple(tuple(self._entry(c) for c in r) for r in self.cells)

    def col_vectors(self):
        order = range(self.rows) if self.origin == "top" else range(self.rows - 1, -1, -1)
        return tuple(tuple(self._entry(self.cells[i][j]) for i in order)
                     for j in range(self.cols))

    def constraint(self) -> "DoubleLex":
        return DoubleLex(self)

    def to_model(self, num_vars: int | None = None) -> CspModel:
        """A Boolean CSP with one variable per free cell and the DoubleLex constraint."""
        free = self.free_vars()
        n = max(free, default=-1) + 1 if num_vars is None else num_vars
        m = CspModel()
        for v in range(n):
            m.add_var(f"x{v}", (0, 1))
        for i, r in enumerate(self.cells):
            for j, c in enumerate(r):
                if isinstance(c, Free):
                    m.variables[c.var].name = f"X{i + 1}_{j + 1}"
        m.add(self.constraint())
        return m

    def filled(self, assignment) -> list:
        return [[assignment[c.var] if isinstance(c, Free) else c for c in r] for r in self.cells]

    def ascii(self, assignment=None) -> str:
        """``0``/``1``/``.`` grid, drawn with the top row first."""
        lines = []
        drawn = self.cells if self.origin == "top" else list(reversed(self.cells))
        for r in drawn:
            chars = []
            for c in r:
                if isinstance(c, Free):
                    chars.append("." if assignment is None else str(assignment[c.var]))
                else:
                    chars.append(str(c))
            lines.append("".join(chars))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols,
            "row_order": self.row_order, "col_order": self.col_order,
            "origin": self.origin,
            "cells": [[i + 1, j + 1, cell_str(c)]
                      for i, r in enumerate(self.cells) for j, c in enumerate(r)],
        }

    @classmethod
    def from_json(cls, data) -> "MatrixModel":
        grid = [[0] * data["cols"] for _ in range(data["rows"])]
        for i, j, s in data["cells"]:
            grid[i - 1][j - 1] = cell_from_str(s)
        return cls(grid, data.get("row_order", "lex"), data.get("col_order", "lex"),
                   data.get("origin", "top"))


@register("doublelex")
@dataclass(frozen=True, eq=False)
class DoubleLex(Constraint):
    """Row chain and column chain of a matrix, filtered to their joint fixpoint.

    Each chain is filtered to domain consistency, but the conjunction is
    not: values with no support in the whole matrix can survive.
    """

    matrix: MatrixModel

    def __post_init__(self):
        object.__setattr__(self, "_rows", LexChain(self.matrix.row_vectors(), self.matrix.row_order))
        object.__setattr__(self, "_cols", LexChain(self.matrix.col_vectors(), self.matrix.col_order))

    @property
    def scope(self):
        return tuple(sorted(self.matrix.free_vars()))

    def check(self, assignment):
        return self._rows.check(assignment) and self._cols.check(assignment)

    def filter(self, doms):
        d = list(doms)
        out = {}
        changed = True
        while changed:
            changed = False
            for chain in (self._rows, self._cols):
                res = chain.filter(d)
                if res is None:
                    return None
                for v, m in res.items():
                    if m != d[v]:
                        d[v] = m
                        out[v] = m
                        changed = True
        return out

    def to_json(self):
        return {"kind": self.kind, "matrix": self.matrix.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(MatrixModel.from_json(data["matrix"]))


def doublelex_propagate(m: MatrixModel, doms: Sequence[int]):
    return _apply(DoubleLex(m).filter(doms), doms)


@dataclass
class CompleteCheck:
    domains: list | None  # None: no solution at all
    unknown: dict = field(default_factory=dict)  # var -> mask of undecided values
    nodes: int = 0


def doublelex_complete_check(m: MatrixModel, doms: Sequence[int],
                             free_cap: int = DEFAULT_FREE_CAP,
                             max_nodes: int | None = None) -> CompleteCheck:
    """Exact domain consistency for the whole DoubleLex conjunction.

    Each remaining value is tested by a search for a full solution that
    contains it, with DoubleLex propagation at every node. Values whose
    search runs out of ``max_nodes`` are reported in ``unknown`` and kept.
    """
    free = m.free_vars()
    if len(set(free)) > free_cap and max_nodes is None:
        raise BudgetExceeded(f"{len(set(free))} free cells exceed cap {free_cap}; give max_nodes")
    model = CspModel()
    num = max(free, default=-1) + 1
    num = max(num, len(doms))
    for v in range(num):
        model.add_var(f"x{v}", values_of(doms[v]) or (0,))
    model.add(DoubleLex(m))
    base = propagate_fixpoint(model, doms)
    result = CompleteCheck(None)
    if base is None:
        return result
    supported = [0] * num
    for v in range(num):
        if v not in free:
            supported[v] = base[v]
    total_nodes = 0
    for v in sorted(set(free)):
        for val in values_of(base[v]):
            if supported[v] >> val & 1:
                continue
            d = list(base)
            d[v] = 1 << val
            r = solve(model, limit=1, max_nodes=max_nodes, doms=d)
            total_nodes += r.stats.nodes
            if r.solutions:
                for u, x in enumerate(r.solutions[0]):
                    supported[u] |= 1 << x
            elif r.status == "unknown":
                result.unknown[v] = result.unknown.get(v, 0) | 1 << val
                supported[v] |= 1 << val
    result.nodes = total_nodes
    if any(not supported[v] for v in free):
        return result
    result.domains = supported
    return result


# --------------------------------------------------------------------------
# lex-leader constraints and auditing


def lex_leader_from_generators(g: GeneratingSet, kind: str, vars: Sequence[int]) -> list:
    """One lex-leader constraint per non-identity generator.

    Variable symmetry sigma: ``X <=lex [X_sigma(1), ..., X_sigma(n)]``.
    Value symmetry theta: ``X <=lex [theta(X_1), ..., theta(X_n)]``.
    """
    vars = tuple(vars)
    out = []
    for s in g.generators:
        if s.is_identity():
            continue
        if kind == "variable":
            if s.degree != len(vars):
                raise ModelError(f"generator degree {s.degree} != {len(vars)} variables")
            out.append(LexLeq(vars, tuple(vars[s(i) - 1] for i in range(1, s.degree + 1))))
        elif kind == "value":
            out.append(ValueLexLeader(vars, s))
        else:
            raise ModelError(f"unknown symmetry kind {kind!r}")
    return out


@dataclass
class AuditReport:
    total_solutions: int
    surviving_solutions: int
    orbit_count: int
    orbits_with_multiple_survivors: list  # [(orbit key, [survivors])]
    orbits_without_survivor: list  # keys; nonempty means the breaking is unsound
    complete: bool

    def to_json(self) -> dict:
        return {
            "total_solutions": self.total_solutions,
            "surviving_solutions": self.surviving_solutions,
            "orbit_count": self.orbit_count,
            "orbits_with_multiple_survivors": {
                "count": len(self.orbits_with_multiple_survivors),
                "witnesses": [{"orbit": list(k), "survivors": [list(s) for s in ss]}
                              for k, ss in self.orbits_with_multiple_survivors],
            },
            "orbits_without_survivor": [list(k) for k in self.orbits_without_survivor],
            "complete": self.complete,
        }


def audit_completeness(model: CspModel, g: GeneratingSet, kind: str,
                       breaking: Sequence[Constraint],
                       max_solutions: int = 10**6) -> AuditReport:
    """Group the model's solutions into orbits and count lex-leader survivors.

    Orbits are keyed by their lexicographically least member.
    """
    base = solve(model, limit=max_solutions + 1)
    if len(base.solutions) > max_solutions:
        raise BudgetExceeded(f"more than {max_solutions} solutions")
    broken = model.copy()
    for c in breaking:
        broken.add(c)
    kept = solve(broken, limit=max_solutions + 1).solutions
    key_of = {}
    orbits = {}
    for sol in base.solutions:
        if sol in key_of:
            continue
        orb = orbit_of_assignment(g, kind, sol)
        key = min(orb)
        for t in orb:
            key_of[t] = key
        orbits[key] = []
    for sol in kept:
        orbits[key_of[sol]].append(sol)
    multi = [(k, sorted(v)) for k, v in sorted(orbits.items()) if len(v) > 1]
    empty = [k for k, v in sorted(orbits.items()) if not v]
    return AuditReport(len(base.solutions), len(kept), len(orbits), multi, empty,
                       not multi and not empty)
