"""A small finite-domain CSP engine.

Domains are bitsets held in Python ints: bit ``v`` set means value ``v``
is still possible. Values are non-negative integers.

Constraints implement two methods:

* ``check(assignment)`` decides a full assignment (a sequence indexed by
  variable);
* ``filter(doms)`` returns ``{var: new_mask}`` for the variables it narrows,
  or ``None`` on wipeout. It must never drop a value that has a support.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

SCHEMA_VERSION = 1
DEFAULT_ORACLE_CAP = 2**24

CONSTRAINT_KINDS: dict = {}


class ModelError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def register(kind):
    def deco(cls):
        cls.kind = kind
        CONSTRAINT_KINDS[kind] = cls
        return cls
    return deco


def mask_of(values) -> int:
    m = 0
    for v in values:
        if v < 0:
            raise ModelError(f"negative value {v} not supported")
        m |= 1 << v
    return m


def values_of(mask: int) -> list:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def single_value(mask: int):
    """The value of a singleton mask, else None."""
    if mask and not mask & (mask - 1):
        return mask.bit_length() - 1
    return None


class Constraint:
    kind = "abstract"
    scope: tuple = ()

    def check(self, assignment: Sequence[int]) -> bool:
        raise NotImplementedError

    def filter(self, doms: Sequence[int]):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_json(cls, data: dict):
        raise NotImplementedError


@register("in")
@dataclass(frozen=True)
class In(Constraint):
    """Unary membership: ``X in values``."""

    var: int
    values: tuple

    @property
    def scope(self):
        return (self.var,)

    def check(self, assignment):
        return assignment[self.var] in self.values

    def filter(self, doms):
        new = doms[self.var] & mask_of(self.values)
        if not new:
            return None
        return {self.var: new} if new != doms[self.var] else {}

    def to_json(self):
        return {"kind": self.kind, "var": self.var, "values": list(self.values)}

    @classmethod
    def from_json(cls, data):
        return cls(data["var"], tuple(data["values"]))


@register("table")
@dataclass(frozen=True)
class Table(Constraint):
    """Extensional constraint: the scope tuple must be one of ``tuples``."""

    vars: tuple
    tuples: frozenset

    @property
    def scope(self):
        return tuple(self.vars)

    def check(self, assignment):
        return tuple(assignment[v] for v in self.vars) in self.tuples

    def filter(self, doms):
        support = [0] * len(self.vars)
        for t in self.tuples:
            if all(doms[v] >> x & 1 for v, x in zip(self.vars, t)):
                for k, x in enumerate(t):
                    support[k] |= 1 << x
        out = {}
        for k, v in enumerate(self.vars):
            new = doms[v] & support[k]
            if not new:
                return None
            if new != doms[v]:
                out[v] = new
        return out

    def to_json(self):
        return {"kind": self.kind, "vars": list(self.vars),
                "tuples": sorted(list(t) for t in self.tuples)}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["vars"]), frozenset(tuple(t) for t in data["tuples"]))


@dataclass
class Variable:
    name: str
    domain: tuple


@dataclass
class CspModel:
    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)

    def add_var(self, name: str, domain: Sequence[int]) -> int:
        dom = tuple(sorted(set(domain)))
        if not dom:
            raise ModelError(f"variable {name!r} has an empty domain")
        mask_of(dom)
        self.variables.append(Variable(name, dom))
        return len(self.variables) - 1

    def add(self, c: Constraint) -> Constraint:
        for v in c.scope:
            if not 0 <= v < len(self.variables):
                raise ModelError(f"constraint {c.kind} references unknown variable {v}")
        self.constraints.append(c)
        return c

    def initial_domains(self) -> list:
        return [mask_of(v.domain) for v in self.variables]

    def var_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)

    def is_solution(self, assignment: Sequence[int]) -> bool:
        return all(x in v.domain for x, v in zip(assignment, self.variables)) and all(
            c.check(assignment) for c in self.constraints)

    def copy(self) -> "CspModel":
        return CspModel([Variable(v.name, v.domain) for v in self.variables],
                        list(self.constraints))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "variables": [{"name": v.name, "domain": list(v.domain)} for v in self.variables],
            "constraints": [c.to_json() for c in self.constraints],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "CspModel":
        # make sure lex kinds are registered
        from . import lex  # noqa: F401

        m = cls()
        for v in data["variables"]:
            m.add_var(v["name"], v["domain"])
        for c in data.get("constraints", []):
            kind = c.get("kind")
            if kind not in CONSTRAINT_KINDS:
                raise ModelError(f"unknown constraint kind {kind!r}")
            m.add(CONSTRAINT_KINDS[kind].from_json(c))
        return m

    @classmethod
    def loads(cls, text: str) -> "CspModel":
        return cls.from_json(json.loads(text))


@dataclass
class Stats:
    nodes: int = 0
    propagations: int = 0


def propagate_fixpoint(model: CspModel, doms: Sequence[int] | None = None,
                       stats: Stats | None = None, changed: Sequence[int] | None = None):
    """Run every constraint's filter until nothing changes.

    Returns the narrowed domain list, or ``None`` if some domain empties.
    ``changed`` restricts the initial queue to constraints touching those
    variables (used after a branching decision).
    """
    doms = list(model.initial_domains() if doms is None else doms)
    watchers = [[] for _ in doms]
    for ci, c in enumerate(model.constraints):
        for v in set(c.scope):
            watchers[v].append(ci)
    if changed is None:
        queue = deque(range(len(model.constraints)))
    else:
        queue = deque(sorted({ci for v in changed for ci in watchers[v]}))
    queued = set(queue)
    while queue:
        ci = queue.popleft()
        queued.discard(ci)
        if stats is not None:
            stats.propagations += 1
        out = model.constraints[ci].filter(doms)
        if out is None:
            return None
        for v, m in out.items():
            if m == doms[v]:
                continue
            m &= doms[v]
            if not m:
                return None
            doms[v] = m
            for cj in watchers[v]:
                if cj != ci and cj not in queued:
                    queue.append(cj)
                    queued.add(cj)
    return doms


@dataclass
class SearchResult:
    status: str  # "sat", "unsat" or "unknown" (budget hit before a decision)
    solutions: list
    stats: Stats

    @property
    def satisfiable(self) -> bool:
        return self.status == "sat"


def solve(model: CspModel, limit: int | None = 1, max_nodes: int | None = None,
          doms: Sequence[int] | None = None) -> SearchResult:
    """Depth-first search, static variable order, ascending values.

    ``limit=None`` asks for every solution. When ``max_nodes`` is hit before
    the question is settled the status is ``"unknown"``.
    """
    stats = Stats()
    solutions = []
    root = propagate_fixpoint(model, doms, stats)
    if root is None:
        return SearchResult("unsat", [], stats)

    class _Stop(Exception):
        pass

    def dfs(d):
        stats.nodes += 1
        if max_nodes is not None and stats.nodes > max_nodes:
            raise BudgetExceeded
        var = next((i for i, m in enumerate(d) if single_value(m) is None), None)
        if var is None:
            sol = tuple(single_value(m) for m in d)
            if not model.is_solution(sol):
                raise AssertionError(f"propagation let through a non-solution {sol}")
            solutions.append(sol)
            if limit is not None and len(solutions) >= limit:
                raise _Stop
            return
        for v in values_of(d[var]):
            child = list(d)
            child[var] = 1 << v
            nd = propagate_fixpoint(model, child, stats, changed=[var])
            if nd is not None:
                dfs(nd)

    try:
        dfs(root)
    except _Stop:
        pass
    except BudgetExceeded:
        return SearchResult("sat" if solutions else "unknown", solutions, stats)
    return SearchResult("sat" if solutions else "unsat", solutions, stats)


def enumerate_solutions(model: CspModel, doms: Sequence[int] | None = None,
                        cap: int = DEFAULT_ORACLE_CAP):
    """Yield every solution using only ``check`` (no propagators).

    A constraint is tested as soon as its whole scope is assigned. The
    product of domain sizes must stay under ``cap``.
    """
    doms = list(model.initial_domains() if doms is None else doms)
    size = 1
    for m in doms:
        size *= bin(m).count("1")
    if size > cap:
        raise BudgetExceeded(f"search space {size} exceeds oracle cap {cap}")
    if size == 0:
        return
    n = len(doms)
    due = [[] for _ in range(n)]
    for c in model.constraints:
        last = max(c.scope) if c.scope else 0
        due[last].append(c)
    choices = [values_of(m) for m in doms]
    assignment = [0] * n

    def rec(i):
        if i == n:
            yield tuple(assignment)
            return
        for v in choices[i]:
            assignment[i] = v
            # unassigned slots are never read: each constraint runs once its
            # highest-index variable is set
            if all(c.check(assignment) for c in due[i]):
                yield from rec(i + 1)

    yield from rec(0)


def oracle_dc(model: CspModel, doms: Sequence[int] | None = None,
              cap: int = DEFAULT_ORACLE_CAP):
    """Keep exactly the values that occur in some solution of the whole model.

    Returns the pruned domain list, or ``None`` when there is no solution.
    """
    n = len(model.variables)
    support = [0] * n
    found = False
    for sol in enumerate_solutions(model, doms, cap):
        found = True
        for i, v in enumerate(sol):
            support[i] |= 1 << v
    return support if found else None


def brute_force_solutions(model: CspModel) -> list:
    """Plain product enumeration filtered by check; test oracle only."""
    doms = [v.domain for v in model.variables]
    return [t for t in itertools.product(*doms) if model.is_solution(t)]
