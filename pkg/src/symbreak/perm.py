"""Permutation groups on points 1..n.

Points are 1-based to match cycle notation. Internally a permutation is a
tuple of 0-based images; the conversion happens only in the constructors
and printers.

Two text forms are accepted by :func:`parse_perm`:

* image list ``perm[2,3,4,1]`` (1->2, 2->3, 3->4, 4->1);
* cycle form ``(1 2)(3 4)``, with spaces or commas between points.

A bare bracketed list with commas such as ``(2,3,4,1)`` is ambiguous. The
``notation`` argument picks between ``"cycles"`` (the default for text
input) and ``"images"``; :func:`Permutation.from_images` is the
unambiguous constructor used throughout the code.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_CLOSURE_CAP = 10**6


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeds cap {cap}")
        self.cap = cap


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..n}; ``_img[i]`` is the 0-based image of point i+1."""

    _img: tuple

    def __post_init__(self):
        if sorted(self._img) != list(range(len(self._img))):
            raise GroupError(f"not a permutation: {[i + 1 for i in self._img]}")

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        """Build from a 1-based image list: ``images[i-1]`` is the image of i."""
        return cls(tuple(int(x) - 1 for x in images))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            for pt in cyc:
                if not 1 <= pt <= n:
                    raise GroupError(f"point {pt} outside 1..{n}")
                if pt in seen:
                    raise GroupError(f"point {pt} repeated in cycles")
                seen.add(pt)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b - 1
        return cls(tuple(img))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple:
        return tuple(i + 1 for i in self._img)

    def __call__(self, point: int) -> int:
        return self._img[point - 1] + 1

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._img))

    def cycles(self) -> list:
        seen = set()
        out = []
        for start in range(len(self._img)):
            if start in seen or self._img[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            j = self._img[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self._img[j]
            out.append(tuple(p + 1 for p in cyc))
        return out

    def cycle_str(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def image_str(self) -> str:
        return "perm[" + ",".join(map(str, self.images)) + "]"

    def __str__(self):
        return self.cycle_str()

    def __repr__(self):
        return f"Permutation({self.image_str()})"


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return the permutation ``i -> a(b(i))``."""
    if a.degree != b.degree:
        raise GroupError(f"degree mismatch: {a.degree} vs {b.degree}")
    ai = a._img
    return Permutation(tuple(ai[j] for j in b._img))


def inverse(a: Permutation) -> Permutation:
    inv = [0] * a.degree
    for i, j in enumerate(a._img):
        inv[j] = i
    return Permutation(tuple(inv))


_IMAGE_RE = re.compile(r"^\s*perm\s*\[([^\]]*)\]\s*$")
_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int | None = None, notation: str = "cycles") -> Permutation:
    """Parse ``perm[...]`` image lists or ``(a b)(c d)`` cycle products.

    ``n`` sets the degree for cycle form; by default it is the largest point
    mentioned. With ``notation="images"`` a single parenthesised list such as
    ``(2,3,4,1)`` is read as an image list.
    """
    m = _IMAGE_RE.match(text)
    if m:
        images = [int(x) for x in re.split(r"[,\s]+", m.group(1).strip()) if x]
        p = Permutation.from_images(images)
        if n is not None and p.degree != n:
            raise GroupError(f"expected degree {n}, got {p.degree}")
        return p
    stripped = text.strip()
    if stripped in ("", "()", "id"):
        if n is None:
            raise GroupError("identity needs an explicit degree")
        return identity(n)
    if _CYCLE_RE.sub("", stripped).strip():
        raise GroupError(f"cannot parse permutation {text!r}")
    groups = _CYCLE_RE.findall(stripped)
    cycles = []
    for g in groups:
        pts = [int(x) for x in re.split(r"[,\s]+", g.strip()) if x]
        if pts:
            cycles.append(pts)
    if notation == "images":
        if len(cycles) != 1:
            raise GroupError("image notation takes exactly one bracketed list")
        p = Permutation.from_images(cycles[0])
        if n is not None and p.degree != n:
            raise GroupError(f"expected degree {n}, got {p.degree}")
        return p
    if notation != "cycles":
        raise GroupError(f"unknown notation {notation!r}")
    top = max((max(c) for c in cycles), default=0)
    return Permutation.from_cycles(n if n is not None else top, cycles)


def parse_generators(text: str, n: int | None = None) -> "GeneratingSet":
    """Parse a ``;``-separated generator list into a :class:`GeneratingSet`."""
    parts = [t for t in (s.strip() for s in text.split(";")) if t]
    if n is None:
        degs = []
        for t in parts:
            if _IMAGE_RE.match(t):
                degs.append(parse_perm(t).degree)
            elif t not in ("()", "id"):
                degs.append(parse_perm(t).degree)
        if not degs:
            raise GroupError("cannot infer degree from an empty generator list")
        n = max(degs)
    return GeneratingSet(n, [parse_perm(t, n) for t in parts])


@dataclass(frozen=True)
class GeneratingSet:
    degree: int
    generators: list = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "generators", list(self.generators))
        for g in self.generators:
            if g.degree != self.degree:
                raise GroupError(f"generator {g} has degree {g.degree}, expected {self.degree}")

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


def closure(g: GeneratingSet, cap: int = DEFAULT_CLOSURE_CAP) -> set:
    """All elements of the generated group, by breadth-first multiplication."""
    e = identity(g.degree)
    gens = [p for p in g.generators if not p.is_identity()]
    seen = {e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = compose(s, x)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise CapExceeded("group order", cap)
                queue.append(y)
    # finite group: closure under products already contains inverses
    return seen


@dataclass(frozen=True)
class Level:
    base_point: int
    generators: tuple  # strong generators of G_{i-1}, fixing earlier base points
    transversal: dict  # point -> representative u with u(base_point) = point


@dataclass(frozen=True)
class StabilizerChain:
    degree: int
    base: tuple
    levels: tuple

    @property
    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= len(lv.transversal)
        return out

    def strong_generators(self) -> list:
        """The union of the level generating sets, duplicates dropped, order kept."""
        seen = []
        for lv in self.levels:
            for s in lv.generators:
                if s not in seen:
                    seen.append(s)
        return seen

    def sift(self, p: Permutation):
        """Return (residue, level reached). p is a member iff the residue is identity
        and every level was passed."""
        h = p
        for depth, lv in enumerate(self.levels):
            img = h(lv.base_point)
            u = lv.transversal.get(img)
            if u is None:
                return h, depth
            h = compose(inverse(u), h)
        return h, len(self.levels)


def _orbit_transversal(point: int, gens: Sequence[Permutation], n: int) -> dict:
    trans = {point: identity(n)}
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = s(x)
            if y not in trans:
                trans[y] = compose(s, trans[x])
                queue.append(y)
    return trans


def schreier_sims(g: GeneratingSet, base: Sequence[int] | None = None) -> StabilizerChain:
    """Deterministic Schreier-Sims over the full base ``base``.

    Level i holds generators of G_{i-1} (the pointwise stabiliser of the
    first i-1 base points) and the transversal of G_{i-1} on base point i.
    """
    n = g.degree
    base = tuple(range(1, n + 1)) if base is None else tuple(base)
    if sorted(base) != list(range(1, n + 1)):
        raise GroupError(f"base must be a permutation of 1..{n}, got {list(base)}")

    gens_per_level = [[] for _ in base]
    for s in g.generators:
        if not s.is_identity():
            gens_per_level[0].append(s)
    trans = [None] * n

    def level_gens(i):
        return gens_per_level[i]

    def rebuild(i):
        trans[i] = _orbit_transversal(base[i], level_gens(i), n)

    def sift_from(i, h):
        for j in range(i, n):
            u = trans[j].get(h(base[j]))
            if u is None:
                return h, j
            h = compose(inverse(u), h)
        return h, n

    # Classic incremental form: process levels from the bottom upward,
    # pushing Schreier generators that fail to sift into the level where
    # they dropped out.
    for i in range(n):
        rebuild(i)
    i = n - 1
    while i >= 0:
        added = False
        for x, u in list(trans[i].items()):
            for s in list(level_gens(i)):
                sch = compose(inverse(trans[i][s(x)]), compose(s, u))
                if sch.is_identity():
                    continue
                h, j = sift_from(i + 1, sch)
                if h.is_identity():
                    continue
                # h fixes base[0..j-1]; add it to levels i+1..j
                for lv in range(i + 1, j + 1):
                    if h not in gens_per_level[lv]:
                        gens_per_level[lv].append(h)
                    rebuild(lv)
                i = j
                added = True
                break
            if added:
                break
        if not added:
            i -= 1

    levels = tuple(
        Level(base[i], tuple(gens_per_level[i]), dict(trans[i])) for i in range(n)
    )
    return StabilizerChain(n, base, levels)


def is_member(chain: StabilizerChain, p: Permutation) -> bool:
    if p.degree != chain.degree:
        raise GroupError(f"degree mismatch: {p.degree} vs {chain.degree}")
    h, depth = chain.sift(p)
    return depth == len(chain.levels) and h.is_identity()


def group_order(g: GeneratingSet) -> int:
    return schreier_sims(g).order


def is_irredundant(g: GeneratingSet, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    """No single non-identity generator can be dropped without shrinking the group.

    Group orders come from Schreier-Sims; ``cap`` bounds the group order
    so that the answer stays cheap to cross-check by enumeration.
    """
    full = group_order(g)
    if full > cap:
        raise CapExceeded("group order", cap)
    gens = g.generators
    for k, s in enumerate(gens):
        if s.is_identity():
            continue
        rest = GeneratingSet(g.degree, gens[:k] + gens[k + 1:])
        if group_order(rest) == full:
            return False
    return True


def act(p: Permutation, kind: str, assignment: Sequence[int]) -> tuple:
    """Image of a value tuple under a variable or value symmetry.

    Variable symmetry: X_{p(i)} takes the value d_i. Value symmetry: every
    value d becomes p(d).
    """
    if kind == "variable":
        if len(assignment) != p.degree:
            raise GroupError(f"assignment length {len(assignment)} != degree {p.degree}")
        out = [None] * p.degree
        for i, d in enumerate(assignment, start=1):
            out[p(i) - 1] = d
        return tuple(out)
    if kind == "value":
        for d in assignment:
            if not 1 <= d <= p.degree:
                raise GroupError(f"value {d} outside permutation domain 1..{p.degree}")
        return tuple(p(d) for d in assignment)
    raise GroupError(f"unknown symmetry kind {kind!r}")


def orbit_of_assignment(g: GeneratingSet, kind: str, assignment: Sequence[int]) -> set:
    start = tuple(assignment)
    act(identity(g.degree), kind, start)  # validates shape and values
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for s in g.generators:
            u = act(s, kind, t)
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def elements(chain: StabilizerChain, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    """Every group element, as products of transversal representatives."""
    if chain.order > cap:
        raise CapExceeded("group order", cap)
    out = [identity(chain.degree)]
    for lv in reversed(chain.levels):
        out = [compose(u, h) for u in lv.transversal.values() for h in out]
    return out


def _support_key(p: Permutation):
    return (sum(1 for i, x in enumerate(p._img) if i != x), p._img)


def canonical_sgs(chain: StabilizerChain, cap: int = 10**5) -> list:
    """A small strong generating set chosen greedily from the bottom level up.

    Candidates at each level are the elements of that stabiliser ordered by
    number of moved points, then by image list; a candidate is kept when it
    enlarges the subgroup generated so far. Needs the group to be
    enumerable under ``cap``.
    """
    n = chain.degree
    all_elems = sorted(elements(chain, cap), key=_support_key)
    chosen = []
    current = 1
    for depth in range(n - 1, -1, -1):
        fixed = chain.base[:depth]
        target = 1
        for lv in chain.levels[depth:]:
            target *= len(lv.transversal)
        for p in all_elems:
            if current == target:
                break
            if p.is_identity() or any(p(b) != b for b in fixed):
                continue
            trial = GeneratingSet(n, chosen + [p])
            order = group_order(trial)
            if order > current:
                chosen.append(p)
                current = order
    return chosen


def is_strong_generating_set(gens: Sequence[Permutation], chain: StabilizerChain) -> bool:
    """True iff ``gens`` generates every stabiliser G_i of the chain's base."""
    n = chain.degree
    for depth in range(n + 1):
        fixed = chain.base[:depth]
        target = 1
        for lv in chain.levels[depth:]:
            target *= len(lv.transversal)
        sub = [p for p in gens if all(p(b) == b for b in fixed)]
        if group_order(GeneratingSet(n, sub)) != target:
            return False
        if not all(is_member(chain, p) for p in sub):
            return False
    return True
