"""Finite-depth ordered Bratteli diagrams.

Vertices are addressed as ``(level, index)`` with 1-based indices, so the
vertex written v_{n,i} in the literature is ``Vertex(n, i)``.  Level 0 holds
the single root ``Vertex(0, 1)``.  An edge of level ``n`` runs from a vertex
of level ``n - 1`` to a vertex of level ``n``; edges entering the same vertex
are linearly ordered by ``order_rank`` (1 = minimal).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ClosureViolation, PreconditionError

MAX = "max"
MIN = "min"


class Vertex(NamedTuple):
    level: int
    index: int

    def __str__(self):
        if self.level == 0:
            return "v0"
        return f"v{self.level},{self.index}"


ROOT = Vertex(0, 1)


class Edge(NamedTuple):
    level: int
    source: int
    range: int
    order_rank: int

    @property
    def source_vertex(self) -> Vertex:
        return Vertex(self.level - 1, self.source)

    @property
    def range_vertex(self) -> Vertex:
        return Vertex(self.level, self.range)

    def sort_key(self):
        return (self.level, self.range, self.order_rank, self.source)


class Violation(NamedTuple):
    rule: str
    where: str

    def __str__(self):
        return f"{self.rule}: {self.where}"


@dataclass(frozen=True)
class FinitePath:
    """A path e_{m+1} .. e_n between levels ``from_level`` and ``to_level``."""

    from_level: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        for k, e in enumerate(self.edges):
            if e.level != self.from_level + k + 1:
                raise PreconditionError(f"edge {e} is not at level {self.from_level + k + 1}")
        for lo, hi in zip(self.edges, self.edges[1:]):
            if lo.range != hi.source:
                raise PreconditionError(f"edges {lo} and {hi} do not chain")

    @property
    def to_level(self) -> int:
        return self.from_level + len(self.edges)

    @property
    def source(self) -> Vertex:
        if not self.edges:
            raise PreconditionError("empty path has no source edge")
        return self.edges[0].source_vertex

    @property
    def target(self) -> Vertex:
        if not self.edges:
            return ROOT if self.from_level == 0 else Vertex(self.from_level, 0)
        return self.edges[-1].range_vertex

    @property
    def ranks(self) -> tuple:
        return tuple(e.order_rank for e in self.edges)

    def vertex_at(self, level: int) -> Vertex:
        """Vertex the path passes through at ``level``."""
        if not self.from_level <= level <= self.to_level:
            raise PreconditionError(f"level {level} outside [{self.from_level}, {self.to_level}]")
        if level == self.from_level:
            if self.edges:
                return self.edges[0].source_vertex
            return ROOT
        return self.edges[level - self.from_level - 1].range_vertex

    def restrict(self, a: int, b: int) -> "FinitePath":
        """The sub-path between levels ``a`` and ``b``."""
        if not self.from_level <= a < b <= self.to_level:
            raise PreconditionError(f"[{a}, {b}] not inside [{self.from_level}, {self.to_level}]")
        return FinitePath(a, self.edges[a - self.from_level : b - self.from_level])

    def __add__(self, other: "FinitePath") -> "FinitePath":
        if other.from_level != self.to_level:
            raise PreconditionError("paths do not meet")
        return FinitePath(self.from_level, self.edges + other.edges)

    def __str__(self):
        return "(" + ",".join(str(r) for r in self.ranks) + f")->{self.target}"


@dataclass(frozen=True)
class OrderedDiagram:
    depth: int
    vertex_counts: tuple
    edges: tuple
    labels: tuple = field(default=(), compare=True)

    def __post_init__(self):
        object.__setattr__(self, "vertex_counts", tuple(int(c) for c in self.vertex_counts))
        object.__setattr__(self, "edges", tuple(sorted((Edge(*e) for e in self.edges), key=Edge.sort_key)))
        if isinstance(self.labels, dict):
            labels = self.labels.items()
        else:
            labels = self.labels
        object.__setattr__(
            self, "labels", tuple(sorted((Vertex(*v), str(s)) for v, s in labels))
        )
        if len(self.vertex_counts) != self.depth + 1:
            raise PreconditionError(
                f"vertex_counts has {len(self.vertex_counts)} entries, expected depth + 1 = {self.depth + 1}"
            )

    @classmethod
    def from_incoming(cls, incoming: Sequence[Sequence[Sequence[int]]], labels=None) -> "OrderedDiagram":
        """Build from ``incoming[n-1][i-1]`` = ordered source indices of v_{n,i}.

        >>> d = OrderedDiagram.from_incoming([[[1, 1]], [[1, 1]]])
        >>> d.depth, d.vertex_counts
        (2, (1, 1, 1))
        """
        edges = []
        for n, level in enumerate(incoming, start=1):
            for i, sources in enumerate(level, start=1):
                for rank, s in enumerate(sources, start=1):
                    edges.append(Edge(n, s, i, rank))
        counts = (1,) + tuple(len(level) for level in incoming)
        return cls(len(incoming), counts, tuple(edges), labels or ())

    # -- indices ---------------------------------------------------------

    @cached_property
    def _incoming(self):
        # level -> index -> tuple of edges sorted by rank
        table = [dict() for _ in range(self.depth + 1)]
        for e in self.edges:
            table[e.level].setdefault(e.range, []).append(e)
        return [{v: tuple(es) for v, es in level.items()} for level in table]

    @cached_property
    def _outgoing(self):
        table = [dict() for _ in range(self.depth + 1)]
        for e in self.edges:
            table[e.level - 1].setdefault(e.source, []).append(e)
        return [{v: tuple(es) for v, es in level.items()} for level in table]

    @cached_property
    def _memo(self):
        return {}

    @cached_property
    def _label_map(self):
        return dict(self.labels)

    def vertices(self, level: int) -> list:
        return [Vertex(level, i) for i in range(1, self.vertex_counts[level] + 1)]

    def all_vertices(self) -> Iterator[Vertex]:
        for n in range(self.depth + 1):
            yield from self.vertices(n)

    def incoming(self, v: Vertex) -> tuple:
        """r^{-1}(v) as a rank-ordered tuple of edges."""
        return self._incoming[v.level].get(v.index, ())

    def outgoing(self, v: Vertex) -> tuple:
        """s^{-1}(v)."""
        return self._outgoing[v.level].get(v.index, ())

    def sources(self, v: Vertex) -> tuple:
        return tuple(e.source for e in self.incoming(v))

    def in_degree(self, v: Vertex) -> int:
        return len(self.incoming(v))

    def edge(self, level: int, range_index: int, order_rank: int) -> Edge:
        return self._incoming[level][range_index][order_rank - 1]

    def is_max_edge(self, e: Edge) -> bool:
        return e.order_rank == len(self._incoming[e.level][e.range])

    def is_min_edge(self, e: Edge) -> bool:
        return e.order_rank == 1

    def label(self, v: Vertex) -> str:
        return self._label_map.get(v, str(v))

    def incidence_matrix(self, level: int):
        """Matrix A with A[u-1, v-1] = number of edges u -> v at ``level``."""
        import numpy as np

        a = np.zeros((self.vertex_counts[level - 1], self.vertex_counts[level]), dtype=np.int64)
        for e in self.edges:
            if e.level == level:
                a[e.source - 1, e.range - 1] += 1
        return a

    def truncate(self, depth: int) -> "OrderedDiagram":
        """Drop every level above ``depth``."""
        if not 1 <= depth <= self.depth:
            raise PreconditionError(f"cannot truncate depth {self.depth} diagram to {depth}")
        return OrderedDiagram(
            depth,
            self.vertex_counts[: depth + 1],
            tuple(e for e in self.edges if e.level <= depth),
            tuple((v, s) for v, s in self.labels if v.level <= depth),
        )


def validate(d: OrderedDiagram) -> list:
    """Return the list of structural violations of ``d`` (empty when valid)."""
    report = []
    if d.vertex_counts[0] != 1:
        report.append(Violation("r_0 = 1", f"level 0 has {d.vertex_counts[0]} vertices"))
    for n, c in enumerate(d.vertex_counts):
        if c < 1:
            report.append(Violation("V_n ≠ ∅", f"level {n} has no vertices"))
    for e in d.edges:
        if not 1 <= e.level <= d.depth:
            report.append(Violation("edge level", f"edge {tuple(e)} has level outside 1..{d.depth}"))
            continue
        if not 1 <= e.source <= d.vertex_counts[e.level - 1]:
            report.append(Violation("vertex index", f"edge {tuple(e)} has unknown source"))
        if not 1 <= e.range <= d.vertex_counts[e.level]:
            report.append(Violation("vertex index", f"edge {tuple(e)} has unknown range"))
    groups = {}
    outdeg = Counter()
    for e in d.edges:
        groups.setdefault((e.level, e.range), []).append(e.order_rank)
        outdeg[(e.level - 1, e.source)] += 1
    for n in range(d.depth + 1):
        for v in d.vertices(n):
            if n < d.depth and outdeg[(n, v.index)] == 0:
                report.append(Violation("s⁻¹(v) ≠ ∅", f"vertex {v} has no outgoing edge"))
            if n >= 1 and (n, v.index) not in groups:
                report.append(Violation("r⁻¹(v) ≠ ∅", f"vertex {v} has no incoming edge"))
    for (n, i), ranks in sorted(groups.items()):
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            report.append(
                Violation("order bijectivity", f"ranks into {Vertex(n, i)} are {sorted(ranks)}")
            )
    return report


def is_valid(d: OrderedDiagram) -> bool:
    return not validate(d)


def count_paths(d: OrderedDiagram, u: Vertex, v: Vertex) -> int:
    """Number of paths from ``u`` up to ``v``; ``count_paths(d, ROOT, v)`` is l(v)."""
    if u.level >= v.level:
        raise PreconditionError(f"need level(u) < level(v), got {u.level} >= {v.level}")
    counts = {u.index: 1}
    for n in range(u.level + 1, v.level + 1):
        nxt = {}
        for w in d.vertices(n):
            c = sum(counts.get(e.source, 0) for e in d.incoming(w))
            if c:
                nxt[w.index] = c
        counts = nxt
    return counts.get(v.index, 0)


def tower_height(d: OrderedDiagram, v: Vertex) -> int:
    """l(v) = #E_{0,n}(v), memoised on the diagram."""
    if v.level == 0:
        return 1
    key = ("l", v)
    memo = d._memo
    if key not in memo:
        memo[key] = sum(tower_height(d, e.source_vertex) for e in d.incoming(v))
    return memo[key]


def iter_paths(d: OrderedDiagram, v: Vertex, from_level: int = 0) -> Iterator[FinitePath]:
    """All paths from ``from_level`` into ``v``, in increasing order.

    Paths into a common vertex are ordered by comparing ranks at the highest
    level where they differ, which is the order the recursion below emits.
    """
    if from_level > v.level:
        raise PreconditionError("from_level above target")

    def rec(w):
        if w.level == from_level:
            yield ()
            return
        for e in d.incoming(w):
            for lower in rec(e.source_vertex):
                yield lower + (e,)

    for edges in rec(v):
        yield FinitePath(from_level, edges)


def all_paths(d: OrderedDiagram, level: int | None = None) -> list:
    """E_{0,n}, grouped by top vertex index then in increasing order."""
    n = d.depth if level is None else level
    return [p for v in d.vertices(n) for p in iter_paths(d, v)]


def extreme_path(d: OrderedDiagram, v: Vertex, which: str = MIN, from_level: int = 0) -> FinitePath:
    """The unique path into ``v`` whose every edge is minimal (or maximal)."""
    if which not in (MIN, MAX):
        raise PreconditionError(f"which must be 'min' or 'max', got {which!r}")
    if v.level < from_level:
        raise PreconditionError("vertex below from_level")
    edges = []
    w = v
    while w.level > from_level:
        inc = d.incoming(w)
        e = inc[0] if which == MIN else inc[-1]
        edges.append(e)
        w = e.source_vertex
    return FinitePath(from_level, tuple(reversed(edges)))


def is_extreme(d: OrderedDiagram, p: FinitePath, which: str) -> bool:
    test = d.is_min_edge if which == MIN else d.is_max_edge
    return all(test(e) for e in p.edges)


def telescope(d: OrderedDiagram, kept_levels: Sequence[int]) -> OrderedDiagram:
    """Replace the levels between consecutive kept levels by path sets E_{m,n}."""
    kept = list(kept_levels)
    if len(kept) < 2 or kept[0] != 0:
        raise PreconditionError("kept_levels must start at 0 and have at least two entries")
    if any(b <= a for a, b in zip(kept, kept[1:])):
        raise PreconditionError("kept_levels must be strictly increasing")
    if kept[-1] > d.depth:
        raise PreconditionError(f"kept level {kept[-1]} exceeds depth {d.depth}")
    edges = []
    for j, (m, n) in enumerate(zip(kept, kept[1:]), start=1):
        for v in d.vertices(n):
            for rank, p in enumerate(iter_paths(d, v, from_level=m), start=1):
                edges.append(Edge(j, p.source.index, v.index, rank))
    labels = []
    for j, n in enumerate(kept):
        labels.extend((Vertex(j, v.index), s) for v, s in d.labels if v.level == n)
    return OrderedDiagram(len(kept) - 1, tuple(d.vertex_counts[n] for n in kept), tuple(edges), tuple(labels))


def telescope_path(p: FinitePath, kept_levels: Sequence[int], telescoped: OrderedDiagram, d: OrderedDiagram) -> FinitePath:
    """Image of a level-0 path under the canonical bijection d -> telescope(d, kept_levels)."""
    kept = list(kept_levels)
    if p.from_level != 0 or p.to_level not in kept:
        raise PreconditionError("path must start at 0 and end on a kept level")
    edges = []
    for j, (m, n) in enumerate(zip(kept, kept[1:]), start=1):
        if n > p.to_level:
            break
        piece = p.restrict(m, n)
        edges.append(telescoped.edge(j, piece.target.index, path_position(d, piece) + 1))
    return FinitePath(0, tuple(edges))


def path_position(d: OrderedDiagram, p: FinitePath) -> int:
    """0-based position of ``p`` among the paths from ``p.from_level`` into ``p.target``."""
    pos = 0
    for e in p.edges:
        for f in d.incoming(e.range_vertex)[: e.order_rank - 1]:
            pos += _count_from(d, p.from_level, f.source_vertex)
    return pos


def path_at(d: OrderedDiagram, v: Vertex, position: int, from_level: int = 0) -> FinitePath:
    """Inverse of :func:`path_position`."""
    total = _count_from(d, from_level, v) if v.level > from_level else 1
    if not 0 <= position < total:
        raise PreconditionError(f"position {position} outside tower of height {total}")
    edges = []
    w = v
    while w.level > from_level:
        for e in d.incoming(w):
            c = _count_from(d, from_level, e.source_vertex)
            if position < c:
                edges.append(e)
                w = e.source_vertex
                break
            position -= c
    return FinitePath(from_level, tuple(reversed(edges)))


def _count_from(d: OrderedDiagram, m: int, v: Vertex) -> int:
    if v.level == m:
        return 1
    key = ("count_from", m, v)
    memo = d._memo
    if key not in memo:
        memo[key] = sum(_count_from(d, m, e.source_vertex) for e in d.incoming(v))
    return memo[key]


def restrict(d: OrderedDiagram, kept: Sequence[Iterable[int]]) -> OrderedDiagram:
    """Restrict to the kept vertices, keeping every edge that enters a kept vertex."""
    if len(kept) != d.depth + 1:
        raise PreconditionError(f"need {d.depth + 1} vertex subsets, got {len(kept)}")
    keep = [sorted(set(k)) for k in kept]
    if keep[0] != [1]:
        raise ClosureViolation(ROOT, "root must be kept")
    for n in range(1, d.depth + 1):
        if not keep[n]:
            raise ClosureViolation(Vertex(n, 0), f"level {n} keeps no vertex")
    for n in range(1, d.depth + 1):
        below = set(keep[n - 1])
        for i in keep[n]:
            v = Vertex(n, i)
            if not 1 <= i <= d.vertex_counts[n]:
                raise ClosureViolation(v, "unknown vertex")
            for e in d.incoming(v):
                if e.source not in below:
                    raise ClosureViolation(v, f"source {e.source_vertex} of r⁻¹(v) not kept")
    for n in range(d.depth):
        above = set(keep[n + 1])
        for i in keep[n]:
            v = Vertex(n, i)
            if not any(e.range in above for e in d.outgoing(v)):
                raise ClosureViolation(v, "no edge into a kept vertex")
    renum = [{old: new for new, old in enumerate(k, start=1)} for k in keep]
    edges = [
        Edge(e.level, renum[e.level - 1][e.source], renum[e.level][e.range], e.order_rank)
        for e in d.edges
        if e.range in renum[e.level]
    ]
    labels = [(Vertex(v.level, renum[v.level][v.index]), s) for v, s in d.labels if v.index in renum[v.level]]
    return OrderedDiagram(d.depth, tuple(len(k) for k in keep), tuple(edges), tuple(labels))


def rank_at_depth(d: OrderedDiagram) -> int:
    """min_{1<=n<=depth} r_n, the finite-depth stand-in for liminf #V_n."""
    return min(d.vertex_counts[1:])
