"""Vershik (adic) successor map on finite-depth path approximations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .diagram import (
    MAX,
    MIN,
    FinitePath,
    OrderedDiagram,
    Vertex,
    extreme_path,
    is_extreme,
)
from .errors import (
    MaxPathAtDepth,
    MinPathAtDepth,
    NotEssentiallySimple,
    OrbitEscapesDepth,
    PreconditionError,
)


def successor(d: OrderedDiagram, p: FinitePath) -> FinitePath:
    """phi(p): bump the lowest non-maximal edge, reset everything below it to minimal."""
    _check_rooted(p)
    for k, e in enumerate(p.edges):
        if not d.is_max_edge(e):
            f = d.edge(e.level, e.range, e.order_rank + 1)
            below = extreme_path(d, f.source_vertex, MIN)
            return FinitePath(0, below.edges + (f,) + p.edges[k + 1 :])
    raise MaxPathAtDepth(f"{p} is maximal through depth {p.to_level}")


def predecessor(d: OrderedDiagram, p: FinitePath) -> FinitePath:
    _check_rooted(p)
    for k, e in enumerate(p.edges):
        if not d.is_min_edge(e):
            f = d.edge(e.level, e.range, e.order_rank - 1)
            below = extreme_path(d, f.source_vertex, MAX)
            return FinitePath(0, below.edges + (f,) + p.edges[k + 1 :])
    raise MinPathAtDepth(f"{p} is minimal through depth {p.to_level}")


def pivot_level(d: OrderedDiagram, p: FinitePath) -> int | None:
    """Level of the edge that ``successor`` increments, or None for a maximal path."""
    for e in p.edges:
        if not d.is_max_edge(e):
            return e.level
    return None


def _check_rooted(p):
    if p.from_level != 0 or not p.edges:
        raise PreconditionError("expected a non-empty path starting at level 0")


class ExtremeCount(NamedTuple):
    count: int
    stabilized: bool


def _image_sets(d: OrderedDiagram, which: str, top: int):
    """Images at every level <= top of V_top under the extreme-edge source map."""
    pick = (lambda inc: inc[0]) if which == MIN else (lambda inc: inc[-1])
    images = [None] * (top + 1)
    current = set(range(1, d.vertex_counts[top] + 1))
    images[top] = frozenset(current)
    for n in range(top, 0, -1):
        current = {pick(d.incoming(Vertex(n, i))).source for i in current}
        images[n - 1] = frozenset(current)
    return images


def extreme_image(d: OrderedDiagram, which: str, level: int) -> frozenset:
    """Indices at ``level`` met by the maximal (or minimal) paths into the top level."""
    if not 0 <= level <= d.depth:
        raise PreconditionError(f"level {level} outside 0..{d.depth}")
    return _image_sets(d, which, d.depth)[level]


def count_extreme_paths(d: OrderedDiagram, which: str = MAX) -> ExtremeCount:
    """Estimate the number of infinite maximal (or minimal) paths.

    Every vertex has exactly one extreme incoming edge, so extreme paths are
    chains of the map v -> s(e(v, which)).  The count is the size of the image
    of the top level at the middle level h = depth // 2; it is flagged as
    stabilized when adding the top level no longer changes that image.
    """
    if which not in (MIN, MAX):
        raise PreconditionError(f"which must be 'min' or 'max', got {which!r}")
    N = d.depth
    h = max(1, N // 2)
    at_top = _image_sets(d, which, N)[h]
    if N >= h + 2:
        stabilized = _image_sets(d, which, N - 1)[h] == at_top
    else:
        stabilized = False
    return ExtremeCount(len(at_top), stabilized)


def is_essentially_simple_at_depth(d: OrderedDiagram) -> bool:
    return all(count_extreme_paths(d, w) == (1, True) for w in (MAX, MIN))


def extreme_bijection(
    d: OrderedDiagram, p: FinitePath, extremes: Mapping[int, int] | None = None
) -> FinitePath:
    """Image of a path that is maximal through its depth.

    ``extremes`` maps the top-vertex index of a maximal path to the top-vertex
    index of its minimal image at the same depth; it must be a permutation of
    the top level.  Without it the diagram must be essentially simple at depth,
    and each maximal path goes to the minimal path into the same top vertex, so
    every tower T(v) is traversed cyclically.
    """
    if not is_extreme(d, p, MAX):
        raise PreconditionError(f"{p} is not maximal")
    N = p.to_level
    top = p.target
    if extremes is not None:
        _check_permutation(extremes, d.vertex_counts[N])
        return extreme_path(d, Vertex(N, extremes[top.index]), MIN)
    if not is_essentially_simple_at_depth(d):
        raise NotEssentiallySimple("extreme paths are not unique and no bijection was configured")
    return extreme_path(d, top, MIN)


def inverse_extreme_bijection(d, p, extremes=None):
    if not is_extreme(d, p, MIN):
        raise PreconditionError(f"{p} is not minimal")
    N = p.to_level
    if extremes is not None:
        _check_permutation(extremes, d.vertex_counts[N])
        back = {b: a for a, b in extremes.items()}
        return extreme_path(d, Vertex(N, back[p.target.index]), MAX)
    if not is_essentially_simple_at_depth(d):
        raise NotEssentiallySimple("extreme paths are not unique and no bijection was configured")
    return extreme_path(d, p.target, MAX)


def _check_permutation(extremes, r):
    if sorted(extremes) != list(range(1, r + 1)) or sorted(extremes.values()) != list(range(1, r + 1)):
        raise PreconditionError(f"extremes must be a permutation of 1..{r}")


# -- points -------------------------------------------------------------


@dataclass(frozen=True)
class Tail:
    """How a finite prefix is continued up to the diagram depth."""

    kind: str  # "min" | "max" | "explicit"
    edges: tuple = ()

    def __post_init__(self):
        if self.kind not in ("min", "max", "explicit"):
            raise PreconditionError(f"unknown tail kind {self.kind!r}")
        object.__setattr__(self, "edges", tuple(self.edges))


MinimalTail = Tail("min")
MaximalTail = Tail("max")


def Explicit(edges=()):
    return Tail("explicit", edges)


@dataclass(frozen=True)
class PointApprox:
    prefix: FinitePath
    tail: Tail = MinimalTail

    def resolve(self, d: OrderedDiagram) -> FinitePath:
        """The path from level 0 to the effective depth."""
        _check_rooted(self.prefix)
        edges = list(self.prefix.edges)
        if self.tail.kind == "explicit":
            path = FinitePath(0, tuple(edges) + self.tail.edges)
            if path.to_level > d.depth:
                raise PreconditionError("explicit tail runs past the diagram depth")
            return path
        extreme = d.is_min_edge if self.tail.kind == "min" else d.is_max_edge
        v = self.prefix.target
        for n in range(v.level + 1, d.depth + 1):
            # lowest-indexed target among extreme edges leaving v
            choice = [e for e in d.outgoing(v) if extreme(e)]
            if not choice:
                raise PreconditionError(f"no {self.tail.kind}imal edge leaves {v}")
            e = min(choice, key=lambda e: e.range)
            edges.append(e)
            v = e.range_vertex
        return FinitePath(0, tuple(edges))

    def effective_depth(self, d: OrderedDiagram) -> int:
        if self.tail.kind == "explicit":
            return self.prefix.to_level + len(self.tail.edges)
        return d.depth


def as_path(d: OrderedDiagram, x) -> FinitePath:
    if isinstance(x, PointApprox):
        return x.resolve(d)
    return x


def step(d, p, forward=True, extremes=None):
    """One application of phi (or its inverse), wrapping through the extreme bijection."""
    try:
        return successor(d, p) if forward else predecessor(d, p)
    except (MaxPathAtDepth, MinPathAtDepth):
        dd = d if p.to_level == d.depth else d.truncate(p.to_level)
        if forward:
            return extreme_bijection(dd, p, extremes)
        return inverse_extreme_bijection(dd, p, extremes)


def orbit(d: OrderedDiagram, x, radius: int, extremes: Mapping[int, int] | None = None) -> list:
    """[phi^i(x) for i in -radius..radius] as full-depth paths."""
    if radius < 0:
        raise PreconditionError("radius must be non-negative")
    p0 = as_path(d, x)
    fwd = [p0]
    back = []
    for direction, out in ((True, fwd), (False, back)):
        p = p0
        for i in range(1, radius + 1):
            try:
                p = step(d, p, direction, extremes)
            except NotEssentiallySimple as exc:
                raise OrbitEscapesDepth(i if direction else -i, str(exc)) from exc
            out.append(p)
    return back[::-1] + fwd
