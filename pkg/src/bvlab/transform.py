"""Diagram rewrites that keep the Vershik system canonically isomorphic.

Two primitive rewrites are provided: merging two vertices whose symbols agree
below their level, and splitting a vertex's symbol at a cut.  Each returns the
new diagram together with a :class:`RewriteCertificate` built by exhaustive
path enumeration at a finite depth.  A rewrite that does not certify is
rejected with :class:`CertificateFailure`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .array import expand_symbol
from .diagram import (
    MAX,
    MIN,
    Edge,
    FinitePath,
    OrderedDiagram,
    Vertex,
    all_paths,
    is_extreme,
    path_at,
    path_position,
    tower_height,
)
from .errors import (
    CertificateFailure,
    NoUpperLevel,
    NotACutPosition,
    PreconditionError,
    PreconditionSymbolMismatch,
)
from .vershik import extreme_image, successor

CHECKS = ("bijective", "order", "successor", "rows", "extremes")
DEFAULT_CERT_DEPTH = 6


# -- certificates -------------------------------------------------------


@dataclass(frozen=True)
class CheckFailure:
    check: str
    message: str
    witnesses: tuple = ()  # paths (as strings) exhibiting the failure

    def describe(self) -> str:
        text = f"check {self.check} failed: {self.message}"
        if self.witnesses:
            text += " [" + "; ".join(self.witnesses) + "]"
        return text


@dataclass(frozen=True)
class RewriteCertificate:
    depth: int
    agreement_level: int
    table: tuple  # ((old path, new path), ...) in the order of E_{0,N}(old)
    checks: dict = field(default_factory=dict)  # name -> True / False / None (not reached)
    failure: CheckFailure | None = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    def to_record(self) -> dict:
        return {
            "depth": self.depth,
            "agreement_level": self.agreement_level,
            "checks": {name: self.checks.get(name) for name in CHECKS},
            "failure": None
            if self.failure is None
            else {
                "check": self.failure.check,
                "message": self.failure.message,
                "witnesses": list(self.failure.witnesses),
            },
            "table": [[str(a), str(b)] for a, b in self.table],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), indent=1, ensure_ascii=False) + "\n"

    def summary(self) -> str:
        lines = [f"certificate at depth {self.depth}, rows agree through level {self.agreement_level}"]
        for name in CHECKS:
            state = self.checks.get(name)
            lines.append(f"  {name:<10} {'not reached' if state is None else 'pass' if state else 'FAIL'}")
        if self.failure is not None:
            lines.append("  " + self.failure.describe())
        lines.append(f"  {len(self.table)} paths in the bijection")
        return "\n".join(lines)


def positional_map(d_old: OrderedDiagram, d_new: OrderedDiagram) -> Callable:
    """Send the k-th path of T(v) to the k-th path of T(v) in the new diagram."""

    def f(p):
        return path_at(d_new, Vertex(p.to_level, p.target.index), path_position(d_old, p))

    return f


def _truncated(d, N):
    return d if d.depth == N else d.truncate(N)


def _row_entry(p, n):
    return p.vertex_at(n), all(e.order_rank == 1 for e in p.edges[:n])


def verify_certificate(
    d_old: OrderedDiagram,
    d_new: OrderedDiagram,
    N: int,
    path_map: Callable | None = None,
    agreement_level: int | None = None,
) -> RewriteCertificate:
    """Check that ``path_map`` is a canonical isomorphism between E_{0,N}(old) and E_{0,N}(new).

    Checks, in order, stopping at the first failure:
      bijective  - the map is a bijection onto E_{0,N}(new);
      order      - paths into a common top vertex go to paths into a common
                   top vertex, so towers map onto towers;
      successor  - map(successor(p)) == successor(map(p)) for non-maximal p;
      rows       - the level-n vertex and its check mark agree for n <= agreement_level;
      extremes   - the number of maximal (and minimal) paths, counted at level
                   max(N // 2, agreement_level + 2), is unchanged.
    Without ``path_map`` the positional bijection (same place in the tower of
    the same top vertex) is used, and ``agreement_level`` defaults to N.
    """
    if d_old.depth < N or d_new.depth < N or N < 1:
        raise PreconditionError(f"both diagrams need depth >= N = {N}")
    old, new = _truncated(d_old, N), _truncated(d_new, N)
    if path_map is None and old.vertex_counts[N] == new.vertex_counts[N]:
        path_map = positional_map(old, new)
    agreement_level = N if agreement_level is None else agreement_level
    checks = {}
    table = []

    def done(name, message, *witnesses):
        checks[name] = False
        fail = CheckFailure(name, message, tuple(str(w) for w in witnesses))
        return RewriteCertificate(N, agreement_level, tuple(table), dict(checks), fail)

    # (i) bijective
    source = all_paths(old, N)
    target = set(all_paths(new, N))
    if path_map is None:
        return done("bijective", f"top levels differ ({old.vertex_counts[N]} vs {new.vertex_counts[N]} vertices)")
    image = {}
    seen = {}
    for p in source:
        q = path_map(p)
        if q not in target:
            table.append((p, q))
            return done("bijective", "image is not a path of the new diagram", p, q)
        if q in seen:
            return done("bijective", "two paths share an image", seen[q], p, q)
        seen[q] = p
        image[p] = q
        table.append((p, q))
    if len(seen) != len(target):
        missing = min(target - set(seen), key=lambda q: (q.target, path_position(new, q)))
        return done("bijective", f"{len(target) - len(seen)} new paths are not hit", missing)
    checks["bijective"] = True

    # (ii) towers onto towers
    top_of = {}
    for p, q in table:
        w = top_of.setdefault(p.target, q.target)
        if w != q.target:
            first = next(a for a, b in table if a.target == p.target)
            return done("order", f"tower of {p.target} is spread over several towers", first, p)
    if len(set(top_of.values())) != len(top_of):
        return done("order", "two towers are sent to the same tower")
    checks["order"] = True

    # (iii) successor conjugation
    for p in source:
        if is_extreme(old, p, MAX):
            continue
        lhs = image[successor(old, p)]
        q = image[p]
        if is_extreme(new, q, MAX):
            return done("successor", "image of a non-maximal path is maximal", p, q)
        rhs = successor(new, q)
        if lhs != rhs:
            return done("successor", "map(phi(p)) != phi(map(p))", p, lhs, rhs)
    checks["successor"] = True

    # (iv) rows
    for p, q in table:
        for n in range(1, agreement_level + 1):
            if _row_entry(p, n) != _row_entry(q, n):
                return done("rows", f"row {n} differs", p, q)
    checks["rows"] = True

    # (v) extreme path counts, read off at a level above the rewritten ones
    h = min(N, max(N // 2, agreement_level + 2))
    for which in (MAX, MIN):
        a, b = len(extreme_image(old, which, h)), len(extreme_image(new, which, h))
        if a != b:
            return done("extremes", f"{which}imal path count at level {h} changes from {a} to {b}")
    checks["extremes"] = True
    return RewriteCertificate(N, agreement_level, tuple(table), checks, None)


def _certify(d, d_new, N, path_map, agreement_level):
    cert = verify_certificate(d, d_new, N, path_map, agreement_level)
    if not cert.passed:
        raise CertificateFailure(cert)
    return cert


def _cert_depth(d, m, N):
    N = max(m + 1, min(d.depth, DEFAULT_CERT_DEPTH)) if N is None else N
    if not m + 1 <= N <= d.depth:
        raise PreconditionError(f"certificate depth must lie in [{m + 1}, {d.depth}], got {N}")
    return N


def _check_vertex(d, v, m):
    v = Vertex(*v)
    if v.level != m or not 1 <= v.index <= d.vertex_counts[m]:
        raise PreconditionError(f"{v} is not a vertex of level {m}")
    return v


def _map_path(p: FinitePath, edge_map: Callable) -> FinitePath:
    """Rewrite a level-0 path edge by edge; ``edge_map(edge, path)`` sees the whole old path."""
    return FinitePath(0, tuple(edge_map(e, p) for e in p.edges))


# -- merging ------------------------------------------------------------


def symbol_mismatch(d: OrderedDiagram, v: Vertex, w: Vertex):
    """First (row, position) where the symbols of ``v`` and ``w`` differ, or None."""
    for k in range(v.level):
        a, b = expand_symbol(d, v, k), expand_symbol(d, w, k)
        if a != b:
            pos = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
            return k, pos
    return None


def merge_vertices(d: OrderedDiagram, m: int, v, v2, N: int | None = None):
    """Identify v2 with v at level m; v2's outgoing edges are redirected to v, orders unchanged."""
    if not 1 <= m <= d.depth:
        raise PreconditionError(f"level {m} outside 1..{d.depth}")
    v, v2 = _check_vertex(d, v, m), _check_vertex(d, v2, m)
    if v == v2:
        raise PreconditionError("cannot merge a vertex with itself")
    if m == d.depth:
        raise NoUpperLevel(f"level {m} is the top level; merging there would lose paths")
    bad = symbol_mismatch(d, v, v2)
    if bad is not None:
        raise PreconditionSymbolMismatch(*bad)
    N = _cert_depth(d, m, N)

    def renum(i):
        return v.index if i == v2.index else (i - 1 if i > v2.index else i)

    edges = []
    for e in d.edges:
        if e.level == m:
            if e.range == v2.index:
                continue
            edges.append(e._replace(range=renum(e.range)))
        elif e.level == m + 1:
            edges.append(e._replace(source=renum(e.source)))
        else:
            edges.append(e)
    counts = list(d.vertex_counts)
    counts[m] -= 1
    labels = [(Vertex(u.level, renum(u.index)) if u.level == m else u, s) for u, s in d.labels if u != v2]
    d_new = OrderedDiagram(d.depth, tuple(counts), tuple(edges), tuple(labels))

    def edge_map(e, p):
        if e.level == m:
            # paths through v2 now run through v; incoming orders are identical
            return d_new.edge(m, renum(e.range), e.order_rank)
        if e.level == m + 1:
            return e._replace(source=renum(e.source))
        return e

    cert = _certify(d, d_new, N, lambda p: _map_path(p, edge_map), m - 1)
    return d_new, cert


# -- splitting ----------------------------------------------------------


def cut_positions(d: OrderedDiagram, v: Vertex) -> list:
    """Columns 0 < c < l(v) where v's symbol has an (m-1)-cut, with the split index k."""
    out = []
    c = 0
    inc = d.incoming(v)
    for k, e in enumerate(inc[:-1], start=1):
        c += tower_height(d, e.source_vertex)
        out.append((c, k))
    return out


def _split(d: OrderedDiagram, m: int, v: Vertex, c: int, left_first: bool = True):
    """The split diagram and its structural path map, without certification."""
    if not 1 <= m <= d.depth:
        raise PreconditionError(f"level {m} outside 1..{d.depth}")
    v = _check_vertex(d, v, m)
    if m + 1 > d.depth:
        raise NoUpperLevel(f"splitting at level {m} needs level {m + 1}")
    k = dict(cut_positions(d, v)).get(c)
    if k is None:
        valid = ", ".join(str(c) for c, _ in cut_positions(d, v)) or "none"
        raise NotACutPosition(f"column {c} is not an (m-1)-cut inside {v} (cuts: {valid})")
    srcs = d.sources(v)
    left_srcs, right_srcs = srcs[:k], srcs[k:]
    # "The left half is identified with v'" when such a vertex already exists
    twin = next((u for u in d.vertices(m) if u != v and d.sources(u) == left_srcs), None)
    r = d.vertex_counts[m]
    if twin is not None:
        left, right = twin.index, v.index
    else:
        left, right = v.index, r + 1

    edges = [e for e in d.edges if e.level not in (m, m + 1)]
    for e in d.edges:
        if e.level == m and e.range != v.index:
            edges.append(e)
    if twin is None:
        edges += [Edge(m, s, left, j) for j, s in enumerate(left_srcs, start=1)]
    edges += [Edge(m, s, right, j) for j, s in enumerate(right_srcs, start=1)]

    # level m+1: each edge out of v becomes two consecutive edges
    up = {}  # old level-(m+1) edge not from v -> new edge
    doubled = {}  # old level-(m+1) edge from v -> (copy from left, copy from right)
    for w in d.vertices(m + 1):
        rank = 0
        for e in d.incoming(w):
            if e.source == v.index:
                pair = [Edge(m + 1, left, w.index, 0), Edge(m + 1, right, w.index, 0)]
                order = pair if left_first else pair[::-1]
                placed = []
                for f in order:
                    rank += 1
                    placed.append(f._replace(order_rank=rank))
                lf, rf = placed if left_first else placed[::-1]
                doubled[e] = (lf, rf)
                edges += [lf, rf]
            else:
                rank += 1
                f = e._replace(order_rank=rank)
                up[e] = f
                edges.append(f)
    counts = list(d.vertex_counts)
    if twin is None:
        counts[m] += 1
    labels = [(u, s) for u, s in d.labels if u != v]
    d_new = OrderedDiagram(d.depth, tuple(counts), tuple(edges), tuple(labels))

    def edge_map(e, p):
        lower = p.edges[m - 1]  # the level-m edge of p
        if e.level == m and e.range == v.index:
            if e.order_rank <= k:
                return d_new.edge(m, left, e.order_rank)
            return d_new.edge(m, right, e.order_rank - k)
        if e.level == m + 1:
            if e in doubled:
                return doubled[e][0] if lower.order_rank <= k else doubled[e][1]
            return up[e]
        return e

    return d_new, (lambda p: _map_path(p, edge_map)), (twin is not None)


def split_vertex(d: OrderedDiagram, m: int, v, c: int, N: int | None = None):
    """Cut the symbol of ``v`` at column ``c`` into a left and a right part.

    The left part takes over v's slot unless another level-m vertex already
    has the same incoming sequence, in which case it is identified with that
    vertex and the fresh right part v'' takes v's slot; otherwise v'' is
    appended as the last vertex of level m.  Every level-(m+1) edge leaving v
    is replaced by two edges in its order slot, the left one first.
    """
    d_new, f, _ = _split(d, m, Vertex(*v), c)
    N = _cert_depth(d, m, N)
    return d_new, _certify(d, d_new, N, f, m - 1)


def duplicate_edges(d: OrderedDiagram, m: int, v, c: int, left_first: bool = False):
    """The split of :func:`split_vertex` with a chosen duplicate order, uncertified.

    With ``left_first=False`` the right part precedes the left part, which
    does not conjugate the successor map; it serves as a negative example.
    Returns ``(diagram, path_map)``.
    """
    d_new, f, _ = _split(d, m, Vertex(*v), c, left_first)
    return d_new, f
