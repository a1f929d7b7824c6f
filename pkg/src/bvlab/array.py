"""Array systems: rows of level-n vertices along an orbit, with cuts.

Row ``n`` at column ``i`` is the level-n vertex of phi^i(x).  The entry is
*checked* when the prefix of phi^i(x) up to level n is minimal; a cut sits
just before every checked entry.  Row 0 is checked everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .diagram import (
    ROOT,
    FinitePath,
    OrderedDiagram,
    Vertex,
    tower_height,
)
from .errors import ExpansionTooShallow, PreconditionError
from .vershik import orbit


class MarkedVertex(NamedTuple):
    vertex: Vertex
    checked: bool

    def __str__(self):
        return ("^" if self.checked else "") + str(self.vertex)


def unmark(word) -> tuple:
    return tuple(c.vertex for c in word)


# -- n-symbols ----------------------------------------------------------


def expand_symbol(d: OrderedDiagram, v: Vertex, m: int) -> tuple:
    """Row ``m`` of the n-symbol of ``v``: its level-m vertices in order."""
    if not 0 <= m < v.level:
        raise PreconditionError(f"need 0 <= m < level(v) = {v.level}, got m = {m}")
    key = ("sym", v, m)
    memo = d._memo
    if key not in memo:
        if m == v.level - 1:
            memo[key] = tuple(e.source_vertex for e in d.incoming(v))
        else:
            out = []
            for e in d.incoming(v):
                out.extend(expand_symbol(d, e.source_vertex, m))
            memo[key] = tuple(out)
    return memo[key]


@dataclass(frozen=True)
class NSymbol:
    vertex: Vertex
    rows: tuple  # rows[m] for m = 0..n; rows[n] == (vertex,)

    def project(self, m: int) -> tuple:
        return self.rows[m]


def n_symbol(d: OrderedDiagram, v: Vertex) -> NSymbol:
    rows = tuple(expand_symbol(d, v, m) for m in range(v.level)) + ((v,),)
    return NSymbol(v, rows)


def marked_row(d: OrderedDiagram, v: Vertex, m: int) -> tuple:
    """Row ``m`` of the symbol of ``v`` one entry per column, with check marks."""
    if m == v.level:
        letters = (v,)
    else:
        letters = expand_symbol(d, v, m)
    key = ("mrow", v, m)
    memo = d._memo
    if key not in memo:
        out = []
        for u in letters:
            out.append(MarkedVertex(u, True))
            out.extend([MarkedVertex(u, False)] * (tower_height(d, u) - 1))
        memo[key] = tuple(out)
    return memo[key]


# -- windows ------------------------------------------------------------


@dataclass(frozen=True)
class Row:
    level: int
    start: int
    cells: tuple

    @property
    def stop(self) -> int:
        return self.start + len(self.cells)

    @property
    def cuts(self) -> frozenset:
        return frozenset(self.start + k for k, c in enumerate(self.cells) if c.checked)

    def __getitem__(self, i: int) -> MarkedVertex:
        if not self.start <= i < self.stop:
            raise IndexError(i)
        return self.cells[i - self.start]


@dataclass(frozen=True)
class ArrayWindow:
    radius: int
    rows: tuple

    @property
    def top(self) -> int:
        return len(self.rows) - 1

    @property
    def columns(self) -> range:
        return range(-self.radius, self.radius + 1)

    def row(self, n: int) -> Row:
        return self.rows[n]

    def cuts(self, n: int) -> frozenset:
        return self.rows[n].cuts

    def shifted_rows(self, n: int) -> dict:
        return {i: self.rows[n][i] for i in self.columns}


def column_entry(d: OrderedDiagram, p: FinitePath, n: int) -> MarkedVertex:
    if n == 0:
        return MarkedVertex(ROOT, True)
    return MarkedVertex(p.vertex_at(n), all(e.order_rank == 1 for e in p.edges[:n]))


def window_from_paths(d: OrderedDiagram, paths, top: int) -> ArrayWindow:
    radius = (len(paths) - 1) // 2
    rows = []
    for n in range(top + 1):
        rows.append(Row(n, -radius, tuple(column_entry(d, p, n) for p in paths)))
    return ArrayWindow(radius, tuple(rows))


def array_window(
    d: OrderedDiagram, x, top: int | None = None, radius: int = 20, extremes: Mapping[int, int] | None = None
) -> ArrayWindow:
    """Rows 0..top of the array system of ``x`` over columns [-radius, radius]."""
    paths = orbit(d, x, radius, extremes)
    depth = paths[0].to_level
    top = depth if top is None else top
    if top > depth:
        raise PreconditionError(f"top level {top} exceeds effective depth {depth}")
    return window_from_paths(d, paths, top)


def nesting_violations(w: ArrayWindow) -> list:
    """Columns where an (n+1)-cut is not an n-cut."""
    bad = []
    for n in range(w.top):
        for i in sorted(w.cuts(n + 1) - w.cuts(n)):
            bad.append((n + 1, i))
    return bad


class Depth(NamedTuple):
    depth: int
    at_least: bool  # rows agree through the whole window

    def __str__(self):
        return f"AtLeast({self.depth})" if self.at_least else str(self.depth)


def _same_shape(a: ArrayWindow, b: ArrayWindow):
    if a.radius != b.radius or a.top != b.top:
        raise PreconditionError("windows differ in column range or top level")


def compatibility_depth(a: ArrayWindow, b: ArrayWindow) -> Depth:
    """Largest n such that rows 0..n of ``a`` and ``b`` coincide, marks included."""
    _same_shape(a, b)
    for n in range(a.top + 1):
        if a.rows[n].cells != b.rows[n].cells:
            return Depth(n - 1, False)
    return Depth(a.top, True)


def common_cuts(a: ArrayWindow, b: ArrayWindow, n: int) -> frozenset:
    _same_shape(a, b)
    return a.cuts(n) & b.cuts(n)


# -- row languages ------------------------------------------------------


@dataclass(frozen=True)
class Language:
    level: int
    length: int
    expansion_level: int
    words: frozenset
    interior_only: bool

    def unmarked(self) -> frozenset:
        return frozenset(unmark(w) for w in self.words)

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words))


def stable_extreme_vertices(d: OrderedDiagram):
    """(level h, max-chain vertex, min-chain vertex) when both chains are unique and stabilized."""
    from .vershik import _image_sets, is_essentially_simple_at_depth

    if not is_essentially_simple_at_depth(d):
        return None
    h = max(1, d.depth // 2)
    (top,) = _image_sets(d, "max", d.depth)[h]
    (bottom,) = _image_sets(d, "min", d.depth)[h]
    return h, Vertex(h, top), Vertex(h, bottom)


def certified_rows(d: OrderedDiagram, D: int, levels) -> tuple:
    """Marked rows (one per requested level) of every block whose words are known to occur.

    Adjacent D-symbols are only known to occur side by side inside some
    (D+1)-symbol, so when level D+1 exists its symbols are used.  For an
    essentially simple diagram the symbol of the maximal chain followed by
    that of the minimal chain is certified as well, since phi(p_max) = p_min.
    Returns ``(blocks, interior_only)``.
    """
    if D + 1 <= d.depth:
        tops, interior = d.vertices(D + 1), False
    else:
        tops, interior = d.vertices(D), True
    blocks = [tuple(marked_row(d, w, n) for n in levels) for w in tops]
    seam = stable_extreme_vertices(d)
    if seam is not None and max(levels) <= seam[0]:
        _, a, b = seam
        blocks.append(tuple(marked_row(d, a, n) + marked_row(d, b, n) for n in levels))
    return blocks, interior


def words(d: OrderedDiagram, n: int, L: int, D: int) -> Language:
    """Length-L factors of row n (marked, one letter per column) seen in D-level expansions."""
    if not 0 <= n < D <= d.depth:
        raise PreconditionError(f"need 0 <= n < D <= depth, got n={n}, D={D}, depth={d.depth}")
    if L < 1:
        raise PreconditionError("L must be positive")
    blocks, interior = certified_rows(d, D, (n,))
    found = set()
    longest = 0
    for (row,) in blocks:
        longest = max(longest, len(row))
        for k in range(len(row) - L + 1):
            found.add(row[k : k + L])
    if L > longest:
        raise ExpansionTooShallow(f"word length {L} exceeds longest expansion {longest}")
    return Language(n, L, D, frozenset(found), interior)


# -- rendering ----------------------------------------------------------


def _cell_width(d, levels):
    names = [d.label(v) for n in levels for v in (d.vertices(n) if n else [ROOT])]
    return max(len(s) for s in names) + 1


def _render_rows(d, rows, start, ncols, prefix_width=5):
    width = _cell_width(d, [r[0] for r in rows])
    lines = []
    for n, cells in rows:
        line = [" "] * (ncols * width)
        k = 0
        while k < ncols:
            j = k + 1
            while j < ncols and not cells[j].checked:
                j += 1
            if cells[k].checked:
                line[k * width] = "|"
            label = d.label(cells[k].vertex)
            span = (j - k) * width - 1
            text = label.center(span) if len(label) <= span else label[:span]
            line[k * width + 1 : k * width + 1 + span] = list(text)
            k = j
        lines.append(f"{n:>{prefix_width - 1}} " + "".join(line).rstrip())
    return lines


def render_window(d: OrderedDiagram, w: ArrayWindow) -> str:
    """ASCII picture of a window: top row first, ``|`` before every cut."""
    ncols = 2 * w.radius + 1
    rows = [(n, w.rows[n].cells) for n in range(w.top, -1, -1)]
    return "\n".join(_render_rows(d, rows, -w.radius, ncols)) + "\n"


def render_symbol(d: OrderedDiagram, v: Vertex) -> str:
    """ASCII picture of the n-symbol of ``v`` (rows v[n] down to v[0])."""
    rows = [(m, marked_row(d, v, m)) for m in range(v.level, -1, -1)]
    ncols = tower_height(d, v)
    if v.level == 0:
        return str(v) + "\n"
    return "\n".join(_render_rows(d, rows, 0, ncols)) + "\n"
