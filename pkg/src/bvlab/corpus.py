"""Example diagrams with known behaviour, and the diagram file format.

A diagram file is a JSON document::

    {
      "depth": 2,
      "vertex_counts": [1, 1, 1],
      "edges": [{"level": 1, "source_index": 1, "range_index": 1, "order_rank": 1}, ...],
      "labels": {"1,1": "a"}
    }

Edges are written sorted by (level, range_index, order_rank); ``labels`` is
optional and keyed by ``"level,index"``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .diagram import Edge, OrderedDiagram, Vertex, rank_at_depth, validate
from .errors import BVError, DiagramParseError, PreconditionError

FIXTURE_ENV = "BV_LAB_FIXTURES"
PACKAGE_FIXTURES = Path(__file__).with_name("fixtures")
SUFFIX = ".diagram"


# -- file format --------------------------------------------------------


def dumps(d: OrderedDiagram) -> str:
    doc = {
        "depth": d.depth,
        "vertex_counts": list(d.vertex_counts),
        "edges": [
            {"level": e.level, "source_index": e.source, "range_index": e.range, "order_rank": e.order_rank}
            for e in d.edges
        ],
    }
    if d.labels:
        doc["labels"] = {f"{v.level},{v.index}": s for v, s in d.labels}
    # one edge record per line keeps diffs and parse errors readable
    lines = ["{"]
    lines.append(f'  "depth": {doc["depth"]},')
    lines.append(f'  "vertex_counts": {json.dumps(doc["vertex_counts"])},')
    lines.append('  "edges": [')
    recs = [json.dumps(r) for r in doc["edges"]]
    lines.extend(f"    {r}," for r in recs[:-1])
    if recs:
        lines.append(f"    {recs[-1]}")
    if "labels" in doc:
        lines.append("  ],")
        lines.append(f'  "labels": {json.dumps(doc["labels"], ensure_ascii=False)}')
    else:
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


_EDGE_KEYS = ("level", "source_index", "range_index", "order_rank")


def loads(text: str) -> OrderedDiagram:
    """Parse a diagram document.  Structural validity is *not* checked here."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise DiagramParseError("top level must be an object", 1)
    for key in ("depth", "vertex_counts", "edges"):
        if key not in doc:
            raise DiagramParseError(f"missing field {key!r}")
    unknown = set(doc) - {"depth", "vertex_counts", "edges", "labels"}
    if unknown:
        raise DiagramParseError(f"unknown fields {sorted(unknown)}")
    depth, counts = doc["depth"], doc["vertex_counts"]
    if not isinstance(depth, int) or depth < 1:
        raise DiagramParseError("depth must be a positive integer", _line_of(text, '"depth"'))
    if not isinstance(counts, list) or not all(isinstance(c, int) for c in counts):
        raise DiagramParseError("vertex_counts must be a list of integers", _line_of(text, '"vertex_counts"'))
    if len(counts) != depth + 1:
        raise DiagramParseError(
            f"vertex_counts has {len(counts)} entries, expected {depth + 1}", _line_of(text, '"vertex_counts"')
        )
    edges = []
    for k, rec in enumerate(doc["edges"]):
        if not isinstance(rec, dict) or set(rec) != set(_EDGE_KEYS) or not all(
            isinstance(rec[f], int) for f in _EDGE_KEYS
        ):
            raise DiagramParseError(
                f"edge record {k} must have integer fields {', '.join(_EDGE_KEYS)}", _edge_line(text, k)
            )
        edges.append(Edge(*(rec[f] for f in _EDGE_KEYS)))
    labels = []
    for key, name in doc.get("labels", {}).items():
        try:
            level, index = (int(t) for t in key.split(","))
        except ValueError:
            raise DiagramParseError(f"bad label key {key!r}", _line_of(text, '"labels"')) from None
        labels.append((Vertex(level, index), name))
    return OrderedDiagram(depth, tuple(counts), tuple(edges), tuple(labels))


def _line_of(text, needle):
    for k, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return k
    return None


def _edge_line(text, k):
    # k-th "{" after the "edges" key starts edge record k
    pos = text.find('"edges"')
    if pos < 0:
        return None
    for _ in range(k + 1):
        pos = text.find("{", pos + 1)
        if pos < 0:
            return None
    return text.count("\n", 0, pos) + 1


def load(path) -> OrderedDiagram:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(d: OrderedDiagram, path) -> None:
    Path(path).write_text(dumps(d), encoding="utf-8")


# -- builders -----------------------------------------------------------


def odometer(bases, depth: int | None = None) -> OrderedDiagram:
    """One vertex per level, ``bases[n-1]`` ordered edges at level n.

    A shorter ``bases`` list is repeated cyclically up to ``depth``.
    """
    bases = list(bases)
    if not bases or any(b < 2 for b in bases):
        raise PreconditionError("odometer bases must all be >= 2")
    depth = len(bases) if depth is None else depth
    if depth < 1:
        raise PreconditionError("depth must be positive")
    return OrderedDiagram.from_incoming([[[1] * bases[n % len(bases)]] for n in range(depth)])


def fibonacci(depth: int = 10) -> OrderedDiagram:
    """Stationary diagram of a -> ab, b -> a with level 1 = the letters a, b.

    On even levels from 4 on, the edges into ``a`` are ordered (b, a): the
    conjugate substitution a -> ba, b -> a.  Both orders generate the same
    language, and mixing them leaves a single maximal and a single minimal
    infinite path, which the constant order a -> ab does not.
    """
    if depth < 2:
        raise PreconditionError("fibonacci fixture needs depth >= 2")
    levels = [[[1], [1]]]
    for n in range(2, depth + 1):
        a_in = [2, 1] if n % 2 == 0 and n >= 4 else [1, 2]
        levels.append([a_in, [1]])
    labels = {}
    for n in range(1, depth + 1):
        labels[(n, 1)] = f"a{n}"
        labels[(n, 2)] = f"b{n}"
    return OrderedDiagram.from_incoming(levels, labels)


def chacon(depth: int = 9) -> OrderedDiagram:
    """Stationary diagram of the Chacon substitution a -> aaba, b -> b."""
    if depth < 2:
        raise PreconditionError("chacon fixture needs depth >= 2")
    levels = [[[1], [1]]] + [[[1, 1, 2, 1], [2]] for _ in range(2, depth + 1)]
    labels = {}
    for n in range(1, depth + 1):
        labels[(n, 1)] = f"a{n}"
        labels[(n, 2)] = f"b{n}"
    return OrderedDiagram.from_incoming(levels, labels)


def proximal_fixed_point(depth: int = 8) -> OrderedDiagram:
    """Rank-2 diagram: a fixed chain f and a vertex w entered as f w f.

    The all-f path is the only maximal and the only minimal path, so it is a
    fixed point, and every other orbit is asymptotic to it in both directions.
    """
    if depth < 2:
        raise PreconditionError("proximal fixture needs depth >= 2")
    levels = [[[1], [1]]] + [[[1], [1, 2, 1]] for _ in range(2, depth + 1)]
    labels = {}
    for n in range(1, depth + 1):
        labels[(n, 1)] = f"f{n}"
        labels[(n, 2)] = f"w{n}"
    return OrderedDiagram.from_incoming(levels, labels)


def periodic(depth: int = 6) -> OrderedDiagram:
    """One vertex and one edge per level: a single fixed point."""
    return OrderedDiagram.from_incoming([[[1]] for _ in range(depth)])


def two_odometers(depth: int = 6) -> OrderedDiagram:
    """Two binary odometers sharing only the root."""
    levels = [[[1, 1], [1, 1]]] + [[[1, 1], [2, 2]] for _ in range(2, depth + 1)]
    return OrderedDiagram.from_incoming(levels)


def figure_fragment() -> OrderedDiagram:
    """Small diagram reproducing the four-row array picture and its 2-symbol v_{2,1}.

    Level-1 towers have heights 3, 2, 3, and v_{2,1} is entered from
    v_{1,1}, v_{1,3}, v_{1,2} in that order.
    """
    return OrderedDiagram.from_incoming(
        [
            [[1, 1, 1], [1, 1], [1, 1, 1]],
            [[1, 3, 2], [2, 1], [1, 3, 3]],
            [[1, 3], [2, 1], [2, 3]],
            [[3, 1, 2]],
        ]
    )


@dataclass(frozen=True)
class Fixture:
    name: str
    diagram: OrderedDiagram
    rank_at_depth: int
    essentially_simple: bool
    expected: str | None  # "expansive" | "odometer" | "periodic" | "proximal"

    def verify(self) -> list:
        """Re-check the declared properties; returns a list of failures."""
        from . import analysis
        from .vershik import is_essentially_simple_at_depth

        d = self.diagram
        problems = [str(v) for v in validate(d)]
        if problems:
            return problems
        if rank_at_depth(d) != self.rank_at_depth:
            problems.append(f"rank_at_depth is {rank_at_depth(d)}, declared {self.rank_at_depth}")
        if is_essentially_simple_at_depth(d) != self.essentially_simple:
            problems.append(f"essentially_simple is not {self.essentially_simple}")
        if self.expected is not None:
            check = analysis.expected_behaviour(d, self.expected)
            if not check.holds:
                problems.append(f"expected {self.expected}: {check.detail}")
        bound = analysis.minimal_set_bound_check(d)
        if not bound.satisfied:
            problems.append(f"minimal-set bound fails: {bound}")
        return problems


# name -> (builder, rank, essentially simple, expected behaviour)
REGISTRY = {
    "odometer2": (lambda: odometer([2], 10), 1, True, "odometer"),
    "fibonacci": (fibonacci, 2, True, "expansive"),
    "chacon": (chacon, 2, False, "expansive"),
    "proximal": (proximal_fixed_point, 2, True, "proximal"),
    "periodic": (periodic, 1, True, "periodic"),
    "two-odometers": (two_odometers, 2, False, "odometer"),
    "figure": (figure_fragment, 1, False, None),
}


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    return Path(override) if override else PACKAGE_FIXTURES


def fixture_names() -> list:
    return sorted(REGISTRY)


def build_fixture(name: str) -> Fixture:
    """Fixture straight from its builder (the checked-in files are its frozen output)."""
    builder, rank, simple, expected = _entry(name)
    return Fixture(name, builder(), rank, simple, expected)


def load_fixture(name: str, verify: bool = True) -> Fixture:
    """Read a shipped fixture file and re-verify its declared properties."""
    _, rank, simple, expected = _entry(name)
    path = fixture_dir() / f"{name}{SUFFIX}"
    if not path.exists():
        raise BVError(f"fixture file {path} not found")
    fx = Fixture(name, load(path), rank, simple, expected)
    if verify:
        problems = fx.verify()
        if problems:
            raise BVError(f"fixture {name} fails its declared properties: " + "; ".join(problems))
    return fx


def _entry(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise BVError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None


def write_fixture_files(directory=None) -> list:
    directory = Path(directory) if directory else PACKAGE_FIXTURES
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in fixture_names():
        path = directory / f"{name}{SUFFIX}"
        save(build_fixture(name).diagram, path)
        written.append(path)
    return written
