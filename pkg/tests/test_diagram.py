import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings

from bvlab import corpus
from bvlab.diagram import (
    MAX,
    MIN,
    ROOT,
    Edge,
    FinitePath,
    OrderedDiagram,
    Vertex,
    all_paths,
    count_paths,
    extreme_path,
    is_valid,
    iter_paths,
    path_at,
    path_position,
    rank_at_depth,
    restrict,
    telescope,
    telescope_path,
    tower_height,
    validate,
)
from bvlab.errors import ClosureViolation, PreconditionError
from randdiag import diagrams, random_diagram


def rules(d):
    return {v.rule for v in validate(d)}


def test_fixtures_are_valid(fixtures):
    for fx in fixtures.values():
        assert validate(fx.diagram) == []


def test_order_rank_gap_is_reported():
    d = OrderedDiagram(1, (1, 1), (Edge(1, 1, 1, 1), Edge(1, 1, 1, 3)))
    assert rules(d) == {"order bijectivity"}


def test_missing_outgoing_edge():
    d = OrderedDiagram.from_incoming([[[1], [1]], [[1, 1]]])
    assert rules(d) == {"s⁻¹(v) ≠ ∅"}
    assert "v1,2" in str(validate(d)[0])


def test_missing_incoming_edge():
    d = OrderedDiagram(1, (1, 2), (Edge(1, 1, 1, 1),))
    assert rules(d) == {"r⁻¹(v) ≠ ∅"}


def test_unknown_vertex_and_bad_root():
    d = OrderedDiagram(1, (1, 1), (Edge(1, 2, 1, 1),))
    assert "vertex index" in rules(d)
    d = OrderedDiagram(1, (2, 1), (Edge(1, 1, 1, 1), Edge(1, 2, 1, 2)))
    assert "r_0 = 1" in rules(d)
    assert not is_valid(d)


def test_vertex_counts_length_checked():
    with pytest.raises(PreconditionError):
        OrderedDiagram(2, (1, 1), ())


def test_path_must_chain():
    with pytest.raises(PreconditionError):
        FinitePath(0, (Edge(1, 1, 1, 1), Edge(3, 1, 1, 1)))
    with pytest.raises(PreconditionError):
        FinitePath(0, (Edge(1, 1, 1, 1), Edge(2, 2, 1, 1)))


def test_odometer_tower_height():
    assert tower_height(corpus.odometer([2, 3], 2), Vertex(2, 1)) == 6
    assert tower_height(corpus.odometer([2], 10), Vertex(10, 1)) == 1024


def test_fibonacci_heights_follow_fibonacci_numbers():
    d = corpus.fibonacci(10)
    fib = [1, 1]
    while len(fib) < 12:
        fib.append(fib[-1] + fib[-2])
    for n in range(1, 11):
        a, b = tower_height(d, Vertex(n, 1)), tower_height(d, Vertex(n, 2))
        assert (a, b) == (fib[n], fib[n - 1])


def test_iter_paths_reverse_lexicographic():
    d = corpus.figure_fragment()
    v = Vertex(4, 1)
    paths = list(iter_paths(d, v))
    assert len(paths) == tower_height(d, v) == len(set(paths))
    keys = [tuple(reversed(p.ranks)) for p in paths]
    assert keys == sorted(keys)


def test_extreme_paths():
    d = corpus.fibonacci(5)
    p = extreme_path(d, Vertex(5, 1), MIN)
    assert all(e.order_rank == 1 for e in p.edges) and p.target == Vertex(5, 1)
    q = extreme_path(d, Vertex(5, 1), MAX)
    assert list(iter_paths(d, Vertex(5, 1)))[-1] == q


@settings(max_examples=60, deadline=None)
@given(diagrams())
def test_count_paths_matches_matrix_product(d):
    prod = np.eye(1, dtype=np.int64)
    for n in range(1, d.depth + 1):
        prod = prod @ d.incidence_matrix(n)
        for v in d.vertices(n):
            assert count_paths(d, ROOT, v) == prod[0, v.index - 1] == tower_height(d, v)


@settings(max_examples=40, deadline=None)
@given(diagrams())
def test_path_position_roundtrip(d):
    for v in d.vertices(d.depth):
        for k, p in enumerate(iter_paths(d, v)):
            assert path_position(d, p) == k
            assert path_at(d, v, k) == p


@settings(max_examples=40, deadline=None)
@given(diagrams())
def test_telescope_counts_and_bijection(d):
    if d.depth < 2:
        return
    kept = [0, d.depth // 2, d.depth]
    t = telescope(d, kept)
    assert validate(t) == []
    for j, (m, n) in enumerate(zip(kept, kept[1:]), start=1):
        prod = np.eye(d.vertex_counts[m], dtype=np.int64)
        for k in range(m + 1, n + 1):
            prod = prod @ d.incidence_matrix(k)
        assert np.array_equal(t.incidence_matrix(j), prod)
    images = [telescope_path(p, kept, t, d) for p in all_paths(d)]
    assert sorted(images, key=str) == sorted(all_paths(t), key=str)


def test_telescope_rejects_bad_levels():
    d = corpus.fibonacci(4)
    for kept in ([1, 2], [0, 2, 2], [0, 5], [0]):
        with pytest.raises(PreconditionError):
            telescope(d, kept)


def test_restrict_two_odometers():
    d = corpus.two_odometers(4)
    r = restrict(d, [[1]] + [[2]] * 4)
    assert r.vertex_counts == (1, 1, 1, 1, 1)
    assert validate(r) == []
    assert tower_height(r, Vertex(4, 1)) == 16


def test_restrict_closure_violation():
    d = corpus.fibonacci(4)
    with pytest.raises(ClosureViolation) as exc:
        restrict(d, [[1], [2], [1, 2], [1, 2], [1, 2]])
    assert exc.value.vertex == Vertex(2, 1)
    with pytest.raises(ClosureViolation):
        restrict(d, [[1], [1, 2], [], [1], [1]])


def test_rank_at_depth_and_truncate():
    d = corpus.figure_fragment()
    assert rank_at_depth(d) == 1
    t = d.truncate(2)
    assert t.depth == 2 and t.vertex_counts == (1, 3, 3)
    assert rank_at_depth(t) == 3


def test_random_generator_limits():
    rng = random.Random(5)
    for _ in range(200):
        d = random_diagram(rng)
        assert d.depth <= 5 and max(d.vertex_counts) <= 4
        counts = itertools.groupby(sorted((e.level, e.source, e.range) for e in d.edges))
        assert max(len(list(g)) for _, g in counts) <= 3
        assert validate(d) == []
