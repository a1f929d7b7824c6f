"""Finite-scale evidence for expansiveness, odometer behaviour and minimal sets.

Every search here works on *certified configurations*: windows of the marked
per-column rows that actually occur inside some (D+1)-symbol (or D-symbol
when level D+1 is missing).  Verdicts always carry the scale they were
obtained at; none of them decides an infinite property.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .array import certified_rows, words
from .diagram import OrderedDiagram, Vertex, rank_at_depth, restrict, tower_height
from .errors import ExpansionTooShallow, PreconditionError


# -- configurations -----------------------------------------------------


def configurations(d: OrderedDiagram, levels, width: int, D: int) -> list:
    """Sorted distinct windows ``(row_l for l in levels)`` of ``width`` columns."""
    blocks, _ = certified_rows(d, D, tuple(levels))
    found = set()
    longest = 0
    for rows in blocks:
        size = len(rows[0])
        longest = max(longest, size)
        for k in range(size - width + 1):
            found.add(tuple(r[k : k + width] for r in rows))
    if width > longest:
        raise ExpansionTooShallow(f"window width {width} exceeds longest expansion {longest}")
    return sorted(found)


def _fmt(word):
    return " ".join(str(c) for c in word)


# -- expansiveness ------------------------------------------------------


@dataclass(frozen=True)
class WitnessPair:
    """Two certified configurations whose row-n windows agree but whose
    row-(n+1) entries differ at the centre column."""

    level: int
    center: int
    first: tuple  # (row n window, row n+1 window)
    second: tuple

    def verify(self, d: OrderedDiagram, D: int) -> bool:
        n, L = self.level, len(self.first[0])
        certified = set(configurations(d, (n, n + 1), L, D))
        return (
            self.first in certified
            and self.second in certified
            and self.first[0] == self.second[0]
            and self.first[1][self.center] != self.second[1][self.center]
        )

    def describe(self) -> str:
        return "\n".join(
            [
                f"row {self.level}:     {_fmt(self.first[0])}",
                f"row {self.level + 1} (a): {_fmt(self.first[1])}",
                f"row {self.level + 1} (b): {_fmt(self.second[1])}",
                f"centre column {self.center}",
            ]
        )


@dataclass(frozen=True)
class ExpansivenessVerdict:
    level: int
    length: int
    expansion_level: int
    witness: WitnessPair | None
    configurations_checked: int

    @property
    def injective_at_scale(self) -> bool:
        return self.witness is None

    @property
    def outcome(self) -> str:
        return "InjectiveAtScale" if self.witness is None else "WitnessPair"


def expansiveness_witness(d: OrderedDiagram, n: int, L: int, D: int | None = None) -> ExpansivenessVerdict:
    """Does a row-n window of length L determine the marked row-(n+1) entry at its centre?"""
    D = n + 1 if D is None else D
    if not 0 <= n < D <= d.depth - 1:
        raise PreconditionError(f"need n < D <= depth - 1, got n={n}, D={D}, depth={d.depth}")
    if L < 1:
        raise PreconditionError("L must be positive")
    configs = configurations(d, (n, n + 1), L, D)
    c = L // 2
    groups = {}
    for cfg in configs:
        groups.setdefault(cfg[0], []).append(cfg)
    witness = None
    # lexicographically least pair (a, b), a < b
    for a in configs:
        members = groups[a[0]]
        later = members[members.index(a) + 1 :]
        b = next((b for b in later if b[1][c] != a[1][c]), None)
        if b is not None:
            witness = WitnessPair(n, c, a, b)
            break
    return ExpansivenessVerdict(n, L, D, witness, len(configs))


# -- compatible pairs ---------------------------------------------------


@dataclass(frozen=True)
class CompatiblePair:
    level: int
    center: int
    first: tuple  # rows 0..n+1
    second: tuple
    common_cuts: frozenset  # columns where both carry an (n+1)-cut

    def verify(self, d: OrderedDiagram, D: int) -> bool:
        n, width = self.level, len(self.first[0])
        certified = set(configurations(d, range(n + 2), width, D))
        cuts = frozenset(
            k for k in range(width) if self.first[n + 1][k].checked and self.second[n + 1][k].checked
        )
        return (
            self.first != self.second
            and self.first in certified
            and self.second in certified
            and self.first[: n + 1] == self.second[: n + 1]
            and self.first[n + 1][self.center] != self.second[n + 1][self.center]
            and cuts == self.common_cuts
        )


@dataclass(frozen=True)
class PairSearch:
    level: int
    expansion_level: int
    width: int
    pair: CompatiblePair | None
    pairs_found: int
    common_cut_pair: CompatiblePair | None  # first pair that shares an (n+1)-cut, if any

    @property
    def any_common_cut(self) -> bool:
        return self.common_cut_pair is not None


def compatible_pair_search(d: OrderedDiagram, n: int, D: int | None = None, width: int | None = None) -> PairSearch:
    """Search certified windows for pairs of depth n: rows 0..n equal, row n+1 differing at the centre.

    ``width`` defaults to twice the tallest (n+1)-tower minus one, so every
    window contains a complete (n+1)-symbol.  All pairs at this scale are examined to decide
    whether any of them shares an (n+1)-cut.
    """
    D = n + 1 if D is None else D
    if not (0 <= n and n + 1 <= D <= d.depth):
        raise PreconditionError(f"need n + 1 <= D <= depth, got n={n}, D={D}, depth={d.depth}")
    if width is None:
        width = 2 * max(tower_height(d, v) for v in d.vertices(n + 1)) - 1
    configs = configurations(d, range(n + 2), width, D)
    c = width // 2
    groups = {}
    for cfg in configs:
        groups.setdefault(cfg[: n + 1], []).append(cfg)
    first = None
    common = None
    count = 0
    for key in sorted(groups):
        members = groups[key]
        for a, b in combinations(members, 2):
            if a[n + 1][c] == b[n + 1][c]:
                continue
            cuts = frozenset(k for k in range(width) if a[n + 1][k].checked and b[n + 1][k].checked)
            pair = CompatiblePair(n, c, a, b, cuts)
            count += 1
            if first is None:
                first = pair
            if cuts and common is None:
                common = pair
    return PairSearch(n, D, width, first, count, common)


# -- periodicity --------------------------------------------------------


def smallest_period(word, max_period: int | None = None) -> int | None:
    limit = len(word) if max_period is None else max_period
    for p in range(1, min(limit, len(word)) + 1):
        if all(word[i] == word[i + p] for i in range(len(word) - p)):
            return p
    return None


def eventually_periodic(word, max_period: int):
    """Least (preperiod, period) with period <= max_period whose periodic tail
    is at least 2 * max_period long, or None."""
    word = tuple(word)
    if max_period < 1:
        raise PreconditionError("max_period must be positive")
    if len(word) < 2 * max_period:
        raise PreconditionError("word shorter than 2 * max_period")
    for pre in range(0, len(word) - 2 * max_period + 1):
        p = smallest_period(word[pre:], max_period)
        if p is not None:
            return pre, p
    return None


class LevelPeriodicity(NamedTuple):
    level: int
    period: int | None
    witness: tuple  # offending words when aperiodic


@dataclass(frozen=True)
class OdometerVerdict:
    expansion_level: int
    length: int
    levels: tuple

    @property
    def periods(self) -> list:
        return [lv.period for lv in self.levels]

    @property
    def all_periodic(self) -> bool:
        return all(lv.period is not None for lv in self.levels)

    @property
    def divisibility_chain(self) -> bool:
        ps = self.periods
        return self.all_periodic and all(b % a == 0 for a, b in zip(ps, ps[1:]))

    @property
    def odometer_consistent(self) -> bool:
        return self.all_periodic and self.divisibility_chain


def common_period(ws, max_period: int):
    """Least p such that all words are factors of one p-periodic bi-infinite word."""
    ws = sorted(ws)
    if not ws:
        return None
    for p in range(1, max_period + 1):
        if len(ws) > p:
            continue
        base = ws[0]
        if smallest_period(base, p) is None:
            continue
        cycle = base[:p]
        doubled = cycle * (len(base) // p + 3)
        ok = True
        for w in ws:
            if not any(doubled[s : s + len(w)] == w for s in range(p)):
                ok = False
                break
        if ok:
            return p
    return None


def odometer_test(d: OrderedDiagram, D: int, L: int) -> OdometerVerdict:
    """Check rows 1..D-1 for a common period (words of length L from D-expansions)."""
    if not 2 <= D <= d.depth:
        raise PreconditionError(f"need 2 <= D <= depth, got D={D}")
    levels = []
    for n in range(1, D):
        lang = words(d, n, L, D)
        p = common_period(lang.words, L // 2)
        witness = ()
        if p is None:
            lonely = [w for w in sorted(lang.words) if smallest_period(w, L // 2) is None]
            witness = (lonely[0],) if lonely else tuple(sorted(lang.words)[:2])
        levels.append(LevelPeriodicity(n, p, witness))
    return OdometerVerdict(D, L, tuple(levels))


# -- minimal closed subdiagrams -----------------------------------------


def saturate(d: OrderedDiagram, first_level) -> tuple | None:
    """Family generated by a level-1 vertex set, or None if it is not closed.

    Each level keeps exactly the vertices all of whose incoming edges come from
    the kept vertices below; the family is closed when every level is
    non-empty and every kept vertex below the top has an edge into the next
    kept level.
    """
    fam = [frozenset([1]), frozenset(first_level)]
    if not fam[1]:
        return None
    for n in range(2, d.depth + 1):
        below = fam[-1]
        cur = frozenset(v.index for v in d.vertices(n) if all(s in below for s in d.sources(v)))
        if not cur:
            return None
        fam.append(cur)
    for n in range(1, d.depth):
        above = fam[n + 1]
        for i in fam[n]:
            if not any(e.range in above for e in d.outgoing(Vertex(n, i))):
                return None
    return tuple(fam)


def minimal_closed_subdiagrams(d: OrderedDiagram) -> list:
    """Inclusion-minimal closed families; candidates for supports of minimal sets."""
    r1 = d.vertex_counts[1]
    found = []
    for size in range(1, r1 + 1):
        for subset in combinations(range(1, r1 + 1), size):
            s = frozenset(subset)
            if any(f[1] <= s for f in found):
                continue
            fam = saturate(d, s)
            if fam is not None:
                found.append(fam)
    return found


def _disjoint(a, b):
    return all(not (x & y) for x, y in zip(a[1:], b[1:]))


class BoundReport(NamedTuple):
    count: int
    rank_at_depth: int
    satisfied: bool
    families: int


def minimal_set_bound_check(d: OrderedDiagram) -> BoundReport:
    """Largest pairwise-disjoint (above level 0) set of minimal families vs rank."""
    fams = minimal_closed_subdiagrams(d)
    best = 0
    for k in range(len(fams), 0, -1):
        if any(all(_disjoint(a, b) for a, b in combinations(group, 2)) for group in combinations(fams, k)):
            best = k
            break
    K = rank_at_depth(d)
    return BoundReport(best, K, best <= K, len(fams))


# -- fixture behaviour --------------------------------------------------


class Check(NamedTuple):
    holds: bool
    detail: str


def expected_behaviour(d: OrderedDiagram, kind: str) -> Check:
    """Small-scale check of a fixture's declared behaviour."""
    if kind == "expansive":
        for n in range(1, 4):
            for L in (2, 4, 8, 16, 32):
                D = min(n + 5, d.depth - 1)
                if D <= n:
                    continue
                try:
                    v = expansiveness_witness(d, n, L, D)
                except ExpansionTooShallow:
                    continue
                # a shallow scan only counts once deeper expansions add no new windows
                saturated = configurations(d, (n, n + 1), L, D - 1) == configurations(d, (n, n + 1), L, D)
                if v.injective_at_scale and saturated:
                    return Check(True, f"InjectiveAtScale at n={n}, L={L}, D={D}")
        return Check(False, "no injective scale found for n <= 3, L <= 32")
    if kind == "odometer":
        # each minimal component on its own: rows of a disjoint union are not periodic
        periods = []
        for fam in minimal_closed_subdiagrams(d):
            sub = restrict(d, fam)
            D = min(sub.depth - 1, 6)
            L = 2 * max(tower_height(sub, v) for v in sub.vertices(D - 1))
            try:
                v = odometer_test(sub, D, L)
            except ExpansionTooShallow as exc:
                return Check(False, str(exc))
            if not v.odometer_consistent:
                return Check(False, f"periods {v.periods}")
            periods.append(v.periods)
        return Check(True, f"periods {periods}")
    if kind == "periodic":
        D = min(d.depth, 4)
        v = odometer_test(d, D, 2)
        return Check(v.all_periodic and all(p == 1 for p in v.periods), f"periods {v.periods}")
    if kind == "proximal":
        fams = minimal_closed_subdiagrams(d)
        ok = len(fams) == 1 and all(len(level) == 1 for level in fams[0])
        if ok:
            inj = expected_behaviour(d, "expansive")
            return Check(inj.holds, "unique fixed-point family; " + inj.detail)
        return Check(False, f"{len(fams)} minimal families")
    raise PreconditionError(f"unknown behaviour {kind!r}")
