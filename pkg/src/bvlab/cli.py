"""Command-line front end: ``bvlab VERB [--file PATH | --fixture NAME] [flags]``.

Exit codes: 0 success, 1 domain error (the error is printed on stderr),
2 usage error.  ``--format record`` switches to JSON output.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import analysis, array, corpus, diagram, transform, vershik
from .diagram import FinitePath, OrderedDiagram, Vertex
from .errors import BVError, PreconditionError

DEFAULT_RADIUS = 20
DEFAULT_L = 16


# -- argument helpers ---------------------------------------------------


def parse_vertex(text: str, level: int | None = None) -> Vertex:
    """``"3,1"`` or ``"v3,1"``; a bare index needs ``level``."""
    t = text.strip().lstrip("v")
    if "," in t:
        a, b = t.split(",")
        return Vertex(int(a), int(b))
    if level is None:
        raise PreconditionError(f"vertex {text!r} needs the form LEVEL,INDEX")
    return Vertex(level, int(t))


_PATH_RE = re.compile(r"^\(([\d,\s]*)\)\s*->\s*v?(\d+)\s*,\s*(\d+)$")


def parse_path(d: OrderedDiagram, text: str) -> FinitePath:
    """Parse the printed form ``(r1,...,rN)->vN,i`` of a level-0 path."""
    m = _PATH_RE.match(text.strip())
    if not m:
        raise PreconditionError(f"cannot parse path {text!r}; expected (r1,...,rN)->vN,i")
    ranks = [int(r) for r in m.group(1).split(",") if r.strip()]
    target = Vertex(int(m.group(2)), int(m.group(3)))
    if len(ranks) != target.level or not 1 <= target.level <= d.depth:
        raise PreconditionError(f"path {text!r} needs one rank per level 1..{target.level}")
    if not 1 <= target.index <= d.vertex_counts[target.level]:
        raise PreconditionError(f"no vertex {target}")
    edges = []
    w = target
    for r in reversed(ranks):
        inc = d.incoming(w)
        if not 1 <= r <= len(inc):
            raise PreconditionError(f"rank {r} out of range at {w}")
        e = inc[r - 1]
        edges.append(e)
        w = e.source_vertex
    return FinitePath(0, tuple(reversed(edges)))


def parse_extremes(text: str | None):
    if not text:
        return None
    out = {}
    for item in text.split(","):
        a, b = item.split(":")
        out[int(a)] = int(b)
    return out


def _point(d, args):
    tail = {"min": vershik.MinimalTail, "max": vershik.MaximalTail}[args.tail]
    if args.path:
        return vershik.PointApprox(parse_path(d, args.path), tail)
    return diagram.extreme_path(d, Vertex(d.depth, 1), diagram.MIN)


def load_input(args) -> OrderedDiagram:
    if args.file:
        return corpus.load(args.file)
    return corpus.load_fixture(args.fixture).diagram


def _emit(args, text: str, record):
    if args.format == "record":
        sys.stdout.write(json.dumps(record, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _word(w):
    return " ".join(str(c) for c in w)


def _cfg(cfg):
    return [[str(c) for c in row] for row in cfg]


# -- verbs --------------------------------------------------------------


def cmd_validate(args):
    d = load_input(args)
    problems = diagram.validate(d)
    text = "valid" if not problems else "\n".join(str(p) for p in problems)
    _emit(args, text, {"valid": not problems, "violations": [p._asdict() for p in problems]})
    return 0 if not problems else 1


def cmd_telescope(args):
    d = load_input(args)
    kept = [int(x) for x in args.levels.split(",")]
    t = diagram.telescope(d, kept)
    if args.output:
        corpus.save(t, args.output)
    _emit(args, corpus.dumps(t), json.loads(corpus.dumps(t)))
    return 0


def cmd_orbit(args):
    d = load_input(args)
    paths = vershik.orbit(d, _point(d, args), args.radius, parse_extremes(args.extremes))
    rows = [(i, p) for i, p in zip(range(-args.radius, args.radius + 1), paths)]
    _emit(args, "\n".join(f"{i:>4} {p}" for i, p in rows), [{"i": i, "path": str(p)} for i, p in rows])
    return 0


def cmd_render_array(args):
    d = load_input(args)
    w = array.array_window(d, _point(d, args), args.levels, args.radius, parse_extremes(args.extremes))
    record = {
        "radius": w.radius,
        "rows": {str(n): [str(c) for c in w.rows[n].cells] for n in range(w.top + 1)},
        "nesting_violations": [list(v) for v in array.nesting_violations(w)],
    }
    _emit(args, array.render_window(d, w), record)
    return 0


def cmd_symbol(args):
    d = load_input(args)
    v = parse_vertex(args.vertex)
    sym = array.n_symbol(d, v)
    record = {"vertex": str(v), "rows": [[str(u) for u in row] for row in sym.rows]}
    _emit(args, array.render_symbol(d, v), record)
    return 0


def cmd_words(args):
    d = load_input(args)
    D = args.n + 1 if args.D is None else args.D
    lang = array.words(d, args.n, args.L, D)
    words = sorted(lang.unmarked()) if args.unmarked else sorted(lang.words)
    header = f"{len(words)} words of length {args.L} in row {args.n} (D={D})"
    if lang.interior_only:
        header += " [interior only: level D+1 missing]"
    text = "\n".join([header] + [" ".join(map(str, w)) for w in words])
    _emit(args, text, {"n": args.n, "L": args.L, "D": D, "interior_only": lang.interior_only,
                       "words": [[str(c) for c in w] for w in words]})
    return 0


def cmd_expansive(args):
    d = load_input(args)
    v = analysis.expansiveness_witness(d, args.n, args.L, args.D)
    head = f"n={v.level} L={v.length} D={v.expansion_level}: {v.outcome} ({v.configurations_checked} configurations)"
    text = head if v.witness is None else head + "\n" + v.witness.describe()
    record = {"n": v.level, "L": v.length, "D": v.expansion_level, "outcome": v.outcome,
              "configurations": v.configurations_checked,
              "witness": None if v.witness is None else {"center": v.witness.center,
                                                         "first": _cfg(v.witness.first),
                                                         "second": _cfg(v.witness.second)}}
    _emit(args, text, record)
    return 0


def cmd_pair_search(args):
    d = load_input(args)
    s = analysis.compatible_pair_search(d, args.n, args.D, args.width)
    lines = [f"n={s.level} D={s.expansion_level} width={s.width}: {s.pairs_found} pairs"]
    if s.pair is not None:
        lines.append(f"first pair, rows 0..{s.level + 1}, centre {s.pair.center}:")
        for k, (a, b) in enumerate(zip(s.pair.first, s.pair.second)):
            lines.append(f"  row {k} (a): {_word(a)}")
            if a != b:
                lines.append(f"  row {k} (b): {_word(b)}")
        lines.append("common (n+1)-cut: " + ("yes" if s.any_common_cut else "none"))
    record = {"n": s.level, "D": s.expansion_level, "width": s.width, "pairs": s.pairs_found,
              "any_common_cut": s.any_common_cut,
              "pair": None if s.pair is None else {"first": _cfg(s.pair.first), "second": _cfg(s.pair.second)}}
    _emit(args, "\n".join(lines), record)
    return 0


def cmd_odometer_test(args):
    d = load_input(args)
    D = min(d.depth, 6) if args.D is None else args.D
    v = analysis.odometer_test(d, D, args.L)
    lines = [f"D={D} L={args.L}"]
    for lv in v.levels:
        if lv.period is None:
            lines.append(f"  row {lv.level}: aperiodic, witness {_word(lv.witness[0])}")
        else:
            lines.append(f"  row {lv.level}: period {lv.period}")
    lines.append(f"divisibility chain: {v.divisibility_chain}; odometer-consistent: {v.odometer_consistent}")
    record = {"D": D, "L": args.L, "periods": v.periods, "divisibility_chain": v.divisibility_chain,
              "odometer_consistent": v.odometer_consistent}
    _emit(args, "\n".join(lines), record)
    return 0


def _rewrite_output(args, d_new, cert):
    if args.output:
        corpus.save(d_new, args.output)
    text = cert.summary() + "\n" + corpus.dumps(d_new)
    _emit(args, text, {"diagram": json.loads(corpus.dumps(d_new)), "certificate": cert.to_record()})
    return 0


def cmd_merge(args):
    d = load_input(args)
    m = args.level
    d_new, cert = transform.merge_vertices(
        d, m, parse_vertex(args.v, m), parse_vertex(args.w, m), args.depth
    )
    return _rewrite_output(args, d_new, cert)


def cmd_split(args):
    d = load_input(args)
    m = args.level
    d_new, cert = transform.split_vertex(d, m, parse_vertex(args.vertex, m), args.cut, args.depth)
    return _rewrite_output(args, d_new, cert)


def cmd_certify(args):
    d = load_input(args)
    other = corpus.load(args.against)
    N = min(d.depth, other.depth) if args.depth is None else args.depth
    cert = transform.verify_certificate(d, other, N, agreement_level=args.agreement)
    _emit(args, cert.summary(), cert.to_record())
    return 0 if cert.passed else 1


def cmd_restrict(args):
    d = load_input(args)
    kept = [[int(x) for x in part.split(",") if x.strip()] for part in args.keep.split(";")]
    r = diagram.restrict(d, kept)
    if args.output:
        corpus.save(r, args.output)
    _emit(args, corpus.dumps(r), json.loads(corpus.dumps(r)))
    return 0


def cmd_minimal_count(args):
    d = load_input(args)
    fams = analysis.minimal_closed_subdiagrams(d)
    rep = analysis.minimal_set_bound_check(d)
    lines = [f"{len(fams)} minimal closed subdiagram candidates"]
    for k, fam in enumerate(fams, start=1):
        lines.append(f"  {k}: " + " | ".join(",".join(map(str, sorted(level))) for level in fam[1:]))
    lines.append(
        f"largest disjoint collection {rep.count} <= rank at depth {rep.rank_at_depth}: {rep.satisfied}"
    )
    record = {"families": [[sorted(level) for level in fam] for fam in fams], "disjoint": rep.count,
              "rank_at_depth": rep.rank_at_depth, "satisfied": rep.satisfied}
    _emit(args, "\n".join(lines), record)
    return 0


def cmd_fixture(args):
    if args.write:
        paths = corpus.write_fixture_files(args.write)
        _emit(args, "\n".join(str(p) for p in paths), [str(p) for p in paths])
        return 0
    if not args.name:
        names = corpus.fixture_names()
        _emit(args, "\n".join(names), names)
        return 0
    fx = corpus.load_fixture(args.name)
    _emit(args, corpus.dumps(fx.diagram), {
        "name": fx.name, "rank_at_depth": fx.rank_at_depth,
        "essentially_simple": fx.essentially_simple, "expected": fx.expected,
        "diagram": json.loads(corpus.dumps(fx.diagram)),
    })
    return 0


# -- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bvlab", description="Ordered Bratteli diagrams and their Vershik maps.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="diagram file (JSON)")
    src.add_argument("--fixture", help="shipped fixture name (directory overridable via BV_LAB_FIXTURES)")
    common.add_argument("--format", choices=("text", "record"), default="text", help="output mode (default text)")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--path", help="starting path (r1,...,rN)->vN,i; default: minimal path into vD,1")
    point.add_argument("--tail", choices=("min", "max"), default="min", help="extension of a short path")
    point.add_argument("--radius", type=int, default=DEFAULT_RADIUS, help=f"default {DEFAULT_RADIUS}")
    point.add_argument("--extremes", help="bijection of maximal to minimal top vertices, e.g. 1:2,2:1")

    def verb(name, func, helptext, parents=(common,)):
        s = sub.add_parser(name, parents=list(parents), help=helptext, description=helptext)
        s.set_defaults(func=func)
        return s

    verb("validate", cmd_validate, "check structural validity")
    s = verb("telescope", cmd_telescope, "telescope to the given levels")
    s.add_argument("--levels", required=True, help="kept levels, e.g. 0,2,4")
    s.add_argument("--output")
    verb("orbit", cmd_orbit, "list phi^i(x) for |i| <= radius", (common, point))
    s = verb("render-array", cmd_render_array, "ASCII array window", (common, point))
    s.add_argument("--levels", type=int, default=None, help="top row (default: depth)")
    s = verb("symbol", cmd_symbol, "render the n-symbol of a vertex")
    s.add_argument("--vertex", required=True, help="LEVEL,INDEX")
    s = verb("words", cmd_words, "certified row words")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--L", type=int, default=DEFAULT_L, help=f"default {DEFAULT_L}")
    s.add_argument("--D", type=int, default=None, help="expansion level (default n+1)")
    s.add_argument("--unmarked", action="store_true", help="drop check marks")
    s = verb("expansive", cmd_expansive, "expansiveness witness search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--L", type=int, default=DEFAULT_L, help=f"default {DEFAULT_L}")
    s.add_argument("--D", type=int, default=None, help="expansion level (default n+1)")
    s = verb("pair-search", cmd_pair_search, "search for compatible pairs of depth n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--D", type=int, default=None, help="expansion level (default n+1)")
    s.add_argument("--width", type=int, default=None, help="window width (default 2 max l(V_{n+1}) - 1)")
    s = verb("odometer-test", cmd_odometer_test, "periodicity of rows 1..D-1")
    s.add_argument("--D", type=int, default=None, help="expansion level (default min(depth, 6))")
    s.add_argument("--L", type=int, default=DEFAULT_L, help=f"default {DEFAULT_L}")
    s = verb("merge", cmd_merge, "identify two vertices of a level")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--v", required=True, help="vertex kept (index or LEVEL,INDEX)")
    s.add_argument("--w", required=True, help="vertex merged into it")
    s.add_argument("--depth", type=int, default=None, help="certificate depth")
    s.add_argument("--output")
    s = verb("split", cmd_split, "split a vertex's symbol at a cut")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--vertex", required=True)
    s.add_argument("--cut", type=int, required=True, help="column of an (m-1)-cut inside the symbol")
    s.add_argument("--depth", type=int, default=None, help="certificate depth")
    s.add_argument("--output")
    s = verb("certify", cmd_certify, "positional isomorphism certificate against another diagram")
    s.add_argument("--against", required=True, help="second diagram file")
    s.add_argument("--depth", type=int, default=None)
    s.add_argument("--agreement", type=int, default=None, help="row agreement level (default depth)")
    s = verb("restrict", cmd_restrict, "restrict to kept vertices")
    s.add_argument("--keep", required=True, help="indices per level separated by ';', e.g. '1;1,2;2'")
    s.add_argument("--output")
    verb("minimal-count", cmd_minimal_count, "minimal closed subdiagrams vs rank")
    s = sub.add_parser("fixture", help="list shipped fixtures; with a name, print one")
    s.add_argument("name", nargs="?")
    s.add_argument("--write", metavar="DIR", help="write every fixture file into DIR")
    s.add_argument("--format", choices=("text", "record"), default="text")
    s.set_defaults(func=cmd_fixture)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        return args.func(args)
    except BVError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
