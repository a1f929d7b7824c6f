import json
import subprocess
import sys
from pathlib import Path

import pytest

from bvlab import corpus
from bvlab.cli import parse_path, run
from bvlab.diagram import OrderedDiagram
from bvlab.errors import PreconditionError

GOLDEN = Path(__file__).parent / "golden"


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_render_array_golden(capsys):
    code, out, _ = call(capsys, "render-array", "--fixture", "fibonacci", "--levels", "4", "--radius", "20")
    assert code == 0
    assert out == (GOLDEN / "fibonacci_render.txt").read_text()
    code, rec, _ = call(capsys, "render-array", "--fixture", "fibonacci", "--levels", "4", "--format", "record")
    assert json.loads(rec)["nesting_violations"] == []


def test_output_is_deterministic(capsys):
    runs = [call(capsys, "words", "--fixture", "chacon", "--n", "1", "--L", "5", "--D", "4") for _ in range(2)]
    assert runs[0] == runs[1]


def test_validate_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.diagram"
    bad.write_text(corpus.dumps(corpus.odometer([3], 1)).replace('"order_rank": 3', '"order_rank": 5'))
    code, out, _ = call(capsys, "validate", "--file", str(bad))
    assert code == 1 and "order bijectivity" in out
    code, out, _ = call(capsys, "validate", "--fixture", "chacon")
    assert code == 0 and out.strip() == "valid"


def test_expansive_odometer(capsys):
    code, out, _ = call(capsys, "expansive", "--fixture", "odometer2", "--n", "3", "--L", "16", "--D", "6")
    assert code == 0 and "WitnessPair" in out


def test_domain_error_exit_code(capsys):
    code, _, err = call(capsys, "split", "--fixture", "fibonacci", "--level", "3", "--vertex", "1", "--cut", "1")
    assert code == 1 and "NotACutPosition" in err


def test_usage_errors_exit_two(capsys):
    for argv in (["frobnicate"], ["validate"], ["validate", "--fixture", "x", "--bogus"]):
        with pytest.raises(SystemExit) as exc:
            run(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_split_and_certify_roundtrip(tmp_path, capsys):
    out_file = tmp_path / "split.diagram"
    code, out, _ = call(
        capsys, "split", "--fixture", "fibonacci", "--level", "3", "--vertex", "1", "--cut", "2",
        "--depth", "6", "--output", str(out_file), "--format", "record",
    )
    rec = json.loads(out)
    assert code == 0 and rec["certificate"]["failure"] is None
    orig = tmp_path / "fib.diagram"
    corpus.save(corpus.fibonacci(), orig)
    code, out, _ = call(capsys, "certify", "--file", str(orig), "--against", str(out_file), "--depth", "6")
    assert code == 1 and "rows" in out
    code, out, _ = call(
        capsys, "certify", "--file", str(orig), "--against", str(out_file), "--depth", "6", "--agreement", "2"
    )
    assert code == 0


def test_other_verbs(tmp_path, capsys):
    assert call(capsys, "symbol", "--fixture", "figure", "--vertex", "2,1")[1] == (
        GOLDEN / "figure_symbol.txt"
    ).read_text()
    code, out, _ = call(capsys, "orbit", "--fixture", "odometer2", "--radius", "2")
    assert code == 0 and out.splitlines()[2].endswith("(1,1,1,1,1,1,1,1,1,1)->v10,1")
    code, out, _ = call(capsys, "pair-search", "--fixture", "odometer2", "--n", "2", "--D", "5", "--format", "record")
    assert json.loads(out)["any_common_cut"] is False
    code, out, _ = call(capsys, "odometer-test", "--fixture", "odometer2", "--L", "64", "--format", "record")
    assert json.loads(out)["periods"] == [2, 4, 8, 16, 32]
    code, out, _ = call(capsys, "minimal-count", "--fixture", "two-odometers")
    assert code == 0 and out.startswith("2 minimal")
    code, out, _ = call(capsys, "telescope", "--fixture", "odometer2", "--levels", "0,5,10")
    assert corpus.loads(out).vertex_counts == (1, 1, 1)
    code, out, _ = call(capsys, "restrict", "--fixture", "two-odometers", "--keep", "1;2;2;2;2;2;2")
    assert corpus.loads(out).vertex_counts == (1,) * 7
    code, out, _ = call(capsys, "fixture")
    assert out.split() == corpus.fixture_names()
    code, out, _ = call(capsys, "fixture", "--write", str(tmp_path))
    assert len(list(tmp_path.glob("*.diagram"))) == len(corpus.fixture_names())
    dup = tmp_path / "dup.diagram"
    dup.write_text(corpus.dumps(OrderedDiagram.from_incoming([[[1], [1]], [[1, 2], [2, 1]], [[1, 2]]])))
    code, out, _ = call(capsys, "merge", "--file", str(dup), "--level", "1", "--v", "1", "--w", "2")
    assert code == 0 and "pass" in out


def test_parse_path():
    d = corpus.figure_fragment()
    p = parse_path(d, "(1,1,1,2)->v4,1")
    assert str(p) == "(1,1,1,2)->v4,1"
    with pytest.raises(PreconditionError):
        parse_path(d, "(1,1)->v4,1")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bvlab", "validate", "--fixture", "periodic"], capture_output=True)
    assert res.returncode == 0 and res.stdout.strip() == b"valid"
