import io
import subprocess
import sys
from fractions import Fraction

import pytest

from rnalign.align_dp import align
from rnalign.cli import annotate, format_score, parse_tsv, run
from rnalign.rna_model import read_structure


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def call(argv):
    out = io.StringIO()
    code = run(argv, out=out)
    return code, out.getvalue()


def test_exact_hit(files):
    pat = files("pat.struct", ">pat\nAU\n()\n")
    txt = files("txt.struct", ">txt\nGCAUGC\n#pairs\n1 6\n3 4\n")
    assert call(["exact", "-1", pat, "-2", txt]) == (0, "3\n")


def test_exact_miss(files):
    pat = files("pat.struct", ">pat\nAU\n()\n")
    txt = files("txt.struct", ">txt\nAUAU\n....\n")
    assert call(["exact", "-1", pat, "-2", txt]) == (1, "")


def test_fit_tsv_matches_library(files):
    a = files("a.struct", ">a\nGGAC\n(..)\n")
    b = files("b.struct", ">b\nUUGGACUAGCCU\n((.(..)..).)\n")
    code, out = call(["fit", "-1", a, "-2", b, "--format", "tsv"])
    assert code == 0
    rec = parse_tsv(out)
    lib = align(read_structure(a), read_structure(b), "fit")
    assert rec["score"] == lib.score
    assert rec["region2"] == lib.region2
    assert rec["gap_count"] == lib.gap_count
    assert (rec["row1"], rec["row2"]) == (lib.row1, lib.row2)
    assert rec["mode"] == "fit" and rec["name1"] == "a"


def test_tsv_field_order(files):
    a = files("a.struct", ">a\nGA\n..\n")
    code, out = call(["global", "-1", a, "-2", a, "--format", "tsv"])
    keys = [line.split("\t")[0] for line in out.splitlines()]
    assert keys == [
        "mode", "name1", "name2", "score", "region1", "region2",
        "gap_count", "row1", "struct1", "struct2", "row2",
    ]


def test_text_output_layout(files):
    a = files("a.struct", ">a\nGAC\n(.)\n")
    b = files("b.struct", ">b\nGAAC\n(..)\n")
    code, out = call(["global", "-1", a, "-2", b])
    assert code == 0
    body = out.split("\n\n")[1].splitlines()
    assert len(body) == 5
    assert body[0].replace("-", "") == "GAC"
    assert body[4] == "GAAC"
    assert set(body[2]) <= {"|", " "}
    assert "score    " in out


def test_all_ends(files):
    a = files("a.struct", ">a\nA\n.\n")
    b = files("b.struct", ">b\nCACA\n....\n")
    code, out = call(["fit", "-1", a, "-2", b, "--all-ends", "--format", "tsv"])
    assert parse_tsv(out)["ends"] == "2,4"


def test_scheme_file(files):
    a = files("a.struct", ">a\nA\n.\n")
    scheme = files("s.scheme", "base_match = 7\n")
    code, out = call(["global", "-1", a, "-2", a, "--scheme", scheme, "--format", "tsv"])
    assert parse_tsv(out)["score"] == 7


def test_bad_scheme_reports_line(files, capsys):
    a = files("a.struct", ">a\nA\n.\n")
    scheme = files("s.scheme", "# comment\ngap_open = -1\n")
    code, _ = call(["local", "-1", a, "-2", a, "--scheme", scheme])
    assert code == 2
    err = capsys.readouterr().err
    assert "s.scheme" in err and "line 2" in err and "g must be positive" in err


def test_bad_structure_reports_line(files, capsys):
    bad = files("bad.struct", ">x\nACGU\n(.((\n")
    code, _ = call(["exact", "-1", bad, "-2", bad])
    assert code == 2
    err = capsys.readouterr().err
    assert "bad.struct" in err and "line 3" in err and "unbalanced" in err


def test_missing_file(capsys):
    assert call(["global", "-1", "/nonexistent/x", "-2", "/nonexistent/y"])[0] == 2
    assert "cannot read" in capsys.readouterr().err


def test_fit_empty_is_input_error(files):
    empty = files("e.struct", ">e\n\n")
    a = files("a.struct", ">a\nA\n.\n")
    assert call(["fit", "-1", empty, "-2", a])[0] == 2


def test_strict_pairs_warns(files, capsys):
    a = files("a.struct", ">a\nAA\n()\n")
    assert call(["global", "-1", a, "-2", a, "--strict-pairs"])[0] == 0
    assert "non-canonical" in capsys.readouterr().err
    call(["global", "-1", a, "-2", a])
    assert capsys.readouterr().err == ""


def test_oracle_is_hidden_but_works(files, capsys):
    with pytest.raises(SystemExit):
        run(["--help"])
    assert "oracle" not in capsys.readouterr().out
    a = files("a.struct", ">a\nGAC\n(.)\n")
    assert call(["oracle", "-1", a, "-2", a, "--mode", "local"]) == (0, "score\t7.0\n")


def test_format_score():
    assert format_score(Fraction(-7, 2)) == "-3.5"
    assert format_score(4) == "4.0"
    assert format_score(Fraction(-1, 2)) == "-0.5"
    assert format_score(0) == "0.0"
    with pytest.raises(ValueError):
        format_score(Fraction(1, 3))


def test_annotation_marks_unmatched_pair_ends():
    from rnalign.rna_model import make_structure

    r1 = make_structure("GAC", [(1, 3)])
    r2 = make_structure("GAC")
    res = align(r1, r2, "global")
    assert set(annotate(res, r1, 0)) <= {"<", ">", ".", "-"}
    assert "(" not in annotate(res, r1, 0)


def test_module_entry_point(files):
    pat = files("pat.struct", ">pat\nAU\n()\n")
    proc = subprocess.run(
        [sys.executable, "-m", "rnalign", "exact", "-1", pat, "-2", pat],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "1\n"
