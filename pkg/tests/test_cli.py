import csv
import json
from importlib import resources

import jsonschema
import pytest

import fermatq.parallel as par
from fermatq.cli import main, wieferich_zeros


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("fermatq").joinpath("data/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_matrix_p3(capsys):
    code, out, _ = run(capsys, "matrix", "--p", "3")
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["row", "1", "2"]
    assert rows[1] == ["inv", "1", "2"]
    assert [r[1:] for r in rows[2:]] == [["0", "1"], ["2", "2"], ["1", "0"]]


def test_matrix_t1_json(capsys, tables, schema):
    code, out, _ = run(capsys, "matrix", "--p", "11", "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    t = tables(11)
    assert doc["results"]["rows"] == [t.row(a) for a in range(11)]
    assert doc["results"]["inverses"] == [1, 6, 4, 3, 9, 2, 8, 7, 5, 10]


def test_matrix_size_guard(capsys):
    code, _, err = run(capsys, "matrix", "--p", "10007")
    assert code == 2 and "--force" in err


@pytest.mark.parametrize("p", ["0", "1", "2", "9", "-7", "2147483659"])
def test_invalid_prime(capsys, p):
    code, _, err = run(capsys, "matrix", "--p", p)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("table", ["T1", "A11", "A12", "A2", "all"])
def test_repro(capsys, schema, table):
    code, out, err = run(capsys, "repro", "--table", table)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    assert all(r["ok"] and r["mismatches"] == 0 for r in doc["results"])


def test_repro_mismatch_exit_code(capsys, monkeypatch):
    import fermatq.repro as repro

    real = repro.load_fixtures

    def broken():
        fx = real()
        fx["A11"]["rows"][0]["count"] += 1
        return fx

    monkeypatch.setattr(repro, "load_fixtures", broken)
    code, _, err = run(capsys, "repro", "--table", "A11")
    assert code == 1
    assert "row1.count" in err


@pytest.mark.parametrize("argv", [
    ("pattern-count", "--p", "101", "--sigma", "2,3,1", "--vectors", "10,6;1,6;2,6"),
    ("perm-sweep", "--p", "31", "--vectors", "0,0;1,2;3,-1"),
    ("line-mean", "--p", "101", "--c", "2.5", "--d", "0.3"),
    ("line-mean", "--p", "101"),
    ("expsum", "--p", "31", "--vectors", "1,-2;0,3", "--h", "1,2"),
    ("expsum", "--p", "31", "--m", "3", "--y", "200"),
    ("discrepancy", "--p", "31", "--vectors", "0,0;1,2", "--H", "4", "--L", "3"),
    ("zeros", "--pmax", "50"),
])
def test_json_reports_validate(capsys, schema, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    jsonschema.validate(json.loads(out), schema)


def test_pattern_count_values(capsys):
    code, out, _ = run(capsys, "pattern-count", "--p", "101", "--sigma", "1,2", "--vectors", "0,0;0,1")
    r = json.loads(out)["results"]
    assert r["region_card"] == 101 * 99
    assert r["count"] + r["tie_count"] <= r["region_card"]


def test_bad_sigma(capsys):
    code, _, err = run(capsys, "pattern-count", "--p", "11", "--sigma", "1,1", "--vectors", "0,0;0,1")
    assert code == 2


def test_expsum_needs_h(capsys):
    with pytest.raises(SystemExit):
        main(["expsum", "--p", "11", "--vectors", "0,0"])


@pytest.mark.parametrize("fig, n", [("fig4-2", 7256), ("fig2-1", 14360)])
def test_figure_point_sets(tmp_path, capsys, tables, fig, n):
    code, _, _ = run(capsys, "figures", "--id", fig, "--out", str(tmp_path))
    assert code == 0
    stem = fig.replace("-", "_")
    d = list(csv.reader((tmp_path / f"{stem}_D.csv").read_text().splitlines()))
    x = list(csv.reader((tmp_path / f"{stem}_X.csv").read_text().splitlines()))
    assert len(d) - 1 == n == len(x) - 1


def test_figure_matches_count(tmp_path, capsys, tables):
    from fermatq.repro import load_fixtures

    row = load_fixtures()["A12"]["rows"][0]
    run(capsys, "figures", "--id", "fig3-1", "--out", str(tmp_path))
    lines = (tmp_path / "fig3_1_D.csv").read_text().splitlines()
    assert len(lines) - 1 == row["count"]


def test_fig1(tmp_path, capsys):
    code, _, _ = run(capsys, "figures", "--id", "fig1", "--line", "1,0", "--line", "2.5,0.3",
                     "--samples", "50", "--p", "11", "--out", str(tmp_path))
    assert code == 0
    assert len((tmp_path / "fig1_lines.csv").read_text().splitlines()) == 101
    assert len((tmp_path / "fig1_point.csv").read_text().splitlines()) == 11


def test_fig1_needs_line(tmp_path, capsys):
    code, _, err = run(capsys, "figures", "--id", "fig1", "--out", str(tmp_path))
    assert code == 2 and "--line" in err


def test_unknown_figure(tmp_path, capsys):
    code, _, err = run(capsys, "figures", "--id", "fig9-1", "--out", str(tmp_path))
    assert code == 2 and "unknown figure" in err


def test_zeros_small():
    res = {r["p"]: r for r in wieferich_zeros(3, 11, 10)}
    assert res[11]["zeros"] == [3, 9]
    assert not res[11]["wieferich"]


def test_zeros_wieferich():
    res = wieferich_zeros(1000, 3600, 2)
    assert [r["p"] for r in res] == [1093, 3511]
    assert all(r["wieferich"] for r in res)


@pytest.mark.parametrize("argv", [
    ("perm-sweep", "--p", "101", "--vectors", "3,-2;0,5;-4,1"),
    ("expsum", "--p", "101", "--vectors", "3,-2;0,5;-4,1", "--h", "1,-1,2"),
    ("discrepancy", "--p", "101", "--vectors", "0,0;1,2", "--H", "5"),
    ("repro", "--table", "all"),
])
def test_thread_count_invariance(tmp_path, monkeypatch, argv):
    monkeypatch.setattr(par, "CHUNK_CELLS", 700)
    blobs = set()
    for w in (1, 4, 16):
        out = tmp_path / f"r{w}.json"
        assert main([*argv, "--threads", str(w), "--out", str(out)]) == 0
        blobs.add(out.read_bytes())
    assert len(blobs) == 1


def test_figure_thread_invariance(tmp_path, monkeypatch):
    monkeypatch.setattr(par, "CHUNK_CELLS", 700)
    blobs = set()
    for w in (1, 4, 16):
        d = tmp_path / str(w)
        main(["figures", "--id", "fig4-1", "--threads", str(w), "--out", str(d)])
        blobs.add((d / "fig4_1_X.csv").read_bytes() + (d / "fig4_1_D.csv").read_bytes())
    assert len(blobs) == 1
