import json

import pytest

from quditmbqc.cli import build_parser, main


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    records = [json.loads(line) for line in out.splitlines() if line.strip()]
    return code, records, err


@pytest.fixture
def path_files(tmp_path):
    graph = tmp_path / "path.graph"
    graph.write_text("# three-vertex path\nd=3 n=3\n0 1\n1 2\n")
    pattern = tmp_path / "path.pattern"
    pattern.write_text("measure 0 a=0.1,0.2,0.3\nmeasure 1 a=1 fc=2\n")
    return graph, pattern


def test_records_have_required_keys(capsys):
    code, records, _ = run(capsys, ["verify", "--suite", "identities", "--dim", "3"])
    assert code == 0
    assert records
    for rec in records:
        assert {"check", "dim", "residual", "pass"} <= rec.keys()
        assert rec["dim"] == 3 and rec["pass"] and rec["residual"] >= 0
    names = [r["check"] for r in records]
    assert names == sorted(names)


def test_verify_all_qubit(capsys):
    code, records, _ = run(capsys, ["verify", "--suite", "all", "--dim", "2"])
    assert code == 0
    assert {r["check"].split(".")[0] for r in records} >= {"mub", "clifford", "stabilizer"}


@pytest.mark.parametrize("suite", ["mub", "clifford"])
def test_verify_non_prime_is_an_error(capsys, suite):
    code, records, err = run(capsys, ["verify", "--suite", suite, "--dim", "4"])
    assert code == 2 and not records
    assert "prime" in err


def test_verify_stabilizer_non_prime_is_fine(capsys):
    code, _, _ = run(capsys, ["verify", "--suite", "stabilizer", "--dim", "4"])
    assert code == 0


def test_unknown_suite_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "--suite", "bogus", "--dim", "3"])


def test_tiny_tolerance_fails_checks(capsys):
    code, records, _ = run(capsys, ["verify", "--suite", "mub", "--dim", "5", "--tolerance", "1e-30"])
    assert code == 1
    assert any(not r["pass"] for r in records)


def test_tolerance_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("QC_TOLERANCE", "1e-30")
    code, _, _ = run(capsys, ["verify", "--suite", "mub", "--dim", "3"])
    assert code == 1
    monkeypatch.setenv("QC_TOLERANCE", "abc")
    code, _, err = run(capsys, ["verify", "--suite", "mub", "--dim", "3"])
    assert code == 2 and "QC_TOLERANCE" in err


def test_bad_dimension(capsys):
    code, _, _ = run(capsys, ["verify", "--suite", "identities", "--dim", "1"])
    assert code == 2


def test_run_pattern_path(capsys, path_files):
    graph, pattern = path_files
    code, records, _ = run(capsys, ["run-pattern", str(graph), str(pattern)])
    assert code == 0
    assert len(records) == 9
    assert sorted(tuple(r["outcomes"]) for r in records) == [(i, j) for i in range(3) for j in range(3)]
    assert sum(r["probability"] for r in records) == pytest.approx(1.0)
    assert all(r["pass"] and r["frame"][0][2] in (1, 2) for r in records)


def test_run_pattern_sampled(capsys, path_files):
    graph, pattern = path_files
    code, records, _ = run(capsys, ["run-pattern", str(graph), str(pattern), "--mode", "sampled", "--seed", "4"])
    assert code == 0 and len(records) == 1


def test_run_pattern_malformed_edge(capsys, tmp_path, path_files):
    _, pattern = path_files
    graph = tmp_path / "bad.graph"
    graph.write_text("d=3 n=3\n0 1\n1 two\n")
    code, _, err = run(capsys, ["run-pattern", str(graph), str(pattern)])
    assert code == 2
    assert "line 3:" in err


def test_run_pattern_malformed_pattern(capsys, tmp_path, path_files):
    graph, _ = path_files
    pattern = tmp_path / "bad.pattern"
    pattern.write_text("measure 0 a=0\nteleport 1\n")
    code, _, err = run(capsys, ["run-pattern", str(graph), str(pattern)])
    assert code == 2 and "line 2:" in err


def test_run_pattern_obstructed_topology(capsys, tmp_path):
    # two three-vertex rows whose middle vertices share a central neighbour
    graph = tmp_path / "central.graph"
    graph.write_text("d=3 n=7\n0 1\n1 2\n4 5\n5 6\n1 3\n3 5\n")
    pattern = tmp_path / "rows.pattern"
    pattern.write_text("measure 0 a=0\nmeasure 4 a=0\nmeasure 1 a=0\nmeasure 5 a=0\n")
    code, _, err = run(capsys, ["run-pattern", str(graph), str(pattern)])
    assert code == 2
    assert "path" in err or "wire" in err


def test_run_pattern_dimension_mismatch(capsys, path_files):
    graph, pattern = path_files
    code, _, _ = run(capsys, ["run-pattern", str(graph), str(pattern), "--dim", "5"])
    assert code == 2


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, ["run-pattern", str(tmp_path / "none"), str(tmp_path / "none")])
    assert code == 2


def test_dj(capsys):
    code, records, _ = run(capsys, ["dj", "--dim", "3", "--a", "1", "--b", "2"])
    assert code == 0
    by_check = {r["check"]: r for r in records}
    assert by_check["dj.reference"]["recovered"] == [1, 2]
    assert by_check["dj.cluster"]["agreement"] is True
    assert by_check["dj.cluster"]["branches"] == 81


def test_dj_trivial_qubit(capsys):
    code, records, _ = run(capsys, ["dj", "--dim", "2", "--a", "0", "--b", "0"])
    assert code == 0 and records[0]["recovered"] == [0, 0]


def test_dj_exhaustive_d5(capsys):
    code, records, _ = run(capsys, ["dj", "--dim", "5", "--a", "4", "--b", "3", "--mode", "exhaustive"])
    assert code == 0
    assert records[1]["branches"] == 625 and records[1]["recovered"] == [[4, 3]]


def test_dj_out_of_range(capsys):
    code, _, err = run(capsys, ["dj", "--dim", "3", "--a", "3", "--b", "0"])
    assert code == 2 and "a=3" in err


@pytest.mark.parametrize("gate,k,steps", [("Z", None, 2), ("X", None, 2), ("ZX", "2", 4)])
def test_compile_gate(capsys, gate, k, steps):
    argv = ["compile-gate", "--dim", "3", "--gate", gate]
    if k:
        argv += ["--k", k]
    code, records, _ = run(capsys, argv)
    assert code == 0
    assert records[0]["steps"] == steps and len(records[0]["pattern"]) == steps


def test_compile_gate_explicit_angles(capsys):
    code, records, _ = run(capsys, ["compile-gate", "--dim", "3", "--gate", "X", "--angles", "0,1,2"])
    assert code == 0
    code, _, _ = run(capsys, ["compile-gate", "--dim", "3", "--gate", "X", "--angles", "0,1"])
    assert code == 2


def test_compile_gate_needs_unit_k(capsys):
    code, _, _ = run(capsys, ["compile-gate", "--dim", "3", "--gate", "ZX", "--k", "3"])
    assert code == 2


def test_clifford_report(capsys):
    code, records, _ = run(capsys, ["clifford-report", "--dim", "3"])
    assert code == 0
    actions = [r for r in records if r["check"] == "clifford.action"]
    assert len(actions) == 24
    assert records[-1]["count"] == 24


def test_output_file_and_determinism(capsys, tmp_path):
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (first, second):
        assert main(["compile-gate", "--dim", "5", "--gate", "ZX", "--k", "3", "--seed", "9", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["check"] == "compile-gate.soundness"
