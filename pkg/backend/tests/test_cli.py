import json

import pytest

from app.cli import exit_code, main


@pytest.fixture
def write_problem(tmp_path):
    def write(data, name="problem.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)

    return write


def run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_exit_codes():
    assert exit_code({"status": "pass"}) == 0
    assert exit_code({"status": "fail"}) == 2
    assert exit_code({"status": "error"}) == 1
    assert exit_code({}) == 1


def test_analyze_e1(capsys, write_problem, e1_problem):
    code, report = run(capsys, ["analyze", write_problem(e1_problem)])
    assert code == 0
    assert report["status"] == "pass"
    point = report["degrees"][0]["points"][0]
    assert point["point"] == "0" and point["dim"] == 1
    assert "provenance" in report


def test_analyze_single_degree_with_depth(capsys, write_problem, jordan_problem):
    code, report = run(capsys, ["analyze", write_problem(jordan_problem), "--degree", "0", "--depth", "4", "--fast"])
    assert code == 0
    assert len(report["degrees"]) == 1
    assert report["degrees"][0]["points"][0]["depth_override"] == {"depth": 4, "dim": 2}


def test_validate_reports_broken_complex(capsys, write_problem, broken_problem):
    code, report = run(capsys, ["validate", write_problem(broken_problem)])
    assert code == 2
    assert report["status"] == "fail"
    assert report["failures"] == [{"q": 0, "exponent": 1, "entry": [0, 0]}]


def test_reduce_jordan(capsys, write_problem, jordan_problem):
    code, report = run(capsys, ["reduce", write_problem(jordan_problem)])
    assert code == 0
    assert report["points"][0]["certificates"][0]["dim"] == 2


def test_strip(capsys, write_problem, strip_problem):
    code, report = run(capsys, ["strip", write_problem(strip_problem)])
    assert code == 0
    assert report["pairing"]["total"] == "2*i"


def test_strip_needs_a_strip_payload(capsys, write_problem, e1_problem):
    code, report = run(capsys, ["strip", write_problem(e1_problem)])
    assert code == 1
    assert report["status"] == "error"


def test_ibc(capsys, write_problem, ibc_problem):
    code, report = run(capsys, ["ibc", write_problem(ibc_problem), "--seed", "4"])
    assert code == 0
    assert report["absolute"] == [1, 1]
    assert report["chart"]["degree"] == 2


def test_unreadable_inputs(capsys, write_problem, tmp_path):
    code, report = run(capsys, ["analyze", str(tmp_path / "missing.json")])
    assert code == 1 and report["status"] == "error"
    code, report = run(capsys, ["analyze", write_problem("{not json")])
    assert code == 1
    code, report = run(capsys, ["analyze", write_problem({"version": "germcoh/0", "complex": {"dims": [1], "maps": []}})])
    assert code == 1


def test_usage_error():
    assert main([]) == 1
    assert main(["analyze"]) == 1


def test_corpus_command(capsys):
    code, report = run(capsys, ["corpus", "--seed", "1", "--count", "2", "--fast"])
    assert code == 0
    assert report["summary"]["pass"] == 2
