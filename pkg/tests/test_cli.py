import json

import pytest

from app import config
from app.ui.cli import EXIT_FAIL, EXIT_GUARD, EXIT_OK, EXIT_USAGE, json_safe, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _run_json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


def test_hstar_c7(capsys):
    code, data = _run_json(capsys, "hstar", "--cycle", "7")
    assert code == EXIT_OK
    assert data["a_invariant"] == -3
    assert data["s"] == 5
    assert data["L"][:2] == [1, 29]
    assert data["Linterior"][3] == 1
    assert data["hstar"][0] == 1
    assert data["reciprocity"] == "pass"


def test_hstar_c4_is_palindromic(capsys):
    code, data = _run_json(capsys, "hstar", "--cycle", "4")
    assert code == EXIT_OK
    assert data["hstar"] == data["hstar"][::-1]


def test_hstar_from_graph_file(capsys, tmp_path):
    path = tmp_path / "point.json"
    path.write_text(json.dumps({"vertices": ["a"], "edges": []}), encoding="utf-8")
    code, data = _run_json(capsys, "hstar", "--graph", str(path))
    assert code == EXIT_OK
    assert data["L"] == [1, 2]
    assert data["hstar"] == [1]
    assert data["a_invariant"] == -2


def test_hstar_csv(capsys):
    code, out = _run(capsys, "hstar", "--cycle", "5", "--format", "csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "t,L,Linterior,hstar"
    assert lines[1] == "0,1,0,1"
    assert lines[2].startswith("1,11,0,")


def test_enumerate(capsys, eta1_c7):
    code, data = _run_json(capsys, "enumerate", "--cycle", "7", "--level", "1", "--degree", "3")
    assert code == EXIT_OK
    assert data["vectors"] == [eta1_c7.to_dict()]
    code, data = _run_json(capsys, "enumerate", "--cycle", "7", "--level", "0", "--degree", "0")
    assert data["vectors"] == [{"deg": 0, "v": [0] * 7}]
    code, data = _run_json(capsys, "enumerate", "--cycle", "9", "--level", "0", "--degree", "1")
    assert data["count"] == 76


def test_enumerate_text(capsys):
    code, out = _run(capsys, "enumerate", "--cycle", "5", "--level", "1", "--degree", "3", "--format", "text")
    assert code == EXIT_OK
    assert out.strip().splitlines() == ["deg v0 v1 v2 v3 v4", "3 1 1 1 1 1"]


def test_output_is_deterministic(capsys):
    _, first = _run(capsys, "enumerate", "--cycle", "7", "--level", "0", "--degree", "2")
    _, second = _run(capsys, "enumerate", "--cycle", "7", "--level", "0", "--degree", "2")
    assert first == second


def test_verify_gorenstein(capsys):
    code, data = _run_json(capsys, "verify", "gorenstein", "--cycle", "5")
    assert code == EXIT_OK
    assert data["gorenstein"] is True
    assert data["criterion"] == "(ii)"
    assert data["hstar_palindromic"] is True


def test_verify_gorenstein_c7(capsys):
    code, data = _run_json(capsys, "verify", "gorenstein", "--cycle", "7")
    assert code == EXIT_OK
    assert data["gorenstein"] is False
    assert data["hstar_palindromic"] is False


def test_verify_ht(capsys):
    code, data = _run_json(capsys, "verify", "ht", "--ell", "3")
    assert code == EXIT_OK
    assert data["ht_identity"] == "pass"
    assert data["series_identity"] == "pass"


def test_verify_locus(capsys):
    code, data = _run_json(capsys, "verify", "locus", "--ell", "3", "--max-degree", "3")
    assert code == EXIT_OK
    assert data["status"] == "pass"
    assert data["degree_bound"] == 3


def test_verify_agor(capsys):
    code, data = _run_json(capsys, "verify", "agor", "--cycle", "7")
    assert code == EXIT_OK
    assert data["almost_gorenstein"] is True
    assert data["ulrich"] == {"e": 1, "mu": 1}
    assert data["omega_generators"][0] == {"deg": 3, "v": [1] * 7, "margin": 2}
    assert len(data["omega_generators"]) == 2


def test_verify_needs_odd_cycle(capsys):
    assert main(["verify", "ht", "--cycle", "8"]) == EXIT_USAGE
    assert main(["verify", "ht", "--ell", "3", "--cycle", "9"]) == EXIT_USAGE


def test_decompose(capsys):
    vector = json.dumps({"deg": 2, "v": [1, 1, 1, 1, 1, 1, 0]})
    code, data = _run_json(capsys, "decompose", "--ell", "3", "--vector", vector)
    assert code == EXIT_OK
    assert sorted(data["indices"]) == [0, 1]


def test_trace_member(capsys):
    vector = json.dumps({"deg": 3, "v": [1] * 7})
    code, data = _run_json(capsys, "trace-member", "--cycle", "7", "--vector", vector)
    assert code == EXIT_OK
    assert data["member"] is True
    assert data["witness"]["eta"] == {"deg": 3, "v": [1] * 7}

    vector = json.dumps({"deg": 1, "v": [1, 0, 1, 0, 1, 0, 0]})
    code, data = _run_json(capsys, "trace-member", "--cycle", "7", "--vector", vector)
    assert data["member"] is False
    assert data["witness"] is None


def test_bad_vector_is_a_usage_error(capsys):
    assert main(["trace-member", "--cycle", "7", "--vector", "[1, 2]"]) == EXIT_USAGE
    assert main(["trace-member", "--cycle", "7", "--vector", '{"deg": 1, "v": [0]}']) == EXIT_USAGE


@pytest.mark.parametrize("raw", [
    json.dumps({"deg": 3.9, "v": [1.7] * 7}),
    json.dumps({"deg": 3, "v": [1.0] * 7}),
    json.dumps({"deg": 3, "v": [True] * 7}),
    json.dumps({"deg": "3", "v": [1] * 7}),
    json.dumps({"deg": 3, "v": "1111111"}),
])
def test_non_integer_vector_is_a_usage_error(capsys, raw):
    assert main(["trace-member", "--cycle", "7", "--vector", raw]) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_malformed_graph_file_exits_64(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": ["a", "b"], "edges": 5}), encoding="utf-8")
    assert main(["hstar", "--graph", str(path)]) == EXIT_USAGE


def test_conflicting_graph_sources_exit_64():
    with pytest.raises(SystemExit) as info:
        main(["hstar", "--cycle", "5", "--graph", "g.json"])
    assert info.value.code == EXIT_USAGE


def test_missing_graph_source(capsys):
    assert main(["hstar"]) == EXIT_USAGE
    assert main(["hstar", "--cycle", "2"]) == EXIT_USAGE


def test_csv_refused_for_nested_reports(capsys):
    assert main(["verify", "gorenstein", "--cycle", "5", "--format", "csv"]) == EXIT_USAGE


def test_resource_guard_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(config, "CELL_LIMIT", 10)
    code = main(["enumerate", "--cycle", "7", "--level", "0", "--degree", "3"])
    assert code == EXIT_GUARD


def test_verification_failure_prints_counterexample(capsys, monkeypatch):
    import app.ui.cli as cli
    from app.errors import VerificationError

    def broken(*args, **kwargs):
        raise VerificationError("forced", {"degree": 3})

    monkeypatch.setattr(cli, "verify_locus_theorem", broken)
    code, data = _run_json(capsys, "verify", "locus", "--ell", "3")
    assert code == EXIT_FAIL
    assert data["status"] == "fail"
    assert data["counterexample"] == {"degree": 3}


def test_json_safe_big_integers():
    assert json_safe({"a": [2 ** 53, 5, -(2 ** 60)], "b": True}) == {
        "a": [str(2 ** 53), 5, str(-(2 ** 60))], "b": True}
