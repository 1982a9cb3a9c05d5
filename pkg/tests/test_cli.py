import json
import re

import pytest

from latticeplast.cli import main
from latticeplast.model import benchmark_spec, model_to_dict, serialize_model


def write_model(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def bench_file(tmp_path):
    p = tmp_path / "bench.json"
    p.write_text(serialize_model(benchmark_spec()))
    return str(p)


def run_json(capsys, *argv):
    status = main([*argv, "--format", "json"])
    return status, json.loads(capsys.readouterr().out)


def test_matrices_json(capsys, bench_file):
    status, rep = run_json(capsys, "matrices", "--model", bench_file)
    assert status == 0 and rep["status"] == 0
    D = rep["payload"]["D"]
    assert D[0] == ["-1", "1", "0", "0", "0", "0"]
    assert len(rep["payload"]["Dperp"]) == 8 and len(rep["payload"]["Dperp"][0]) == 3
    assert rep["payload"]["R"] == ["1", "0", "0", "1", "0", "0", "1", "0"]
    assert rep["model"]["assumptions"]["rank_D"] == 5


def test_matrices_tree(capsys, tmp_path):
    doc = {"nodes": 3, "springs": [{"id": 1, "source": 1, "terminus": 2},
                                   {"id": 2, "source": 2, "terminus": 3}],
           "loading": {"phi": 1, "psi": 3}}
    f = write_model(tmp_path / "tree.json", doc)
    assert main(["matrices", "--model", f]) == 0
    assert "no columns" in capsys.readouterr().out


def test_enumerate_text(capsys, bench_file):
    assert main(["enumerate", "--model", bench_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("9 index sets")
    assert out.count("admissible=yes irreducible=yes") == 9


def test_enumerate_completeness(capsys, bench_file):
    status, rep = run_json(capsys, "enumerate", "--model", bench_file, "--completeness")
    assert status == 0
    comp = rep["payload"]["completeness"]
    assert comp["only_algebraic"] == [] and comp["only_topological"] == []


def test_check_set(capsys, bench_file):
    status, rep = run_json(capsys, "check", "--model", bench_file, "--set=+1,-3,-6,+8")
    assert status == 0
    assert rep["payload"]["admissible"] and rep["payload"]["irreducibility"]["irreducible"]


def test_check_reducible_text(capsys, bench_file):
    assert main(["check", "--model", bench_file, "--set=+1,+2,+7,+8"]) == 0
    out = capsys.readouterr().out
    assert "irreducible: no" in out and "admissible proper subset" in out


def test_check_unknown_spring(capsys, bench_file):
    assert main(["check", "--model", bench_file, "--set=+1,+9"]) == 1
    assert "unknown spring 9" in capsys.readouterr().err


def test_collapse_reference_sequence(capsys, bench_file):
    status, rep = run_json(capsys, "collapse", "--model", bench_file, "--sequence", "3:1,5:3,4:6,2:4")
    assert status == 0
    cert = rep["payload"]["certification"]
    assert [(e["alpha"], e["spring"]) for e in cert["index_set"]] == [(1, 1), (-1, 3), (-1, 6), (1, 8)]
    assert cert["admissible"]


def test_collapse_illegal_move(capsys, bench_file):
    status, rep = run_json(capsys, "collapse", "--model", bench_file, "--sequence", "3:1,9:3")
    assert status == 1
    assert rep["payload"] == {"position": 2, "clause": "unknown node"}


def test_collapse_partial(capsys, bench_file):
    assert main(["collapse", "--model", bench_file, "--sequence", "3:1"]) == 0
    assert "free nodes: [2, 4, 5]" in capsys.readouterr().out


def test_simulate(capsys, bench_file, tmp_path):
    trace = tmp_path / "trace.ndjson"
    status, rep = run_json(capsys, "simulate", "--model", bench_file, "--trace", str(trace))
    assert status == 0
    term = rep["payload"]["terminal"]
    assert term["converged"]
    assert [(e["alpha"], e["spring"]) for e in term["flow_set"]] == [(1, 1), (1, 2)]
    assert rep["payload"]["certification"]["admissible"]
    lines = trace.read_text().splitlines()
    assert len(lines) == rep["payload"]["steps"] + 1


def test_simulate_refuses_zero_rate(capsys, tmp_path):
    doc = model_to_dict(benchmark_spec())
    doc["loading"]["l1"] = "0"
    f = write_model(tmp_path / "flat.json", doc)
    assert main(["simulate", "--model", f]) == 2
    assert "not unidirectional" in capsys.readouterr().err


def test_disconnected_model(capsys, tmp_path):
    doc = {"nodes": 4, "springs": [{"id": 1, "source": 1, "terminus": 2},
                                   {"id": 2, "source": 3, "terminus": 4}],
           "loading": {"phi": 1, "psi": 4}}
    f = write_model(tmp_path / "split.json", doc)
    assert main(["matrices", "--model", f]) == 1
    assert "disconnected" in capsys.readouterr().err


def test_missing_file(capsys, tmp_path):
    assert main(["matrices", "--model", str(tmp_path / "nope.json")]) == 1


def test_bad_model_path_reported(capsys, tmp_path):
    doc = model_to_dict(benchmark_spec())
    doc["springs"][3]["stiffness"] = "-1"
    f = write_model(tmp_path / "bad.json", doc)
    assert main(["matrices", "--model", f]) == 1
    assert "$.springs[3].stiffness" in capsys.readouterr().err


def test_dot_highlight(capsys, bench_file):
    assert main(["dot", "--model", bench_file, "--bipartition", "1,3,5", "--set=+1,-3,-6,+8"]) == 0
    out = capsys.readouterr().out
    bold = re.findall(r'label="([+-]\d+)", style=bold', out)
    assert bold == ["+1", "-3", "-6", "+8"]
    assert out.count("lightblue") == 3 and out.count("lightsalmon") == 3


def test_dot_plain(capsys, bench_file):
    assert main(["dot", "--model", bench_file]) == 0
    out = capsys.readouterr().out
    assert out.count("->") == 8 and "bold" not in out


def test_dot_invalid_bipartition(capsys, bench_file):
    assert main(["dot", "--model", bench_file, "--bipartition", "1,4"]) == 1
    assert "not connected" in capsys.readouterr().err


def test_out_file_and_determinism(capsys, bench_file, tmp_path):
    target = tmp_path / "report.json"
    runs = []
    for _ in range(2):
        assert main(["enumerate", "--model", bench_file, "--format", "json", "--out", str(target)]) == 0
        runs.append(target.read_bytes())
    assert runs[0] == runs[1]
    assert capsys.readouterr().out == ""
