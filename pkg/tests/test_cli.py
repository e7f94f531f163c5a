import csv
import io
import json

import pytest

from mcsma import corpus
from mcsma.cli import main

C4 = str(corpus.corpus_dir() / "C4.json")
K2 = str(corpus.corpus_dir() / "K2.json")


@pytest.fixture(autouse=True)
def pinned_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", C4, "--mixing")
    doc = json.loads(out)
    assert code == 0
    assert doc["gamma"] == 2 and doc["upsilon"] == 2 and doc["theta"] == 2
    m = doc["manifest"]
    assert m["command"] == "analyze" and m["timestamp"] == "2023-11-14T22:13:20Z"
    assert len(m["input_sha256"]) == 64 and m["tool_version"]


def test_output_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["analyze", C4, "-o", str(a)]) == 0
    assert main(["analyze", C4, "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["simulate", K2, "--seed", "5", "--horizon", "50", "-o", str(a)]) == 0
    assert main(["simulate", K2, "--seed", "5", "--horizon", "50", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_undefined_marker(capsys):
    _, out, _ = run(capsys, "starvation", str(corpus.corpus_dir() / "P3.json"))
    doc = json.loads(out)
    assert doc["upsilon"] == "undefined"
    assert doc["upsilon_per_node"] == ["never-starves", "permanent-starver", "never-starves"]


def test_hitting_csv(capsys):
    code, out, _ = run(capsys, "hitting", K2, "--start", "1,0", "--target", "0,1", "--nu-grid", "10,100,1000")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# manifest: ")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert [float(r["nu"]) for r in rows] == [10.0, 100.0, 1000.0]
    for r in rows:
        assert float(r["value"]) == pytest.approx(2 + 1 / float(r["nu"]), rel=1e-12)


def test_mixing_csv(capsys):
    code, out, _ = run(capsys, "mixing", C4)
    man = json.loads(out.splitlines()[0][len("# manifest: "):])
    assert code == 0 and man["boundary_ok"] is True
    assert abs(man["conductance_exponent"] + 1) < 0.15


def test_dominants_and_channels_override(capsys):
    _, out, _ = run(capsys, "dominants", K2, "--channels", "2")
    doc = json.loads(out)
    assert doc["A_C"] == 2 and doc["dominants"] == [[1, 2], [2, 1]]


def test_emit_virtual(tmp_path, capsys):
    v = tmp_path / "v.json"
    assert run(capsys, "analyze", K2, "--channels", "2", "--emit-virtual", str(v))[0] == 0
    assert json.loads(v.read_text())["num_virtual_nodes"] == 4


def test_simulate_event_log(tmp_path, capsys):
    log = tmp_path / "log.csv"
    code, out, _ = run(capsys, "simulate", K2, "--mode", "event", "--backoff", "det",
                       "--horizon", "20", "--event-log", str(log))
    assert code == 0
    rows = list(csv.reader(log.open()))
    assert rows[0] == ["time", "node", "channel", "kind"]
    assert len(rows) - 1 == json.loads(out)["events"]


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep-channels", C4, "--c-max", "3")
    assert code == 0
    assert [r["theta"] for r in json.loads(out)["rows"]] == [2, 2, "4/3"]


def test_verify_default_and_reconstructions(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0 and json.loads(out)["failed"] == []
    code, out, _ = run(capsys, "verify", "--paper-figures")
    assert code == 0


def test_verify_failure_exit_code(tmp_path, capsys):
    doc = json.loads(open(C4).read())
    doc["expected"]["by_channels"]["1"]["upsilon"] = 1
    (tmp_path / "C4.json").write_text(json.dumps(doc))
    code, out, err = run(capsys, "verify", str(tmp_path))
    assert code == 1
    assert json.loads(out)["failed"] == ["C4/C=1/expected.upsilon"]
    assert json.loads(err)["error"]["type"] == "check_failed"


@pytest.mark.parametrize("content", ["{not json", '{"num_nodes": 2}', "[]",
                                     '{"num_nodes": 2, "num_channels": 1, "edges": {"shared": [[0, 0]]}}'])
def test_malformed_input_exit_2(tmp_path, capsys, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, out, err = run(capsys, "analyze", str(p))
    assert code == 2 and out == ""
    assert json.loads(err)["exit_code"] == 2


def test_other_input_errors(tmp_path, capsys):
    assert run(capsys, "analyze", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "verify", str(tmp_path))[0] == 2
    assert run(capsys, "hitting", K2, "--start", "1,1", "--target", "0,1")[0] == 2
    assert run(capsys, "hitting", K2, "--start", "1,0", "--target", "0,1", "--nu-grid", "10,100")[0] == 2
    assert run(capsys, "simulate", K2, "--mode", "exact", "--backoff", "det")[0] == 2
    assert run(capsys, "analyze")[0] == 2


def test_size_cap_exit_3(capsys):
    code, _, err = run(capsys, "analyze", C4, "--channels", "6", "--cap", "100")
    assert code == 3
    e = json.loads(err)["error"]
    assert e["bound"] == 7 ** 4 and e["cap"] == 100
