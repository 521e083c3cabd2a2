import json

from lindyn.cli import main
from lindyn.families import CATALOG


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


GOOD = {"experiment": "closure", "family": {"name": "scalar"}, "space": {"dim": 1}, "params": {"count": 4}}
FAILING = {"experiment": "closure", "family": {"name": "rank_one"}, "space": {"dim": 3}, "params": {"count": 4}}


def test_run_pass_stdout(tmp_path, capsys):
    assert main(["run", write(tmp_path, "s.json", GOOD)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["verdict"] == "pass"


def test_run_fail_exit_one(tmp_path):
    assert main(["run", write(tmp_path, "s.json", [GOOD, FAILING])]) == 1


def test_run_out_file(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["run", write(tmp_path, "s.json", GOOD), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1


def test_timings_flag(tmp_path, capsys):
    main(["run", write(tmp_path, "s.json", GOOD), "--timings"])
    assert json.loads(capsys.readouterr().out)["runtime_ms"] is not None


def test_invalid_spec_exit_two(tmp_path, capsys):
    assert main(["run", write(tmp_path, "bad.json", "{nope")]) == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_missing_file_exit_two(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_bad_arguments_exit_two(capsys):
    assert main(["frobnicate"]) == 2


def test_list_families(capsys):
    assert main(["list-families"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == list(CATALOG)
