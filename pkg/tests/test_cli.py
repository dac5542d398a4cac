import json

import pytest

from selmer_companions.cli import main


@pytest.fixture(autouse=True)
def data_env(monkeypatch, data_dir):
    monkeypatch.setenv("SELMER_DATA_DIR", str(data_dir))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "0", "1", "0", "3", "3")
    assert code == 0
    assert "disc = -3072" in out and "j = 2048/3" in out
    code, tree = run_json(capsys, "invariants", "0", "1", "0", "3", "3")
    assert tree["disc"] == "-3072" and tree["j"] == "2048/3" and tree["minimal_model"] == "[0,1,0,3,3]"
    code, out, _ = run(capsys, "invariants", "0", "0", "0", "0", "0")
    assert code == 0 and "singular" in out


def test_invariants_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["invariants", "0", "1", "0", "3"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["invariants", "0", "1", "0", "3", "x"])
    assert err.value.code == 2


def test_localdata(capsys):
    code, out, _ = run(capsys, "localdata", "0", "64", "0", "1536", "786432", "--prime", "2")
    assert code == 0 and " III " in out
    code, tree = run_json(capsys, "localdata", "0", "1", "0", "3", "3", "--all-bad")
    assert [r["p"] for r in tree] == [2, 3]
    code, out, _ = run(capsys, "localdata", "0", "1", "0", "3", "3", "--prime", "7")
    assert "I0 f=0" in out
    code, _, err = run(capsys, "localdata", "0", "0", "0", "0", "0", "--prime", "2")
    assert code == 1 and "singular" in err


def test_verify(capsys):
    code, tree = run_json(capsys, "verify", "--q", "8", "--t", "1")
    assert code == 0
    assert tree["records"][0]["companion"]["verdict"] == "companions-certified"
    assert tree["records"][0]["isogeny"]["verdict"] == "not-isogenous-certified"
    code, tree = run_json(capsys, "verify", "--q", "12", "--t", "0")
    assert code == 1 and tree["records"][0]["companion"]["verdict"] == "degenerate"
    code, tree = run_json(capsys, "verify", "--table1", "--q", "1", "--t-min", "1", "--t-max", "97")
    assert code == 0
    flagged = [r["t"] for r in tree["records"] if r["isogeny"]["verdict"] != "not-isogenous-certified"]
    assert flagged == [1, 9]
    assert all(r["exceptional"] for r in tree["records"] if r["t"] in (1, 9))


def test_verify_guidance(capsys):
    with pytest.raises(SystemExit) as err:
        main(["verify", "--q", "4", "--t", "1"])
    assert err.value.code == 2
    assert "search" in capsys.readouterr().err
    code, _, _ = run(capsys, "verify", "--q", "4", "--t", "1", "--force")
    assert code in (0, 1)


def test_verify_without_data(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("SELMER_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "verify", "--q", "8", "--t", "1")
    assert code == 0 and "isogeny checks skipped" in out


@pytest.mark.parametrize("q,expected", [(1, [1, 9]), (3, [-1, 0]), (5, [])])
def test_isogeny_scan(capsys, q, expected):
    code, tree = run_json(capsys, "isogeny-scan", "--q", str(q), "--window", "1000")
    assert code == 0
    assert sorted({r["t"] for r in tree["roots"]}) == expected
    assert "1000" in tree["caveat"]
    code, out, _ = run(capsys, "isogeny-scan", "--q", str(q), "--window", "1000")
    assert "caveat" in out


def test_isogeny_scan_missing_data(capsys, tmp_path):
    code, _, err = run(capsys, "isogeny-scan", "--q", "5", "--window", "10", "--data-dir", str(tmp_path))
    assert code == 2 and "[2, 4, 6, 8, 10, 12, 14, 16, 18]" in err


def test_search(capsys):
    code, tree = run_json(capsys, "search", "--q-min", "5", "--q-max", "5", "--modulus", "8", "--samples", "10")
    assert code == 0 and [5, 1] in [[c["q"], c["residue"]] for c in tree["candidates"]]
    code, tree = run_json(capsys, "search", "--q-min", "7", "--q-max", "7", "--modulus", "4", "--samples", "10")
    assert [7, 3] in [[c["q"], c["residue"]] for c in tree["candidates"]]
    code, tree = run_json(capsys, "search", "--q-min", "3", "--q-max", "2", "--modulus", "8")
    assert code == 0 and tree["candidates"] == [] and tree["classes"] == []


def test_json_is_deterministic(capsys):
    argv = ("search", "--q-min", "5", "--q-max", "7", "--modulus", "4", "--samples", "5", "--format", "json")
    main(list(argv))
    one = capsys.readouterr().out
    main(list(argv) + ["--jobs", "3"])
    assert capsys.readouterr().out == one
