import csv
import json

import pytest

from weldlab.cli import main


def rows(path):
    with open(path) as f:
        return list(csv.DictReader(f))


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    g1, g2 = d / "a.wg", d / "b.wg"
    assert main(["gen", "--k", "3", "--variant", "g1", "--seed", "7", "-o", str(g1)]) == 0
    assert main(["gen", "--k", "3", "--variant", "g2", "--seed", "7", "-o", str(g2),
                 "--parity-advice", str(d / "b.parity")]) == 0
    return d


def test_gen_header(files):
    assert (files / "a.wg").read_text().splitlines()[0] == "weldlab-graph v1 n=812 k=3 variant=g1"
    assert len((files / "a.wg.advice").read_text().splitlines()) == 812


def test_quantum_advice_accepts(files):
    out = files / "t.csv"
    assert main(["test", "--graph", str(files / "a.wg"), "--advice", "quantum", "--k", "3", "--eps", "0.1",
                 "--csv", str(out)]) == 0
    (row,) = rows(out)
    assert row["verdict"] == "accept" and row["reason"] == ""
    assert list(row) == ["seed", "verdict", "reason", "oracle_queries", "advice_queries"]


def test_parity_advice_rejects_g2(files, caplog):
    out = files / "r.csv"
    code = main(["test", "--graph", str(files / "b.wg"), "--advice", str(files / "b.parity"), "--trials", "2",
                 "--csv", str(out)])
    assert code == 1
    assert all(r["verdict"] == "reject" and r["reason"] for r in rows(out))
    assert "rejected" in caplog.text


def test_mark_audit(files, capsys):
    assert main(["mark", "--graph", str(files / "a.wg"), "-o", str(files / "m.out"), "--audit"]) == 0
    audit = json.loads(capsys.readouterr().out)
    assert audit["mismatches"] == 0 and audit["vertices"] == 812


def test_csv_is_byte_reproducible(files):
    a, b = files / "w1.csv", files / "w2.csv"
    for p in (a, b):
        assert main(["walk", "--k", "4", "--t-max", "5", "--dt", "0.1", "--csv", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    first = a.read_text().splitlines()[1]
    assert first == "0.000000000000,1.000000000000,0.000000000000"


def test_games_and_distinguish_columns(files):
    out = files / "g.csv"
    assert main(["games", "--game", "B", "--k", "8", "--t", "2", "--trials", "50", "--csv", str(out)]) == 0
    (row,) = rows(out)
    assert {"k", "t", "trials", "wins", "win_prob", "stderr"} <= set(row)
    assert main(["distinguish", "--k", "8", "--t", "2", "--trials", "20", "--csv", str(out)]) == 0
    assert len(rows(out)) == 2


def test_census_and_distance(files):
    out = files / "c.csv"
    assert main(["census", "--graph", str(files / "b.wg"), "--csv", str(out)]) == 0
    got = {r["field"]: r for r in rows(out)}
    assert got["vertices"]["observed"] == "812"
    assert main(["distance", "--graph", str(files / "a.wg"), "--mode", "lb", "--csv", str(out)]) == 0
    (row,) = rows(out)
    assert row["is_bipartite"] == "1" and row["lower_bound"] == "0"


def test_config_overrides_and_errors(files, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"k": 2, "dt": 0.5, "t-max": 1}))
    out = tmp_path / "w.csv"
    assert main(["walk", "--k", "5", "--config", str(cfg), "--csv", str(out)]) == 0
    assert len(rows(out)) == 3
    cfg.write_text(json.dumps({"nope": 1}))
    assert main(["walk", "--k", "5", "--config", str(cfg)]) == 2
    cfg.write_text("[1]")
    assert main(["walk", "--k", "5", "--config", str(cfg)]) == 2


@pytest.mark.parametrize("argv", [
    ["suite", "nonsense"],
    ["frobnicate"],
    ["test", "--graph", "/nonexistent.wg", "--advice", "quantum"],
    ["games", "--game", "A", "--k", "4", "--t", "100"],
    ["distinguish", "--k", "4", "--t", "100"],
    ["gen", "--k", "1", "-o", "/tmp/x.wg"],
])
def test_config_errors_exit_2(argv):
    assert main(argv) == 2


def test_seed_from_environment(files, monkeypatch, tmp_path):
    monkeypatch.setenv("WELDLAB_SEED", "99")
    out = tmp_path / "t.csv"
    assert main(["test", "--graph", str(files / "a.wg"), "--advice", str(files / "a.wg.advice"),
                 "--csv", str(out)]) == 0
    assert rows(out)[0]["seed"] == "99"


def test_suite_soundness(tmp_path):
    out = tmp_path / "s.json"
    assert main(["suite", "soundness", "--seed", "1", "--json", str(out)]) == 0
    summary = json.loads(out.read_text())
    assert summary["passed"] and summary["criteria"][0]["name"] == "soundness on G2"
