import csv
import io
import json

import pytest

from levydiv.cli import main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_cl(capsys):
    code, out, _ = run(capsys, "solve", "--model", "cl-exp", "--p", "2", "--lambda", "1", "--mu", "1", "--q", "0.1")
    assert code == 0
    rep = json.loads(out)
    assert rep["classical"]["method"] == "ClosedForm"
    assert rep["classical"]["level"] == pytest.approx(4.21407056275, abs=1e-9)
    assert rep["hjb_classical"]["condition_holds"] is True


def test_solve_bailout_csv(capsys):
    code, out, _ = run(capsys, "solve", "--model", "cl-exp", "--p", "2", "--lambda", "1", "--mu-rate", "1",
                       "--q", "0.1", "--bailout", "--phi", "1.5", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["problem"] for r in rows] == ["classical", "bailout"]
    assert float(rows[1]["level"]) == pytest.approx(1.78626, abs=1e-5)


def test_value_brownian_at_zero(capsys):
    code, out, _ = run(capsys, "value", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1",
                       "--optimal", "--x", "0")
    assert code == 0
    assert json.loads(out)["values"][0]["value"] == 0.0


def test_value_grid_csv_round_trips(capsys):
    code, out, _ = run(capsys, "value", "--model", "cl-exp", "--p", "2", "--lambda", "1", "--mu-rate", "1",
                       "--q", "0.1", "--barrier", "2", "--bailout", "--phi", "1.5", "--x-grid", "0:3:7",
                       "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7
    assert list(rows[0]) == ["x", "a", "value", "dividends", "injections_cost", "note"]
    # shortest round-trip representation
    v = float(rows[3]["value"])
    assert repr(v) == rows[3]["value"]


def test_table_stable(capsys):
    code, out, _ = run(capsys, "table", "--model", "stable", "--alpha", "1.5", "--sigma", "1", "--q", "1",
                       "--x-grid", "0:2:3")
    rows = json.loads(out)["rows"]
    assert code == 0 and rows[0]["w_prime"] == "inf" and rows[2]["source"] == "ClosedForm"


def test_simulate_and_dump(capsys, tmp_path):
    dump = tmp_path / "paths.ndjson"
    argv = ["simulate", "--model", "cl-exp", "--p", "2", "--lambda", "1", "--mu-rate", "1", "--q", "0.1",
            "--barrier", "2", "--x", "1", "--paths", "3000", "--seed", "5", "--dump-paths", str(dump)]
    code, out, _ = run(capsys, *argv)
    again = run(capsys, *argv)[1]
    assert code == 0 and out == again
    est = json.loads(out)["estimates"][0]
    assert est["dividends"]["n"] == 3000
    assert len(dump.read_text().splitlines()) == 1000


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# desk model\nmodel = cl-exp\np = 2\nlambda = 1\nmu-rate = 1\nq = 0.5\n")
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--q", "0.1")
    assert code == 0
    # the flag wins over the file
    assert json.loads(out)["q"] == 0.1


def test_out_file(capsys, tmp_path):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1",
                       "--x", "1", "--output", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("x,q,w,w_prime,z,wbar,zbar,source\n")


@pytest.mark.parametrize("argv", [
    ["solve", "--model", "cl-exp", "--p", "2", "--q", "0.1"],
    ["solve", "--model", "brownian", "--mu", "1", "--sigma", "1"],
    ["value", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1", "--x", "1"],
    ["value", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1", "--barrier", "1",
     "--bailout", "--x", "1"],
    ["table", "--model", "brownian", "--mu", "1", "--sigma", "-1", "--q", "0.1", "--x", "1"],
    ["table", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1", "--x-grid", "1:0:3"],
    ["solve", "--model", "cl-exp", "--bogus", "1"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
    err = capsys.readouterr().err
    assert err.strip().count("\n") <= 1 or "usage" in err


def test_stable_solve_skips_generator(capsys):
    code, out, _ = run(capsys, "solve", "--model", "stable", "--alpha", "1.5", "--sigma", "1", "--q", "0.1",
                       "--bailout", "--phi", "1.5")
    rep = json.loads(out)
    assert code == 0 and "skipped" in rep["hjb_bailout"]
    assert rep["bailout"]["cross_check"] == pytest.approx(rep["bailout"]["level"], rel=1e-6)


def test_numeric_failure_exit_status(capsys, monkeypatch):
    from levydiv import cli
    from levydiv.exceptions import NumericalFailure

    def boom(model, q):
        raise NumericalFailure("bracket not found", estimates=(1.0,))

    monkeypatch.setattr(cli, "optimal_classical_barrier", boom)
    code, out, err = run(capsys, "solve", "--model", "brownian", "--mu", "1", "--sigma", "1", "--q", "0.1")
    assert code == 1 and out == "" and "bracket not found" in err


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "scale", "--model", "brownian", "--mu", "1", "--sigma", "1",
                       "--q", "0.1")
    data = json.loads(out)
    assert code == 0 and len(data) == 6 and all(d["passed"] for d in data)


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("2:2:1") == [2.0]
