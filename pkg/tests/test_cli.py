import csv
import json

import pytest

from bigktype.cli import main, read_config, ConfigError


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_eval_phi_identity(capsys):
    out = run_json(capsys, "eval", "phi", "--ell", "3", "--nu", "0", "--p", "3", "--g", "id")
    assert out["value"] == pytest.approx(7, rel=1e-12)
    assert {"object", "value", "route", "error"} <= set(out)


def test_eval_phi_avg_identity(capsys):
    out = run_json(capsys, "eval", "phi_avg", "--ell", "5", "--q", "5", "--g", "id")
    assert out["value"] == pytest.approx(1, abs=1e-12)


def test_eval_distance(capsys):
    out = run_json(capsys, "eval", "distance", "--set", "S", "--g", "[[0,1],[-1,0]]")
    assert out["value"] == pytest.approx(0, abs=1e-15)


def test_eval_bad_set(capsys):
    assert main(["eval", "distance", "--set", "Q"]) == 2
    assert "--set" in capsys.readouterr().err


def test_count_identity(capsys):
    out = run_json(capsys, "count", "--L", "1")
    assert (out["count"], out["folded"]) == (2, 1)


def test_config_errors_carry_line_numbers(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nell = 4\nnot a pair\n")
    with pytest.raises(ConfigError, match=":3:"):
        read_config(cfg)
    cfg.write_text("ell = 4  # trailing\n\nsamples=3\n")
    assert read_config(cfg) == {"ell": "4", "samples": "3"}


def test_suite_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ell = 2\nbogus\n")
    assert main(["suite", "plancherel", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert ":2:" in capsys.readouterr().err


def test_figure1_files(tmp_path, capsys):
    assert main(["figure1", "--ell", "12", "--points", "11", "--out", str(tmp_path)]) == 0
    files = sorted(p.name for p in tmp_path.glob("figure1_l12_q*.csv"))
    assert files == ["figure1_l12_q0.csv", "figure1_l12_q10.csv", "figure1_l12_q12.csv", "figure1_l12_q2.csv"]
    with open(tmp_path / "figure1_l12_q12.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["v", "value"]
    assert len(rows) == 12
    assert float(rows[1][1]) == 1.0
    # 17 significant digits
    assert len(rows[2][0].replace(".", "").lstrip("0")) >= 15
    rep = json.loads((tmp_path / "figure1.json").read_text())
    assert set(rep) == {"command", "config", "checks", "wall_time"}
    assert rep["wall_time"] is None


def test_figure1_guard(capsys):
    assert main(["figure1", "--ell", "201"]) == 2


def test_suite_reports_checks(tmp_path, capsys):
    code = main(["suite", "symmetries", "--ell", "2", "--samples", "2", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "suite_symmetries.json").read_text())
    assert code == (0 if all(c["pass"] for c in rep["checks"]) else 1)
    for c in rep["checks"]:
        assert set(c) == {"name", "measured", "threshold", "pass"}
    assert "PASS" in capsys.readouterr().out


def test_suite_counting_is_byte_identical(tmp_path, capsys):
    outs = []
    for run in ("a", "b"):
        d = tmp_path / run
        main(["suite", "counting", "--Lmax", "8", "--samples", "2", "--straightforward", "0", "--seed", "7",
              "--out", str(d)])
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert "counting_scan.csv" in outs[0]


def test_timing_flag_records_wall_time(tmp_path, capsys):
    main(["figure1", "--ell", "4", "--points", "5", "--timing", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "figure1.json").read_text())
    assert rep["wall_time"] >= 0
