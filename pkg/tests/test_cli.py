import csv
import io
import json
import math

import pytest

from torsionlab import cli
from torsionlab.domains import Ball, loads


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_oracle_ball(capsys, tmp_path):
    dest = tmp_path / "r.csv"
    code, out, _ = run(capsys, "eval", "--domain", "ball", "--dim", "2", "--p", "1,2", "--backend", "oracle",
                       "--out", str(dest))
    assert code == 0
    assert "F_p=0.722898245368" in out
    rows = list(csv.DictReader(dest.open()))
    assert float(rows[0]["fp"]) == pytest.approx(0.72290, abs=1e-5)
    assert not list(tmp_path.glob("*.tmp"))


def test_eval_numeric_interval(capsys):
    code, out, _ = run(capsys, "eval", "--domain", "interval", "--p", "1", "--backend", "numeric",
                       "--h", "0.0078125", "--format", "txt")
    assert code == 0
    f1 = float(out.split("F_p=")[1].split()[0])
    assert f1 == pytest.approx(math.pi**2 / 12, abs=1e-3)


def test_eval_bad_spacing_exits_2(capsys):
    code, _, err = run(capsys, "eval", "--domain", "interval", "--p", "1", "--h", "0")
    assert code == 2 and "--h" in err


def test_eval_unknown_domain_exits_2(capsys):
    code, _, _ = run(capsys, "eval", "--domain", "donut", "--p", "1")
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["eval", "--domain", "ball", "--backend", "fem"])
    assert exc.value.code == 2


def test_verify_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--out", str(tmp_path / "v.csv"))
    assert code == 0 and "0 failed" in out
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"domains": [{"label": "corrupt", "lambda1_override": [100, 100],
                                            "spec": {"type": "interval", "a": 0, "b": 1}}]}))
    code, out, _ = run(capsys, "verify", "--corpus", str(bad))
    assert code == 1 and "FAIL" in out
    code, _, _ = run(capsys, "verify", "--corpus", str(tmp_path / "missing.json"))
    assert code == 2


def test_sweep_pq_matches_sharp_constants(capsys):
    code, out, _ = run(capsys, "sweep-pq", "--dim", "1", "--p", "1,2", "--q", "0,1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    from torsionlab.constructions import one_d_sharp
    for row in rows:
        assert float(row["value"]) == pytest.approx(one_d_sharp(float(row["p"]), float(row["q"])), rel=1e-11)


def test_sweep_pq_sequence_columns(capsys):
    code, out, _ = run(capsys, "sweep-pq", "--dim", "2", "--p", "1", "--q", "1.5", "--sequence", "n=1,10,100")
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    vals = [float(row[k]) for k in ("seq_n1", "seq_n10", "seq_n100")]
    assert vals[0] < vals[1] < vals[2]


def test_sweep_pq_domain_and_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep-pq", "--domain", "disk", "--p", "1", "--q", "1")
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert float(row["value"]) == pytest.approx(0.722898245368, rel=1e-11)
    code, out, _ = run(capsys, "sweep-pq", "--p", "", "--q", "")
    assert code == 0 and out == "p,q,value,domain\n"


def test_sequence_commands(capsys):
    code, out, _ = run(capsys, "sequence", "--family", "cluster", "--dim", "2", "--p", "1", "--n", "10,100,1000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    fps = [float(r["fp"]) for r in rows]
    assert fps[0] > fps[1] > fps[2]
    assert all(float(r["fp"]) <= float(r["predicted_bound"]) for r in rows)
    code, out, _ = run(capsys, "sequence", "--family", "equal-balls", "--q", "1", "--n", "1,10,100")
    assert len({r["fp"] for r in csv.DictReader(io.StringIO(out))}) == 1
    code, _, _ = run(capsys, "sequence", "--family", "cluster", "--n", "0")
    assert code == 2


def test_oned_table(capsys):
    code, out, _ = run(capsys, "oneD-table")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    sharp = {(r["p"], r["q"]): float(r["sharp"]) for r in rows}
    assert sharp[("1", "1")] == pytest.approx(math.pi**2 / 12, rel=1e-11)
    assert sharp[("2", "1")] == pytest.approx(math.pi**2 / math.sqrt(120), rel=1e-11)
    assert sharp[("inf", "1")] == pytest.approx(math.pi**2 / 8, rel=1e-11)
    for r in rows:
        if r["q"] == "0" and r["rearrangement_q0"]:
            assert float(r["rearrangement_q0"]) == pytest.approx(float(r["sharp"]), rel=1e-11)
    code, _, err = run(capsys, "oneD-table", "--q", "1.1")
    assert code == 2 and "infinite" in err


def test_bessel_zero(capsys):
    code, out, _ = run(capsys, "bessel-zero", "--nu", "0,0.5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["j"]) == pytest.approx(2.40482555770, rel=1e-11)
    assert float(rows[1]["j"]) == pytest.approx(math.pi, rel=1e-11)


def test_domain_file_round_trip(tmp_path):
    spec = Ball(2, 1.5, (0.5, -0.5))
    path = tmp_path / "d.json"
    cli.write_atomic(path, json.dumps(spec.to_dict()))
    assert cli.domain_from_arg(str(path)) == spec
    assert loads(path.read_text()) == spec
    assert cli.domain_from_arg(json.dumps(spec.to_dict())) == spec


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "torsionlab.cli", "oneD-table", "--p", "1", "--q", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "0.822467033424" in proc.stdout
