import json
import subprocess
import sys
from importlib import resources

from padicann.cli import main


def run_cli(args):
    from io import StringIO
    import contextlib
    out = StringIO()
    err = StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


def test_annihilate_tsv_row():
    code, out, _ = run_cli(["annihilate", "--family", "cyclic-prime",
                            "--f", "313", "--d", "3", "--p", "7", "--ex", "1"])
    assert code == 0
    cols = out.strip().split("\t")
    assert cols[0] == "313"
    assert cols[5] == "41,41,48"
    assert cols[7] == "2"


def test_annihilate_json_and_flag():
    code, out, _ = run_cli(["annihilate", "--family", "quadratic",
                            "--f", "8", "--p", "2", "--ex", "0", "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert data["coefficients"] == [1, 0]
    assert data["flag"] == "K cap Q_inf != Q"
    assert data["n0"] == 1


def test_invalid_config_exit_2():
    code, _, err = run_cli(["annihilate", "--family", "cyclic-prime",
                            "--f", "314", "--d", "3", "--p", "7", "--ex", "1"])
    assert code == 2 and "configuration error" in err
    code, _, _ = run_cli(["annihilate", "--family", "cyclic-prime", "--p", "7", "--ex", "1"])
    assert code == 2


def test_table_pass_and_empty():
    code, out, _ = run_cli(["table", "--id", "cubic-p7", "--rows", "313,1117"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert all(line.endswith("PASS") for line in lines[1:])
    # empty range: header only, exit 0
    code, out, _ = run_cli(["table", "--id", "cubic-p7", "--rows", "9999"])
    assert code == 0
    assert len(out.strip().splitlines()) == 1


def test_table_mismatch_exit_4(tmp_path, monkeypatch):
    import padicann.cli as cli
    bad = {"file": "cubic-p7.tsv", "family": "cyclic-prime", "d": 3, "p": 13, "check": "nj"}
    monkeypatch.setitem(cli.TABLES, "broken", bad)
    code, out, _ = run_cli(["table", "--id", "broken", "--rows", "313"])
    assert code == 4
    assert "FAIL" in out


def test_golden_files_not_mutated():
    before = resources.files("padicann.data.golden").joinpath("cubic-p7.tsv").read_text()
    run_cli(["table", "--id", "cubic-p7", "--rows", "313"])
    after = resources.files("padicann.data.golden").joinpath("cubic-p7.tsv").read_text()
    assert before == after


def test_determinism():
    args = ["annihilate", "--family", "quadratic", "--f", "1217", "--p", "2", "--ex", "4",
            "--format", "json"]
    _, out1, _ = run_cli(args)
    _, out2, _ = run_cli(args + ["--threads", "4"])
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("threads"), d2.pop("threads")
    assert d1 == d2


def test_crosscheck_smoke():
    code, out, _ = run_cli(["crosscheck", "--family", "cyclic-prime", "--f", "5", "--d", "2",
                            "--p", "3", "--target", "2"])
    assert code == 0
    assert "all computed routes agree" in out


def test_lp_command_and_trivial_error():
    code, out, _ = run_cli(["lp", "--family", "cyclic-prime", "--f", "313", "--d", "3",
                            "--p", "7", "--precision", "2"])
    assert code == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    assert len(rows) == 2 and all(r["norm_valuation"] == 2 for r in rows)
    code, _, err = run_cli(["lp", "--family", "cyclic-prime", "--f", "7", "--d", "1",
                            "--p", "5", "--precision", "2"])
    assert code == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("family=cyclic-prime\nf=313\nd=3\nex=1\n")
    code, out, _ = run_cli(["annihilate", "--p", "7", "--config", str(cfg)])
    assert code == 0
    assert "41,41,48" in out


def test_spec_text_field_input():
    from padicann.fields import build_field
    K = build_field("quadratic", f=1217)
    code, out, _ = run_cli(["annihilate", "--spec", K.to_text(), "--p", "2", "--ex", "4",
                            "--recipe", "quadratic"])
    assert code == 0
    assert "16,48" in out


def test_precision_underflow_exit_3():
    # p | f_chi and the cyclotomic number is not a unit: the log is unresolvable
    code, _, err = run_cli(["lp", "--family", "quadratic", "--f", "5",
                            "--p", "5", "--precision", "2"])
    assert code == 3 and "precision underflow" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padicann.cli", "table", "--id",
                           "worked-3433"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
