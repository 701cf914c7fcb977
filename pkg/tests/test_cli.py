import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from gaplab.cli import (
    CDF_HEADER,
    GALLAGHER_HEADER,
    RECIPSUM_HEADER,
    SURVIVOR_REPORT_HEADER,
    main,
    parse_int,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("text, value", [("1000", 1000), ("1e6", 10**6), ("10^7", 10**7), ("10**3", 1000)])
def test_parse_int(text, value):
    assert parse_int(text) == value


def test_pi(capsys):
    code, out, err = run(capsys, "pi", "--x", "1000000")
    assert code == 0 and out == "78498\n"
    manifest = json.loads(err)
    assert manifest["command"] == "pi" and manifest["parameters"]["x"] == 10**6
    assert manifest["output_sha256"] == hashlib.sha256(out.encode()).hexdigest()


def test_sing(capsys):
    code, out, _ = run(capsys, "sing", "--tuple", "0,2", "--rel-err", "1e-9")
    d = json.loads(out)
    assert code == 0 and d["value"] == pytest.approx(1.3203236316937391, rel=1e-12)
    assert d["tail_bound"] <= 1e-9 and d["admissible"] is True


def test_gallagher(capsys):
    code, out, _ = run(capsys, "gallagher", "--x", "10", "--h", "2", "--kmax", "4")
    table = rows(out)
    assert table[0] == GALLAGHER_HEADER
    assert [r[4] for r in table[1:4]] == ["2", "7", "1"]
    assert table[-1][3] == ">4" and table[-1][4] == "0"


@pytest.mark.parametrize(
    "argv, header",
    [
        (["recipsum", "--x", "10000", "--threshold", "logk:2", "--threshold", "logk-eps:2,1",
          "--checkpoints", "geometric:10"], RECIPSUM_HEADER),
        (["cdf", "--x", "10000", "--threshold", "fixed:1", "--set", "survivors", "--z", "7"], CDF_HEADER),
        (["report-dyadic", "--x", "10000", "--threshold", "fixed:0.5", "--z", "7"], SURVIVOR_REPORT_HEADER),
        (["gaps", "--x", "100"], ["p", "p_next", "gap"]),
        (["survivors", "--x", "1000", "--z", "7", "--count-pairs", "6"],
         ["kind", "d1", "d2", "count", "crt_oracle"]),
    ],
)
def test_headers(capsys, argv, header):
    code, out, _ = run(capsys, *argv)
    table = rows(out)
    assert code == 0 and table[0] == header
    assert all(len(r) == len(header) for r in table)


def test_recipsum_rows(capsys):
    _, out, _ = run(capsys, "recipsum", "--x", "100000", "--threshold", "logk:2",
                    "--checkpoints", "list:1000,10000")
    table = rows(out)[1:]
    assert [r[0] for r in table] == ["1000", "10000", "100000"]
    assert all(r[6] for r in table)  # log_3 x is positive from 16 upwards


def test_survivor_counts_carry_oracle(capsys):
    _, out, _ = run(capsys, "survivors", "--x", "100000", "--z", "7",
                    "--count-pairs", "12", "--count-triples", "6")
    for kind, d1, d2, count, oracle in rows(out)[1:]:
        assert count == oracle


def test_hl(capsys):
    _, out, _ = run(capsys, "hl", "--x", "1e6", "--tuple", "0,2")
    assert json.loads(out)["actual"] == 8169


def test_singsum(capsys):
    _, out, _ = run(capsys, "singsum", "--h", "4")
    assert json.loads(out)["sum"] == pytest.approx(2 * 1.3203236316937391)


def test_deterministic_bytes(capsys):
    argv = ["recipsum", "--x", "200000", "--threshold", "logk:2", "--checkpoints", "geometric:4",
            "--segment-len", "5000"]
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]


def test_out_writes_manifest(tmp_path, capsys):
    target = tmp_path / "pi.txt"
    code, out, _ = run(capsys, "pi", "--x", "100", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == "25\n"
    man = json.loads((tmp_path / "pi.txt.manifest.json").read_text())
    assert set(man) == {"command", "parameters", "version", "wall_time_s", "output_sha256"}


@pytest.mark.parametrize(
    "argv",
    [
        ["sing", "--tuple", "0,x"],
        ["recipsum", "--x", "1000", "--threshold", "bogus:1"],
        ["recipsum", "--x", "1000", "--threshold", "adaptive:2", "--threads", "2"],
        ["cdf", "--x", "1000", "--threshold", "fixed:1", "--set", "survivors"],
        ["gallagher", "--x", "100"],
        ["pi", "--x", "100", "--nonsense"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_runtime_error_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sing", "--tuple", "0,2", "--rel-err", "1e-17"])
    assert exc.value.code == 1


def test_max_x_cap(monkeypatch, capsys):
    monkeypatch.setenv("GAPLAB_MAX_X", "10^4")
    with pytest.raises(SystemExit) as exc:
        main(["pi", "--x", "20000"])
    assert exc.value.code == 2 and "GAPLAB_MAX_X" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gaplab.cli", "pi", "--x", "1000"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "168\n"
