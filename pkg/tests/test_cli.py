import json
import subprocess
import sys

import pytest

from mimopnc import __version__
from mimopnc.cli import CSV_HEADER, main, parse_snr_grid, read_points


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "mimopnc", *args], capture_output=True, text=True)


def data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_sweep_thirteen_rows(tmp_path):
    out = tmp_path / "curve.csv"
    code = main(["sweep", "--detector", "zf-pnc-llr", "--snr", "0:2:24", "--trials", "2000",
                 "--seed", "7", "--out", str(out)])
    assert code == 0
    lines = data_lines(out.read_text())
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 14
    pts = read_points(out.read_text())
    assert [p.snr_db for p in pts] == [float(v) for v in range(0, 25, 2)]
    assert all(p.seed == 7 and p.detector == "zf-pnc-llr" for p in pts)


def test_header_echoes_config(tmp_path):
    out = tmp_path / "c.csv"
    main(["fixed-channel", "--detector", "zf-nc", "--channel", "1,1;1,1", "--snr", "20:1:20",
          "--trials", "1000", "--seed", "3", "--out", str(out)])
    head = [ln for ln in out.read_text().splitlines() if ln.startswith("#")]
    assert head[0] == f"# mimopnc {__version__}"
    assert head[1] == "# command: fixed-channel"
    cfg = json.loads(head[2].removeprefix("# config: "))
    assert cfg["trials"] == 1000 and cfg["snr"] == [20.0, 1.0, 20.0]
    assert "channel" in cfg
    assert head[3] == "# seed: 3"


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sweep", "--detector", "mmse-pnc-sel", "--snr", "0:5:10", "--trials", "5000", "--seed", "1"]
    main(base + ["--out", str(a), "--workers", "1"])
    main(base + ["--out", str(b), "--workers", "4"])
    assert a.read_bytes() == b.read_bytes()


def test_floats_round_trip(tmp_path):
    out = tmp_path / "c.csv"
    main(["sweep", "--detector", "zf-nc", "--snr", "0:0.1:0.3", "--trials", "3000", "--out", str(out)])
    rows = data_lines(out.read_text())[1:]
    for row, p in zip(rows, read_points(out.read_text())):
        fields = row.split(",")
        assert float(fields[4]) == p.ber
        assert float(fields[5]) == p.ci_half_width


def test_lemma2_pass():
    r = run_cli("lemma2", "--var1", "1.0", "--var2", "1.0", "--trials", "200000", "--seed", "1")
    assert r.returncode == 0
    assert "# verdict: P1 == P2: PASS" in r.stdout
    assert "lemma2: PASS" in r.stderr


@pytest.mark.parametrize(
    "args",
    [
        ["sweep"],
        ["sweep", "--detector", "nope"],
        ["sweep", "--detector", "zf-nc", "--snr", "10:2:0"],
        ["sweep", "--detector", "zf-nc", "--snr", "0:0:10"],
        ["sweep", "--detector", "zf-nc", "--trials", "0"],
        ["sweep", "--detector", "zf-nc", "--bogus"],
        ["fixed-channel", "--detector", "zf-nc", "--channel", "1,2,3"],
        ["lemma2", "--var1", "-1", "--var2", "1"],
        ["conjecture1", "--grid-size", "4"],
        ["frobnicate"],
    ],
)
def test_usage_errors(args):
    r = run_cli(*args)
    assert r.returncode == 2
    assert r.stderr.strip()


def test_unwritable_output(tmp_path):
    r = run_cli("sweep", "--detector", "zf-nc", "--snr", "0:1:0", "--trials", "10",
                "--out", str(tmp_path / "missing" / "x.csv"))
    assert r.returncode == 3
    assert "cannot write" in r.stderr


def test_reproduce_prints_gaps(tmp_path):
    out = tmp_path / "f2.csv"
    r = run_cli("reproduce-fig2", "--snr", "0:10:20", "--trials", "2000", "--out", str(out))
    assert r.returncode == 0
    assert r.stdout.count("gap ") == 2
    dets = {p.detector for p in read_points(out.read_text())}
    assert dets == {"zf-nc", "zf-pnc-llr", "zf-pnc-sel"}


def test_parse_snr_grid():
    assert parse_snr_grid("0:2:24") == (0.0, 2.0, 24.0)
    assert parse_snr_grid("-5:0.5:5") == (-5.0, 0.5, 5.0)
