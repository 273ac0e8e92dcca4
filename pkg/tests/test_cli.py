import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from movingatom.cli import SweepConfig, main, sweep
from movingatom.errors import DomainError


def _run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main(list(args) + ["--output", str(out)])
    return code, out


def _rows(path):
    return list(csv.reader(io.StringIO(path.read_text())))


def test_sigma_scan_schema(tmp_path):
    code, out = _run(tmp_path, "sigma-scan", "--nu-min", "0.01", "--nu-max", "5",
                     "--points", "200", "--log")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["nu_over_omega", "sigma1", "sigma2", "sigma3", "total", "err"]
    assert len(rows) == 201
    assert float(rows[1][0]) == 0.01 and float(rows[-1][0]) == 5.0
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    # 12 significant digits
    assert rows[1][4] == format(float(rows[1][4]), ".12g")


def test_plate_scan_peak_at_resonance(tmp_path):
    code, out = _run(tmp_path, "plate-scan", "--omega-m", "2", "--xi", "0.01", "--a", "1",
                     "--nu-min", "2.5", "--nu-max", "3.5", "--points", "201")
    assert code == 0
    data = np.array(_rows(out)[1:], dtype=float)
    step = data[1, 0] - data[0, 0]
    peak = data[np.argmax(np.abs(data[:, 1])), 0]
    assert abs(peak - 3.0) <= step


def test_friction_scan_decreasing(tmp_path):
    code, out = _run(tmp_path, "friction-scan", "--u", "0.5", "--points", "10")
    assert code == 0
    rates = np.array(_rows(out)[1:], dtype=float)[:, 1]
    assert np.all(np.diff(rates) < 0) and np.all(rates > 0)


def test_mp_and_far_limit(tmp_path):
    code, out = _run(tmp_path, "mp-scan", "--min", "0", "--max", "3", "--points", "4")
    assert code == 0
    data = np.array(_rows(out)[1:], dtype=float)
    assert data[1, 1] == 0.0
    assert data[2, 1] == pytest.approx(1 / (12 * np.pi), rel=1e-11)
    code, out = _run(tmp_path, "far-limit", "--omega-m", "1", "--min", "3", "--max", "3.5",
                     "--points", "2", name="far.csv")
    assert code == 0
    assert _rows(out)[0] == ["nu_tilde", "m_parallel", "far_limit", "rel_diff"]
    assert float(_rows(out)[1][3]) < 0.02


def test_json_output(tmp_path):
    code, out = _run(tmp_path, "mp-scan", "--points", "5", "--format", "json", name="o.json")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["subcommand"] == "mp-scan"
    assert doc["columns"] == ["nu_over_omega", "m_p"]
    assert len(doc["rows"]) == 5
    assert doc["parameters"]["omega_p"] == 1.0


@pytest.mark.parametrize("args", [
    ["mp-scan", "--points", "1"],
    ["mp-scan", "--min", "2", "--max", "1"],
    ["sigma-scan", "--log", "--min", "0"],
    ["plate-scan", "--a", "-1", "--points", "3"],
    ["friction-scan", "--u", "1.5", "--points", "3"],
    ["plate-scan", "--xi", "0", "--min", "3", "--max", "4", "--points", "2"],
    ["mp-scan", "--threads", "0"],
])
def test_domain_errors_exit_2(tmp_path, args):
    code, _ = _run(tmp_path, *args)
    assert code == 2


def test_numerical_failure_exits_3(tmp_path):
    code, _ = _run(tmp_path, "sigma-scan", "--tol", "1e-18", "--points", "3")
    assert code == 3


def test_missing_output_directory_exits_4(tmp_path):
    missing = tmp_path / "nope" / "out.csv"
    assert main(["mp-scan", "--points", "3", "--output", str(missing)]) == 4
    assert main(["acceptance", "--output", str(missing)]) == 4
    assert not missing.parent.exists()


def test_determinism_across_threads(tmp_path):
    for sub in (["plate-scan", "--min", "2.9", "--max", "3.1", "--points", "25"],
                ["sigma-scan", "--points", "30", "--log"]):
        blobs = []
        for threads in ("1", "3", "8"):
            code, out = _run(tmp_path, *sub, "--threads", threads, name=f"t{threads}.csv")
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]


def test_sweep_config_validation():
    with pytest.raises(DomainError):
        SweepConfig("bogus", 0, 1, 3)
    with pytest.raises(DomainError):
        SweepConfig("mp-scan", 0, 1, 3, format="xml")
    cfg = SweepConfig("mp-scan", 1.0, 100.0, 3, log=True)
    assert list(cfg.grid()) == pytest.approx([1.0, 10.0, 100.0])
    cols, rows = sweep(cfg)
    assert cols == ("nu_over_omega", "m_p") and len(rows) == 3


def test_console_entry_point_stdout():
    proc = subprocess.run([sys.executable, "-m", "movingatom.cli", "mp-scan", "--points", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0] == "nu_over_omega,m_p"
    assert len(proc.stdout.splitlines()) == 4
