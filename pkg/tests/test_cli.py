import subprocess
import sys

import pytest

from stskdm.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main
from stskdm.dispersion import load_dm_set

QUICK = ["--set", "max_trials=2000", "--set", "batch_size=500", "--snr", "0,4"]


def test_ser_to_file_and_threads(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["ser", *QUICK, "--seed", "5", "--out", str(a)]) == EXIT_OK
    assert main(["ser", *QUICK, "--seed", "5", "--threads", "2", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert "seed=5" in a.read_text().splitlines()[0]


def test_capacity_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dm_family = cda\nconstellation = psk:2\ncapacity_samples = 300\n")
    assert main(["capacity", "--config", str(cfg), "--snr", "10"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "snr_db,capacity_bpcu" in out and "cda" in out


def test_gains_and_verify(capsys):
    assert main(["gains"]) == EXIT_OK
    assert "CO fixture" in capsys.readouterr().out
    assert main(["verify"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10
    assert main(["verify", "--set", "dm_family=cda", "--set", "constellation=psk:2"]) == EXIT_OK


def test_verify_failure_exit_code(tmp_path, capsys):
    # a DM file with a repeated matrix must fail injectivity
    from stskdm.constellation import make_psk
    from stskdm.dispersion import DispersionMatrixSet, fec_dm_set, save_dm_set
    import numpy as np

    A = fec_dm_set(make_psk(4)).matrices
    path = tmp_path / "dup.txt"
    save_dm_set(DispersionMatrixSet(np.concatenate([A, A[:1]]), "CO"), path)
    assert main(["verify", "--set", "dm_family=file", "--set", f"dm_file={path}"]) == EXIT_FAIL
    assert "FAIL injectivity" in capsys.readouterr().out


def test_export_round_trip(tmp_path):
    out = tmp_path / "dms.txt"
    assert main(["export-dms", "--set", "dm_family=cda", "--set", "constellation=psk:2", "--out", str(out)]) == 0
    assert load_dm_set(out).Q == 8


@pytest.mark.parametrize("argv", [
    ["ser", "--set", "nonsense=1"],
    ["ser", "--config", "/nonexistent/x.cfg"],
    ["ser", "--snr", "a,b"],
    ["ser", "--threads", "0"],
    ["frobnicate"],
    ["ser", "--bogus"],
])
def test_config_errors_exit_2(argv, capsys):
    try:
        rc = main(argv)
    except SystemExit as exc:
        rc = exc.code
    assert rc == EXIT_CONFIG


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "stskdm", "verify"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "PASS" in res.stdout


def test_empty_snr_grid_gives_header_only(tmp_path, capsys):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("snr =\n")
    assert main(["ser", "--config", str(cfg)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "snr_db,ser,trials,errors,ci95_low,ci95_high"
