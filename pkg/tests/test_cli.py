import json
import subprocess
import sys
from pathlib import Path

import pytest

from perturbed_laguerre.cli import main

GOLDEN = Path(__file__).parent / "golden"

CASES = [
    (["moments", "--alpha", "1", "--j", "2"], "moments_alpha1_j2.json"),
    (["hankel", "--alpha", "1", "--n", "2", "--bits", "128"], "hankel_alpha1_n2.json"),
    (["series", "--alpha", "1/2", "--kind", "c-small", "--terms", "4"], "series_c_small_half.json"),
    (["series", "--alpha", "1/2", "--kind", "ratio", "--terms", "7", "--format", "csv"],
     "series_ratio_half.csv"),
    (["fluid", "--alpha", "1/2", "--t", "0", "--n", "10", "--bits", "128"], "fluid_t0_n10.json"),
]


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


@pytest.mark.parametrize("argv,name", CASES)
def test_golden_output(argv, name, capsys):
    rc, out, _ = run(argv, capsys)
    assert rc == 0
    assert out == (GOLDEN / name).read_text()


def test_output_is_deterministic(capsys):
    argv = ["recurrence", "--alpha", "3/4", "--t", "1/3", "--n", "5"]
    first = run(argv, capsys)[1]
    assert run(argv, capsys)[1] == first
    doc = json.loads(first)
    assert len(doc["alpha"]) == len(doc["beta"]) == len(doc["h"]) == 5


def test_output_file(tmp_path, capsys):
    target = tmp_path / "m.csv"
    rc, out, _ = run(["moments", "--alpha", "1/2", "--count", "3", "--format", "csv",
                      "-o", str(target)], capsys)
    assert rc == 0 and out == ""
    assert target.read_text().splitlines()[0] == "j,mu"


def test_ode_defaults_to_csv(capsys):
    rc, out, _ = run(["ode", "--alpha", "1/2", "--s-max", "1", "--tol", "1e-10", "--bits", "128"], capsys)
    assert rc == 0
    header, columns = out.splitlines()[:2]
    assert json.loads(header[2:])["alpha"] == "1/2"
    assert columns == "s,C,Cp,lnDelta,Hcal"


def test_refused_computation_exits_one(capsys):
    rc, out, err = run(["series", "--alpha", "3", "--kind", "c-small"], capsys)
    assert rc == 1 and out == "" and err.startswith("error:")
    rc, _, err = run(["ode", "--alpha", "2", "--s-max", "5"], capsys)
    assert rc == 1 and "integer" in err


def test_usage_errors_exit_two(capsys):
    for argv in (["moments", "--alpha", "x", "--j", "1"],
                 ["hankel", "--alpha", "1/2", "--n", "0"],
                 ["series", "--alpha", "1/2", "--kind", "nope"],
                 ["moments", "--alpha", "1", "--j", "1", "--bits", "16"],
                 []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_verify_subset(capsys):
    rc, out, _ = run(["verify", "--only", "2,8"], capsys)
    assert rc == 0
    assert "[PASS] criterion  2:" in out and "[PASS] criterion  8:" in out
    rc, out, _ = run(["verify", "--only", "2", "--report", "json"], capsys)
    assert json.loads(out)["results"][0]["passed"] is True


def test_verify_reports_failure(capsys):
    rc, out, _ = run(["verify", "--only", "1"], capsys)
    assert rc == 1 and "[FAIL] criterion  1:" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "perturbed_laguerre", "moments", "--alpha", "1", "--j", "2"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout) == {"mu": "6"}
