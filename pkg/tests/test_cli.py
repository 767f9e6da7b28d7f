import json
import subprocess
import sys

import pytest

from harmsphere import curvio
from harmsphere.cli import main
from harmsphere.jets import parse_scalar_series
from harmsphere.models import parse_space


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_sigma(capsys):
    code, out, _ = run(capsys, "expand", "sigma", "--order", "5")
    assert code == 0
    assert "5: -1/168*R4 - 1/210*R0 R2 - 1/112*R1 R1 - 1/210*R2 R0 - 2/945*R0 R0 R0" in out


def test_expand_trace_round_trips(capsys):
    code, out, _ = run(capsys, "expand", "trace", "--order", "5")
    assert code == 0
    name, body = out.strip().split(" = ", 1)
    assert name == "tr(sigma)"
    s = parse_scalar_series(body)
    assert str(s.coefficient(5)) == "-1/15120*L"


def test_expand_ball(capsys):
    code, out, _ = run(capsys, "expand", "ball", "--order", "3")
    assert code == 0
    assert "3: -1/1440*L + 1/96*T2" in out
    assert "3: 1/30240*L - 1/96*T2" in out


def test_expand_json(capsys):
    code, out, _ = run(capsys, "expand", "rS", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["series"]["|R^S|^2"]["coefficients"]["2"]["Q0"] == "4/9"


@pytest.mark.parametrize("argv", [["expand", "nope"], ["expand", "sigma", "--order", "40"], ["frobnicate"], []])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


@pytest.mark.parametrize("spec", ["form:n=6,k=-1", "dr:q=3,p=1,m=1"])
def test_verify_passes(capsys, spec):
    code, out, _ = run(capsys, "verify", spec, "--samples", "5000")
    assert code == 0, out
    assert "all checks passed" in out
    assert "FAIL" not in out


def test_verify_corrupted_file(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    text = curvio.dump(parse_space("form:n=4,k=1").build())
    path.write_text(text.replace("1 2 1 2 1.0", "1 2 1 2 0.7"))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 1
    assert "FAIL  structure" in out
    assert "first Bianchi" in out


def test_verify_non_harmonic_file(capsys, tmp_path):
    # product of two unit spheres: algebraically fine, not harmonic
    lines = ["n 4", "R"]
    for a, b in ((1, 2), (3, 4)):
        lines += [f"{a} {b} {a} {b} 1.0", f"{b} {a} {b} {a} 1.0", f"{a} {b} {b} {a} -1.0", f"{b} {a} {a} {b} -1.0"]
    path = tmp_path / "prod.txt"
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", str(path), "--samples", "0")
    assert code == 1
    assert "FAIL  H constant in u" in out


def test_verify_unparsable(capsys, tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("hello\n")
    assert run(capsys, "verify", str(path))[0] == 2
    assert run(capsys, "verify", "dr:q=9,p=1")[0] == 2


def test_space_dump_round_trip(capsys, tmp_path):
    path = tmp_path / "cp.txt"
    code, out, _ = run(capsys, "space", "dr:q=1,p=1", "--dump", str(path), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["C"] == pytest.approx(-1.5)
    assert data["space"] == "dr:q=1,p=1"
    code, out, _ = run(capsys, "space", str(path), "--json")
    assert json.loads(out)["H"] == pytest.approx(1.125)


def test_compare_dim12_pair(capsys):
    code, out, _ = run(capsys, "compare", "dr:q=3,p=2,m=0", "dr:q=3,p=1,m=1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "nablaR-mismatch"
    N = 12 * 14 * 16
    assert data["deltas"]["sphere_r2"] == pytest.approx(29 / (16 * N) * 576, abs=1e-9)
    assert data["deltas"]["ball_D_r3"] == pytest.approx(576 / (42 * N), abs=1e-9)
    assert data["deltas"]["ball_N_r3"] == pytest.approx(576 / (6 * N), abs=1e-9)
    assert [r["label"] for r in data["reports"]] == ["dr:q=3,p=2,m=0", "dr:q=3,p=1,m=1"]


@pytest.mark.parametrize(
    "a,b,verdict",
    [
        ("flat:n=6", "flat:n=6", "indistinguishable-at-this-order"),
        ("flat:n=6", "flat:n=7", "dimension-mismatch"),
        ("form:n=6,k=-1", "flat:n=6", "CHL-mismatch"),
    ],
)
def test_compare_verdicts(capsys, a, b, verdict):
    code, out, _ = run(capsys, "compare", a, b)
    assert code == 0
    assert out.strip().endswith(f"verdict: {verdict}")


def test_compare_rejects_bad_order(capsys):
    assert run(capsys, "compare", "flat:n=4", "flat:n=4", "--order", "9")[0] == 2


def test_compare_json_is_bit_identical_across_processes():
    cmd = [sys.executable, "-m", "harmsphere", "compare", "dr:q=1,p=2", "form:n=6,k=-1", "--json", "--seed", "3"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b
    assert json.loads(a)["verdict"] == "CHL-mismatch"
