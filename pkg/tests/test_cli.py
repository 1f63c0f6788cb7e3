import csv
import io
import json
import subprocess
import sys

import pytest

from eigenbounds import cli
from eigenbounds.spectra import load_spectrum


def run(argv):
    cfg = cli.config_from_args(argv)
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(cfg, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def sq_spec(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "sq.spec"
    code, _, _ = run(["gen", "--box", "pi,pi", "--count", "1000", "-o", str(path)])
    assert code == 0
    return path


def test_gen_writes_certified_file(sq_spec):
    s = load_spectrum(sq_spec)
    assert s.complete_count >= 1000
    assert s.eigenvalue(1) == 2.0


def test_gen_to_stdout():
    code, out, _ = run(["gen", "--sphere", "2", "--count", "4"])
    assert code == 0
    assert out.startswith("# spectrum v1;")
    assert out.splitlines()[1:] == ["0.0 1", "2.0 3", "6.0 5", "12.0 7"]


def test_bounds_yang_suite(sq_spec):
    code, out, err = run(["bounds", "--in", str(sq_spec), "--k", "1..100", "--suite", "yang"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert len(rows) == 100
    assert all(r["satisfied"] == "true" and r["bound_id"] == "yang1" for r in rows)
    assert "result: PASS" in err


def test_verify_all_passes_and_is_deterministic(sq_spec, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["verify-all", "--in", str(sq_spec), "-o", str(a)])[0] == 0
    assert run(["verify-all", "--in", str(sq_spec), "-o", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    ids = {row["bound_id"] for row in csv.DictReader(a.open())}
    for needed in ("yang1", "yang2", "ppw", "hile_protter", "li_yau_sum", "polya", "berezin_rho1", "kac",
                   "counting", "cy_recursion", "cy_upper", "quadratic_upper", "harrell_stubbe_R2",
                   "cheng_yang_lower"):
        assert needed in ids


def test_verify_all_fails_on_negative_control(tmp_path):
    path = tmp_path / "one.spec"
    path.write_text("# spectrum v1; n=2; volume=1; problem=dirichlet; exhaustive=true; label=single\n1.0 1\n")
    code, _, err = run(["heat", "--in", str(path), "--t-grid", "0.5:1.5:0.1"])
    assert code == 1
    assert "VIOLATION hs_monotone t=1" in err
    assert "VIOLATION hs_monotone t=1.1" not in err


def test_conjecture_does_not_affect_exit(sq_spec):
    code, out, err = run(["bounds", "--in", str(sq_spec), "--k", "1..20", "--suite", "conjecture",
                          "--conjecture-c", "-1000"])
    assert code == 0
    assert "false,conjecture" in out


def test_json_format(sq_spec):
    code, out, _ = run(["bounds", "--in", str(sq_spec), "--k", "1..3", "--suite", "ppw", "--format", "json"])
    data = json.loads(out)
    assert code == 0 and [d["k"] for d in data] == [1, 2, 3]
    assert data[0]["lhs"] == 3 and data[0]["rhs"] == 4


def test_riesz_and_heat_commands():
    code, out, _ = run(["riesz", "--ball", "2,1", "--count", "200", "--z-grid", "10:200:10"])
    assert code == 0 and "berezin_rho2" in out and "harrell_stubbe_ratio" in out
    code, out, _ = run(["heat", "--box", "pi,pi", "--count", "500", "--t-grid", "0.2:1:0.2"])
    assert code == 0 and out.count("\nkac,") == 5


def test_diagnostics_series():
    code, out, _ = run(["riesz", "--box", "pi,pi", "--count", "2000", "--z-grid", "500:1500:500", "--diagnostics"])
    assert code == 0
    assert out.startswith("z,value,limit,relative_deviation")


def test_projective_summary_names_normalization():
    code, _, err = run(["bounds", "--projective", "C,2", "--count", "4", "--suite", "projective"])
    assert code == 0
    assert "FP^m metric" in err


@pytest.mark.parametrize("argv,fragment", [
    (["bounds", "--box", "pi", "--sphere", "2"], "exactly one"),
    (["bounds"], "exactly one"),
    (["bounds", "--box", "pi,pi", "--k", "5..2"], "1 <= a <= b"),
    (["bounds", "--box", "pi,pi", "--z-grid", "5:1:1"], "stop >= start"),
    (["bounds", "--box", "pi,pi", "--suite", "nope"], "unknown suite"),
    (["bounds", "--ball", "2"], "n,R"),
    (["bounds", "--box", "pi,pi", "--dfield", "2"], "--dfield"),
])
def test_config_errors(argv, fragment, capsys):
    assert cli.main(argv) == 2
    assert fragment in capsys.readouterr().err


def test_k_range_beyond_spectrum(capsys):
    assert cli.main(["bounds", "--box", "pi,pi", "--count", "10", "--k", "1..500"]) == 2
    assert "exceeds" in capsys.readouterr().err


def test_console_entry_point(sq_spec):
    proc = subprocess.run([sys.executable, "-m", "eigenbounds", "verify-all", "--in", str(sq_spec), "-o", "/dev/null"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "result: PASS" in proc.stderr


def test_grid_parsing():
    assert cli.parse_grid("0.1:0.5:0.1", "--t-grid") == pytest.approx([0.1, 0.2, 0.3, 0.4, 0.5])
    assert cli.parse_k_range("3..7") == (3, 7)
    assert cli.eval_number("2pi") == pytest.approx(2 * 3.141592653589793)
    assert cli.eval_number("pi/2") == pytest.approx(3.141592653589793 / 2)
