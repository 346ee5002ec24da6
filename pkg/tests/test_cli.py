import json
import subprocess
import sys

import mpmath
import pytest
from mpmath import mpf

from lommel import bounds, expansion
from lommel.cli import main, parse_angle_degrees, parse_z
from lommel.errors import ParameterError
from lommel.numerics import DEFAULT_PRECISION, precision_scope


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_eval_terminating(capsys):
    data = run_json(capsys, "eval", "--mu", "1", "--nu", "0", "--z", "7", "--strategy", "poincare")
    assert data["value_re"] == "1.0" and data["value_im"] == "0.0"
    assert data["bound_regime"] == "terminating"
    assert data["precision_digits"] == DEFAULT_PRECISION.working_digits


def test_eval_matches_library_bit_for_bit(capsys):
    data = run_json(capsys, "eval", "--mu", "0.25", "--nu", "0.3333333333", "--z", "15", "--strategy", "hyper", "--M", "3")
    res = expansion.lommel_S(mpf("0.25"), mpf("0.3333333333"), 15, strategy="hyper", M=3)
    d = data["precision_digits"]
    assert data["value_re"] == mpmath.nstr(res.value.real, d, min_fixed=-5, max_fixed=d)
    assert data["certified_bound"] == mpmath.nstr(res.certified_bound, d, min_fixed=-5, max_fixed=d)
    assert mpf(data["certified_bound"]) < mpf("1e-12")


def test_eval_output_is_deterministic(capsys):
    argv = ["eval", "--mu", "0.25", "--nu", "1/3", "--z", "12@30", "--strategy", "poincare"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_eval_zero_argument(capsys):
    code, out, err = run(capsys, "eval", "--z", "0")
    assert code == 2 and out == ""
    assert "non-zero" in err


def test_eval_far_branch_argument(capsys):
    data = run_json(capsys, "eval", "--mu", "0.25", "--nu", "1/3", "--z", "20@180", "--M", "6")
    res = expansion.lommel_S(mpf("0.25"), mpf(1) / 3, 20 * mpmath.expj(mpmath.pi), strategy="hyper", M=6)
    assert mpf(data["value_re"]) == pytest.approx(float(res.value.real), rel=1e-30)


def test_bound_first_omitted_term(capsys):
    data = run_json(capsys, "bound", "--mu", "0.25", "--nu", "1/3", "--z", "10", "--N", "5", "--regime", "right_half")
    rep = bounds.bound_right_half(mpf("0.25"), mpf(1) / 3, 10, 5)
    assert mpf(data["bound"]) == pytest.approx(float(rep.bound), rel=1e-30)
    assert data["regime"] == "right_half_cosine"


def test_bound_rotated_reports_phi_star(capsys):
    data = run_json(capsys, "bound", "--mu", "0.25", "--nu", "1/3", "--z", "10@80", "--N", "5", "--regime", "rotated")
    phi = bounds.meijer_phi(5, mpf("0.25"), parse_angle_degrees("80"))
    assert mpf(data["phi_star"]) == pytest.approx(float(phi), rel=1e-30)


def test_bound_violations_exit_3(capsys):
    code, _, err = run(capsys, "bound", "--mu", "0.25", "--nu", "1/3", "--z", "12", "--N", "6", "--M", "3", "--regime", "even_M")
    assert code == 3 and "hypothesis violated" in err
    code, _, err = run(capsys, "bound", "--mu", "5", "--nu", "1/3", "--z", "10", "--N", "2", "--regime", "right_half")
    assert code == 3 and "2N + 1" in err
    code, _, err = run(capsys, "bound", "--mu", "0.25", "--nu", "1/2", "--z", "15", "--N", "8", "--M", "1", "--regime", "hyper")
    assert code == 3 and "refused" in err


def test_stokes_scan_csv(capsys):
    code, out, _ = run(capsys, "stokes-scan", "--mu", "0.25", "--nu", "1/3", "--r", "40", "--points", "21")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(expansion.STOKES_HEADER)
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 21
    assert rows[10][3] == "0.5"
    models = [mpf(row[3]) for row in rows]
    assert all(b > a for a, b in zip(models, models[1:]))


def test_stokes_scan_bad_grid(capsys):
    assert run(capsys, "stokes-scan", "--r", "40", "--theta-min", "100", "--theta-max", "80")[0] == 2
    assert run(capsys, "stokes-scan", "--r", "40", "--points", "1")[0] == 2
    assert run(capsys, "stokes-scan", "--r", "-3")[0] == 2


def test_coeffs(capsys):
    assert run_json(capsys, "coeffs", "--family", "struve_c", "--n", "2")["polynomial"] == "6*l^-4 - 1/2*l^-2"
    assert run_json(capsys, "coeffs", "--family", "gamma_cf", "--n", "0")["polynomial"] == "1 - a"
    assert run_json(capsys, "coeffs", "--family", "lommel", "--n", "0")["polynomial"] == "1"
    assert run(capsys, "coeffs", "--family", "hermite", "--n", "2")[0] == 2
    assert run(capsys, "coeffs", "--family", "lommel", "--n", "41")[0] == 2


def test_converge_factor(capsys):
    data = run_json(capsys, "converge-factor", "--mu", "0.25", "--nu", "1/3", "--z", "20", "--N", "10")
    cf = expansion.converging_factor(mpf("0.25"), mpf(1) / 3, 20, 10)
    assert mpf(data["value_re"]) == pytest.approx(float(cf.value.real), rel=1e-30)
    assert len(data["partial_series_re"]) == 5 and data["route"] == "oracle"


def test_struve_commands(capsys):
    k = run_json(capsys, "struve", "--kind", "K", "--nu", "1/2", "--z", "4")
    assert mpf(k["value_re"]) == pytest.approx(float(mpmath.sqrt(2 / (mpmath.pi * 4))), rel=1e-30)
    big = run_json(capsys, "struve", "--kind", "M_large_order", "--nu", "50", "--lam", "2", "--n-max", "6")
    assert big["route"] == "large_order_phi"
    a = run_json(capsys, "struve", "--kind", "A", "--nu", "0.5", "--z", "10", "--route", "integral")
    assert a["route"] == "integral"
    assert run(capsys, "struve", "--kind", "M_large_order", "--nu", "50")[0] == 2
    assert run(capsys, "struve", "--kind", "A", "--nu", "0.5", "--z", "10", "--route", "direct_series")[0] == 2


def test_precision_selection(capsys, monkeypatch):
    monkeypatch.setenv("LOMMEL_PRECISION_DIGITS", "40")
    assert run_json(capsys, "eval", "--mu", "1", "--nu", "0", "--z", "7")["precision_digits"] == 40
    assert run_json(capsys, "--digits", "60", "eval", "--mu", "1", "--nu", "0", "--z", "7")["precision_digits"] == 60
    assert run(capsys, "--digits", "10", "eval", "--z", "7")[0] == 2
    monkeypatch.setenv("LOMMEL_PRECISION_DIGITS", "lots")
    assert run(capsys, "eval", "--z", "7")[0] == 2


def test_parse_z_forms():
    z, arg = parse_z("10@90")
    assert arg is None and abs(z - 10j) < mpf(10) ** -70
    z, arg = parse_z("10@270")
    assert arg == 3 * mpmath.pi / 2
    z, arg = parse_z("3-4i")
    assert z == mpmath.mpc(3, -4) and arg is None
    with pytest.raises(ParameterError):
        parse_z("0@30")
    with pytest.raises(ParameterError):
        parse_angle_degrees("north")
    with precision_scope(DEFAULT_PRECISION):
        assert parse_angle_degrees("45/2") == mpmath.pi / 8


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lommel", "coeffs", "--family", "lommel", "--n", "1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["family"] == "lommel"
