import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pwfriend.cli import (
    EXIT_CHECK,
    EXIT_INPUT,
    EXIT_OK,
    InputError,
    load_params,
    load_spec,
    main,
    safe_eval,
)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize("expr,value", [
    ("1/sqrt(2)", 1 / math.sqrt(2)), ("pi/2", math.pi / 2), ("-0.5", -0.5),
    ("2**-1", 0.5), ("cos(0)", 1.0), ("3", 3.0),
])
def test_safe_eval(expr, value):
    assert safe_eval(expr) == pytest.approx(value)


@pytest.mark.parametrize("expr", ["__import__('os')", "x", "1/0", "sqrt(1, 2)", "'a'", "1 +"])
def test_safe_eval_rejects(expr):
    with pytest.raises(ValueError):
        safe_eval(expr)


def test_load_params_fills_normalisation(tmp_path):
    p = load_params(_write(tmp_path, "p.txt", "# comment\na = 0.6\nalpha = 0.8  # trailing\n"
                                              "phi_SF = pi/4\nphi = pi/2\n"))
    assert p.b == pytest.approx(0.8) and p.beta == pytest.approx(0.6)
    assert p.phi == pytest.approx(math.pi / 2) and p.phi_SF == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("text,line", [
    ("a = 0.6\nalpha = nope\n", ":2:"),
    ("a = 0.6\n\nalpha 0.8\n", ":3:"),
    ("a = 0.6\nbogus = 1\n", ":2:"),
    ("a = 0.6\na = 0.7\n", ":2:"),
    ("a = 0.6\nalpha=0.8\nphi = 0\nphi_S = 1\n", ":3:"),
])
def test_parse_errors_carry_line_numbers(tmp_path, text, line):
    with pytest.raises(InputError, match=line):
        load_params(_write(tmp_path, "p.txt", text))


def test_params_out_of_domain(tmp_path):
    with pytest.raises(InputError):
        load_params(_write(tmp_path, "p.txt", "a = 0.6\nb = 0.6\nalpha = 0.5\n"))
    with pytest.raises(InputError):
        load_params(_write(tmp_path, "p.txt", "alpha = 0.5\n"))
    with pytest.raises(InputError):
        load_params(str(tmp_path / "missing.txt"))


def test_load_spec(tmp_path):
    spec = load_spec(_write(tmp_path, "s.txt",
                            "alpha = 0.2:0.8:4\nphi = 0:2*pi:5\na_over_alpha = 1\n"
                            "phi_SF = 0.1\ntol = 1e-8\nout = x.csv\n"))
    assert spec.alpha.steps == 4 and spec.phi.hi == pytest.approx(2 * math.pi)
    assert spec.a_over_alpha.steps == 1 and spec.fixed == {"phi_SF": 0.1}
    assert spec.tol == 1e-8 and spec.out == "x.csv"
    for bad, line in [("alpha = 0:1\nphi = 0\na = 0.5\n", ":1:"),
                      ("alpha = 0.5\nphi = 0:1:2.5\na = 0.5\n", ":2:"),
                      ("alpha = 0.5\nphi = 0\nwhat = 1\n", ":3:")]:
        with pytest.raises(InputError, match=line):
            load_spec(_write(tmp_path, "bad.txt", bad))
    with pytest.raises(InputError):
        load_spec(_write(tmp_path, "bad.txt", "alpha = 0.5\nphi = 0\n"))


def test_tables_command(tmp_path, capsys):
    params = _write(tmp_path, "nd.txt", "a = 0.6\nalpha = 0.6\nphi = 0\n")
    out = str(tmp_path / "t.json")
    assert main(["tables", "--params", params, "--out", out]) == EXIT_OK
    text = capsys.readouterr().out
    assert "T4: max |closed - operator|" in text
    rep = json.loads(open(out).read())
    assert rep["tables"]["T4"]["forward"] == [[1.0, 0.0], [1.0, 0.0]]
    assert rep["tables"]["T4"]["branch"] == "ND1"
    assert all(rep["tables"][t]["max_deviation"] < 1e-9 for t in rep["tables"])


def test_tables_command_degenerate(tmp_path, capsys):
    params = _write(tmp_path, "a0.txt", "a = 0\nalpha = 0.6\n")
    assert main(["tables", "--params", params]) == EXIT_OK
    text = capsys.readouterr().out
    for tid in ("T3", "T5", "T6"):
        assert f"{tid}: degenerate" in text
    assert "def1 forward" in text


def test_tables_coincidence(tmp_path):
    params = _write(tmp_path, "c.txt", "a = 1/sqrt(2)\nalpha = 0.6\nphi = pi/2\n")
    out = str(tmp_path / "t.json")
    assert main(["tables", "--params", params, "--out", out]) == EXIT_OK
    tabs = json.loads(open(out).read())["tables"]
    assert np.allclose(tabs["T1"]["forward"], tabs["T2"]["forward"], atol=1e-12)
    assert np.allclose(tabs["T1"]["forward"], tabs["T3"]["forward"], atol=1e-12)


def test_check_command_exit_codes(tmp_path, capsys):
    counter = _write(tmp_path, "ce.txt", "a = 1/sqrt(2)\nalpha = 0.6\nphi_SF = pi/2\n")
    out = str(tmp_path / "c.json")
    assert main(["check", "--params", counter, "--out", out]) == EXIT_CHECK
    rep = json.loads(open(out).read())
    assert rep["checks"]["weakly_consistent"] and not rep["checks"]["consistent"]
    assert rep["checks"]["def2a_normalized"]
    assert main(["check", "--params", counter,
                 "--require", "def2a_normalized,weakly_consistent"]) == EXIT_OK
    generic = _write(tmp_path, "g.txt", "a = 0.6\nalpha = 0.8\nphi = 0.7\n")
    main(["check", "--params", generic, "--out", out])
    assert not any(json.loads(open(out).read())["checks"].values())
    assert main(["check", "--params", counter, "--require", "nonsense"]) == EXIT_INPUT
    capsys.readouterr()


def test_check_at_nondisturbance(tmp_path):
    nd = _write(tmp_path, "nd.txt", "a = 0.6\nalpha = 0.6\n")
    assert main(["check", "--params", nd,
                 "--require", "def2a_normalized,def3_valid,nondisturbance"]) == EXIT_OK


def test_sweep_command_is_deterministic(tmp_path, capsys):
    spec = _write(tmp_path, "s.txt", "alpha = 0.2:0.8:3\nphi = 0:2*pi:4\na_over_alpha = 0.5:1.5:3\n")
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["sweep", "--spec", spec, "--out", a]) == EXIT_OK
    assert main(["sweep", "--spec", spec, "--out", b]) == EXIT_OK
    assert open(a, "rb").read() == open(b, "rb").read()
    assert main(["sweep", "--spec", spec]) == EXIT_INPUT
    assert main(["sweep", "--spec", spec, "--out", str(tmp_path / "no" / "x.csv")]) == EXIT_INPUT
    capsys.readouterr()


def test_regress_command(tmp_path, capsys):
    out = str(tmp_path / "r.json")
    assert main(["regress", "--seed", "1", "--trials", "6", "--out", out]) == EXIT_OK
    rep = json.loads(open(out).read())
    assert max(rep["max_deviation"].values()) < 1e-10
    assert main(["regress", "--trials", "1", "--identity"]) == EXIT_OK
    assert main(["regress", "--trials", "0"]) == EXIT_INPUT
    assert main(["regress", "--dims", "5"]) == EXIT_INPUT
    assert main(["regress", "--dims", "x"]) == EXIT_INPUT
    capsys.readouterr()


def test_usage_errors_exit_2(capsys):
    assert main([]) == EXIT_INPUT
    assert main(["tables"]) == EXIT_INPUT
    assert main(["--help"]) == EXIT_OK
    capsys.readouterr()


def test_sweep_help_documents_columns():
    proc = subprocess.run([sys.executable, "-m", "pwfriend", "sweep", "--help"],
                          capture_output=True, text=True, check=True)
    assert "def3_fwd" in proc.stdout and "17 significant digits" in proc.stdout
