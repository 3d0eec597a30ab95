"""Command-line parsing, serialization determinism, and exit codes."""

import json

import numpy as np
import pytest

from spectra import SolverFailure, cli
from spectra.cli import (PolynomialParseError, format_polynomial, parse_complex,
                         parse_grid, parse_polynomial, run)
from spectra.ncpoly import NCPolynomial


# -- literal parsers -----------------------------------------------------------

def test_parse_complex():
    assert parse_complex("0+1i") == 1j
    assert parse_complex("2.5") == 2.5
    assert parse_complex("1-3e-2j") == 1 - 0.03j
    with pytest.raises(ValueError):
        parse_complex("feather")


def test_parse_grid():
    g = parse_grid("-3:3:7")
    assert g[0] == -3 and g[-1] == 3 and len(g) == 7
    with pytest.raises(ValueError):
        parse_grid("1:2")
    with pytest.raises(ValueError):
        parse_grid("3:1:5")


# -- polynomial grammar ----------------------------------------------------------

def test_parse_polynomial_selfadjoint_pair():
    p = parse_polynomial("x1*x2 + x2*x1")
    assert p.is_selfadjoint()
    assert p.degree() == 2
    assert p.terms == {(1, 2): 1.0 + 0j, (2, 1): 1.0 + 0j}


def test_parse_polynomial_imaginary_coefficient():
    p = parse_polynomial("(0+1i)*x1")
    assert p.terms == {(1,): 1j}
    assert not p.is_selfadjoint()
    assert p.star() == parse_polynomial("(0-1i)*x1")


def test_parse_polynomial_constant_term():
    p = parse_polynomial("x1*x1 - 1")
    from spectra.ncpoly import evaluate
    out = evaluate(p, [np.eye(3)])
    assert np.abs(out).max() < 1e-15


def test_parse_polynomial_implicit_star():
    assert parse_polynomial("2x1") == parse_polynomial("2*x1")
    assert parse_polynomial("x1 x2") == parse_polynomial("x1*x2")


def test_parse_polynomial_leading_minus():
    p = parse_polynomial("-x1 + 1")
    assert p.terms == {(1,): -1.0 + 0j, (): 1.0 + 0j}


def test_parse_polynomial_errors_carry_position():
    with pytest.raises(PolynomialParseError) as err:
        parse_polynomial("x1 + ")
    assert err.value.position >= 3
    with pytest.raises(PolynomialParseError):
        parse_polynomial("x + 1")
    with pytest.raises(PolynomialParseError):
        parse_polynomial("(2+3q)*x1")
    with pytest.raises(PolynomialParseError):
        parse_polynomial("x1 ** x2")
    with pytest.raises(PolynomialParseError):
        parse_polynomial("")


def test_printer_round_trip():
    cases = [
        "x1*x2 + x2*x1",
        "(0+1i)*x1",
        "x1*x1 - 1",
        "(2-1i)*x1*x2*x1 + (0.5+0i)*x2",
    ]
    for text in cases:
        p = parse_polynomial(text)
        assert parse_polynomial(format_polynomial(p)) == p


def test_printer_round_trip_random():
    rng = np.random.default_rng(1)
    for _ in range(30):
        terms = {}
        for _ in range(rng.integers(1, 5)):
            w = tuple(rng.integers(1, 3, size=rng.integers(0, 4)))
            terms[w] = complex(np.round(rng.standard_normal(), 6),
                               np.round(rng.standard_normal(), 6))
        p = NCPolynomial(terms, 2)
        assert parse_polynomial(format_polynomial(p), num_vars=2) == p


# -- commands ---------------------------------------------------------------------

def test_density_csv_semicircle_center(tmp_path):
    out = tmp_path / "density.csv"
    status = run(["density", "--m", "1", "--r", "1", "--grid", "-3:3:601",
                  "--eta", "1e-3", "--format", "csv", "--output", str(out)])
    assert status == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("# version=")
    assert lines[1].startswith("# config=")
    assert lines[2] == "x,rho,eta,residual"
    rows = [line.split(",") for line in lines[3:]]
    xs = np.array([float(r[0]) for r in rows])
    rho = np.array([float(r[1]) for r in rows])
    mid = np.argmin(np.abs(xs))
    assert abs(rho[mid] - 0.31831) < 1e-3
    res = np.array([float(r[3]) for r in rows])
    assert res.max() <= 1e-12


def test_support_json(tmp_path):
    out = tmp_path / "support.json"
    status = run(["support", "--m", "1", "--r", "2", "--format", "json",
                  "--output", str(out)])
    assert status == 0
    data = json.loads(out.read_text())
    assert data["version"]
    (lo, hi), = data["results"]["support"]
    assert abs(lo + 2 * np.sqrt(2)) <= 0.01 and abs(hi - 2 * np.sqrt(2)) <= 0.01


def test_sample_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["sample", "--ensemble", "sgrm", "--n", "6",
                    "--seed", "5", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_output_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["verify", "master-equation", "--n", "20", "--trials", "5",
            "--lambda", "0+1i", "--seed", "3"]
    assert run(argv + ["--output", str(a)]) == 0
    assert run(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    payload = json.loads(a.read_text())
    assert payload["config"]["seed"] == 3
    assert payload["config"]["experiment"] == "master-equation"
    assert payload["results"]["records"][0]["bound_check"]["passed"] is True


def test_fock_moment_command(tmp_path):
    out = tmp_path / "moment.json"
    assert run(["fock-moment", "--poly", "x1*x1", "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["results"]["moment"] == {"re": 1.0, "im": 0.0}


def test_norm_command(tmp_path):
    out = tmp_path / "norm.json"
    assert run(["norm", "--m", "1", "--r", "1", "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert abs(data["results"]["norm"] - 2.0) <= 0.01


def test_verify_power_norm_small(tmp_path):
    out = tmp_path / "power.json"
    status = run(["verify", "power-norm", "--p", "1", "--n", "200",
                  "--trials", "3", "--seed", "7", "--output", str(out)])
    data = json.loads(out.read_text())
    rec = data["results"]["records"][0]
    assert status in (0, 3)
    assert rec["details"]["target"] == 2.0


def test_exit_code_invalid_config():
    assert run(["density", "--grid", "nonsense"]) == 1
    with pytest.raises(SystemExit) as err:
        run(["verify", "no-such-experiment"])
    assert err.value.code == 1


def test_exit_code_failed_check(tmp_path):
    # tiny matrices at tiny eps: outliers guaranteed, the check fails
    out = tmp_path / "contain.json"
    status = run(["verify", "containment", "--m", "1", "--r", "2",
                  "--n", "25", "--eps", "0.01", "--trials", "6",
                  "--seed", "2", "--output", str(out)])
    assert status == 3


def test_exit_code_solver_failure(monkeypatch):
    def boom(*a, **k):
        raise SolverFailure("stuck", residual=1.0, iterations=7)

    monkeypatch.setattr("spectra.dyson.support", boom)
    status = run(["verify", "containment", "--n", "20", "--trials", "2"])
    assert status == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 20, "trials": 4, "seed": 9}))
    out = tmp_path / "out.json"
    status = run(["verify", "master-equation", "--config", str(cfg),
                  "--output", str(out)])
    assert status == 0
    data = json.loads(out.read_text())
    assert data["config"]["n"] == 20 and data["config"]["trials"] == 4

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"volume": 11}))
    with pytest.raises(SystemExit) as err:
        run(["verify", "master-equation", "--config", str(bad)])
    assert err.value.code == 1


def test_env_seed(monkeypatch, tmp_path):
    monkeypatch.setenv("SPECTRA_SEED", "31415")
    a = tmp_path / "a.json"
    assert run(["sample", "--n", "4", "--output", str(a)]) == 0
    data = json.loads(a.read_text())
    assert data["config"]["seed"] == 31415
