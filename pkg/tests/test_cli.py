import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from ordcalc.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run("--format", "json", *argv)
    return code, json.loads(text)


def test_stirling_table():
    code, text = run("stirling", "--max-k", "4")
    assert code == 0
    assert text.splitlines()[-1] == "0 1 7 6 1"
    code, rec = run_json("stirling", "--max-k", "0")
    assert rec["result"] == [["1"]]
    code, rec = run_json("stirling", "--max-k", "5")
    assert rec["result"][5][2] == "15"


def test_stirling_big_values_are_strings():
    _, rec = run_json("stirling", "--max-k", "40")
    assert int(rec["result"][40][20]) > 2**63


def test_expand_power_normal():
    code, rec = run_json("expand", "--power", "4", "--order", "normal")
    assert code == 0
    assert rec["coefficients"] == ["0", "1", "7", "6", "1"]
    assert rec["agrees"] is True
    assert rec["exact"] is True


def test_expand_power_zero_antinormal():
    code, rec = run_json("expand", "--power", "0", "--order", "antinormal")
    assert rec["coefficients"] == ["1"]


def test_expand_power_text():
    code, text = run("expand", "--power", "3")
    assert text == "n^3 = ad^3*a^3 + 3*ad^2*a^2 + ad*a\nagrees: true\n"


def test_expand_exp_antinormal():
    code, rec = run_json("expand", "--exp", "0.1", "--order", "antinormal", "--max-m", "3")
    assert code == 0
    assert len(rec["coefficients"]) == 4
    assert rec["coefficients"][0] == pytest.approx(1.10517, abs=1e-5)
    assert rec["agrees"] is True


def test_expand_exp_csv():
    code, text = run("--format", "csv", "expand", "--exp", "0.5", "--max-m", "2")
    lines = text.splitlines()
    assert lines[0] == "m,coefficient"
    assert float(lines[2].split(",")[1]) == pytest.approx(math.expm1(-0.5), rel=1e-15)


@pytest.mark.parametrize("k", range(13))
def test_expand_power_always_agrees(k):
    for order in ("normal", "antinormal"):
        code, rec = run_json("expand", "--power", str(k), "--order", order)
        assert code == 0 and rec["agrees"] is True


def test_expand_requires_exactly_one_source():
    assert run("expand")[0] == 2
    assert run("expand", "--power", "2", "--exp", "0.1")[0] == 2
    assert run("expand", "--power", "-1")[0] == 2


@pytest.mark.parametrize(
    "expr,order,want",
    [
        ("a*ad", "normal", "ad*a + 1"),
        ("n^2", "antinormal", "a^2*ad^2 - 3*a*ad + 1"),
        ("n^3", "normal", "ad^3*a^3 + 3*ad^2*a^2 + ad*a"),
    ],
)
def test_rewrite(expr, order, want):
    code, text = run("rewrite", "--expr", expr, "--order", order)
    assert code == 0
    assert text.strip() == want


def test_rewrite_json_terms_are_exact():
    _, rec = run_json("rewrite", "--expr", "a*ad/3")
    assert rec["result"] == "1/3*ad*a + 1/3"
    assert [Fraction(t["coefficient"]) for t in rec["terms"]] == [Fraction(1, 3)] * 2


def test_rewrite_parse_error(capsys):
    code, text = run("rewrite", "--expr", "a*(n")
    assert code == 2
    assert "byte 4" in capsys.readouterr().err


def test_expect_fock_closed():
    code, text = run("expect", "--state", "fock", "--n", "2", "--gamma", "0.5", "--method", "closed")
    assert code == 0
    assert float(text) == pytest.approx(math.exp(-1), rel=1e-15)
    assert text.startswith("0.36787944")


def test_expect_vacuum():
    code, rec = run_json(
        "expect", "--state", "coherent", "--alpha-re", "0", "--alpha-im", "0", "--gamma", "0.7"
    )
    assert rec["value"] == 1.0


def test_expect_coherent_series():
    code, rec = run_json(
        "expect", "--state", "coherent", "--alpha-re", "1", "--alpha-im", "0",
        "--gamma", "0.1", "--method", "series", "--max-m", "200",
    )
    assert code == 0
    assert rec["value"] == pytest.approx(math.exp(math.expm1(-0.1)), abs=1e-8)
    assert rec["converged"] is True and rec["diverged"] is False


def test_expect_divergence_is_reported_not_fatal():
    code, rec = run_json(
        "expect", "--state", "fock", "--n", "1", "--gamma", "0.8", "--method", "series", "--max-m", "500"
    )
    assert code == 0
    assert rec["diverged"] is True


def test_expect_matrix_and_truncation():
    code, rec = run_json(
        "expect", "--state", "coherent", "--alpha-re", "1", "--alpha-im", "1",
        "--gamma", "0.3", "--method", "matrix", "--dim", "64",
    )
    assert code == 0
    assert rec["value"] == pytest.approx(math.exp(2 * math.expm1(-0.3)), abs=1e-8)
    code, _ = run(
        "expect", "--state", "fock", "--n", "6", "--gamma", "0.1", "--method", "matrix",
        "--order", "antinormal", "--dim", "8", "--max-m", "3",
    )
    assert code == 3


def test_expect_csv_columns():
    code, text = run(
        "--format", "csv", "expect", "--state", "fock", "--n", "3", "--gamma", "0.2",
        "--method", "series", "--max-m", "300",
    )
    header, row = text.splitlines()
    assert header.split(",")[-2:] == ["value", "converged"]
    assert row.endswith(",true")


@pytest.mark.parametrize(
    "argv",
    [
        ["expect", "--state", "fock", "--gamma", "0.1"],
        ["expect", "--state", "fock", "--n", "1", "--alpha-re", "1", "--gamma", "0.1"],
        ["expect", "--state", "coherent", "--n", "1", "--gamma", "0.1"],
        ["expect", "--state", "coherent", "--gamma", "0.1", "--order", "normal"],
        ["expect", "--state", "squeezed", "--gamma", "0.1"],
        ["nonsense"],
    ],
)
def test_bad_flags_exit_2(argv):
    assert run(*argv)[0] == 2


@pytest.mark.parametrize("suite", ["stirling", "lemmas", "fock"])
def test_verify_suites(suite):
    code, rec = run_json("verify", "--suite", suite)
    assert code == 0 and rec["passed"] is True
    tol = {"stirling": 0.0, "lemmas": 1e-12, "fock": 1e-8}[suite]
    if suite != "fock":
        assert all(c["max_error"] <= tol for c in rec["checks"])


def test_subcommand_format_flag():
    assert run("verify", "--suite", "lemmas", "--format", "json")[1].startswith("{")


def test_output_is_deterministic():
    argv = ["--format", "json", "expand", "--exp", "0.3", "--order", "antinormal", "--max-m", "8"]
    assert run(*argv) == run(*argv)
    argv = ["expect", "--state", "coherent", "--alpha-re", "2", "--gamma", "0.05", "--method", "series"]
    assert run(*argv) == run(*argv)


def test_json_round_trips_exact_values():
    _, rec = run_json("expand", "--power", "20")
    from ordcalc.ordering import normal_power

    assert [Fraction(c) for c in rec["coefficients"]] == list(normal_power(20).coefficients)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ordcalc", "rewrite", "--expr", "a†*a*a*a†"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.strip() == "ad^2*a^2 + 2*ad*a"
