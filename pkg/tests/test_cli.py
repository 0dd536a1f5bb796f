from __future__ import annotations

import orjson
import pytest

from padic_paths.main import main


def _run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _lines(out: str):
    return [orjson.loads(line) for line in out.splitlines() if line]


def test_lambda_at_two(capsys) -> None:
    code, out, _ = _run(capsys, "lambda", "--p", "2", "--x", "1")
    assert code == 0
    (line,) = _lines(out)
    assert line["command"] == "lambda"
    assert line["result"]["phase"] == "1/8"
    assert line["result"]["mag2"] == "1"


def test_frac_accepts_negative_rationals(capsys) -> None:
    code, out, _ = _run(capsys, "frac", "--p", "3", "--x", "-1/3")
    assert code == 0
    assert _lines(out)[0]["result"] == {"frac": "2/3"}


def test_digits(capsys) -> None:
    code, out, _ = _run(capsys, "digits", "--p", "2", "--x", "3/4", "--count", "3")
    assert code == 0
    assert _lines(out)[0]["result"] == {"valuation": -2, "digits": [1, 1, 0]}


def test_gauss_oracle_agrees(capsys) -> None:
    code, out, _ = _run(capsys, "gauss", "--p", "3", "--alpha", "1/3", "--beta", "0", "--oracle")
    assert code == 0
    result = _lines(out)[0]["result"]
    assert result["closed"]["mag2"] == "1/3"
    assert result["delta"] < 1e-9


def test_kernel_free_particle(capsys) -> None:
    code, out, _ = _run(capsys, "kernel", "--system", "free", "--m", "1", "--t0", "0", "--t1", "1", "--x0", "0", "--x1", "0", "--place", "5")
    assert code == 0
    kernel = _lines(out)[0]["result"]["kernel"]
    assert (kernel["mag2"], kernel["phase"]) == ("1", "0")


def test_field_without_force_is_free(capsys) -> None:
    common = ("--m", "3/2", "--t0", "0", "--t1", "2", "--x0", "1", "--x1", "-1/3", "--place", "3")
    _, free_out, _ = _run(capsys, "kernel", "--system", "free", *common)
    _, field_out, _ = _run(capsys, "kernel", "--system", "field", "--g", "0", *common)
    assert _lines(free_out)[0]["result"] == _lines(field_out)[0]["result"]


def test_slice_matches_direct(capsys) -> None:
    code, out, _ = _run(capsys, "slice", "--system", "field", "--g", "2", "--n", "4", "--t1", "3", "--x1", "5", "--place", "inf")
    assert code == 0
    assert _lines(out)[0]["result"]["equal"] is True


def test_evolve_ball_indicator(capsys) -> None:
    code, out, _ = _run(capsys, "evolve", "--system", "free", "--t1", "3", "--place", "3", "--samples", "0", "1/3")
    assert code == 0
    inside, outside = _lines(out)[0]["result"]["abs"]
    assert abs(inside - 1) < 1e-9 and abs(outside) < 1e-9


def test_malformed_rational_is_a_usage_error(capsys) -> None:
    code, _, _ = _run(capsys, "lambda", "--p", "3", "--x", "0.5")
    assert code == 2


def test_missing_place_is_a_usage_error(capsys) -> None:
    code, _, err = _run(capsys, "lambda", "--x", "1")
    assert code == 2
    assert "--place" in err


def test_bad_place_is_a_config_error(capsys) -> None:
    code, _, err = _run(capsys, "lambda", "--p", "4", "--x", "1")
    assert code == 2
    assert err.startswith("ConfigError:")


def test_zero_alpha_reports_the_error_kind(capsys) -> None:
    code, out, err = _run(capsys, "gauss", "--p", "3", "--alpha", "0", "--beta", "1")
    assert code == 3
    assert out == ""
    assert "ZeroAlpha:" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--suite", "lambda", "--seed", "42"),
        ("verify", "--suite", "group", "--seed", "7", "--place", "3"),
        ("verify", "--suite", "delta", "--place", "3"),
    ],
)
def test_verify_suites_pass(capsys, argv) -> None:
    code, out, _ = _run(capsys, *argv)
    reports = _lines(out)
    assert reports
    assert all(report["status"] == "pass" for report in reports), [r for r in reports if r["status"] != "pass"]
    assert code == 0


def test_verify_is_deterministic(capsys) -> None:
    argv = ("verify", "--suite", "lambda", "--seed", "3", "--place", "5")
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second


def test_budget_from_config_file(capsys, tmp_path) -> None:
    path = tmp_path / "run.env"
    path.write_text("PADIC_TERM_BUDGET=5\nplace=3\n")
    code, _, err = _run(capsys, "gauss", "--config", str(path), "--alpha", "1/3", "--gamma", "5")
    assert code == 4
    assert "SumTooLarge:" in err


def test_budget_from_environment(capsys, monkeypatch) -> None:
    monkeypatch.setenv("PADIC_TERM_BUDGET", "5")
    code, _, _ = _run(capsys, "gauss", "--p", "3", "--alpha", "1/3", "--gamma", "5")
    assert code == 4


def test_missing_config_file(capsys, tmp_path) -> None:
    code, _, err = _run(capsys, "lambda", "--config", str(tmp_path / "absent.env"), "--p", "3", "--x", "1")
    assert code == 2
    assert "not found" in err


def test_verify_unitarity_passes(capsys) -> None:
    code, out, _ = _run(capsys, "verify", "--suite", "unitarity", "--seed", "42")
    reports = _lines(out)
    assert {report["check"] for report in reports} >= {"unitarity/diagonal/3", "unitarity/diagonal/5"}
    assert all(report["status"] == "pass" for report in reports)
    assert code == 0


def test_lambda_suite_checks_the_addition_identity(capsys) -> None:
    code, out, _ = _run(capsys, "verify", "--suite", "lambda", "--seed", "1", "--place", "2")
    checks = {report["check"]: report["status"] for report in _lines(out)}
    assert checks["lambda/sum/2"] == "pass"
    assert code == 0


@pytest.mark.parametrize("argv", [("lambda", "--p", "3", "--x", "1/00"), ("lambda", "--p", "3", "--x", "1", "--h", "2/00")])
def test_zero_denominator_is_a_usage_error(capsys, argv) -> None:
    code, out, _ = _run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_zero_denominator_in_config_file(capsys, tmp_path) -> None:
    path = tmp_path / "run.env"
    path.write_text("PADIC_H=2/00\n")
    code, _, err = _run(capsys, "lambda", "--config", str(path), "--p", "3", "--x", "1")
    assert code == 2
    assert err.startswith("ConfigError:")


def test_json_log_format(capsys, monkeypatch) -> None:
    monkeypatch.setenv("PADIC_LOG_FORMAT", "json")
    code, _, err = _run(capsys, "gauss", "--p", "3", "--alpha", "1/3", "--gamma", "5", "--budget", "5")
    assert code == 4
    event = orjson.loads(err.splitlines()[0])
    assert event["event"] == "term_budget_exceeded"
    assert event["level"] == "warning"
