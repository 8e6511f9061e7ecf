import json
import math

import pytest

import network_aggregation.experiments.verify_suites as verify_suites
from network_aggregation.experiments.experiment_config import (
    ExperimentConfig)

SMALL_CONFIG = ExperimentConfig(verify_k=3, verify_n=5000, verify_depth=6,
                                pinsker_pairs=2000, noise_samples=20000,
                                relevance_n=2000)


@pytest.fixture(scope="module")
def protocol_run():
    return verify_suites._protocol_run(SMALL_CONFIG)


def test_protocol_suites(protocol_run):
    orthogonality = verify_suites.orthogonality_suite(SMALL_CONFIG,
                                                      protocol_run)
    assert orthogonality.passed
    assert orthogonality.details["converged_agents"] == 6

    monotone = verify_suites.monotone_suite(SMALL_CONFIG, protocol_run)
    assert monotone.passed
    assert len(monotone.details["losses"]) == 6


def test_decomposition(protocol_run):
    result = verify_suites.decomposition_suite(SMALL_CONFIG, protocol_run)
    assert result.passed
    assert result.details["grad_tol"] == verify_suites.DECOMPOSITION_GRAD_TOL
    assert result.details["min_loss_gap"] > 0


def test_decomposition_fails_with_loose_tolerance(protocol_run):
    loose = SMALL_CONFIG._replace(grad_tol=1e-2)
    result = verify_suites.decomposition_suite(loose, protocol_run)
    assert not result.passed
    assert result.value > verify_suites.DECOMPOSITION_TOL


@pytest.mark.parametrize("suite", [
    verify_suites.pinsker_suite,
    verify_suites.coefficient_suite,
    verify_suites.scaling_suite,
    verify_suites.noise_suite,
    verify_suites.gradient_suite,
    verify_suites.h_suite,
])
def test_analytic_suites(suite):
    result = suite(SMALL_CONFIG)
    assert result.passed, result.details
    json.dumps(result.to_dict(), allow_nan=False)


def test_scaling_details():
    details = verify_suites.scaling_suite(SMALL_CONFIG).details
    assert details["in_range"]
    assert details["increasing"]
    assert len(details["c_star"]) == len(verify_suites.SCALING_PASSES)


@pytest.mark.slow
def test_relevance():
    config = SMALL_CONFIG._replace(verify_k=4, relevance_n=200000)
    result = verify_suites.relevance_suite(config)
    assert result.passed, result.details
    passes = result.details["passes"]
    assert set(passes) == {"1", "2", "3"}
    assert all(passes[p]["slope_error"] <= verify_suites.RELEVANCE_SLOPE_TOL
               for p in passes)
    assert result.details["ridge"] == config.relevance_ridge


def test_raising_suite_is_a_failure(monkeypatch, tmp_path):
    def broken_suite(_config):
        raise ArithmeticError("broken")
    monkeypatch.setattr(verify_suites, "h_suite", broken_suite)

    config = SMALL_CONFIG._replace(output_dir=str(tmp_path))
    report = verify_suites.cmd_verify(config)
    by_name = {suite["name"]: suite for suite in report["suites"]}
    assert len(by_name) == 10
    assert not report["passed"]
    assert not by_name["h_increasing"]["passed"]
    assert by_name["h_increasing"]["value"] is None
    assert "ArithmeticError" in by_name["h_increasing"]["details"]["error"]
    assert by_name["pinsker"]["passed"]
    assert all(suite["seconds"] >= 0 for suite in report["suites"])

    written = json.loads((tmp_path / "verify" / "verify_report.json")
                         .read_text(encoding="utf-8"))
    assert written == report


def test_suite_result_is_strict_json():
    result = verify_suites.SuiteResult("x", False, math.nan, 1.0, {})
    assert result.to_dict()["value"] is None
