"""
Numerical verification suites for the structural claims the protocol rests
on: stationarity of every fit, the KL loss decomposition, the factor-2
Pinsker bound, monotone path losses, the pass predictor closed forms, the
range of the optimal scaling factor and noise monotonicity
"""
import logging
import time
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np

import network_aggregation.globals as GV
from network_aggregation.domain.agent_graph import (
    AgentGraph, cyclic_path_assignment)
from network_aggregation.domain.dataset import Dataset
from network_aggregation.experiments.experiment_config import (
    ExperimentConfig)
from network_aggregation.instances.hard_instance import (
    HardInstanceSpec, generate_hard_instance, philox_stream, uniform_53)
from network_aggregation.instances.lower_bound import (
    noise_monotonicity_check, pass_diagnostics)
from network_aggregation.instances.pass_predictor import (
    brute_force_pass_coefficients, optimal_pass_coefficients)
from network_aggregation.instances.quadrature import (
    h_function, optimal_scaling_factor, scaling_gradient)
from network_aggregation.metrics.divergence import (
    bernoulli_kl, decomposition_terms)
from network_aggregation.protocol.agent_model import ProtocolTrace
from network_aggregation.protocol.sequential_protocol import (
    fit_global, max_loss_increase, max_residual_moment, run_protocol)
from network_aggregation.solver.logistic_utils import (
    bce_objective, predict_logits)
from network_aggregation.utils.file_utils import atomic_write_json, json_safe
from network_aggregation.utils.verbose_print import print_verbose

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-9
MONOTONE_TOL = 1e-9
DECOMPOSITION_TOL = 1e-8
DECOMPOSITION_GRAD_TOL = 1e-12
DECOMPOSITION_PERTURBATIONS = 20
DECOMPOSITION_SCALE = 0.1
PINSKER_TOL = -1e-12
COEFFICIENT_TOL = 1e-9
COEFFICIENT_PASSES = (2, 3, 4, 5, 6)
COEFFICIENT_SCALES = (0.3, 0.7, 1.0)
SCALING_PASSES = (1, 2, 4, 8, 16, 64)
SCALING_GRADIENT_TOL = 1e-10
NOISE_SCALE = 0.8
NOISE_PAIRS = ((0.0, 0.5), (0.5, 1.0), (1.0, 2.0))
NOISE_MARGIN = 3.0
GRADIENT_CHECKS = 100
GRADIENT_STEP = 1e-5
GRADIENT_TOL = 1e-6
H_GRID = (0.5, 1.0, 1.5, 2.0, 3.0)
RELEVANCE_WEIGHT_TOL = 0.02
RELEVANCE_SLOPE_TOL = 0.05
RELEVANCE_SLOPE_PASSES = (1, 2, 3)

# Seed offsets keep the suites' random streams apart
PINSKER_STREAM = 10
GRADIENT_STREAM = 11
DECOMPOSITION_STREAM = 12
NOISE_SEED_OFFSET = 13


class SuiteResult(NamedTuple):
    """
    Outcome of one suite: the measured worst case `value` against
        `threshold` and suite specific details
    """
    name: str
    passed: bool
    value: float
    threshold: float
    details: dict
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return json_safe(self._asdict())


def _generator(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(philox_stream(seed, stream))


class _ProtocolRun(NamedTuple):
    dataset: Dataset
    graph: AgentGraph
    trace: ProtocolTrace


def _protocol_run(config: ExperimentConfig) -> _ProtocolRun:
    dataset = generate_hard_instance(HardInstanceSpec(
        config.verify_k, config.verify_n, config.verify_seed))
    graph = cyclic_path_assignment(config.verify_k, config.verify_depth)
    opts = config.fit_options()._replace(ridge=0.0, fit_intercept=False)
    return _ProtocolRun(dataset, graph, run_protocol(dataset, graph, opts))


def orthogonality_suite(config: ExperimentConfig,
                        run: _ProtocolRun) -> SuiteResult:
    """
    Every converged agent's residual moments vanish on its own design
    """
    value = max_residual_moment(run.trace, run.graph, run.dataset)
    converged = len(run.trace.order) - len(run.trace.unconverged_agents())
    return SuiteResult("orthogonality",
                       converged > 0 and value <= ORTHOGONALITY_TOL, value,
                       ORTHOGONALITY_TOL,
                       {"converged_agents": converged,
                        "agents": len(run.trace.order)})


def monotone_suite(config: ExperimentConfig,
                   run: _ProtocolRun) -> SuiteResult:
    """
    Losses never increase along the path
    """
    value = max_loss_increase(run.trace, run.graph)
    return SuiteResult("monotone_loss", value <= MONOTONE_TOL, value,
                       MONOTONE_TOL,
                       {"losses": run.trace.loss_sequence(),
                        "depth": config.verify_depth})


def decomposition_suite(config: ExperimentConfig,
                        run: _ProtocolRun) -> SuiteResult:
    """
    L(q) = L(p*) + D(p*||q) for random perturbations q of the global fit
    """
    dataset = run.dataset
    opts = config.fit_options(DECOMPOSITION_GRAD_TOL)._replace(
        ridge=0.0, fit_intercept=False)
    global_fit = fit_global(dataset, opts)
    star_logits = global_fit.logits(dataset.features)
    generator = _generator(config.verify_seed, DECOMPOSITION_STREAM)
    feature_set = range(1, dataset.d + 1)

    residuals, gaps = [], []
    for _ in range(DECOMPOSITION_PERTURBATIONS):
        q_weights = global_fit.weights + generator.normal(
            0.0, DECOMPOSITION_SCALE, dataset.d)
        terms = decomposition_terms(
            dataset, star_logits, predict_logits(q_weights, dataset.features),
            feature_set)
        residuals.append(terms.residual)
        gaps.append(terms.loss_q - terms.loss_star)
    value = float(max(residuals))
    return SuiteResult("decomposition",
                       value <= DECOMPOSITION_TOL and min(gaps) > 0, value,
                       DECOMPOSITION_TOL,
                       {"grad_tol": opts.grad_tol,
                        "global_grad_norm": global_fit.grad_norm,
                        "global_converged": global_fit.converged,
                        "min_loss_gap": float(min(gaps))})


def pinsker_suite(config: ExperimentConfig) -> SuiteResult:
    """
    KL(p||q) - 2 (p - q)^2 >= 0 on random probability pairs
    """
    stream = philox_stream(config.verify_seed, PINSKER_STREAM)
    p_values = uniform_53(stream, config.pinsker_pairs)
    q_values = uniform_53(stream, config.pinsker_pairs)
    gaps = bernoulli_kl(p_values, q_values) - 2.0 * (p_values - q_values) ** 2
    value = float(np.min(gaps))
    return SuiteResult("pinsker", value >= PINSKER_TOL, value, PINSKER_TOL,
                       {"pairs": config.pinsker_pairs})


def coefficient_suite(_config: ExperimentConfig) -> SuiteResult:
    """
    Brute force variance minimization matches S = -c(p-1)/p and
        Var(eta) = c^2/p
    """
    errors = {}
    for p in COEFFICIENT_PASSES:
        for c in COEFFICIENT_SCALES:
            closed_form = optimal_pass_coefficients(p, c)
            brute_force = brute_force_pass_coefficients(p, c)
            errors[f"p={p},c={c}"] = max(
                abs(brute_force.alpha_sum + c * (p - 1) / p),
                abs(brute_force.residual_variance - c ** 2 / p),
                abs(closed_form.noise_variance_scaled - 1.0))
    value = float(max(errors.values()))
    return SuiteResult("coefficient_closed_form", value <= COEFFICIENT_TOL,
                       value, COEFFICIENT_TOL, {"errors": errors})


def scaling_suite(_config: ExperimentConfig) -> SuiteResult:
    """
    c*(p) lies in (0, 1), increases with p and zeroes g'
    """
    factors = [optimal_scaling_factor(p) for p in SCALING_PASSES]
    gradients = [abs(scaling_gradient(c, p))
                 for c, p in zip(factors, SCALING_PASSES)]
    in_range = all(0.0 < c < 1.0 for c in factors)
    increasing = all(later > earlier
                     for earlier, later in zip(factors, factors[1:]))
    value = float(max(gradients))
    return SuiteResult("scaling_range",
                       in_range and increasing and
                       value <= SCALING_GRADIENT_TOL,
                       value, SCALING_GRADIENT_TOL,
                       {"passes": list(SCALING_PASSES), "c_star": factors,
                        "in_range": in_range, "increasing": increasing})


def noise_suite(config: ExperimentConfig) -> SuiteResult:
    """
    L(c Z + xi) strictly increases with Var(xi), by more than 3 paired
        standard errors
    """
    checks = {}
    for v_small, v_large in NOISE_PAIRS:
        checks[f"{v_small}->{v_large}"] = noise_monotonicity_check(
            NOISE_SCALE, v_small, v_large, config.noise_samples,
            config.verify_seed + NOISE_SEED_OFFSET)
    value = float(min(check.margin for check in checks.values()))
    return SuiteResult("noise_monotonicity", value > NOISE_MARGIN, value,
                       NOISE_MARGIN,
                       {"c": NOISE_SCALE, "samples": config.noise_samples,
                        "checks": {key: check.to_dict()
                                   for key, check in checks.items()}})


def gradient_suite(config: ExperimentConfig) -> SuiteResult:
    """
    Analytic BCE gradient against central finite differences on small
        random problems
    """
    generator = _generator(config.verify_seed, GRADIENT_STREAM)
    worst = 0.0
    for _ in range(GRADIENT_CHECKS):
        sample_count = int(generator.integers(1, 51))
        column_count = int(generator.integers(1, 6))
        design = generator.normal(size=(sample_count, column_count))
        labels = (generator.random(sample_count) < 0.5).astype(np.float64)
        weights = generator.normal(size=column_count)
        _loss, analytic = bce_objective(weights, design, labels)
        numeric = np.zeros(column_count)
        for column in range(column_count):
            step = np.zeros(column_count)
            step[column] = GRADIENT_STEP
            upper, _ = bce_objective(weights + step, design, labels)
            lower, _ = bce_objective(weights - step, design, labels)
            numeric[column] = (upper - lower) / (2.0 * GRADIENT_STEP)
        scale = max(float(np.max(np.abs(analytic))), 1e-3)
        worst = max(worst, float(np.max(np.abs(numeric - analytic))) / scale)
    return SuiteResult("gradient_check", worst <= GRADIENT_TOL, worst,
                       GRADIENT_TOL, {"instances": GRADIENT_CHECKS})


def h_suite(_config: ExperimentConfig) -> SuiteResult:
    """
    h(u) = E[X sigma(X)], X ~ N(0, u^2), strictly increases in u
    """
    values = [h_function(scale) for scale in H_GRID]
    value = float(min(later - earlier
                      for earlier, later in zip(values, values[1:])))
    return SuiteResult("h_increasing", value > 0, value, 0.0,
                       {"u": list(H_GRID), "h": values})


def relevance_suite(config: ExperimentConfig) -> SuiteResult:
    """
    End-of-pass logits only use the relevance set I_p, and for the first
        three passes their slope on Z_k matches c*(p)

    The fits carry the `relevance_ridge` penalty, which bounds how far an
    agent can rescale a parent logit that is only sampling noise
    """
    k = config.verify_k
    max_pass = k - 1
    dataset = generate_hard_instance(HardInstanceSpec(
        k, config.relevance_n, config.verify_seed))
    graph = cyclic_path_assignment(k, k * max_pass)
    opts = config.fit_options()._replace(ridge=config.relevance_ridge,
                                         fit_intercept=False)
    trace = run_protocol(dataset, graph, opts)

    passes = {}
    passed = True
    worst_weight = 0.0
    for p in range(1, max_pass + 1):
        diagnostics = pass_diagnostics(trace, graph, dataset, k, p)
        c_star = optimal_scaling_factor(p)
        slope_error = abs(diagnostics.slope - c_star)
        worst_weight = max(worst_weight, diagnostics.outside_max)
        passed &= diagnostics.outside_max <= RELEVANCE_WEIGHT_TOL
        if p in RELEVANCE_SLOPE_PASSES:
            passed &= 0.0 < diagnostics.slope < 1.0
            passed &= slope_error <= RELEVANCE_SLOPE_TOL
        passes[str(p)] = dict(diagnostics.to_dict(), c_star=c_star,
                              slope_error=slope_error)
    return SuiteResult("relevance", bool(passed), worst_weight,
                       RELEVANCE_WEIGHT_TOL,
                       {"k": k, "n": config.relevance_n,
                        "ridge": config.relevance_ridge, "passes": passes})


def _suites(config: ExperimentConfig
            ) -> List[Tuple[str, Callable[[], SuiteResult]]]:
    cache: Dict[str, _ProtocolRun] = {}

    def shared_run() -> _ProtocolRun:
        if "run" not in cache:
            cache["run"] = _protocol_run(config)
        return cache["run"]

    return [("orthogonality", lambda: orthogonality_suite(config,
                                                          shared_run())),
            ("decomposition", lambda: decomposition_suite(config,
                                                          shared_run())),
            ("pinsker", lambda: pinsker_suite(config)),
            ("monotone_loss", lambda: monotone_suite(config, shared_run())),
            ("coefficient_closed_form", lambda: coefficient_suite(config)),
            ("scaling_range", lambda: scaling_suite(config)),
            ("noise_monotonicity", lambda: noise_suite(config)),
            ("gradient_check", lambda: gradient_suite(config)),
            ("h_increasing", lambda: h_suite(config)),
            ("relevance", lambda: relevance_suite(config))]


def run_suites(config: ExperimentConfig) -> List[SuiteResult]:
    """
    Run every suite, an exception inside a suite counts as its failure
    """
    results = []
    for name, suite in _suites(config):
        start_time = time.perf_counter()
        with GV.GLOBAL_TIMER.measure(f"verify {name}"):
            try:
                result = suite()
            except Exception as exception_handle:  # pylint: disable=broad-except
                logger.exception("Suite %s raised", name)
                result = SuiteResult(
                    name, False, float("nan"), float("nan"),
                    {"error": f"{type(exception_handle).__name__}: "
                     f"{exception_handle}"})
        result = result._replace(seconds=time.perf_counter() - start_time)
        print_verbose(f"{name}: {'pass' if result.passed else 'FAIL'} "
                      f"(value {result.value:.3e}, threshold "
                      f"{result.threshold:.3e})", 1)
        results.append(result)
    return results


def cmd_verify(config: ExperimentConfig) -> dict:
    """
    Run the verification suites and write `verify/verify_report.json`

    Returns:
        dict: report with per-suite values, thresholds and an overall
            `passed` flag
    """
    results = run_suites(config)
    report = json_safe({"config_hash": config.hash(),
                        "passed": all(result.passed for result in results),
                        "suites": [result.to_dict() for result in results]})
    atomic_write_json(Path(config.output_dir) / "verify" /
                      "verify_report.json", report)
    return report
