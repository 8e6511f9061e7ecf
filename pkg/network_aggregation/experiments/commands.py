"""
The generate, run and scan subcommands

Every command takes a validated ExperimentConfig, writes its files under
config.output_dir and returns a JSON serializable result dictionary.
Scientific outcomes (a bound that does not hold, an unconverged fit) are
reported in the outputs and never raise.
"""
import io
import logging
import math
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

import network_aggregation.globals as GV
from network_aggregation.domain.agent_graph import (
    AgentGraph, cyclic_path_assignment, load_agent_graph, path_order)
from network_aggregation.domain.coverage import (
    CoverageResult, check_m_coverage, minimal_coverage_window)
from network_aggregation.domain.dataset import Dataset
from network_aggregation.errors import InvalidConfig
from network_aggregation.experiments.dataset_io import (
    read_dataset, write_dataset)
from network_aggregation.experiments.experiment_config import (
    KIND_HARD, ExperimentConfig)
from network_aggregation.instances.hard_instance import (
    HardInstanceSpec, generate_hard_instance)
from network_aggregation.instances.lower_bound import (
    curve_relative_errors, fit_curve_constant)
from network_aggregation.instances.quadrature import predicted_pass_excess
from network_aggregation.metrics.bounds import (
    coefficient_l1, convergence_bound_rhs, feature_scale)
from network_aggregation.metrics.theory_report import build_theory_report
from network_aggregation.protocol.sequential_protocol import (
    fit_global, run_protocol, sink_excess_losses)
from network_aggregation.protocol.trace_io import (
    write_logit_dump, write_trace_csv)
from network_aggregation.solver.logistic_solver import FitResult
from network_aggregation.utils.file_utils import (
    atomic_write_json, atomic_write_text, json_safe)
from network_aggregation.utils.verbose_print import print_verbose

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ["k", "D", "M", "p", "seed", "n", "sink_loss", "global_loss",
                "excess", "upper_bound", "lower_shape", "covered", "B_X",
                "B_pstar", "config_hash", "errors"]
# Checks of the fitted C/(p+1) curve at the ends of pass p <= k - 1
CURVE_REL_TOL = 0.25
CURVE_LOWER_FRACTION = 0.5


def worker_count(config: ExperimentConfig) -> int:
    """
    --threads / NIA_THREADS when set, the config's replicates otherwise
    """
    if GV.THREADS is not None:
        return GV.THREADS
    return config.replicates


def dataset_file_name(config: ExperimentConfig, seed: int) -> str:
    return f"hard_k{config.k}_n{config.n}_seed{seed}.nia"


def load_instance(config: ExperimentConfig, seed: int) -> Dataset:
    """
    Dataset of one replicate: a fresh hard instance for kind "hard", the
        configured dataset file otherwise
    """
    if config.kind == KIND_HARD:
        return generate_hard_instance(
            HardInstanceSpec(config.k, config.n, seed))
    return read_dataset(config.dataset_path)


def load_graph(config: ExperimentConfig) -> AgentGraph:
    """
    The configured graph file, or the cyclic path of depth run_depth
    """
    if config.graph_path is not None:
        return load_agent_graph(config.graph_path)
    return cyclic_path_assignment(config.k, config.run_depth)


def resolve_window(config: ExperimentConfig,
                   graph: AgentGraph) -> Optional[int]:
    """
    Coverage window M reported by run, None when the graph is not a path
        or no window covers it
    """
    if not graph.is_path():
        return None
    if config.window is not None:
        return config.window
    if config.graph_path is None:
        return config.k
    return minimal_coverage_window(graph)


def cmd_generate(config: ExperimentConfig) -> dict:
    """
    Write one hard instance dataset file (plus sidecar) per seed

    Raises:
        InvalidConfig: the config kind is not "hard"

    Returns:
        dict: written files and their checksums
    """
    if config.kind != KIND_HARD:
        raise InvalidConfig("generate needs kind 'hard'")
    output_dir = Path(config.output_dir) / "datasets"
    files = []
    for seed in config.seeds:
        with GV.GLOBAL_TIMER.measure(f"generate seed {seed}"):
            spec = HardInstanceSpec(config.k, config.n, seed)
            dataset = generate_hard_instance(spec)
            path = output_dir / dataset_file_name(config, seed)
            checksum = write_dataset(dataset, path, spec.to_dict(), seed)
        print_verbose(f"Wrote {path} ({checksum[:16]})", 1)
        files.append({"path": str(path), "seed": seed, "sha256": checksum})
    return {"config_hash": config.hash(), "files": files}


def _run_replicate(config: ExperimentConfig, seed: int,
                   output_dir: Path) -> dict:
    dataset = load_instance(config, seed)
    graph = load_graph(config)
    opts = config.fit_options()

    global_fit = fit_global(dataset, opts)
    trace = run_protocol(dataset, graph, opts)
    sink_excess = sink_excess_losses(trace, graph, dataset, global_fit)

    trace_path = output_dir / f"trace_seed{seed}.csv"
    write_trace_csv(trace, trace_path)
    files = {"trace": str(trace_path)}
    if config.dump_logits:
        dump_path = output_dir / f"logits_seed{seed}.bin"
        write_logit_dump(trace, dump_path)
        files["logits"] = str(dump_path)

    window = resolve_window(config, graph)
    coverage = CoverageResult(False)
    report = None
    if window is not None and window <= graph.num_agents:
        coverage = check_m_coverage(graph, window, dataset.d)
        order = path_order(graph)
        report = build_theory_report(
            dataset.features, dataset.labels,
            [trace.logits_of(agent) for agent in order],
            trace.loss_sequence(order), global_fit.weights,
            global_fit.logits(dataset.features), global_fit.loss, window,
            coverage.covered)

    return {"seed": seed,
            "n": dataset.n,
            "d": dataset.d,
            "agents": graph.num_agents,
            "global_loss": global_fit.loss,
            "global_converged": global_fit.converged,
            "all_converged": trace.all_converged,
            "unconverged_agents": trace.unconverged_agents(),
            "sink_excess": {str(sink): excess
                            for sink, excess in sink_excess.items()},
            "M": window,
            "coverage": coverage.covered,
            "first_violation": coverage.first_violation,
            "theory_report": None if report is None else report.to_dict(),
            "files": files}


def cmd_run(config: ExperimentConfig) -> dict:
    """
    Run the protocol once per seed and report excess losses and bounds

    Writes `run/trace_seed<seed>.csv` per seed (plus the optional logit
    dump) and `run/run_report.json`.
    """
    output_dir = Path(config.output_dir) / "run"
    runs = []
    for seed in config.seeds:
        with GV.GLOBAL_TIMER.measure(f"run seed {seed}"):
            replicate = _run_replicate(config, seed, output_dir)
        runs.append(replicate)
        print_verbose(f"seed {seed}: sink excess {replicate['sink_excess']}, "
                      f"coverage {replicate['coverage']}", 1)
    result = json_safe({"config_hash": config.hash(),
                        "config": config.to_dict(),
                        "runs": runs})
    atomic_write_json(output_dir / "run_report.json", result)
    return result


def _prepare_seed(config: ExperimentConfig, seed: int
                  ) -> Tuple[Dataset, FitResult]:
    dataset = load_instance(config, seed)
    return dataset, fit_global(dataset, config.fit_options())


def _scan_point(config: ExperimentConfig, depth: int, seed: int,
                dataset: Dataset, global_fit: FitResult) -> List[dict]:
    base = {"k": config.k, "D": depth, "p": depth // config.k, "seed": seed,
            "n": config.n, "lower_shape": 1.0 / (depth // config.k + 1),
            "config_hash": config.hash()}
    rows = []
    try:
        graph = cyclic_path_assignment(config.k, depth)
        trace = run_protocol(dataset, graph, config.fit_options())
        sink_loss = trace.losses[graph.topo_order[-1]]
        feature_bound = feature_scale(dataset.features)
        optimum_bound = coefficient_l1(global_fit.weights)
        for window in config.scan_windows:
            covered = window <= depth and check_m_coverage(
                graph, window, dataset.d).covered
            upper_bound = math.nan
            if covered:
                upper_bound = convergence_bound_rhs(
                    optimum_bound, feature_bound, window, depth)
            rows.append(dict(base, M=window, sink_loss=sink_loss,
                             global_loss=global_fit.loss,
                             excess=sink_loss - global_fit.loss,
                             upper_bound=upper_bound, covered=covered,
                             B_X=feature_bound, B_pstar=optimum_bound,
                             errors=""))
    except Exception as exception_handle:  # pylint: disable=broad-except
        logger.exception("Scan point D=%d seed=%d failed", depth, seed)
        rows = [dict(base, M=window, sink_loss=math.nan,
                     global_loss=global_fit.loss, excess=math.nan,
                     upper_bound=math.nan, covered=False, B_X=math.nan,
                     B_pstar=math.nan,
                     errors=f"{type(exception_handle).__name__}: "
                     f"{exception_handle}")
                for window in config.scan_windows]
    return rows


def summarize_scan(scan_frame: pd.DataFrame, k: int) -> pd.DataFrame:
    """
    Seed statistics per (D, M) and the fitted 1/(p+1) curve

    The curve constant is anchored at the end of pass 1 (D = k) of each
    window and compared at every end of pass (D a multiple of k).
    lower_bound_range marks the ends of pass p <= k - 1, where the lower
    bound applies. Past it every feature is in the relevance set and the
    excess falls below the curve.
    """
    valid = scan_frame[scan_frame["errors"] == ""]
    grouped = valid.groupby(["D", "M"], sort=True)
    summary = grouped.agg(p=("p", "first"),
                          seeds=("seed", "count"),
                          excess_mean=("excess", "mean"),
                          excess_sem=("excess", "sem"),
                          upper_bound=("upper_bound", "mean"),
                          lower_shape=("lower_shape", "first")).reset_index()
    # Left empty where the path is not M-covered
    summary["bound_held"] = (
        summary["excess_mean"] <= summary["upper_bound"]).astype(object)
    summary.loc[summary["upper_bound"].isna(), "bound_held"] = None

    summary["curve_constant"] = math.nan
    summary["predicted_excess"] = math.nan
    summary["rel_error"] = math.nan
    for window, window_rows in summary.groupby("M"):
        end_of_pass = window_rows[window_rows["D"] % k == 0]
        passes = end_of_pass["p"].tolist()
        if 1 not in passes:
            continue
        constant = fit_curve_constant(passes,
                                      end_of_pass["excess_mean"].tolist())
        summary.loc[end_of_pass.index, "curve_constant"] = constant
        summary.loc[end_of_pass.index, "predicted_excess"] = \
            constant / (end_of_pass["p"] + 1.0)
        summary.loc[end_of_pass.index, "rel_error"] = curve_relative_errors(
            passes, end_of_pass["excess_mean"].tolist(), constant)
        logger.debug("M=%d fitted curve constant %.6f", window, constant)

    summary["lower_bound_range"] = ((summary["D"] % k == 0)
                                    & (summary["p"] >= 1)
                                    & (summary["p"] <= k - 1))
    summary["curve_within_tol"] = (
        summary["rel_error"] <= CURVE_REL_TOL).astype(object)
    summary["above_half_curve"] = (
        summary["excess_mean"]
        >= CURVE_LOWER_FRACTION * summary["predicted_excess"]).astype(object)
    no_curve = summary["predicted_excess"].isna()
    summary.loc[no_curve, "curve_within_tol"] = None
    summary.loc[no_curve, "above_half_curve"] = None

    population: Dict[int, float] = {}
    for p in summary["p"].unique():
        if p >= 1:
            population[int(p)] = predicted_pass_excess(int(p))
    summary["population_pass_excess"] = [population.get(int(p), math.nan)
                                         for p in summary["p"]]
    return summary


def excess_non_increasing(summary: pd.DataFrame) -> Dict[str, bool]:
    """
    Per window, whether the seed mean excess is non-increasing in D with a
        slack of one standard error
    """
    verdicts = {}
    for window, window_rows in summary.groupby("M"):
        means = window_rows["excess_mean"].to_numpy()
        slack = np.nan_to_num(window_rows["excess_sem"].to_numpy())
        verdicts[str(window)] = bool(np.all(
            means[1:] <= means[:-1] + slack[1:]))
    return verdicts


def excess_decreasing(summary: pd.DataFrame) -> Dict[str, bool]:
    """
    Per window, whether the seed mean excess strictly decreases in D
    """
    return {str(window): bool(np.all(np.diff(
                window_rows["excess_mean"].to_numpy()) < 0))
            for window, window_rows in summary.groupby("M")}


def lower_bound_curve_held(summary: pd.DataFrame
                           ) -> Dict[str, Optional[bool]]:
    """
    Per window, whether every end of pass inside lower_bound_range is
        within CURVE_REL_TOL of the fitted curve and above
        CURVE_LOWER_FRACTION of it, None when no such pass was fitted
    """
    verdicts: Dict[str, Optional[bool]] = {}
    for window, window_rows in summary.groupby("M"):
        checked = window_rows[window_rows["lower_bound_range"]
                              & window_rows["predicted_excess"].notna()]
        if checked.empty:
            verdicts[str(window)] = None
            continue
        verdicts[str(window)] = bool(checked["curve_within_tol"].all()
                                     and checked["above_half_curve"].all())
    return verdicts


def _frame_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.17g")
    return buffer.getvalue()


def cmd_scan(config: ExperimentConfig) -> dict:
    """
    Run the protocol on cyclic paths for every depth and seed

    Writes `scan/scan.csv` with one row per (D, M, seed) and
    `scan/scan_summary.csv` with the seed statistics. Replicates run on a
    thread pool; rows are ordered by grid index, not completion order.

    Raises:
        InvalidConfig: the config kind is not "hard"
    """
    if config.kind != KIND_HARD:
        raise InvalidConfig("scan needs kind 'hard'")
    output_dir = Path(config.output_dir) / "scan"
    depths = config.scan_depths
    threads = worker_count(config)
    print_verbose(f"Scanning D={depths} M={config.scan_windows} over "
                  f"{len(config.seeds)} seeds with {threads} threads", 1)

    with ThreadPool(processes=threads) as pool:
        with GV.GLOBAL_TIMER.measure("scan prepare"):
            prepared = dict(zip(config.seeds, pool.starmap(
                _prepare_seed, [(config, seed) for seed in config.seeds])))

        tasks = [(config, depth, seed) + prepared[seed]
                 for depth in depths for seed in config.seeds]
        with GV.GLOBAL_TIMER.measure("scan protocol"):
            point_rows = list(tqdm(pool.imap(_star_scan_point, tasks),
                                   total=len(tasks), desc="scan",
                                   disable=not GV.verbosity(1)))

    scan_frame = pd.DataFrame([row for rows in point_rows for row in rows],
                              columns=SCAN_COLUMNS)
    with GV.GLOBAL_TIMER.measure("scan summary"):
        summary = summarize_scan(scan_frame, config.k)
    atomic_write_text(output_dir / "scan.csv", _frame_csv(scan_frame))
    atomic_write_text(output_dir / "scan_summary.csv", _frame_csv(summary))

    failed = int((scan_frame["errors"] != "").sum())
    if failed:
        logger.warning("%d scan rows failed, see the errors column", failed)
    return json_safe({"config_hash": config.hash(),
                      "rows": len(scan_frame),
                      "failed_rows": failed,
                      "excess_non_increasing": excess_non_increasing(summary),
                      "excess_decreasing": excess_decreasing(summary),
                      "lower_bound_curve_held":
                          lower_bound_curve_held(summary),
                      "summary": summary.to_dict(orient="records"),
                      "files": {"scan": str(output_dir / "scan.csv"),
                                "summary": str(output_dir /
                                               "scan_summary.csv")}})


def _star_scan_point(arguments: tuple) -> List[dict]:
    return _scan_point(*arguments)
