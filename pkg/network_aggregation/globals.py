"""
File that stores the Config options for the network_aggregation package
Provides the argparse CLI used by aggregation_main and the process wide
settings (verbosity, thread count, solver and quadrature defaults)

Raises:
    EnvironmentError: Raised when the environment variable NIA_THREADS is set
        to something other than a positive integer
"""
import os
import argparse
import logging
import pathlib
import shlex

from typing import List, Optional, Union

from network_aggregation.utils.timer import Timer

parser = argparse.ArgumentParser(
    description="Simulate sequential logit passing on agent DAGs and verify "
    "its excess loss bounds")
parser.add_argument("-v", "--verbose", help="Increase verbosity of output, "
                    "-v prints progress and -vv prints per point details",
                    action="count", default=0)

_common_parser = argparse.ArgumentParser(add_help=False)
_common_parser.add_argument("--config", type=str, default=None,
                            help="Path to an ExperimentConfig JSON file")
_common_parser.add_argument("--out", type=str, default=None,
                            help="Output directory, overrides output_dir "
                            "from the config")
_common_parser.add_argument("--seed", type=int, default=None,
                            help="Single unsigned seed, overrides seeds from "
                            "the config")
_common_parser.add_argument("--threads", type=int, default=None,
                            help="Number of replicate worker threads, falls "
                            "back to NIA_THREADS and then the config replicates")

_subparsers = parser.add_subparsers(dest="command", required=True)
_subparsers.add_parser("generate", parents=[_common_parser],
                       help="Write hard instance datasets")
_subparsers.add_parser("run", parents=[_common_parser],
                       help="Run the protocol once per seed and report bounds")
_subparsers.add_parser("scan", parents=[_common_parser],
                       help="Scan depths/passes and write scaling CSVs")
_subparsers.add_parser("verify", parents=[_common_parser],
                       help="Run the numerical verification suites")

ARGS: argparse.Namespace = None
VERBOSE_LEVEL: int = 0
THREADS: Optional[int] = None
GLOBAL_TIMER: Timer = None

THREADS_ENV = "NIA_THREADS"

# Solver defaults
DEFAULT_GRAD_TOL = 1e-10
DEFAULT_MAX_ITERS = 100
DEFAULT_BACKTRACK = 0.5
DEFAULT_INITIAL_STEP = 1.0
DEFAULT_ARMIJO = 1e-4
DEFAULT_MIN_STEP = 1e-12
WEIGHT_NORM_CAP = 1e4

# Protocol loss monotonicity slack is expressed in units of grad_tol
MONOTONE_SLACK_FACTOR = 10

# Lower bound analytics
QUADRATURE_NODES = 200
BISECTION_XTOL = 1e-12

# Binary formats
DATASET_MAGIC = b"NIA1"

DEFAULT_OUTPUT_DIR = pathlib.Path("results")


def verbosity(verbose_level: int) -> bool:
    """
    Check if the global verbose level is at least `verbose_level`. Provides
        an easy callable to code that should only be reachable when the
        program runs with a certain level of verbosity

    Args:
        verbose_level (int): needed level of verbosity

    Returns:
        [bool]: True if verbosity passed in meets the global verbosity levels,
            False otherwise
    """
    return VERBOSE_LEVEL >= verbose_level


def resolve_threads(cli_threads: Optional[int]) -> Optional[int]:
    """
    Resolve the worker thread count from the CLI flag or NIA_THREADS

    Args:
        cli_threads (int | None): value of --threads, None when not passed

    Raises:
        EnvironmentError: NIA_THREADS is set but is not a positive integer

    Returns:
        int | None: number of replicate threads, None when neither the flag
            nor the environment variable is set
    """
    if cli_threads is not None:
        if cli_threads < 1:
            raise ValueError(f"--threads must be >= 1, got {cli_threads}")
        return cli_threads
    try:
        raw_threads = os.environ[THREADS_ENV]
    except KeyError:
        return None
    try:
        threads = int(raw_threads)
    except ValueError as exception_handle:
        raise EnvironmentError(
            f"Environment variable '{THREADS_ENV}' must be a positive "
            f"integer, got '{raw_threads}'") from exception_handle
    if threads < 1:
        raise EnvironmentError(
            f"Environment variable '{THREADS_ENV}' must be a positive "
            f"integer, got '{raw_threads}'")
    return threads


def global_parse_args(arg_string: Union[str, List[str]] = None):
    """
    Function to load global arguments from either arg_string or sys.argv.
    The results of the parsing are stored in global argument `ARGS`

    Args:
        arg_string (str, optional): string to parse into command line
            arguments, loads sys.argv when this is None. Defaults to None.
    """
    global ARGS, VERBOSE_LEVEL, THREADS  # pylint: disable=global-statement
    if isinstance(arg_string, str):
        parsed_args = shlex.split(arg_string)
    elif isinstance(arg_string, list):
        parsed_args = arg_string
    else:
        parsed_args = None
    ARGS = parser.parse_args(args=parsed_args)

    VERBOSE_LEVEL = ARGS.verbose
    THREADS = resolve_threads(ARGS.threads)
    reload_globals()
    return ARGS


def reload_globals():
    """
    Process global variables after they are loaded/reloaded
    """
    global GLOBAL_TIMER  # pylint: disable=global-statement
    if VERBOSE_LEVEL == 0:
        logging.disable(logging.INFO)
    else:
        logging.disable(logging.NOTSET)
        logging.basicConfig(
            level=logging.DEBUG if VERBOSE_LEVEL >= 2 else logging.INFO,
            format="%(asctime)s %(name)s %(levelname)s %(message)s")

    GLOBAL_TIMER = Timer()


GLOBAL_TIMER = Timer()
