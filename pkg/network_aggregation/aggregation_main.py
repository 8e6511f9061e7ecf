"""
Command line entry point

    python -m network_aggregation.aggregation_main [-v] <command> [--config
        <path>] [--out <dir>] [--seed <u64>] [--threads <n>]

Exit codes: 0 on success, 1 when a command fails (bad config, IO errors),
2 when `verify` reports a failing suite.
"""
import json
import sys
import traceback
from typing import List

import network_aggregation.globals as GV
from network_aggregation.experiments.commands import (
    cmd_generate, cmd_run, cmd_scan)
from network_aggregation.experiments.experiment_config import (
    ExperimentConfig)
from network_aggregation.experiments.experiment_response import (
    ExperimentResponse)
from network_aggregation.experiments.experiment_status import (
    ExperimentStatus)
from network_aggregation.experiments.verify_suites import cmd_verify

COMMAND_HANDLERS = {"generate": cmd_generate,
                    "run": cmd_run,
                    "scan": cmd_scan,
                    "verify": cmd_verify}


def load_config(args) -> ExperimentConfig:
    """
    Config from --config (defaults when absent) with --out/--seed applied
    """
    if args.config is None:
        config = ExperimentConfig().validate()
    else:
        config = ExperimentConfig.from_file(args.config)
    return config.with_overrides(args.out, args.seed)


def compute(args: List[str]) -> ExperimentResponse:
    """
    Run one subcommand on a list of arguments

    Args:
        args (List[str]): command line arguments without the program name

    Returns:
        ExperimentResponse: the command result, or a failure carrying the
            traceback
    """
    try:
        parsed_args = GV.global_parse_args(args)
        config = load_config(parsed_args)
        command = parsed_args.command
        with GV.GLOBAL_TIMER.measure(command):
            result = COMMAND_HANDLERS[command](config)
        result["timings"] = GV.GLOBAL_TIMER.as_dict()
        if GV.verbosity(2):
            GV.GLOBAL_TIMER.display()

        if command == "verify" and not result["passed"]:
            failed = [suite["name"] for suite in result["suites"]
                      if not suite["passed"]]
            return ExperimentResponse(ExperimentStatus.suite_failure, result,
                                      f"Failing suites: {failed}")
        return ExperimentResponse(ExperimentStatus.success, result,
                                  f"{command} finished")

    # argparse exits on --help and on usage errors
    except SystemExit as exit_handle:
        if exit_handle.code in (0, None):
            return ExperimentResponse(ExperimentStatus.success, {}, "")
        return ExperimentResponse(ExperimentStatus.failure, result=None,
                                  message=f"Invalid arguments: {args}")

    # Catch all errors that occur during a command and build the
    #    appropriate response
    except Exception as _exception:  # pylint: disable=broad-except
        exception_message = traceback.format_exc()
        return ExperimentResponse(ExperimentStatus.failure, result=None,
                                  message=exception_message)


def print_result(experiment_response: ExperimentResponse):
    """
    Print an ExperimentResponse, the result as JSON on stdout and failure
        messages on stderr

    Args:
        experiment_response (ExperimentResponse): response to print
    """
    if experiment_response.status == ExperimentStatus.failure:
        print(experiment_response.message, file=sys.stderr)
        return
    if experiment_response.result:
        print(json.dumps(experiment_response.to_dict()["result"], indent=2))
    if experiment_response.status == ExperimentStatus.suite_failure:
        print(experiment_response.message, file=sys.stderr)


def main(args: List[str] = None) -> int:
    experiment_response = compute(sys.argv[1:] if args is None else args)
    print_result(experiment_response)
    return experiment_response.exit_code


if __name__ == "__main__":
    sys.exit(main())
