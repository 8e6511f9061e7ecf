"""
Command line progress messages

Messages go through tqdm so they land above a running scan progress bar
instead of tearing it. Below the requested verbosity they are kept as
debug records of the progress logger.
"""
import logging

from tqdm import tqdm

import network_aggregation.globals as GV

logger = logging.getLogger("network_aggregation.progress")


def print_verbose(message: str, verbose_level: int = 2):
    """
    Print `message` when the program runs at `verbose_level` or above

    Args:
        message (str): progress message
        verbose_level (int, optional): minimum verbosity. Defaults to 2.
    """
    if GV.verbosity(verbose_level):
        tqdm.write(message)
    else:
        logger.debug(message)
