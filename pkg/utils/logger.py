"""
Logger utility - Console + file logging.
Console stays quiet (errors only) so printed reports and progress bars read cleanly.
"""

import logging
import sys


def get_logger(name='vnestruct', log_file=None, verbose=False):
    """
    Get a configured logger.
    Default: only show ERROR-level messages on console.
    Verbose mode: show WARNING and above.
    If log_file is specified, logs DEBUG and above to file.
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        if log_file or verbose:
            _reconfigure(logger, log_file, verbose)
        return logger

    logger.setLevel(logging.DEBUG)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.ERROR if not verbose else logging.WARNING)
    console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
    logger.addHandler(console_handler)

    if log_file:
        logger.addHandler(_file_handler(log_file))

    return logger


def _file_handler(log_file):
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(levelname)s - %(threadName)s - %(message)s'
    ))
    return file_handler


def _reconfigure(logger, log_file, verbose):
    """Apply CLI flags to a logger that modules already created at import time."""
    for handler in logger.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(logging.WARNING if verbose else logging.ERROR)
    if log_file and not any(isinstance(h, logging.FileHandler) for h in logger.handlers):
        logger.addHandler(_file_handler(log_file))
