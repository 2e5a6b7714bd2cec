# See the NOTICE file distributed with this work for additional information
# regarding copyright ownership.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Logging set-up for the command line tools and timing helpers for the verification pipeline.

Examples:

    >>> import logging
    >>> from cremona.k3.logging import init_logging, log_duration
    >>> init_logging("INFO")
    >>> with log_duration("Groebner basis of I_R") as timer:
    ...     pass
    >>> timer.elapsed_ms >= 0
    True

"""

from __future__ import annotations

__all__ = [
    "LogLevel",
    "Timer",
    "init_logging",
    "init_logging_with_args",
    "log_duration",
]

import argparse
from contextlib import contextmanager
from dataclasses import dataclass
import logging
import time
from typing import Iterator, Optional, Union

from cremona.k3 import StrPath


LogLevel = Union[int, str]

_logger = logging.getLogger(__name__)


def init_logging(
    log_level: LogLevel = "WARNING",
    log_file: Optional[StrPath] = None,
    log_file_level: LogLevel = "DEBUG",
    msg_format: str = "%(asctime)s\t%(levelname)s\t%(name)s\t%(message)s",
    date_format: str = r"%Y-%m-%d_%H:%M:%S",
) -> None:
    """Initialises the logging system.

    Messages of `log_level` (and above) go to the standard error. If `log_file` is provided, messages of
    `log_file_level` (and above) are also written there, which is where the DEBUG-level sizes of the linear
    systems and Gröbner bases usually end up.

    Args:
        log_level: Minimum logging level for the standard error.
        log_file: Logging file where to write logging messages besides the standard error.
        log_file_level: Minimum logging level for the logging file.
        msg_format: A format string for the logged output as a whole.
        date_format: A format string for the date/time portion of the logged output.

    """
    # Root logger at the lowest level so that every handler filters on its own
    logging.basicConfig(format=msg_format, datefmt=date_format, level="DEBUG", force=True)
    logging.root.handlers[0].setLevel(log_level)
    if log_file:
        formatter = logging.Formatter(msg_format, datefmt=date_format)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(log_file_level)
        file_handler.setFormatter(formatter)
        logging.root.addHandler(file_handler)


def init_logging_with_args(args: argparse.Namespace) -> None:
    """Calls `init_logging()` with the logging options found in a parsed namespace.

    A true `quiet` attribute silences the standard error down to errors, whatever the requested level.

    Args:
        args: Namespace populated by an argument parser.

    """
    args_dict = vars(args)
    log_args = {x: args_dict[x] for x in ["log_level", "log_file", "log_file_level"] if x in args_dict}
    if args_dict.get("quiet", False):
        log_args["log_level"] = "ERROR"
    init_logging(**log_args)


@dataclass
class Timer:
    """Wall-clock duration of a block, in milliseconds."""

    started: float
    elapsed_ms: int = 0


@contextmanager
def log_duration(label: str, logger: Optional[logging.Logger] = None) -> Iterator[Timer]:
    """Times the enclosed block and logs its duration at DEBUG level.

    Args:
        label: Human readable name of the timed step.
        logger: Logger to report to. Defaults to this module's logger.

    """
    timer = Timer(started=time.perf_counter())
    try:
        yield timer
    finally:
        timer.elapsed_ms = int(round((time.perf_counter() - timer.started) * 1000))
        (logger or _logger).debug(f"{label} finished in {timer.elapsed_ms} ms")
