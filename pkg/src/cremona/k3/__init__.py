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
"""Exact verification toolkit for a quartic Cremona transformation of P⁴ built from a K3 surface."""

__version__ = "0.1.0"

__all__ = [
    "CremonaError",
    "InputError",
    "StrPath",
]

import os
from typing import TypeVar


StrPath = TypeVar("StrPath", str, os.PathLike)


class CremonaError(Exception):
    """Base class of every verification failure raised by this library."""


class InputError(CremonaError):
    """Malformed or unreadable input data."""
