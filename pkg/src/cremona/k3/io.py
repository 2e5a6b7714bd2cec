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
"""Utils for reading input files (plain or gzip-compressed), locating packaged fixtures and hashing them."""

from __future__ import annotations

__all__ = [
    "data_path",
    "file_digest",
    "open_text",
]

from contextlib import contextmanager
import gzip
import hashlib
from importlib import resources
from pathlib import Path
from typing import Generator, TextIO

from cremona.k3 import StrPath


@contextmanager
def open_text(file_path: StrPath) -> Generator[TextIO, None, None]:
    """Yields an open text file object, even if the file is compressed with gzip.

    Args:
        file_path: A (single) file path to open.

    """
    src_file = Path(file_path)
    if src_file.suffix == ".gz":
        with gzip.open(src_file, "rt") as fh:
            yield fh
    else:
        with src_file.open("rt") as fh:
            yield fh


def data_path(name: str) -> Path:
    """Returns the path of a fixture file shipped in the `cremona.k3.data` package folder.

    Args:
        name: File name, e.g. "example_section.json".

    """
    return Path(str(resources.files("cremona.k3").joinpath("data", name)))


def file_digest(file_path: StrPath, algorithm: str = "sha256") -> str:
    """Returns the hex digest of a file, recorded in reports to pin the fixture version.

    Args:
        file_path: File path to get the hash for.
        algorithm: Secure hash or message digest algorithm name.

    """
    hash_func = hashlib.new(algorithm)
    with Path(file_path).open("rb") as f:
        hash_func.update(f.read())
    return hash_func.hexdigest()
