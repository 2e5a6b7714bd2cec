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
"""Unit testing of `cremona.k3.io` module."""

from pathlib import Path

import pytest
from pytest import param

from cremona.k3.io import data_path, file_digest, open_text


IDEAL_MD5_HASH = "367979d7cdd025b7a159e58edad2ca87"
IDEAL_SHA256_HASH = "db5de2e26256368d249a016cc6bf040c1e3154bca4e053f9a8a155c6f463cd97"


@pytest.mark.parametrize(
    "file_name",
    [
        param("ideal.txt", id="Plain text file"),
        param("ideal.txt.gz", id="Compressed file"),
    ],
)
def test_open_text(data_dir: Path, file_name: str) -> None:
    """Tests `open_text()` function.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.
        file_name: File to read.

    """
    with open_text(data_dir / file_name) as fh:
        assert fh.readline().strip() == "ring p=7 vars=x0,x1 order=degrevlex"


@pytest.mark.parametrize(
    "algorithm, expected_hash_value",
    [
        param("md5", IDEAL_MD5_HASH, id="MD5"),
        param("sha256", IDEAL_SHA256_HASH, id="SHA-256"),
    ],
)
def test_file_digest(data_dir: Path, algorithm: str, expected_hash_value: str) -> None:
    """Tests `file_digest()` function.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.
        algorithm: Secure hash or message digest algorithm name.
        expected_hash_value: Expected hash value.

    """
    assert file_digest(data_dir / "ideal.txt", algorithm=algorithm) == expected_hash_value


@pytest.mark.parametrize(
    "name",
    [
        param("example_section.json", id="Section input"),
        param("example_invariants.json", id="Surface invariants"),
        param("case_table.yaml", id="Case table"),
    ],
)
def test_data_path(name: str) -> None:
    """Tests `data_path()` function.

    Args:
        name: Packaged fixture file name.

    """
    path = data_path(name)
    assert path.name == name
    assert path.is_file()
