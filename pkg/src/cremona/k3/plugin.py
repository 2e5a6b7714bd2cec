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
"""pytest plugin with the hooks and fixtures shared by the verification test suites."""

from __future__ import annotations

from difflib import unified_diff
import os
from pathlib import Path
from typing import Callable

import pytest
from pytest import Config, FixtureRequest, Item, Parser

from cremona.k3 import StrPath
from cremona.k3.io import data_path, file_digest
from cremona.k3.k3pipeline import PipelineResult, SectionInput, run_pipeline


def pytest_addoption(parser: Parser) -> None:
    """Registers argparse-style options for the verification test suites.

    `Pytest initialisation hook
    <https://docs.pytest.org/en/latest/reference.html#_pytest.hookspec.pytest_addoption>`_.

    Args:
        parser: Parser for command line arguments and ini-file values.

    """
    group = parser.getgroup("Cremona verification")
    group.addoption(
        "--section",
        action="store",
        metavar="PATH",
        dest="section",
        required=False,
        default=os.getenv("CREMONA_SECTION", str(data_path("example_section.json"))),
        help="SectionInput JSON file the pipeline tests run on",
    )
    group.addoption(
        "--skip-slow",
        action="store_true",
        dest="skip_slow",
        required=False,
        help="Skip the tests marked as slow, i.e. the full F7 pipeline (default: False)",
    )


def pytest_configure(config: Config) -> None:
    """Registers the `slow` marker.

    Args:
        config: The pytest config object.

    """
    config.addinivalue_line("markers", "slow: runs the full Gröbner pipeline on the section input")


def pytest_collection_modifyitems(config: Config, items: list[Item]) -> None:
    """Skips the slow tests when `--skip-slow` is given.

    Args:
        config: The pytest config object.
        items: Collected test items.

    """
    if not config.getoption("skip_slow"):
        return
    skip_slow = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_report_header(config: Config) -> str:
    """Presents the section input the suite runs on, with the start of its digest.

    Args:
        config: Access to configuration values, pluginmanager and plugin hooks.

    """
    section = Path(config.getoption("section"))
    digest = file_digest(section)[:12] if section.exists() else "missing"
    return f"section: {section} (sha256 {digest})"


@pytest.fixture(name="data_dir", scope="module")
def local_data_dir(request: FixtureRequest) -> Path:
    """Returns the path to the test data folder matching the test's name.

    Args:
        request: Fixture that provides information of the requesting test function.

    """
    return Path(request.module.__file__).with_suffix("")


@pytest.fixture(name="assert_files")
def fixture_assert_files() -> Callable[[StrPath, StrPath], None]:
    """Returns a function that asserts if two text files are equal, or prints their differences."""

    def _assert_files(result_path: StrPath, expected_path: StrPath) -> None:
        """Asserts if two files are equal, or prints their differences.

        Args:
            result_path: Path to results (test-made) file.
            expected_path: Path to expected file.

        """
        with open(result_path, "r") as result_fh:
            results = result_fh.readlines()
        with open(expected_path, "r") as expected_fh:
            expected = expected_fh.readlines()
        files_diff = list(
            unified_diff(
                results,
                expected,
                fromfile=f"Test-made file {Path(result_path).name}",
                tofile=f"Expected file {Path(expected_path).name}",
            )
        )
        assert_message = f"Test-made and expected files differ\n{' '.join(files_diff)}"
        assert len(files_diff) == 0, assert_message

    return _assert_files


@pytest.fixture(name="section_path", scope="session")
def fixture_section_path(request: FixtureRequest) -> Path:
    """Returns the path of the section input selected with `--section`."""
    return Path(request.config.getoption("section"))


@pytest.fixture(name="section_input", scope="session")
def fixture_section_input(section_path: Path) -> SectionInput:
    """Returns the parsed section input selected with `--section`."""
    return SectionInput.from_json(section_path)


@pytest.fixture(name="example_pipeline", scope="session")
def fixture_example_pipeline(section_input: SectionInput, section_path: Path) -> PipelineResult:
    """Returns the result of the whole pipeline, computed once per test session.

    Args:
        section_input: Fixture that provides the section input.
        section_path: Fixture that provides its path, hashed into the result.

    """
    return run_pipeline(section_input, section_path=section_path)
