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
"""Unit testing of `cremona.k3.cli` module."""

import json
from pathlib import Path
from typing import Any

import pytest
from pytest import CaptureFixture, param

from cremona.k3 import cli
from cremona.k3.cli import (
    EXIT_FAILURE,
    EXIT_INPUT_ERROR,
    EXIT_SUCCESS,
    cmd_classify,
    cmd_intersection,
    cmd_lattice,
    cmd_motivic,
    cmd_verify_example,
    main,
)
from cremona.k3.config import PipelineConfig
from cremona.k3.report import VerificationReport


def _without_timings(content: dict[str, Any]) -> dict[str, Any]:
    """Returns a report without the `elapsed_ms` of its checks."""
    for check in content["checks"]:
        check.pop("elapsed_ms")
    return content


class TestIntersection:
    """Tests the `intersection` command."""

    def test_example_invariants(self, data_dir: Path, capsys: CaptureFixture[str]) -> None:
        """Tests the report printed for the packaged invariants against the expected report.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            capsys: Fixture to capture the standard output.

        """
        assert main(["intersection"]) == EXIT_SUCCESS
        report = json.loads(capsys.readouterr().out)
        expected = json.loads((data_dir / "intersection_report.json").read_text(encoding="utf-8"))
        assert _without_timings(report) == expected

    def test_no_nodes(self, data_dir: Path, tmp_path: Path, capsys: CaptureFixture[str]) -> None:
        """Tests that ignoring the nodes fails the report and writes it with `--json`.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            tmp_path: Test's unique temporary directory fixture provided by pytest.
            capsys: Fixture to capture the standard output.

        """
        json_path = tmp_path / "report.json"
        invariants_path = data_dir / "no_nodes.json"
        argv = ["--quiet", "--json", str(json_path), "intersection", "--invariants", str(invariants_path)]
        assert main(argv) == EXIT_FAILURE
        assert capsys.readouterr().out == ""
        report = json.loads(json_path.read_text(encoding="utf-8"))
        assert report["verdict"] == "fail"
        assert report["table"]["M4_formulas"] == {"chern": -17, "normal": -11}
        assert "plocus" not in report["table"]

    def test_cmd_intersection(self) -> None:
        """Tests `cmd_intersection()` function with the packaged invariants."""
        report = cmd_intersection()
        assert report.passed
        assert [record.id for record in report.records] == ["e4-agreement", "m4", "m4-agreement", "xi"]


@pytest.mark.parametrize(
    "argv, expected",
    [
        param(["intersection", "--invariants", "unknown_key.json"], EXIT_INPUT_ERROR, id="Unknown invariant"),
        param(["intersection", "--invariants", "list.json"], EXIT_INPUT_ERROR, id="Invariants not an object"),
        param(["intersection", "--invariants", "missing.json"], EXIT_INPUT_ERROR, id="Missing file"),
        param(["verify-example", "--section", "truncated.json"], EXIT_INPUT_ERROR, id="Truncated section"),
        param(["verify-example", "--section", "rank_deficient.json"], EXIT_FAILURE, id="Rank deficient"),
        param(["classify", "--case", "h"], EXIT_INPUT_ERROR, id="Unknown case"),
        param(["verify-example", "--seed", "-1"], EXIT_INPUT_ERROR, id="Negative seed"),
        param(["motivic", "--cutout-degree", "six"], EXIT_INPUT_ERROR, id="Non-numeric degree"),
        param(["verify-example", "--elimination-degree", "1"], EXIT_INPUT_ERROR, id="Degree bound too low"),
        param([], EXIT_INPUT_ERROR, id="No command"),
    ],
)
def test_exit_codes(data_dir: Path, argv: list[str], expected: int) -> None:
    """Tests the exit codes of `main()` on bad input and failed checks.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.
        argv: Command line arguments, with file names relative to the test data folder.
        expected: Expected exit code.

    """
    argv = [str(data_dir / arg) if arg.endswith(".json") else arg for arg in argv]
    assert main(["--quiet"] + argv) == expected


def test_tuning_options_override_environment(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path, capsys: CaptureFixture[str]
) -> None:
    """Tests that numeric options are applied on top of the file and environment configuration.

    Args:
        monkeypatch: Fixture to replace the command run by `verify-example`.
        tmp_path: Fixture that provides a temporary directory.
        capsys: Fixture that captures the printed report.

    """
    received: list[PipelineConfig] = []

    def _fake_verify(section: Path, config: PipelineConfig) -> VerificationReport:
        received.append(config)
        return VerificationReport("verify-example")

    monkeypatch.setattr(cli, "cmd_verify_example", _fake_verify)
    monkeypatch.setenv("CREMONA_K3_SEED", "3")
    monkeypatch.setenv("CREMONA_K3_SMOOTH_SAMPLE_SIZE", "4")
    config_path = tmp_path / "pipeline.yaml"
    config_path.write_text("cutout_check_degree: 5\nelimination_degree_bound: 4\n")
    report_path = tmp_path / "report.json"
    argv = ["--json", str(report_path), "verify-example", "--config", str(config_path), "--seed", "11"]
    assert main(argv + ["--elimination-degree", "6"]) == EXIT_SUCCESS
    assert (received[0].seed, received[0].elimination_degree_bound) == (11, 6)
    assert (received[0].cutout_check_degree, received[0].smooth_sample_size) == (5, 4)
    assert json.loads(report_path.read_text())["command"] == "verify-example"
    assert json.loads(capsys.readouterr().out)["command"] == "verify-example"


def test_verify_rank_deficient(data_dir: Path) -> None:
    """Tests that a rank deficient section gives a single failing record.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.

    """
    report = cmd_verify_example(data_dir / "rank_deficient.json")
    assert [(record.id, record.verdict) for record in report.records] == [("section-input", "fail")]
    assert report.records[0].computed["rank"] == 1
    assert "rank" in report.records[0].computed["error"]
    assert report.details["section"]["path"].endswith("rank_deficient.json")


class TestClassify:
    """Tests the `classify` command."""

    def test_single_case(self, capsys: CaptureFixture[str]) -> None:
        """Tests the replay of a single case.

        Args:
            capsys: Fixture to capture the standard output.

        """
        assert main(["classify", "--case", "f"]) == EXIT_SUCCESS
        report = json.loads(capsys.readouterr().out)
        assert report["checks"][0]["computed"] == {"verdict": "excluded", "replays": True}
        assert report["certificates"][0]["steps"]

    def test_cmd_classify(self) -> None:
        """Tests `cmd_classify()` function on every case."""
        report = cmd_classify()
        assert report.passed
        assert report.records[-1].computed == [4, 1, 4, 9, 3]
        assert "steps" not in report.details["certificates"][0]


def test_cmd_lattice() -> None:
    """Tests `cmd_lattice()` function."""
    report = cmd_lattice()
    assert report.passed
    assert report.details["generator"] == ["0", "-1/12", "0", "0", "0", "0", "0", "0"]
    assert report.details["base_change"][1] == [36, -17, 24, 24, 24, 12, 12, 12]


def test_cmd_motivic() -> None:
    """Tests `cmd_motivic()` function without point counts."""
    report = cmd_motivic()
    assert report.passed
    assert set(report.details) == {"L", "M"}


@pytest.mark.slow
class TestSection:
    """Tests the commands that run the pipeline on the section input."""

    def test_verify_example(self, section_path: Path, tmp_path: Path) -> None:
        """Tests the `verify-example` command.

        Args:
            section_path: Fixture that provides the path of the section input.
            tmp_path: Test's unique temporary directory fixture provided by pytest.

        """
        json_path = tmp_path / "report.json"
        argv = ["--quiet", "--json", str(json_path), "verify-example", "--section", str(section_path)]
        assert main(argv) == EXIT_SUCCESS
        report = json.loads(json_path.read_text(encoding="utf-8"))
        assert report["verdict"] == "pass"

    def test_motivic_points(self, section_path: Path) -> None:
        """Tests the `motivic` command with point counts.

        Args:
            section_path: Fixture that provides the path of the section input.

        """
        report = cmd_motivic(section_path)
        assert report.passed
        assert report.details["points"]["balanced"]
