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
"""Unit testing of `cremona.k3.config` module."""

from contextlib import nullcontext as does_not_raise
from pathlib import Path
from typing import Any, ContextManager

import pytest
from pytest import param, raises

from cremona.k3 import InputError
from cremona.k3.config import ConfigError, ConfigLoader, PipelineConfig, load_config


class TestPipelineConfig:
    """Tests `PipelineConfig` class."""

    def test_defaults(self) -> None:
        """Tests the default settings."""
        config = PipelineConfig()
        assert config.elimination_degree_bound == 5
        assert config.seed == 7
        assert not config.full_kernel
        assert config.to_dict()["chunk_size"] == 65536

    @pytest.mark.parametrize(
        "values, expected, expectation",
        [
            param({"seed": "11"}, {"seed": 11}, does_not_raise(), id="String converted to integer"),
            param({"SEED": 3}, {"seed": 3}, does_not_raise(), id="Upper case key"),
            param({"full_kernel": "yes"}, {"full_kernel": True}, does_not_raise(), id="Boolean string"),
            param(
                {"elimination_degree_bound": "none"},
                {"elimination_degree_bound": None},
                does_not_raise(),
                id="Full elimination",
            ),
            param({"groebner_engine": "magma"}, {}, raises(ConfigError), id="Unknown key"),
            param({"seed": "seven"}, {}, raises(ConfigError), id="Not an integer"),
            param({"seed": -1}, {}, raises(ConfigError), id="Negative integer"),
            param({"seed": None}, {}, raises(ConfigError), id="Empty value"),
            param({"full_kernel": "maybe"}, {}, raises(ConfigError), id="Not a boolean"),
            param({"chunk_size": True}, {}, raises(ConfigError), id="Boolean for an integer"),
        ],
    )
    def test_updated(
        self, values: dict[str, Any], expected: dict[str, Any], expectation: ContextManager
    ) -> None:
        """Tests `PipelineConfig.updated()` method.

        Args:
            values: New values to apply.
            expected: Expected values of the updated fields.
            expectation: Context manager for the expected exception.

        """
        with expectation:
            config = PipelineConfig().updated(values)
            for name, value in expected.items():
                assert getattr(config, name) == value


class TestConfigLoader:
    """Tests `ConfigLoader` class."""

    def test_unsupported_parser(self) -> None:
        """Tests that an unknown format is rejected."""
        with raises(ConfigError):
            ConfigLoader("toml")

    @pytest.mark.parametrize(
        "file_name, expected, expectation",
        [
            param(
                "pipeline.yaml",
                {"elimination_degree_bound": 5, "smooth_sample_size": 10, "seed": 11},
                does_not_raise(),
                id="YAML file",
            ),
            param(
                "pipeline.json",
                {"cutout_check_degree": 7, "full_kernel": True},
                does_not_raise(),
                id="JSON file",
            ),
            param(
                "pipeline.env",
                {"ELIMINATION_DEGREE_BOUND": "none", "CHUNK_SIZE": "4096"},
                does_not_raise(),
                id="dotenv file",
            ),
            param("list.yaml", None, raises(ConfigError), id="Content is not a mapping"),
            param("pipeline.toml", None, raises(ConfigError), id="Unknown suffix"),
            param("missing.yaml", None, raises(ConfigError), id="File does not exist"),
        ],
    )
    def test_load(
        self, data_dir: Path, file_name: str, expected: dict[str, Any] | None, expectation: ContextManager
    ) -> None:
        """Tests `ConfigLoader.load()` method.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            file_name: Configuration file to load.
            expected: Expected parsed mapping.
            expectation: Context manager for the expected exception.

        """
        with expectation:
            assert ConfigLoader().load(data_dir / file_name) == expected


@pytest.mark.parametrize(
    "file_name, environ, expected",
    [
        param(None, {}, PipelineConfig(), id="Defaults"),
        param("pipeline.yaml", {}, PipelineConfig(smooth_sample_size=10, seed=11), id="YAML file"),
        param(
            "pipeline.env",
            {},
            PipelineConfig(elimination_degree_bound=None, chunk_size=4096),
            id="dotenv file",
        ),
        param(
            "pipeline.yaml",
            {"CREMONA_K3_SEED": "5", "HOME": "/root"},
            PipelineConfig(smooth_sample_size=10, seed=5),
            id="Environment overrides the file",
        ),
    ],
)
def test_load_config(
    data_dir: Path, file_name: str | None, environ: dict[str, str], expected: PipelineConfig
) -> None:
    """Tests `load_config()` function.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.
        file_name: Configuration file, if any.
        environ: Environment variables.
        expected: Expected configuration.

    """
    path = data_dir / file_name if file_name else None
    assert load_config(path, environ=environ) == expected


def test_load_config_unknown_key(data_dir: Path) -> None:
    """Tests that an unknown key is reported as an input error.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.

    """
    with raises(InputError, match="groebner_engine"):
        load_config(data_dir / "unknown.yaml", environ={})
