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
"""Tuning knobs of the verification pipeline, read from YAML, JSON or dotenv files and the environment.

Precedence, lowest first: dataclass defaults, configuration file, `CREMONA_K3_<FIELD>` variables.

Examples:

    >>> from cremona.k3.config import load_config
    >>> config = load_config()
    >>> config.elimination_degree_bound
    5

"""

from __future__ import annotations

__all__ = [
    "ConfigError",
    "ConfigLoader",
    "PipelineConfig",
    "load_config",
]

from dataclasses import asdict, dataclass, fields, replace
from io import StringIO
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional

import dotenv
import yaml

from cremona.k3 import InputError, StrPath


logger = logging.getLogger(__name__)

ENV_PREFIX = "CREMONA_K3_"


class ConfigError(InputError):
    """Unknown configuration key or ill-typed configuration value."""


@dataclass(frozen=True)
class PipelineConfig:
    """Settings of the F_p pipeline.

    Attributes:
        elimination_degree_bound: Highest degree of the graded elimination of I_R. `None` selects the full
            block-order Gröbner elimination instead.
        cutout_check_degree: Degree at which the elimination kernel is compared with the quartics ideal.
        smooth_sample_size: Number of smooth F_p-points of S where the multiplicity of D is checked.
        smoothness_samples: Number of random F_p-points of R where smoothness is spot-checked.
        seed: Seed of the random generator used to draw sample points.
        full_kernel: Also solve the full 5-block inversion system (slow) and report its kernel dimension.
        chunk_size: Number of points evaluated at once when enumerating projective space.

    """

    elimination_degree_bound: Optional[int] = 5
    cutout_check_degree: int = 6
    smooth_sample_size: int = 20
    smoothness_samples: int = 50
    seed: int = 7
    full_kernel: bool = False
    chunk_size: int = 65536

    def updated(self, values: Mapping[str, Any]) -> PipelineConfig:
        """Returns a copy with `values` applied, converting strings to the field types.

        Args:
            values: New values keyed by field name (case insensitive).

        Raises:
            ConfigError: If a key is not a field or a value cannot be converted.

        """
        known = {field.name: field for field in fields(self)}
        changes: dict[str, Any] = {}
        for key, value in values.items():
            name = key.lower()
            if name not in known:
                raise ConfigError(f"Unknown configuration key '{key}'")
            changes[name] = _convert(name, value, known[name].default)
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _convert(name: str, value: Any, default: Any) -> Any:
    """Converts a raw configuration value to the type of the field default."""
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in {"none", "null", ""}:
            value = None
        elif isinstance(default, bool):
            if text.lower() not in {"true", "false", "1", "0", "yes", "no"}:
                raise ConfigError(f"Invalid boolean for '{name}': {value}")
            value = text.lower() in {"true", "1", "yes"}
        else:
            try:
                value = int(text)
            except ValueError as exc:
                raise ConfigError(f"Invalid integer for '{name}': {value}") from exc
    if value is None:
        if name != "elimination_degree_bound":
            raise ConfigError(f"'{name}' cannot be empty")
        return None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"Invalid boolean for '{name}': {value}")
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"Invalid integer for '{name}': {value}")
    if value < 0:
        raise ConfigError(f"'{name}' must be non-negative, got {value}")
    return value


class ConfigLoader:
    """Parses configuration files according to their format.

    Args:
        parser: Format of the content: "yaml", "json" or "env". Default: guessed from the file suffix.

    Attributes:
        available_formats: File formats with a parser available.

    """

    available_formats: set[str] = {"yaml", "json", "env"}
    suffixes: dict[str, str] = {".yaml": "yaml", ".yml": "yaml", ".json": "json", ".env": "env"}

    def __init__(self, parser: Optional[str] = None) -> None:
        if (parser is not None) and (parser not in self.available_formats):
            raise ConfigError(f"Unsupported configuration format '{parser}'")
        self.parser = parser

    def __parse(self, content: str, parser: str) -> dict[str, Any]:
        if parser == "yaml":
            parsed = yaml.load(content, yaml.SafeLoader)
        elif parser == "json":
            parsed = json.loads(content)
        else:
            parsed = dotenv.dotenv_values(stream=StringIO(content))
        if parsed is None:
            return {}
        if not isinstance(parsed, dict):
            raise ConfigError("Configuration content must be a mapping")
        return dict(parsed)

    def load(self, path: StrPath) -> dict[str, Any]:
        """Returns the parsed mapping stored in `path`.

        Args:
            path: Configuration file.

        Raises:
            ConfigError: If the format cannot be determined or the content is not a mapping.

        """
        path = Path(path)
        parser = self.parser or self.suffixes.get(path.suffix.lower())
        if parser is None:
            if path.name.startswith(".env"):
                parser = "env"
            else:
                raise ConfigError(f"Cannot guess the configuration format of '{path}'")
        try:
            content = path.read_text()
            return self.__parse(content, parser)
        except (OSError, yaml.YAMLError, json.JSONDecodeError) as exc:
            raise ConfigError(f"Cannot read configuration '{path}': {exc}") from exc


def load_config(
    path: Optional[StrPath] = None, environ: Optional[Mapping[str, str]] = None
) -> PipelineConfig:
    """Returns the pipeline configuration.

    Args:
        path: Optional YAML, JSON or dotenv file.
        environ: Environment to read `CREMONA_K3_*` overrides from. Default: `os.environ`.

    """
    config = PipelineConfig()
    if path is not None:
        config = config.updated(ConfigLoader().load(path))
        logger.debug(f"Configuration loaded from {path}")
    environ = os.environ if environ is None else environ
    overrides = {
        key[len(ENV_PREFIX) :]: value for key, value in environ.items() if key.startswith(ENV_PREFIX)
    }
    if overrides:
        logger.debug(f"Configuration overrides from the environment: {sorted(overrides)}")
        config = config.updated(overrides)
    return config
