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
"""Machine-readable verification reports written by the command line tools.

Examples:

    >>> from cremona.k3.report import CheckRecord, VerificationReport
    >>> report = VerificationReport("verify-example")
    >>> report.add(CheckRecord("s-hilbert", "S is a surface of degree 9", [2, 9], [2, 9]))
    >>> report.passed
    True

"""

from __future__ import annotations

__all__ = [
    "SCHEMA_VERSION",
    "CheckRecord",
    "VerificationReport",
    "dump_json",
]

from dataclasses import dataclass, field
import json
from pathlib import Path
from typing import Any, Optional

from cremona.k3 import StrPath


SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    """Outcome of one verified claim.

    Attributes:
        id: Stable identifier of the check.
        anchor: The claim, in plain words.
        expected: Expected value (any JSON-serialisable object).
        computed: Computed value.
        verdict: "pass" if computed equals expected, unless given explicitly.
        elapsed_ms: Time spent computing the value.

    """

    id: str
    anchor: str
    expected: Any
    computed: Any
    verdict: Optional[str] = None
    elapsed_ms: int = 0

    def __post_init__(self) -> None:
        if self.verdict is None:
            self.verdict = "pass" if self.computed == self.expected else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "expected": self.expected,
            "computed": self.computed,
            "verdict": self.verdict,
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass
class VerificationReport:
    """Ordered check records of one command; the overall verdict passes iff every record passes."""

    command: str
    records: list[CheckRecord] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "verdict": "pass" if self.passed else "fail",
            "checks": [record.to_dict() for record in self.records],
            **self.details,
        }


def dump_json(content: dict[str, Any], path: Optional[StrPath] = None) -> str:
    """Returns `content` as deterministic JSON text, also writing it to `path` if given."""
    text = json.dumps(content, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
