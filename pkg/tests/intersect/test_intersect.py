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
"""Unit testing of `cremona.k3.intersect` module."""

from contextlib import nullcontext as does_not_raise
from dataclasses import replace
from typing import Any, ContextManager

import numpy as np
import pytest
from pytest import param, raises

from cremona.k3.intersect import (
    InconsistentInvariantsError,
    InvalidInvariantsError,
    NonIntegralError,
    SurfaceInvariants,
    double_point_class,
    e4_formulas,
    exceptional_numbers,
    intersection_table,
    le_numbers,
    m4_expansion,
    m4_formula,
    m4_formulas,
    mixed_numbers,
    plocus_numbers,
    xi_formula,
)


EXAMPLE = {"n": 4, "m": 1, "xi": 4, "d": 9, "delta": 3, "kc": 3, "k2": -3, "c2": 27}


@pytest.fixture(name="example")
def fixture_example() -> SurfaceInvariants:
    """Returns the invariants of the degree 9 surface with three nodes, a projected K3 surface."""
    return SurfaceInvariants.derive(**EXAMPLE)


class TestSurfaceInvariants:
    """Tests `SurfaceInvariants` class."""

    def test_derive(self, example: SurfaceInvariants) -> None:
        """Tests `SurfaceInvariants.derive()` method.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert (example.chi, example.g) == (2, 7)
        example.check()

    @pytest.mark.parametrize(
        "changes",
        [
            param({"k2": -2}, id="12 does not divide K² + c₂"),
            param({"kc": 2}, id="d + K·C is odd"),
        ],
    )
    def test_derive_non_integral(self, changes: dict[str, int]) -> None:
        """Tests that `SurfaceInvariants.derive()` rejects non-integral χ or g.

        Args:
            changes: Changes applied to the invariants.

        """
        with raises(NonIntegralError):
            SurfaceInvariants.derive(**{**EXAMPLE, **changes})

    @pytest.mark.parametrize(
        "content, expected, expectation",
        [
            param(EXAMPLE, {"chi": 2, "g": 7}, does_not_raise(), id="Derived χ and g"),
            param({**EXAMPLE, "chi": 5, "g": None}, {"chi": 5, "g": None}, does_not_raise(), id="Given χ"),
            param({**EXAMPLE, "k2": -2}, {"chi": None, "g": None}, does_not_raise(), id="Underivable"),
            param({**EXAMPLE, "genus": 7}, None, raises(InvalidInvariantsError), id="Unknown key"),
            param({**EXAMPLE, "d": 9.0}, None, raises(InvalidInvariantsError), id="Float value"),
            param({**EXAMPLE, "delta": True}, None, raises(InvalidInvariantsError), id="Boolean value"),
            param({"n": 4, "m": 1}, None, raises(InvalidInvariantsError), id="Missing degree"),
        ],
    )
    def test_from_dict(
        self, content: dict[str, Any], expected: dict[str, Any] | None, expectation: ContextManager
    ) -> None:
        """Tests `SurfaceInvariants.from_dict()` method.

        Args:
            content: JSON-like mapping.
            expected: Expected values of the derived fields.
            expectation: Context manager for the expected exception.

        """
        with expectation:
            invariants = SurfaceInvariants.from_dict(content)
            assert expected is not None
            assert {key: getattr(invariants, key) for key in expected} == expected

    def test_to_dict(self, example: SurfaceInvariants) -> None:
        """Tests `SurfaceInvariants.to_dict()` method.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert example.to_dict() == {**EXAMPLE, "chi": 2, "g": 7}

    @pytest.mark.parametrize(
        "changes, message",
        [
            param({"d": 0}, "d = 0 < 1", id="Degree"),
            param({"delta": -1}, "δ = -1 < 0", id="Negative node count"),
            param({"chi": 3}, "Noether", id="Noether's formula"),
            param({"g": 6}, "genus", id="Genus formula"),
            param({"n": 1, "m": 0}, "m = 0 < 1; n = 1 < 2", id="Every problem listed"),
        ],
    )
    def test_check(self, example: SurfaceInvariants, changes: dict[str, int], message: str) -> None:
        """Tests `SurfaceInvariants.check()` method.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.
            changes: Changes applied to the invariants.
            message: Expected part of the error message.

        """
        invariants = SurfaceInvariants(**{**example.to_dict(), **changes})  # type: ignore[arg-type]
        with raises(InvalidInvariantsError, match=message):
            invariants.check()


def test_exceptional_numbers() -> None:
    """Tests `exceptional_numbers()` function."""
    assert exceptional_numbers() == (0, -4, 2, 0, -1)


class TestIntersectionNumbers:
    """Tests the (L, E) and (L, M) intersection numbers."""

    def test_e4_formulas(self, example: SurfaceInvariants) -> None:
        """Tests that both formulas for E⁴ agree on the projected K3 surface.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert e4_formulas(example) == (-159, -159)

    def test_le_numbers(self, example: SurfaceInvariants) -> None:
        """Tests `le_numbers()` function.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert le_numbers(example) == (0, -9, -48, -159)

    def test_le_numbers_inconsistent(self) -> None:
        """Tests that `le_numbers()` detects disagreeing E⁴ formulas."""
        with raises(InconsistentInvariantsError):
            le_numbers(SurfaceInvariants(**{**EXAMPLE, "delta": 0}))

    def test_mixed_numbers(self, example: SurfaceInvariants) -> None:
        """Tests `mixed_numbers()` function: M⁴ = 1 and LM³ = ξ.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert mixed_numbers(example) == (4, 7, 4, 1)
        assert xi_formula(example) == example.xi

    def test_m4_expansion(self, example: SurfaceInvariants) -> None:
        """Tests that the term by term expansion of M⁴ matches the closed formula.

        Args:
            example: Fixture that provides the invariants of the projected K3 surface.

        """
        assert m4_expansion(example) == m4_formula(example) == 1

    def test_m4_without_nodes(self) -> None:
        """Tests that ignoring the nodes makes both evaluations of M⁴ wrong and distinct."""
        invariants = SurfaceInvariants(**{**EXAMPLE, "delta": 0})
        assert m4_formulas(invariants) == (-17, -11)
        with raises(InconsistentInvariantsError):
            m4_formula(invariants)

    @pytest.mark.parametrize(
        "invariants, expected",
        [
            param(EXAMPLE, (4, 7, 4, 1), id="Projected K3 surface"),
            # Cubo-quadric transformation of P⁴, base locus an elliptic quintic scroll
            param({"n": 3, "m": 1, "d": 5, "kc": -5, "k2": 0, "c2": 0}, (3, 4, 2, 1), id="Quintic scroll"),
        ],
    )
    def test_intersection_table(self, invariants: dict[str, int], expected: tuple[int, ...]) -> None:
        """Tests `intersection_table()` function.

        Args:
            invariants: Surface invariants.
            expected: Expected (L, M) numbers.

        """
        table = intersection_table(SurfaceInvariants.derive(**invariants))
        assert table.mixed == expected
        content = table.to_dict()
        assert content["exceptional"]["Ei4"] == -1
        assert content["mixed"]["M4"] == expected[3]


def test_double_point_class(example: SurfaceInvariants) -> None:
    """Tests `double_point_class()` function.

    Args:
        example: Fixture that provides the invariants of the projected K3 surface.

    """
    assert double_point_class(example) == (6, 3)
    with raises(NonIntegralError):
        double_point_class(SurfaceInvariants(**{**EXAMPLE, "c2": 26}))


@pytest.mark.parametrize(
    "theta_degree, expected, expectation",
    [
        param(None, (4, 1, 4), does_not_raise(), id="Jacobian degree"),
        param(16, None, raises(NonIntegralError), id="Non-integral multiplicity"),
    ],
)
def test_plocus_numbers(
    example: SurfaceInvariants,
    theta_degree: int | None,
    expected: tuple[int, int, int] | None,
    expectation: ContextManager,
) -> None:
    """Tests `plocus_numbers()` function.

    Args:
        example: Fixture that provides the invariants of the projected K3 surface.
        theta_degree: Degree of the P-locus.
        expected: Expected multiplicity, secant degree and hits.
        expectation: Context manager for the expected exception.

    """
    with expectation:
        assert plocus_numbers(example, theta_degree) == expected


def test_e4_agreement_follows_double_point_formula() -> None:
    """Tests on random data that the two E⁴ formulas agree exactly when 2δ is the double point class."""
    rng = np.random.default_rng(7)
    checked = 0
    for d, kc, k2, c2 in rng.integers(-40, 40, size=(200, 4)):
        invariants = SurfaceInvariants(n=4, m=1, d=int(abs(d)) + 1, kc=int(kc), k2=int(k2), c2=int(c2))
        try:
            _, delta = double_point_class(invariants)
        except NonIntegralError:
            continue
        chern, normal = e4_formulas(replace(invariants, delta=delta))
        assert chern == normal
        chern, normal = e4_formulas(replace(invariants, delta=delta + 1))
        assert chern != normal
        checked += 1
    assert checked > 0
