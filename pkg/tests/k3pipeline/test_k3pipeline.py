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
"""Unit testing of `cremona.k3.k3pipeline` module.

The toy tests use the standard quadratic Cremona transformation of P², which is its own inverse. The tests
marked as slow run the whole pipeline on the section selected with `--section`.

"""

from contextlib import nullcontext as does_not_raise
from pathlib import Path
from typing import ContextManager

import numpy as np
import pytest
from pytest import param, raises

from cremona.k3 import InputError
from cremona.k3.config import PipelineConfig
from cremona.k3.ffpoly import PolynomialRing, jacobian_determinant
from cremona.k3.groebner import Ideal, hilbert_data
from cremona.k3.k3pipeline import (
    OG_QUADRICS,
    CremonaMap,
    CremonaStructureError,
    InversionError,
    PipelineResult,
    PointCounts,
    ProjectivePoint,
    SectionFormatError,
    SectionInput,
    SectionInputError,
    base_locus,
    cremona_from_ideal,
    derivatives_vanish,
    fiber_points,
    graph_ideal_inverse,
    invert_cremona,
    node_local_rank,
    og_ideal,
    proportionality_constant,
    rational_points,
    round_trip,
    run_pipeline,
    singular_points,
    verification_checks,
)


@pytest.fixture(name="plane")
def fixture_plane() -> PolynomialRing:
    """Returns F_7[x0, x1, x2]."""
    return PolynomialRing.indexed("x", 3)


@pytest.fixture(name="quadratic")
def fixture_quadratic(plane: PolynomialRing) -> CremonaMap:
    """Returns the standard quadratic Cremona transformation (x1·x2 : x0·x2 : x0·x1).

    Args:
        plane: Fixture that provides F_7[x0, x1, x2].

    """
    return CremonaMap(plane, tuple(plane.parse(text) for text in ("x1*x2", "x0*x2", "x0*x1")))


class TestSectionInput:
    """Tests `SectionInput` class."""

    @pytest.mark.dependency(name="example_section")
    def test_bundled(self) -> None:
        """Tests that the packaged section is a valid 8x16 matrix over F_7."""
        section = SectionInput.bundled()
        assert section.prime == 7
        assert len(section.matrix) == 8
        assert all(0 <= value < 7 for row in section.matrix for value in row)
        assert section.rank == 8
        section.validate()

    @pytest.mark.parametrize(
        "file_name, expectation",
        [
            param("wrong_shape.json", raises(SectionFormatError), id="Seven rows"),
            param("not_object.json", raises(SectionFormatError), id="Not a JSON object"),
            param("missing_prime.json", raises(SectionFormatError), id="Missing prime"),
            param("truncated.json", raises(SectionFormatError), id="Invalid JSON"),
            param("missing.json", raises(SectionFormatError), id="File does not exist"),
            param("composite_prime.json", raises(InputError), id="Composite modulus"),
            param("off_og.json", does_not_raise(), id="Well formed"),
        ],
    )
    def test_from_json(self, data_dir: Path, file_name: str, expectation: ContextManager) -> None:
        """Tests `SectionInput.from_json()` method.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            file_name: Section input file.
            expectation: Context manager for the expected exception.

        """
        with expectation:
            SectionInput.from_json(data_dir / file_name)

    @pytest.mark.parametrize(
        "file_name, message",
        [
            param("rank_deficient.json", "rank 1, expected 8", id="Rank deficient"),
            param("off_og.json", "Point row 6 does not satisfy OG quadric 1", id="Point row off OG(5,10)"),
        ],
    )
    def test_validate(self, data_dir: Path, file_name: str, message: str) -> None:
        """Tests `SectionInput.validate()` method on invalid sections.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            file_name: Section input file.
            message: Expected part of the error message.

        """
        section = SectionInput.from_json(data_dir / file_name)
        with raises(SectionInputError, match=message):
            section.validate()

    @pytest.mark.parametrize(
        "file_name, expected",
        [
            param(None, [], id="Packaged section"),
            param("off_og.json", [(6, 1)], id="Point row off OG(5,10)"),
        ],
    )
    def test_og_violations(self, data_dir: Path, file_name: str | None, expected: list) -> None:
        """Tests `SectionInput.og_violations()` method.

        Args:
            data_dir: Fixture that provides the path to the test data folder matching the test's name.
            file_name: Section input file, `None` for the packaged one.
            expected: Expected first (point row, quadric) pairs.

        """
        if file_name is None:
            section = SectionInput.bundled()
        else:
            section = SectionInput.from_json(data_dir / file_name)
        violations = section.og_violations()
        assert violations[: len(expected)] == expected
        assert bool(violations) == bool(expected)

    def test_reduced_entries(self) -> None:
        """Tests that entries are reduced modulo the prime."""
        matrix = [[-1] + [0] * 15] + [[0] * 16] * 7
        section = SectionInput.from_dict({"prime": 7, "matrix": matrix})
        assert section.matrix[0][0] == 6


def test_og_ideal() -> None:
    """Tests `og_ideal()` function."""
    ideal = og_ideal()
    assert len(ideal) == len(OG_QUADRICS) == 10
    assert ideal.degrees == [2] * 10
    # Coordinate points lie on every quadric: no quadric has a square term
    assert all(max(m) == 1 for g in ideal.generators for m in g.itermonoms())


class TestProjectivePoint:
    """Tests `ProjectivePoint` class."""

    def test_normalisation(self) -> None:
        """Tests that the first nonzero coordinate is scaled to 1."""
        point = ProjectivePoint((0, 3, 6))
        assert point.coordinates == (0, 1, 2)
        assert str(point) == "(0:1:2)"
        assert point == ProjectivePoint((0, 1, 2))
        assert point.as_array().tolist() == [0, 1, 2]

    def test_zero_vector(self) -> None:
        """Tests that the zero vector is rejected."""
        with raises(ValueError):
            ProjectivePoint((0, 7, 14))


class TestCremonaMap:
    """Tests `CremonaMap` class."""

    def test_degree(self, quadratic: CremonaMap) -> None:
        """Tests `CremonaMap.degree` and `CremonaMap.formatted()`.

        Args:
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        assert quadratic.degree == 2
        assert quadratic.formatted() == ["x1*x2", "x0*x2", "x0*x1"]

    @pytest.mark.parametrize(
        "texts",
        [
            param(("x1*x2", "x0*x2"), id="Too few forms"),
            param(("x1*x2", "x0*x2", "x0"), id="Different degrees"),
            param(("x1*x2", "x0*x2", "0"), id="Zero form"),
            param(("x1*x2", "x0*x2", "x1*x2 + x0*x2"), id="Dependent forms"),
        ],
    )
    def test_invalid(self, plane: PolynomialRing, texts: tuple[str, ...]) -> None:
        """Tests that invalid linear systems raise `CremonaStructureError`.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].
            texts: Forms of the map.

        """
        with raises(CremonaStructureError):
            CremonaMap(plane, tuple(plane.parse(text) for text in texts))


class TestCremonaFromIdeal:
    """Tests `cremona_from_ideal()` function."""

    def test_three_points(self, plane: PolynomialRing) -> None:
        """Tests the conics through the three coordinate points.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].

        """
        ideal = Ideal(plane, tuple(plane.parse(text) for text in ("x1*x2", "x0*x2", "x0*x1")))
        cremona = cremona_from_ideal(ideal, degree=2, expected=3)
        assert cremona.formatted() == ["x0*x1", "x0*x2", "x1*x2"]

    @pytest.mark.parametrize(
        "generators, degree",
        [
            param(("x0*x1", "x0*x2", "x1*x2"), 2, id="Three conics instead of five"),
            param(("x0^3",), 2, id="Empty piece"),
        ],
    )
    def test_wrong_dimension(self, plane: PolynomialRing, generators: tuple[str, ...], degree: int) -> None:
        """Tests that a piece of the wrong dimension raises `CremonaStructureError`.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].
            generators: Generators of the ideal.
            degree: Degree of the piece.

        """
        ideal = Ideal(plane, tuple(plane.parse(text) for text in generators))
        with raises(CremonaStructureError):
            cremona_from_ideal(ideal, degree=degree)


class TestInversion:
    """Tests `invert_cremona()`, `round_trip()` and `graph_ideal_inverse()` functions."""

    def test_invert_cremona(self, quadratic: CremonaMap) -> None:
        """Tests that the quadratic transformation is inverted by itself.

        Args:
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        result = invert_cremona(quadratic, full_kernel=True)
        assert result.degree == 2
        assert result.inverse.formatted() == ["y1*y2", "y0*y2", "y0*y1"]
        assert quadratic.ring.format(result.denominator) == "x0*x1*x2"
        assert result.denominator_degree == 3
        assert set(result.block_kernel_dimensions) == {1, 2}
        assert result.full_kernel_dimension is not None
        assert result.identity_holds == (True, True, True)

    def test_max_degree(self, quadratic: CremonaMap) -> None:
        """Tests that no linear inverse exists.

        Args:
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        with raises(InversionError) as excinfo:
            invert_cremona(quadratic, max_degree=1)
        assert excinfo.value.dimension == 0

    def test_round_trip(self, quadratic: CremonaMap) -> None:
        """Tests `round_trip()` function.

        Args:
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        inverse = invert_cremona(quadratic).inverse
        denominator = round_trip(quadratic, inverse)
        assert inverse.ring.format(denominator) == "y0*y1*y2"

    def test_round_trip_failure(self, plane: PolynomialRing, quadratic: CremonaMap) -> None:
        """Tests that a wrong inverse raises `InversionError`.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        wrong = CremonaMap(plane, tuple(plane.parse(text) for text in ("x0^2", "x1^2", "x2^2")))
        with raises(InversionError):
            round_trip(quadratic, wrong)

    def test_graph_ideal_inverse(self, quadratic: CremonaMap) -> None:
        """Tests that the graph ideal gives the same inverse as the pair systems.

        Args:
            quadratic: Fixture that provides the standard quadratic Cremona transformation.

        """
        inverse = graph_ideal_inverse(quadratic, 2)
        assert inverse == invert_cremona(quadratic).inverse


def test_jacobian_proportionality(quadratic: CremonaMap) -> None:
    """Tests `proportionality_constant()` on the Jacobian of the quadratic transformation.

    Args:
        quadratic: Fixture that provides the standard quadratic Cremona transformation.

    """
    ring = quadratic.ring
    determinant = jacobian_determinant(quadratic.forms)
    assert ring.format(determinant) == "2*x0*x1*x2"
    denominator = invert_cremona(quadratic).denominator
    assert proportionality_constant(denominator, determinant) == 4
    assert proportionality_constant(determinant, denominator) == 2
    assert proportionality_constant(ring.parse("x0^3"), determinant) is None
    assert proportionality_constant(determinant, ring.zero) is None


def test_derivatives_vanish(plane: PolynomialRing) -> None:
    """Tests `derivatives_vanish()` function.

    Args:
        plane: Fixture that provides F_7[x0, x1, x2].

    """
    points = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert derivatives_vanish(plane.parse("x0^2"), points, order=1).tolist() == [True, False, True]
    assert derivatives_vanish(plane.parse("x0^2"), points, order=2).tolist() == [False, False, False]
    quartic = plane.parse("x0^4 + x0^2*x1^2")
    assert derivatives_vanish(quartic, points, order=3).tolist() == [False, False, True]


def test_base_locus(quadratic: CremonaMap) -> None:
    """Tests that the base locus of the inverse is the three coordinate points.

    Args:
        quadratic: Fixture that provides the standard quadratic Cremona transformation.

    """
    inverse = invert_cremona(quadratic).inverse
    locus = base_locus(inverse)
    data = hilbert_data(locus)
    assert (data.dimension, data.degree) == (0, 3)
    assert rational_points(locus).tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


class TestPoints:
    """Tests `rational_points()`, `singular_points()`, `node_local_rank()` and `fiber_points()`."""

    def test_rational_points(self, plane: PolynomialRing) -> None:
        """Tests that a smooth conic has p + 1 points.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].

        """
        conic = Ideal(plane, (plane.parse("x0*x2 - x1^2"),))
        points = rational_points(conic, chunk_size=5)
        assert len(points) == 8
        assert points[0].tolist() == [1, 0, 0]

    def test_empty(self, plane: PolynomialRing) -> None:
        """Tests an ideal without F_7-points.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].

        """
        ideal = Ideal.irrelevant(plane)
        assert rational_points(ideal).shape == (0, 3)
        assert not singular_points(ideal)

    def test_node(self, plane: PolynomialRing) -> None:
        """Tests the node of a nodal cubic.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].

        """
        cubic = Ideal(plane, (plane.parse("x1^2*x2 - x0^3 - x0^2*x2"),))
        nodes = singular_points(cubic, max_rank=0)
        assert nodes == [ProjectivePoint((0, 0, 1))]
        assert node_local_rank(cubic, nodes[0]) == 0
        assert node_local_rank(cubic, ProjectivePoint((1, 0, 6))) == 1

    def test_singular_points_on_given_points(self, plane: PolynomialRing) -> None:
        """Tests that `singular_points()` only inspects the rational points it is given.

        Args:
            plane: Fixture that provides F_7[x0, x1, x2].

        """
        cubic = Ideal(plane, (plane.parse("x1^2*x2 - x0^3 - x0^2*x2"),))
        points = rational_points(cubic)
        assert singular_points(cubic, max_rank=0, points=points) == singular_points(cubic, max_rank=0)
        assert not singular_points(cubic, max_rank=0, points=np.array([[1, 0, 6]]))

    def test_fiber_points(self) -> None:
        """Tests `fiber_points()` on a cone projected from its vertex line."""
        ring = PolynomialRing.indexed("z", 6)
        cone = Ideal(ring, (ring.parse("z0*z5 - z1^2"),))
        fiber = fiber_points(ProjectivePoint((1, 0, 0, 0, 0)), cone)
        assert fiber == [ProjectivePoint((1, 0, 0, 0, 0, 0))]
        assert not fiber_points(ProjectivePoint((0, 1, 0, 0, 0)), cone)
        assert len(fiber_points(ProjectivePoint((1, 1, 0, 0, 0)), cone)) == 1


def test_point_counts() -> None:
    """Tests `PointCounts.scissor_holds`."""
    assert PointCounts(q=7, r=50, s=68, t=68, fiber_sum=47).scissor_holds
    assert not PointCounts(q=7, r=50, s=65, t=68, fiber_sum=47).scissor_holds


def test_run_pipeline_invalid_section(data_dir: Path) -> None:
    """Tests that `run_pipeline()` validates the section first.

    Args:
        data_dir: Fixture that provides the path to the test data folder matching the test's name.

    """
    with raises(SectionInputError):
        run_pipeline(SectionInput.from_json(data_dir / "off_og.json"))


@pytest.mark.slow
class TestExamplePipeline:
    """Tests the whole pipeline on the section selected with `--section`."""

    def test_surfaces(self, example_pipeline: PipelineResult) -> None:
        """Tests the Hilbert data of R, S and T.

        Args:
            example_pipeline: Fixture that provides the pipeline result.

        """
        assert example_pipeline.r_hilbert is not None
        assert example_pipeline.r_hilbert.as_dict() == {
            "dimension": 2,
            "degree": 12,
            "hilbert_polynomial": "6*t**2 + 2",
        }
        assert example_pipeline.s_hilbert is not None
        assert (example_pipeline.s_hilbert.dimension, example_pipeline.s_hilbert.degree) == (2, 9)
        assert example_pipeline.s_graded == {1: 0, 2: 0, 3: 0, 4: 5}
        assert example_pipeline.t_hilbert is not None
        assert (example_pipeline.t_hilbert.dimension, example_pipeline.t_hilbert.degree) == (2, 9)
        assert example_pipeline.t_graded4 == 5

    def test_cremona(self, example_pipeline: PipelineResult) -> None:
        """Tests the Cremona map, its inverse and the round trip.

        Args:
            example_pipeline: Fixture that provides the pipeline result.

        """
        assert example_pipeline.cremona is not None and example_pipeline.inversion is not None
        assert example_pipeline.cremona.degree == 4
        assert example_pipeline.inversion.degree == 4
        assert example_pipeline.inversion.denominator_degree == 15
        assert example_pipeline.round_trip_degree == 15
        assert example_pipeline.jacobian_constant

    def test_nodes(self, example_pipeline: PipelineResult) -> None:
        """Tests the double points of S and T.

        Args:
            example_pipeline: Fixture that provides the pipeline result.

        """
        assert len(example_pipeline.nodes) == 3
        assert [len(fiber) for fiber in example_pipeline.node_fibers.values()] == [2, 2, 2]
        assert len(example_pipeline.t_nodes) == 3
        assert example_pipeline.t_local_ranks == [0, 0, 0]

    def test_counts(self, example_pipeline: PipelineResult) -> None:
        """Tests the point counts.

        Args:
            example_pipeline: Fixture that provides the pipeline result.

        """
        counts = example_pipeline.counts
        assert counts is not None
        assert counts.scissor_holds
        assert counts.fiber_sum == counts.r - 3

    def test_verification_checks(self, example_pipeline: PipelineResult) -> None:
        """Tests that every check record passes.

        Args:
            example_pipeline: Fixture that provides the pipeline result.

        """
        records = verification_checks(example_pipeline)
        assert len(records) == 14
        failed = [record.to_dict() for record in records if not record.passed]
        assert not failed
        by_id = {record.id: record.computed for record in records}
        assert by_id["section-input"] == {"rank": 8, "og_violations": []}
        assert by_id["inverse"]["identity"] == [True] * 5
        assert example_pipeline.section_sha256 is not None
        assert example_pipeline.config == PipelineConfig()
