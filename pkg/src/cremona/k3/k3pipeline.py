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
"""End-to-end F_p computation of the quartic Cremona transformation built from a degree 12 K3 surface.

The ten quadrics of the spinor embedding of OG(5,10) ⊂ P¹⁵ are pulled back along x = z·H to a K3 surface
R ⊂ P⁷, which is projected from the plane spanned by three of its points to a surface S ⊂ P⁴ with
three double points. The five quartics through S define the Cremona map f, inverted by linear algebra into
quartics g with gᵢ(f(x)) = xᵢ·D(x); the base locus T of g is again a nodal surface of degree 9.

Examples:

    >>> from cremona.k3.io import data_path
    >>> from cremona.k3.k3pipeline import SectionInput, k3_section
    >>> from cremona.k3.groebner import hilbert_data
    >>> section = SectionInput.from_json(data_path("example_section.json"))
    >>> section.validate()
    >>> hilbert_data(k3_section(section)).degree
    12

"""

from __future__ import annotations

__all__ = [
    "OG_QUADRICS",
    "POINT_ROWS",
    "CremonaMap",
    "CremonaStructureError",
    "InversionError",
    "InversionResult",
    "PipelineResult",
    "PointCounts",
    "ProjectivePoint",
    "SectionFormatError",
    "SectionInput",
    "SectionInputError",
    "base_locus",
    "cremona_from_ideal",
    "derivatives_vanish",
    "fiber_points",
    "graph_ideal",
    "graph_ideal_inverse",
    "invert_cremona",
    "jacobian_ranks",
    "k3_section",
    "node_local_rank",
    "og_ideal",
    "project_to_p4",
    "proportionality_constant",
    "rational_points",
    "round_trip",
    "run_pipeline",
    "singular_points",
    "verification_checks",
]

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import json
import logging
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import galois
import numpy as np
from sympy.polys.rings import PolyElement

from cremona.k3 import CremonaError, InputError, StrPath
from cremona.k3.config import PipelineConfig
from cremona.k3.ffpoly import (
    PolynomialRing,
    PrimeField,
    coefficient_rows,
    evaluate_many,
    field_inverse,
    homogeneous_degree,
    jacobian_determinant,
    jacobian_matrix,
    power_products,
    projective_points,
    substitute_linear,
    substitute_many,
)
from cremona.k3.groebner import (
    HilbertData,
    Ideal,
    contains,
    eliminate,
    eliminated_piece_dimension,
    graded_piece_dimension,
    hilbert_data,
    same_saturation,
    saturate,
)
from cremona.k3.io import data_path, file_digest
from cremona.k3.logging import log_duration
from cremona.k3.report import CheckRecord


logger = logging.getLogger(__name__)

# Ten quadrics of OG(5,10) ⊂ P¹⁵: the left column of the display, then the right column
OG_QUADRICS = (
    "x0*x11 + x5*x10 - x6*x9 + x7*x8",
    "x0*x12 + x2*x10 - x3*x9 + x4*x8",
    "x0*x13 + x1*x10 - x3*x7 + x4*x6",
    "x0*x14 + x1*x9 - x2*x7 + x4*x5",
    "x0*x15 + x1*x8 - x2*x6 + x3*x5",
    "-x1*x12 + x2*x13 - x3*x14 + x4*x15",
    "x1*x11 - x5*x13 + x6*x14 - x7*x15",
    "-x2*x11 + x5*x12 - x8*x14 + x9*x15",
    "x3*x11 - x6*x12 + x8*x13 - x10*x15",
    "-x4*x11 + x7*x12 - x9*x13 + x10*x14",
)
# 0-based rows of H spanning the projection centre
POINT_ROWS = (5, 6, 7)


class SectionFormatError(InputError):
    """A section input file is missing, is not JSON or does not hold an 8x16 integer matrix."""


class SectionInputError(CremonaError):
    """The section matrix fails validation: rank deficient, or a point row is off OG(5,10)."""


class CremonaStructureError(CremonaError):
    """The quartics through S do not form the expected 5-dimensional linear system."""


class InversionError(CremonaError):
    """The inversion system has an unexpected solution space, or the recovered inverse fails its identity.

    Attributes:
        dimension: Dimension of the solution space found, if the failure is dimensional.

    """

    def __init__(self, message: str, dimension: Optional[int] = None) -> None:
        super().__init__(message)
        self.dimension = dimension


@dataclass(frozen=True)
class SectionInput:
    """Prime and 8x16 matrix H whose rows span the linear section x = z·H of P¹⁵.

    Entries are reduced modulo the prime on construction.

    """

    prime: int
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        field_ = PrimeField(self.prime)
        rows = tuple(tuple(int(value) % field_.p for value in row) for row in self.matrix)
        if len(rows) != 8 or any(len(row) != 16 for row in rows):
            shape = f"{len(rows)}x{len(rows[0]) if rows else 0}"
            raise SectionFormatError(f"Section matrix must be 8x16, got {shape}")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_dict(cls, content: dict[str, Any]) -> SectionInput:
        try:
            return cls(int(content["prime"]), tuple(tuple(int(v) for v in row) for row in content["matrix"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SectionFormatError(f"Invalid section input: {exc}") from exc

    @classmethod
    def from_json(cls, path: StrPath) -> SectionInput:
        """Loads a section input file with fields `prime` and `matrix`.

        Raises:
            SectionFormatError: If the file cannot be read or parsed.

        """
        try:
            content = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SectionFormatError(f"Cannot read section input '{path}': {exc}") from exc
        if not isinstance(content, dict):
            raise SectionFormatError(f"Section input '{path}' must hold a JSON object")
        return cls.from_dict(content)

    @classmethod
    def bundled(cls) -> SectionInput:
        """Returns the F₇ section shipped with the package."""
        return cls.from_json(data_path("example_section.json"))

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.prime)

    @cached_property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.field.gf(np.array(self.matrix, dtype=np.int64))))

    def validate(self) -> None:
        """Checks that H has rank 8 and that its point rows lie on every OG(5,10) quadric.

        Raises:
            SectionInputError: Naming the first quadric a point row fails.

        """
        rank = self.rank
        if rank != 8:
            raise SectionInputError(f"Section matrix has rank {rank}, expected 8")
        violations = self.og_violations()
        if violations:
            row, index = violations[0]
            quadrics = og_ideal(self.field)
            text = quadrics.ring.format(quadrics.generators[index - 1])
            raise SectionInputError(f"Point row {row} does not satisfy OG quadric {index}: {text}")

    def og_violations(self) -> list[tuple[int, int]]:
        """Returns the (point row, quadric) pairs, both 1-based, where a point row misses an OG(5,10) quadric.

        Pairs are sorted by quadric, then by row.

        """
        quadrics = og_ideal(self.field)
        points = np.array([self.matrix[row] for row in POINT_ROWS], dtype=np.int64)
        violations = []
        for index, quadric in enumerate(quadrics.generators):
            values = evaluate_many(quadric, points)
            violations += [(row + 1, index + 1) for row, value in zip(POINT_ROWS, values) if value]
        return violations


@dataclass(frozen=True)
class ProjectivePoint:
    """F_p-point of projective space, normalised so the first nonzero coordinate is 1."""

    coordinates: tuple[int, ...]
    p: int = 7

    def __post_init__(self) -> None:
        coordinates = [int(c) % self.p for c in self.coordinates]
        lead = next((c for c in coordinates if c), None)
        if lead is None:
            raise ValueError("The zero vector is not a projective point")
        inverse = field_inverse(lead, self.p)
        object.__setattr__(self, "coordinates", tuple(c * inverse % self.p for c in coordinates))

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coordinates) + ")"

    def as_array(self) -> np.ndarray:
        return np.array(self.coordinates, dtype=np.int64)


@dataclass(frozen=True)
class CremonaMap:
    """Rational map of projective space given by forms of equal degree, one per target coordinate.

    Raises:
        CremonaStructureError: If a form is zero or not homogeneous, degrees differ, the number of forms
            differs from the number of variables, or the forms are linearly dependent.

    """

    ring: PolynomialRing
    forms: tuple[PolyElement, ...]

    def __post_init__(self) -> None:
        forms = tuple(self.ring.convert(f) for f in self.forms)
        if len(forms) != self.ring.ngens:
            raise CremonaStructureError(f"Expected {self.ring.ngens} forms, got {len(forms)}")
        degrees = {homogeneous_degree(f) for f in forms}
        if None in degrees or len(degrees) != 1:
            raise CremonaStructureError("Forms must be nonzero and homogeneous of one common degree")
        matrix, _ = coefficient_rows(forms)
        if int(np.linalg.matrix_rank(self.ring.field.gf(matrix))) != len(forms):
            raise CremonaStructureError("Forms are linearly dependent")
        object.__setattr__(self, "forms", forms)

    @property
    def degree(self) -> int:
        return sum(next(iter(self.forms[0].itermonoms())))

    def formatted(self) -> list[str]:
        return [self.ring.format(f) for f in self.forms]


def og_ideal(field_: Optional[PrimeField] = None) -> Ideal:
    """Returns the ideal of the ten OG(5,10) quadrics in F_p[x0..x15], signs reduced modulo p."""
    ring = PolynomialRing.indexed("x", 16, field_)
    return Ideal(ring, tuple(ring.parse(text) for text in OG_QUADRICS))


def k3_section(section: SectionInput) -> Ideal:
    """Returns the ideal of R ⊂ P⁷ in F_p[z0..z7], pulling the OG quadrics back along x = z·H."""
    quadrics = og_ideal(section.field)
    ring = PolynomialRing.indexed("z", 8, section.field)
    return Ideal(ring, tuple(substitute_linear(q, section.matrix, ring) for q in quadrics.generators))


def _renamed(ideal: Ideal, variables: Sequence[str]) -> Ideal:
    ring = ideal.ring.renamed(variables)
    return Ideal(ring, tuple(ring.from_terms({m: int(c) for m, c in g.items()}) for g in ideal.generators))


def project_to_p4(r_ideal: Ideal, degree_bound: Optional[int] = 5) -> Ideal:
    """Returns the ideal of the image S of R under (z0..z7) ↦ (z0..z4), renamed to x0..x4.

    Args:
        r_ideal: Ideal of R from `k3_section()`.
        degree_bound: Highest degree of the graded elimination; `None` eliminates with a block order.

    """
    keep = r_ideal.ring.variables[:5]
    with log_duration("Projection to P4", logger):
        s_ideal = eliminate(r_ideal, keep, degree_bound)
    return _renamed(s_ideal, [f"x{i}" for i in range(5)])


def _points(rows: np.ndarray, p: int) -> list[ProjectivePoint]:
    return [ProjectivePoint(tuple(int(c) for c in row), p) for row in rows]


def rational_points(ideal: Ideal, chunk_size: int = 65536) -> np.ndarray:
    """Returns the F_p-points of the projective zero set of `ideal`, one normalised row each.

    Points come in the order of `projective_points()`; every chunk is filtered one generator at a time.

    """
    nvars = ideal.ring.ngens
    found = []
    for chunk in projective_points(ideal.ring.p, nvars - 1, chunk_size):
        for generator in ideal.generators:
            if not len(chunk):
                break
            chunk = chunk[evaluate_many(generator, chunk) == 0]
        if len(chunk):
            found.append(chunk)
    points = np.vstack(found) if found else np.zeros((0, nvars), dtype=np.int64)
    logger.debug(f"{len(points)} F_{ideal.ring.p}-points on the zero set in P{nvars - 1}")
    return points


def jacobian_ranks(polys: Sequence[PolyElement], points: np.ndarray) -> np.ndarray:
    """Returns the rank over F_p of the Jacobian matrix of `polys` at each row of `points`."""
    points = np.asarray(points, dtype=np.int64).reshape(-1, polys[0].ring.ngens)
    gf = galois.GF(int(polys[0].ring.domain.characteristic()))
    values = np.array([[evaluate_many(d, points) for d in row] for row in jacobian_matrix(polys)])
    return np.array([int(np.linalg.matrix_rank(gf(values[:, :, k]))) for k in range(len(points))], dtype=int)


def singular_points(
    ideal: Ideal, max_rank: int = 1, chunk_size: int = 65536, points: Optional[np.ndarray] = None
) -> list[ProjectivePoint]:
    """Returns the F_p-points of the zero set where the Jacobian of the generators has rank ≤ `max_rank`.

    Points are found by exhaustive enumeration of projective space, unless the rational points of the zero
    set are given as `points`.

    """
    if points is None:
        points = rational_points(ideal, chunk_size)
    if not len(points):
        return []
    ranks = jacobian_ranks(ideal.generators, points)
    return _points(points[ranks <= max_rank], ideal.ring.p)


def node_local_rank(ideal: Ideal, point: ProjectivePoint) -> int:
    """Returns the Jacobian rank of the generators at `point` (0 at a transverse double point of a surface
    in P⁴, whose local ideal is generated by quadrics)."""
    return int(jacobian_ranks(ideal.generators, point.as_array()[None, :])[0])


def fiber_points(point: ProjectivePoint, section: SectionInput | Ideal) -> list[ProjectivePoint]:
    """Returns the points of R off the projection centre that project to `point`.

    They are the points (a, w) with a the coordinates of `point` and w ∈ F_p³ arbitrary, so 343 candidates
    over F₇.

    """
    r_ideal = k3_section(section) if isinstance(section, SectionInput) else section
    p = r_ideal.ring.p
    free = r_ideal.ring.ngens - len(point.coordinates)
    tails = np.array(list(itertools.product(range(p), repeat=free)), dtype=np.int64)
    candidates = np.hstack([np.tile(point.as_array(), (len(tails), 1)), tails])
    for generator in r_ideal.generators:
        candidates = candidates[evaluate_many(generator, candidates) == 0]
    return _points(candidates, p)


def cremona_from_ideal(s_ideal: Ideal, degree: int = 4, expected: int = 5) -> CremonaMap:
    """Returns the forms of the degree `degree` piece of `s_ideal` in reduced row echelon form.

    Raises:
        CremonaStructureError: If the graded piece does not have dimension `expected`.

    """
    ring = s_ideal.ring
    monomials = ring.monomials(degree)
    rows = []
    for generator, generator_degree in zip(s_ideal.generators, s_ideal.degrees):
        if generator_degree <= degree:
            rows += [generator.mul_monom(m) for m in ring.monomials(degree - generator_degree)]
    if rows:
        matrix, _ = coefficient_rows(rows, monomials)
        echelon = np.asarray(ring.field.gf(matrix).row_reduce().view(np.ndarray), dtype=np.int64)
        echelon = echelon[echelon.any(axis=1)]
    else:
        echelon = np.zeros((0, len(monomials)), dtype=np.int64)
    if len(echelon) != expected:
        raise CremonaStructureError(
            f"Degree {degree} piece has dimension {len(echelon)}, expected {expected}"
        )
    forms = tuple(
        ring.from_terms({monomials[i]: int(row[i]) for i in np.flatnonzero(row)}) for row in echelon
    )
    return CremonaMap(ring, forms)


def _left_kernel(rows: Sequence[PolyElement], gf: type[galois.FieldArray]) -> galois.FieldArray:
    matrix, _ = coefficient_rows(rows)
    if matrix.shape[1] == 0:
        return gf.Identity(len(rows))
    return gf(matrix).left_null_space()


def _solve_pair_blocks(
    blocks: dict[int, galois.FieldArray], size: int, gf: type[galois.FieldArray]
) -> Optional[list[galois.FieldArray]]:
    """Combines the kernels of the pair systems {0, k} into coefficient vectors c_0..c_{n-1}.

    Block k holds the solutions (c_0, c_k) of x_k·c_0 − x_0·c_k ≡ 0; the blocks must agree on c_0.

    """
    if any(block.shape[0] == 0 for block in blocks.values()):
        return None
    keys = sorted(blocks)
    offsets = dict(zip(keys, itertools.accumulate([0] + [blocks[k].shape[0] for k in keys])))
    total = sum(blocks[k].shape[0] for k in keys)
    if len(keys) == 1:
        joint = gf.Identity(total)
    else:
        agreement = gf.Zeros(((len(keys) - 1) * size, total))
        first = keys[0]
        span = {k: slice(offsets[k], offsets[k] + blocks[k].shape[0]) for k in keys}
        for index, k in enumerate(keys[1:]):
            rows = slice(index * size, (index + 1) * size)
            agreement[rows, span[first]] = blocks[first][:, :size].T
            agreement[rows, span[k]] = -blocks[k][:, :size].T
        joint = agreement.null_space()
    if joint.shape[0] == 0:
        return None
    if joint.shape[0] > 1:
        dimension = int(joint.shape[0])
        raise InversionError(f"Inversion system has a {dimension}-dimensional solution space", dimension)
    alpha = joint[0]
    first = keys[0]
    vectors = [alpha[offsets[first] : offsets[first] + blocks[first].shape[0]] @ blocks[first][:, :size]]
    for k in keys:
        vectors.append(alpha[offsets[k] : offsets[k] + blocks[k].shape[0]] @ blocks[k][:, size:])
    return vectors


def _forms_from_vectors(
    vectors: Sequence[galois.FieldArray], ring: PolynomialRing, degree: int
) -> tuple[PolyElement, ...]:
    monomials = ring.monomials(degree)
    plain = [np.asarray(v.view(np.ndarray), dtype=np.int64) for v in vectors]
    # Scale so the leading coefficient of the first form is 1
    lead = int(plain[0][np.flatnonzero(plain[0])[0]])
    scale = field_inverse(lead, ring.p)
    return tuple(ring.from_terms({monomials[i]: int(v[i]) * scale for i in np.flatnonzero(v)}) for v in plain)


@dataclass(frozen=True)
class InversionResult:
    """Inverse forms g and the form D with gᵢ(f(x)) = xᵢ·D(x).

    Attributes:
        inverse: The inverse map g, in the target variables.
        denominator: D, in the source variables.
        block_kernel_dimensions: Kernel dimension of each pair system {0, k}.
        full_kernel_dimension: Kernel dimension of the full system Σ xᵢ·cᵢ(f(x)) = 0, when computed.
        identity_holds: Per coordinate, whether gᵢ(f(x)) = xᵢ·D(x) was found to hold exactly.

    """

    inverse: CremonaMap
    denominator: PolyElement
    block_kernel_dimensions: dict[int, int]
    full_kernel_dimension: Optional[int] = None
    identity_holds: tuple[bool, ...] = ()

    @property
    def degree(self) -> int:
        return self.inverse.degree

    @property
    def denominator_degree(self) -> int:
        return sum(next(iter(self.denominator.itermonoms()))) if self.denominator else -1


def _combine(
    vector_form: PolyElement, images: dict[tuple[int, ...], PolyElement], zero: PolyElement
) -> PolyElement:
    result = zero
    for monomial, coeff in vector_form.items():
        result = result + images[monomial] * int(coeff)
    return result


def _check_identity(
    compositions: Sequence[PolyElement], gens: Sequence[PolyElement], ring: PolynomialRing
) -> tuple[PolyElement, tuple[bool, ...]]:
    """Returns D with compositions[i] = gens[i]·D and the per-coordinate results.

    Raises:
        InversionError: If some composition is not the matching generator times D.

    """
    denominator, remainder = compositions[0].div(gens[0])
    if remainder or not denominator:
        raise InversionError(f"First composition is not a nonzero multiple of {ring.variables[0]}")
    holds = tuple(composition == x * denominator for composition, x in zip(compositions, gens))
    if not all(holds):
        index = holds.index(False)
        raise InversionError(f"Composition {index} is not {ring.variables[index]}·D")
    return denominator, holds


def invert_cremona(
    f: CremonaMap, target: Optional[PolynomialRing] = None, max_degree: int = 8, full_kernel: bool = False
) -> InversionResult:
    """Returns the inverse g of `f` and D with gᵢ(f(x)) = xᵢ·D(x), by linear algebra.

    For increasing degrees t, the pair systems x_k·c_0(f) − x_0·c_k(f) = 0 (k = 1..n-1) are solved for
    forms c of degree t in the target variables; the first degree where they admit a common solution gives
    g. The identity gᵢ(f) = xᵢ·D is then verified exactly.

    Args:
        f: Map to invert.
        target: Ring of the target coordinates. Default: y0..y{n-1}.
        max_degree: Highest inverse degree tried.
        full_kernel: Also report the kernel dimension of the full system Σ xᵢ·cᵢ(f(x)) = 0.

    Raises:
        InversionError: If a solution space has dimension > 1, no inverse exists up to `max_degree`, or
            the recovered forms fail the identity.

    """
    ring = f.ring
    target = target or PolynomialRing.indexed("y", ring.ngens, ring.field)
    gf = ring.field.gf
    x = ring.gens
    for degree in range(1, max_degree + 1):
        monomials = target.monomials(degree)
        with log_duration(f"Power products of degree {degree}", logger):
            products = power_products(f.forms, degree)
        images = [products[m] for m in monomials]
        blocks = {}
        for k in range(1, ring.ngens):
            rows = [x[k] * image for image in images] + [-(x[0] * image) for image in images]
            blocks[k] = _left_kernel(rows, gf)
            logger.debug(f"Degree {degree}, pair block (0, {k}): kernel dimension {blocks[k].shape[0]}")
            if blocks[k].shape[0] == 0:
                break
        vectors = _solve_pair_blocks(blocks, len(monomials), gf)
        if vectors is None:
            continue
        inverse = CremonaMap(target, _forms_from_vectors(vectors, target, degree))
        compositions = [_combine(g, products, ring.zero) for g in inverse.forms]
        denominator, holds = _check_identity(compositions, x, ring)
        full_dimension = None
        if full_kernel:
            with log_duration("Full inversion kernel", logger):
                full_dimension = int(_left_kernel([xi * image for xi in x for image in images], gf).shape[0])
        logger.info(f"Inverse of degree {degree} found, D has degree {sum(denominator.LM)}")
        dimensions = {k: int(b.shape[0]) for k, b in blocks.items()}
        return InversionResult(inverse, denominator, dimensions, full_dimension, holds)
    raise InversionError(f"No inverse of degree at most {max_degree}", 0)


def round_trip(f: CremonaMap, g: CremonaMap) -> PolyElement:
    """Returns D′ with fᵢ(g(y)) = yᵢ·D′(y), or raises `InversionError`."""
    compositions = substitute_many(f.forms, g.forms, g.ring)
    denominator, _ = _check_identity(compositions, g.ring.gens, g.ring)
    return denominator


def proportionality_constant(a: PolyElement, b: PolyElement) -> Optional[int]:
    """Returns c with a = c·b if it exists (b nonzero), `None` otherwise."""
    if not b:
        return None
    p = int(b.ring.domain.characteristic())
    monomial = b.LM
    c = int(a.get(monomial, 0)) * field_inverse(int(b[monomial]), p) % p
    return c if a == b * c else None


def derivatives_vanish(f: PolyElement, points: np.ndarray, order: int = 3) -> np.ndarray:
    """Returns, per point, whether every partial derivative of `f` of order ≤ `order` vanishes there.

    Over F_p this detects multiplicity > `order` as long as `order` < p.

    """
    points = np.asarray(points, dtype=np.int64).reshape(-1, f.ring.ngens)
    vanish = evaluate_many(f, points) == 0
    level: dict[tuple[int, ...], PolyElement] = {(): f}
    for _ in range(order):
        following = {}
        for indices, partial in level.items():
            for variable in range(indices[-1] if indices else 0, f.ring.ngens):
                derivative = partial.diff(f.ring.gens[variable])
                following[indices + (variable,)] = derivative
                if derivative:
                    vanish &= evaluate_many(derivative, points) == 0
        level = following
    return vanish


def base_locus(g: CremonaMap) -> Ideal:
    """Returns the ideal generated by the forms of `g`, saturated by the irrelevant ideal."""
    with log_duration("Base locus saturation", logger):
        return saturate(Ideal(g.ring, g.forms), Ideal.irrelevant(g.ring))


def graph_ideal(f: CremonaMap, target: PolynomialRing) -> Ideal:
    """Returns the ideal of the graph of `f` in F_p[target, source]: the 2x2 minors yᵢ·f_j − y_j·fᵢ,
    saturated by the ideal of the forms."""
    ring = PolynomialRing(f.ring.field, target.variables + f.ring.variables)
    y = ring.gens[: target.ngens]
    forms = [ring.convert(form) for form in f.forms]
    minors = [y[i] * forms[j] - y[j] * forms[i] for i, j in itertools.combinations(range(len(forms)), 2)]
    with log_duration("Graph ideal saturation", logger):
        return saturate(Ideal(ring, minors), Ideal(ring, forms))


def graph_ideal_inverse(f: CremonaMap, degree: int, target: Optional[PolynomialRing] = None) -> CremonaMap:
    """Returns the inverse of `f` from its graph ideal Γ: forms c of degree `degree` with
    x_k·c_0(y) − x_0·c_k(y) ∈ Γ, found by linear algebra on normal forms modulo Γ.

    Raises:
        InversionError: If the solution space is not one-dimensional.

    """
    target = target or PolynomialRing.indexed("y", f.ring.ngens, f.ring.field)
    graph = graph_ideal(f, target)
    basis = graph.groebner_basis
    ring = graph.ring
    x = ring.gens[target.ngens :]
    lifted = [ring.from_terms({m + (0,) * f.ring.ngens: 1}) for m in target.monomials(degree)]
    blocks = {}
    for k in range(1, f.ring.ngens):
        rows = [basis.reduce(x[k] * m) for m in lifted] + [-basis.reduce(x[0] * m) for m in lifted]
        blocks[k] = _left_kernel(rows, ring.field.gf)
    vectors = _solve_pair_blocks(blocks, len(lifted), ring.field.gf)
    if vectors is None:
        raise InversionError(f"No inverse of degree {degree} in the graph ideal", 0)
    return CremonaMap(target, _forms_from_vectors(vectors, target, degree))


@dataclass(frozen=True)
class PointCounts:
    """F_q-point counts of R, S, T and the sum of the fiber sizes of R → S off the centre."""

    q: int
    r: int
    s: int
    t: int
    fiber_sum: int

    @property
    def scissor_holds(self) -> bool:
        """#S = #R + 3q − 3: three nodes with two rational preimages each, three points of R blown up."""
        return self.s == self.r + 3 * self.q - 3


@dataclass
class PipelineResult:
    """Every intermediate object of `run_pipeline()`, and the time spent on each check."""

    section: SectionInput
    config: PipelineConfig
    section_sha256: Optional[str] = None
    section_rank: Optional[int] = None
    og_violations: list[tuple[int, int]] = field(default_factory=list)
    r_ideal: Optional[Ideal] = None
    r_hilbert: Optional[HilbertData] = None
    r_points: Optional[np.ndarray] = None
    r_sample_ranks: list[int] = field(default_factory=list)
    s_ideal: Optional[Ideal] = None
    s_hilbert: Optional[HilbertData] = None
    s_graded: dict[int, int] = field(default_factory=dict)
    s_points: Optional[np.ndarray] = None
    nodes: list[ProjectivePoint] = field(default_factory=list)
    node_fibers: dict[str, list[ProjectivePoint]] = field(default_factory=dict)
    fiber_ranks: list[int] = field(default_factory=list)
    cremona: Optional[CremonaMap] = None
    cutout: dict[str, Any] = field(default_factory=dict)
    inversion: Optional[InversionResult] = None
    jacobian_constant: Optional[int] = None
    round_trip_degree: Optional[int] = None
    multiplicity: dict[str, Any] = field(default_factory=dict)
    t_ideal: Optional[Ideal] = None
    t_hilbert: Optional[HilbertData] = None
    t_graded4: Optional[int] = None
    t_points: Optional[np.ndarray] = None
    t_nodes: list[ProjectivePoint] = field(default_factory=list)
    t_local_ranks: list[int] = field(default_factory=list)
    counts: Optional[PointCounts] = None
    timings: dict[str, int] = field(default_factory=dict)


def _sample(rows: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    if len(rows) <= size:
        return rows
    return rows[np.sort(rng.choice(len(rows), size=size, replace=False))]


def _timed(result: PipelineResult, key: str, label: str, step: Callable[[], None]) -> None:
    with log_duration(label, logger) as timer:
        step()
    result.timings[key] = result.timings.get(key, 0) + timer.elapsed_ms


def run_pipeline(
    section: SectionInput, config: Optional[PipelineConfig] = None, section_path: Optional[StrPath] = None
) -> PipelineResult:
    """Runs the whole computation on a validated section and returns every intermediate object.

    Raises:
        SectionInputError: If the section fails validation.
        CremonaStructureError: If the quartics through S are not a 5-dimensional system.
        InversionError: If the inversion fails.

    """
    config = config or PipelineConfig()
    result = PipelineResult(section, config)
    if section_path is not None:
        result.section_sha256 = file_digest(section_path)
    rng = np.random.default_rng(config.seed)
    def section_input() -> None:
        section.validate()
        result.section_rank = section.rank
        result.og_violations = section.og_violations()

    _timed(result, "section-input", "Section validation", section_input)

    def surface_r() -> None:
        result.r_ideal = k3_section(section)
        result.r_hilbert = hilbert_data(result.r_ideal)
        result.r_points = rational_points(result.r_ideal, config.chunk_size)
        sample = _sample(result.r_points, config.smoothness_samples, rng)
        result.r_sample_ranks = [int(r) for r in jacobian_ranks(result.r_ideal.generators, sample)]

    _timed(result, "r-hilbert", "K3 section R", surface_r)
    assert result.r_ideal is not None

    def surface_s() -> None:
        result.s_ideal = project_to_p4(result.r_ideal, config.elimination_degree_bound)
        result.s_hilbert = hilbert_data(result.s_ideal)

    _timed(result, "s-hilbert", "Projected surface S", surface_s)
    assert result.s_ideal is not None
    s_ideal = result.s_ideal

    def graded() -> None:
        result.s_graded = {t: graded_piece_dimension(s_ideal, t) for t in range(1, 5)}

    _timed(result, "s-graded-pieces", "Graded pieces of I_S", graded)

    def nodes() -> None:
        result.s_points = rational_points(s_ideal, config.chunk_size)
        result.nodes = singular_points(s_ideal, points=result.s_points)

    _timed(result, "s-singular-points", "Singular points of S", nodes)

    def fibers() -> None:
        preimages = []
        for node in result.nodes:
            result.node_fibers[str(node)] = fiber_points(node, result.r_ideal)
            preimages += [point.as_array() for point in result.node_fibers[str(node)]]
        if preimages:
            ranks = jacobian_ranks(result.r_ideal.generators, np.array(preimages))
            result.fiber_ranks = [int(r) for r in ranks]

    _timed(result, "node-fibers", "Fibers over the nodes", fibers)

    def cutout() -> None:
        result.cremona = cremona_from_ideal(s_ideal)
        quartics = Ideal(s_ideal.ring, result.cremona.forms)
        degree = config.cutout_check_degree
        keep = result.r_ideal.ring.variables[:5]
        result.cutout = {
            "degree": degree,
            "quartics_piece": graded_piece_dimension(quartics, degree),
            "elimination_piece": eliminated_piece_dimension(result.r_ideal, keep, degree),
            "quartics_in_ideal": contains(s_ideal, quartics),
            "same_saturation": same_saturation(quartics, s_ideal),
        }

    _timed(result, "cutout", "Scheme-theoretic cut-out by the quartics", cutout)
    assert result.cremona is not None
    f = result.cremona

    def inversion() -> None:
        result.inversion = invert_cremona(f, full_kernel=config.full_kernel)

    _timed(result, "inverse", "Inversion", inversion)
    assert result.inversion is not None
    inverse = result.inversion

    def plocus() -> None:
        determinant = jacobian_determinant(f.forms)
        result.jacobian_constant = proportionality_constant(determinant, inverse.denominator)

    _timed(result, "plocus", "Jacobian determinant", plocus)

    def trip() -> None:
        result.round_trip_degree = sum(round_trip(f, inverse.inverse).LM)

    _timed(result, "round-trip", "Round trip f∘g", trip)

    def multiplicity() -> None:
        node_rows = np.array([node.as_array() for node in result.nodes], dtype=np.int64).reshape(-1, 5)
        node_set = {node.coordinates for node in result.nodes}
        smooth = np.array([row for row in result.s_points if tuple(int(c) for c in row) not in node_set])
        smooth = _sample(smooth.reshape(-1, 5), config.smooth_sample_size, rng)
        result.multiplicity = {
            "nodes": int(derivatives_vanish(inverse.denominator, node_rows).sum()),
            "smooth": int(derivatives_vanish(inverse.denominator, smooth).sum()),
            "smooth_sampled": int(len(smooth)),
        }

    _timed(result, "multiplicity", "Multiplicity of D along S", multiplicity)

    def surface_t() -> None:
        result.t_ideal = base_locus(inverse.inverse)
        result.t_hilbert = hilbert_data(result.t_ideal)
        result.t_graded4 = graded_piece_dimension(result.t_ideal, 4)

    _timed(result, "t-hilbert", "Base locus T", surface_t)
    assert result.t_ideal is not None
    t_ideal = result.t_ideal

    def t_nodes() -> None:
        result.t_points = rational_points(t_ideal, config.chunk_size)
        result.t_nodes = singular_points(t_ideal, points=result.t_points)
        result.t_local_ranks = [node_local_rank(t_ideal, node) for node in result.t_nodes]

    _timed(result, "t-nodes", "Singular points of T", t_nodes)

    def counts() -> None:
        assert result.r_points is not None and result.s_points is not None and result.t_points is not None
        fiber_sum = 0
        for point in _points(result.s_points, section.prime):
            fiber_sum += len(fiber_points(point, result.r_ideal))
        result.counts = PointCounts(
            section.prime, len(result.r_points), len(result.s_points), len(result.t_points), fiber_sum
        )

    _timed(result, "scissor", "Point counts", counts)
    return result


def verification_checks(result: PipelineResult) -> list[CheckRecord]:
    """Returns the fourteen check records of a completed `run_pipeline()`."""
    timings = result.timings
    r_hilbert, s_hilbert, t_hilbert = result.r_hilbert, result.s_hilbert, result.t_hilbert
    assert r_hilbert and s_hilbert and t_hilbert and result.inversion and result.counts
    inversion, counts = result.inversion, result.counts
    records = [
        CheckRecord(
            "section-input",
            "H has rank 8 and its last three rows are points of OG(5,10)",
            {"rank": 8, "og_violations": []},
            {"rank": result.section_rank, "og_violations": [list(pair) for pair in result.og_violations]},
        ),
        CheckRecord(
            "r-hilbert",
            "the linear section R is a smooth K3 surface of degree 12 in P7",
            {"dimension": 2, "degree": 12, "hilbert_polynomial": "6*t**2 + 2", "smooth_samples": True},
            {
                "dimension": r_hilbert.dimension,
                "degree": r_hilbert.degree,
                "hilbert_polynomial": str(r_hilbert.hilbert_polynomial.as_expr()),
                "smooth_samples": all(rank == 5 for rank in result.r_sample_ranks),
            },
        ),
        CheckRecord(
            "s-hilbert",
            "the projection S of R from the plane of three of its points has degree 9",
            {"dimension": 2, "degree": 9},
            {"dimension": s_hilbert.dimension, "degree": s_hilbert.degree},
        ),
        CheckRecord(
            "s-graded-pieces",
            "the ideal of S has no forms of degree at most 3 and five independent quartics",
            {"1": 0, "2": 0, "3": 0, "4": 5},
            {str(t): dim for t, dim in sorted(result.s_graded.items())},
        ),
        CheckRecord(
            "s-singular-points",
            "S is singular at exactly three F_p-rational points",
            3,
            len(result.nodes),
        ),
        CheckRecord(
            "node-fibers",
            "each node of S has two smooth preimages on R off the centre: a transverse double point",
            {"preimages": [2] * len(result.nodes), "smooth": True},
            {
                "preimages": [len(points) for points in result.node_fibers.values()],
                "smooth": bool(result.fiber_ranks) and all(rank == 5 for rank in result.fiber_ranks),
            },
        ),
        CheckRecord(
            "cutout",
            "the five quartics cut out S scheme-theoretically",
            {"same_saturation": True, "quartics_in_ideal": True, "pieces_agree": True},
            {
                "same_saturation": result.cutout["same_saturation"],
                "quartics_in_ideal": result.cutout["quartics_in_ideal"],
                "pieces_agree": result.cutout["quartics_piece"] == result.cutout["elimination_piece"],
            },
        ),
        CheckRecord(
            "inverse",
            "the inverse consists of quartics g with g(f(x)) = x·D(x), D of degree 15",
            {"inverse_degree": 4, "denominator_degree": 15, "identity": [True] * 5},
            {
                "inverse_degree": inversion.degree,
                "denominator_degree": inversion.denominator_degree,
                "identity": list(inversion.identity_holds),
            },
        ),
        CheckRecord(
            "plocus",
            "D is proportional to the Jacobian determinant of f",
            True,
            result.jacobian_constant is not None and result.jacobian_constant != 0,
        ),
        CheckRecord(
            "round-trip",
            "f(g(y)) = y·D'(y) with D' of degree 15",
            15,
            result.round_trip_degree,
        ),
        CheckRecord(
            "multiplicity",
            "D vanishes to order at least 4 at the nodes and at sampled smooth points of S",
            {"nodes": len(result.nodes), "smooth": result.multiplicity.get("smooth_sampled")},
            {"nodes": result.multiplicity.get("nodes"), "smooth": result.multiplicity.get("smooth")},
        ),
        CheckRecord(
            "t-hilbert",
            "the base locus T of the inverse is a surface of degree 9 cut out by five quartics",
            {"dimension": 2, "degree": 9, "quartics": 5},
            {"dimension": t_hilbert.dimension, "degree": t_hilbert.degree, "quartics": result.t_graded4},
        ),
        CheckRecord(
            "t-nodes",
            "T is singular at three F_p-rational points, each with vanishing Jacobian",
            {"count": 3, "local_ranks": [0, 0, 0]},
            {"count": len(result.t_nodes), "local_ranks": result.t_local_ranks},
        ),
        CheckRecord(
            "scissor",
            "#S = #R + 3q - 3, and the fibers of R -> S off the centre add up to #R - 3",
            {"s_count": counts.r + 3 * counts.q - 3, "fiber_sum": counts.r - 3},
            {"s_count": counts.s, "fiber_sum": counts.fiber_sum},
        ),
    ]
    for record in records:
        record.elapsed_ms = timings.get(record.id, 0)
    return records
