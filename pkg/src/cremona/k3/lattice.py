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
"""Integer lattice arithmetic for the rank 8 algebraic part of H⁴ of the resolved Cremona graph X.

The lattice A_L(X) is spanned by L², the strict transform H̃_L of the K3 polarisation, the strict transforms
F̃₁..₃ of the exceptional curves of the projection and the quadrics Q₁..₃ over the nodes. The same lattice
is spanned by the classes built from the inverse map; this module recovers the base change between the
two bases and its action on the discriminant group Z/12.

Examples:

    >>> from cremona.k3.lattice import discriminant_action, full_base_change
    >>> discriminant_action(full_base_change())
    7

"""

from __future__ import annotations

__all__ = [
    "BASIS_LABELS",
    "POLARISATION_NORM",
    "ClassConstraints",
    "ClassVector",
    "DecompositionError",
    "DiscriminantGroup",
    "GramLattice",
    "LatticeError",
    "discriminant_action",
    "discriminant_group",
    "flip_node_signs",
    "full_base_change",
    "h_m_constraints",
    "intersection_lattice",
    "inverse_base_change",
    "m_squared_constraints",
    "smith_normal_form",
    "solve_class_decomposition",
]

from dataclasses import dataclass
import itertools
import logging
import math
from typing import Optional, Sequence

import numpy as np
import sympy

from cremona.k3 import CremonaError
from cremona.k3.intersect import exceptional_numbers


logger = logging.getLogger(__name__)

BASIS_LABELS = ("L^2", "H_L", "F_1", "F_2", "F_3", "Q_1", "Q_2", "Q_3")
# H_L² of a degree 12 K3 surface
POLARISATION_NORM = 12

# Rows: M², H̃_M, G̃₁..₃, K₁..₃ in the basis L², H̃_L, F̃₁..₃, Q₁..₃
_BASE_CHANGE = (
    (7, -3, 4, 4, 4, 2, 2, 2),
    (36, -17, 24, 24, 24, 12, 12, 12),
    (4, -2, 3, 3, 3, 2, 1, 1),
    (4, -2, 3, 3, 3, 1, 2, 1),
    (4, -2, 3, 3, 3, 1, 1, 2),
    (2, -1, 2, 1, 1, 1, 1, 1),
    (2, -1, 1, 2, 1, 1, 1, 1),
    (2, -1, 1, 1, 2, 1, 1, 1),
)


class LatticeError(CremonaError):
    """Singular or asymmetric Gram matrix, failed isometry check or a class outside the dual lattice."""


class DecompositionError(CremonaError):
    """A class decomposition search found no solution or more than one.

    Attributes:
        candidates: Every solution found.

    """

    def __init__(self, message: str, candidates: Sequence[tuple[int, ...]] = ()) -> None:
        super().__init__(message)
        self.candidates = list(candidates)


def _object_matrix(matrix: Sequence[Sequence[int]]) -> np.ndarray:
    return np.array([[int(v) for v in row] for row in matrix], dtype=object).reshape(len(matrix), -1)


@dataclass(frozen=True)
class GramLattice:
    """Nondegenerate integral lattice given by its Gram matrix in a labelled basis."""

    gram: tuple[tuple[int, ...], ...]
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        gram = tuple(tuple(int(v) for v in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        if any(len(row) != len(gram) for row in gram):
            raise LatticeError("Gram matrix must be square")
        if any(gram[i][j] != gram[j][i] for i in range(len(gram)) for j in range(i)):
            raise LatticeError("Gram matrix must be symmetric")
        if self.determinant == 0:
            raise LatticeError("Gram matrix is singular")
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(f"e_{i}" for i in range(len(gram))))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.gram)

    @property
    def determinant(self) -> int:
        return int(sympy.Matrix(self.gram).det())

    def pairing(self, u: Sequence[int], v: Sequence[int]) -> sympy.Rational:
        return (sympy.Matrix([list(u)]) * self.matrix * sympy.Matrix(list(v)))[0, 0]

    def norm(self, v: Sequence[int]) -> sympy.Rational:
        return self.pairing(v, v)


@dataclass(frozen=True)
class DiscriminantGroup:
    """Finite group Λ*/Λ.

    Attributes:
        invariant_factors: Invariant factors > 1, each dividing the next.
        generators: Rational coordinates (in the lattice basis) of one generator per factor.

    """

    invariant_factors: tuple[int, ...]
    generators: tuple[tuple[sympy.Rational, ...], ...]

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def generator(self) -> Optional[tuple[sympy.Rational, ...]]:
        """Generator of a cyclic group, `None` for the trivial group."""
        if len(self.generators) > 1:
            raise LatticeError(f"Group {self.invariant_factors} is not cyclic")
        return self.generators[0] if self.generators else None


@dataclass(frozen=True)
class ClassVector:
    """Integer coefficients (a, b, f₁, f₂, f₃, g₁, g₂, g₃) in the basis L², H̃_L, F̃₁..₃, Q₁..₃."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != 8:
            raise LatticeError(f"Class vectors have 8 coefficients, got {len(self.coefficients)}")
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    @property
    def a(self) -> int:
        return self.coefficients[0]

    @property
    def b(self) -> int:
        return self.coefficients[1]

    @property
    def f(self) -> tuple[int, int, int]:
        return self.coefficients[2:5]  # type: ignore[return-value]

    @property
    def g(self) -> tuple[int, int, int]:
        return self.coefficients[5:8]  # type: ignore[return-value]


@dataclass(frozen=True)
class ClassConstraints:
    """Integer constraints on a class aL² + bH̃_L + ΣfᵢF̃ᵢ + ΣgᵢQᵢ.

    Attributes:
        label: Name of the class.
        a: Fixed coefficient of L².
        f_sum: (p, q) with Σfᵢ = p·b + q.
        norm: (p, q) with Σfᵢ² (+ Σgᵢ² when the gᵢ are free) = p·b² + q.
        g_value: Common fixed value of the gᵢ, if fixed.
        g_sum: (p, q) with Σgᵢ = p·b + q, if the gᵢ are free.

    """

    label: str
    a: int
    f_sum: tuple[int, int]
    norm: tuple[int, int]
    g_value: Optional[int] = None
    g_sum: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if (self.g_value is None) == (self.g_sum is None):
            raise LatticeError("Exactly one of g_value and g_sum must be given")

    def window_polynomial(self) -> sympy.Poly:
        """Returns q(b) with q(b) ≤ 0 for every solution, from Cauchy–Schwarz on the sums of fᵢ (and gᵢ)."""
        b = sympy.Symbol("b")
        bound = (self.f_sum[0] * b + self.f_sum[1]) ** 2
        if self.g_sum is not None:
            bound += (self.g_sum[0] * b + self.g_sum[1]) ** 2
        return sympy.Poly(sympy.expand(bound - 3 * (self.norm[0] * b**2 + self.norm[1])), b)

    def window(self, margin: int = 0) -> range:
        """Returns the integers b where `window_polynomial()` is not positive, widened by `margin`."""
        poly = self.window_polynomial()
        roots = sorted(set(poly.real_roots()))
        if poly.LC() <= 0 or not roots:
            raise LatticeError(f"Constraints for {self.label} do not give a bounded window for b")
        low, high = int(sympy.ceiling(roots[0])), int(sympy.floor(roots[-1]))
        return range(low - margin, high + margin + 1)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (U, D, V) with U·A·V = D, U and V unimodular and D diagonal with dᵢ | dᵢ₊₁, dᵢ ≥ 0.

    Elementary row and column operations, always pivoting on the smallest nonzero entry left. Entries are
    Python integers in object arrays, so there is no overflow.

    """
    a = _object_matrix(matrix)
    rows, cols = a.shape
    u = _object_matrix(np.identity(rows, dtype=int))
    v = _object_matrix(np.identity(cols, dtype=int))
    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(a[i, j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i, j] != 0]
            if not nonzero:
                return u, a, v
            _, i, j = min(nonzero)
            a[[t, i]], u[[t, i]] = a[[i, t]], u[[i, t]]
            a[:, [t, j]], v[:, [t, j]] = a[:, [j, t]], v[:, [j, t]]
            pivot = a[t, t]
            clean = True
            for i in range(t + 1, rows):
                q = a[i, t] // pivot
                a[i] -= q * a[t]
                u[i] -= q * u[t]
                clean &= a[i, t] == 0
            for j in range(t + 1, cols):
                q = a[t, j] // pivot
                a[:, j] -= q * a[:, t]
                v[:, j] -= q * v[:, t]
                clean &= a[t, j] == 0
            if not clean:
                continue
            blocking = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i, j] % pivot), None
            )
            if blocking is None:
                break
            a[t] += a[blocking]
            u[t] += u[blocking]
        if a[t, t] < 0:
            a[t] = -a[t]
            u[t] = -u[t]
    return u, a, v


def intersection_lattice() -> GramLattice:
    """Returns A_L(X): diag(1, −12, 1, 1, 1, 1, 1, 1) in the basis L², H̃_L, F̃₁..₃, Q₁..₃."""
    gram = np.diag([1, -POLARISATION_NORM, 1, 1, 1, 1, 1, 1])
    return GramLattice(tuple(tuple(int(v) for v in row) for row in gram), BASIS_LABELS)


def _symmetric_fraction(value: sympy.Rational) -> sympy.Rational:
    reduced = value - sympy.floor(value)
    return reduced - 1 if reduced > sympy.Rational(1, 2) else reduced


def discriminant_group(lattice: GramLattice) -> DiscriminantGroup:
    """Returns Λ*/Λ from the Smith normal form U·G·V = D of the Gram matrix.

    The dual lattice is V·D⁻¹·Zⁿ, so the columns of V divided by the invariant factors generate the group.
    Generator entries are reduced to (−1/2, 1/2] and signed so the first nonzero entry is negative,
    giving −H̃/12 for A_L(X).

    """
    _, diagonal, v = smith_normal_form(lattice.gram)
    factors, generators = [], []
    for index in range(lattice.rank):
        factor = int(diagonal[index, index])
        if factor > 1:
            column = [sympy.Rational(int(v[row, index]), factor) for row in range(lattice.rank)]
            vector = [_symmetric_fraction(value) for value in column]
            if next(c for c in vector if c != 0) > 0:
                vector = [-c for c in vector]
            factors.append(factor)
            generators.append(tuple(vector))
    logger.debug(f"Discriminant group invariant factors: {factors}")
    return DiscriminantGroup(tuple(factors), tuple(generators))


def m_squared_constraints(
    mixed: Sequence[int] = (4, 7, 4, 1), m: int = 1, polarisation_norm: int = POLARISATION_NORM
) -> ClassConstraints:
    """Returns the constraints on M² from its pairings with L², the Qᵢ and LM, and from M⁴.

    Args:
        mixed: (L³M, L²M², LM³, M⁴).
        m: Multiplicity of the base surface.
        polarisation_norm: H_L².

    """
    n, l2m2, lm3, m4 = mixed
    _, e3ei, e2ei2, eei3, ei4 = exceptional_numbers()
    # M²Qᵢ = −M²Eᵢ′² with M = nL − m(E + 2ΣEⱼ′)
    g_value = -(m**2) * (e2ei2 + 4 * eei3 + 4 * ei4)
    return ClassConstraints(
        label="M^2",
        a=l2m2,
        f_sum=(-polarisation_norm, lm3 - n * l2m2),
        norm=(polarisation_norm, m4 - l2m2**2 - 3 * g_value**2),
        g_value=g_value,
    )


def h_m_constraints(
    m_squared: ClassVector, mixed: Sequence[int] = (4, 7, 4, 1), polarisation_norm: int = POLARISATION_NORM
) -> ClassConstraints:
    """Returns the constraints on H̃_M, using the symmetry H̃_L·LᵏM²⁻ᵏ = H̃_M·MᵏL²⁻ᵏ.

    Args:
        m_squared: The decomposition of M², with equal fᵢ and equal gᵢ.
        mixed: (L³M, L²M², LM³, M⁴).
        polarisation_norm: H_L² = H_M².

    Raises:
        LatticeError: If the pairing with M² does not give an integral relation for Σgᵢ.

    """
    n = mixed[0]
    a = m_squared.b * -polarisation_norm
    f_sum = (-polarisation_norm, polarisation_norm - n * a)
    f0, g0 = m_squared.f[0], m_squared.g[0]
    # 0 = H̃_M·M² = a·a₀ − h·b₀·b + f₀Σf + g₀Σg
    slope = sympy.Rational(polarisation_norm * m_squared.b - f0 * f_sum[0], g0)
    offset = -sympy.Rational(a * m_squared.a + f0 * f_sum[1], g0)
    if not (slope.is_integer and offset.is_integer):
        raise LatticeError(f"Σg = {slope}·b + {offset} is not integral")
    return ClassConstraints(
        label="H_M",
        a=a,
        f_sum=f_sum,
        norm=(polarisation_norm, -polarisation_norm - a**2),
        g_sum=(int(slope), int(offset)),
    )


def _triples(total: int, squares: int) -> list[tuple[int, int, int]]:
    """Returns the integer triples with the given sum and sum of squares."""
    if squares < 0:
        return []
    bound = math.isqrt(squares)
    found = []
    for x, y in itertools.product(range(-bound, bound + 1), repeat=2):
        z = total - x - y
        if x * x + y * y + z * z == squares:
            found.append((x, y, z))
    return found


def _triples_by_squares(total: int, limit: int) -> dict[int, list[tuple[int, int, int]]]:
    if limit < 0:
        return {}
    bound = math.isqrt(limit)
    grouped: dict[int, list[tuple[int, int, int]]] = {}
    for x, y in itertools.product(range(-bound, bound + 1), repeat=2):
        z = total - x - y
        squares = x * x + y * y + z * z
        if squares <= limit:
            grouped.setdefault(squares, []).append((x, y, z))
    return grouped


def solve_class_decomposition(constraints: ClassConstraints, margin: int = 0) -> ClassVector:
    """Returns the unique integer class satisfying `constraints`, by exhaustive search over b.

    Args:
        constraints: Constraint system of the class.
        margin: Extra integers searched on either side of the Cauchy–Schwarz window.

    Raises:
        DecompositionError: If the search finds no solution or several, listing every candidate.

    """
    candidates = []
    for b in constraints.window(margin):
        f_total = constraints.f_sum[0] * b + constraints.f_sum[1]
        norm = constraints.norm[0] * b * b + constraints.norm[1]
        if constraints.g_sum is None:
            g = (constraints.g_value,) * 3
            candidates += [(constraints.a, b, *f, *g) for f in _triples(f_total, norm)]
            continue
        g_total = constraints.g_sum[0] * b + constraints.g_sum[1]
        g_by_squares = _triples_by_squares(g_total, norm)
        for squares, f_list in _triples_by_squares(f_total, norm).items():
            for f, g in itertools.product(f_list, g_by_squares.get(norm - squares, [])):
                candidates.append((constraints.a, b, *f, *g))
    logger.debug(f"{constraints.label}: {len(candidates)} candidate(s) in b ∈ {constraints.window(margin)}")
    if len(candidates) != 1:
        raise DecompositionError(
            f"{constraints.label}: expected a unique decomposition, found {len(candidates)}", candidates
        )
    solution = ClassVector(candidates[0])
    if len(set(solution.f)) != 1 or len(set(solution.g)) != 1:
        raise DecompositionError(f"{constraints.label}: {candidates[0]} is not symmetric", candidates)
    if constraints.window_polynomial().eval(solution.b) != 0:
        raise DecompositionError(f"{constraints.label}: Cauchy–Schwarz is strict at b = {solution.b}")
    return solution


def full_base_change(lattice: Optional[GramLattice] = None) -> sympy.Matrix:
    """Returns the matrix T whose rows express M², H̃_M, G̃₁..₃, K₁..₃ in the basis of A_L(X).

    Raises:
        LatticeError: If T·G·Tᵀ ≠ G.

    """
    lattice = lattice or intersection_lattice()
    matrix = sympy.Matrix(_BASE_CHANGE)
    if matrix * lattice.matrix * matrix.T != lattice.matrix:
        raise LatticeError("Base change is not an isometry of the algebraic lattice")
    return matrix


def inverse_base_change(matrix: sympy.Matrix, lattice: Optional[GramLattice] = None) -> sympy.Matrix:
    """Returns T⁻¹ = G·Tᵀ·G⁻¹ for an isometry T of the lattice with Gram matrix G."""
    gram = (lattice or intersection_lattice()).matrix
    inverse = gram * matrix.T * gram.inv()
    if inverse * matrix != sympy.eye(matrix.rows):
        raise LatticeError("Matrix is not an isometry")
    return inverse


def flip_node_signs(matrix: sympy.Matrix, flips: Sequence[int], both_sides: bool = True) -> sympy.Matrix:
    """Returns the base change after replacing Qᵢ by −Qᵢ (and Kᵢ by −Kᵢ) for i in `flips` (1-based)."""
    signs = [1] * 5 + [-1 if i in flips else 1 for i in (1, 2, 3)]
    flip = sympy.diag(*signs)
    return flip * matrix * flip if both_sides else matrix * flip


def discriminant_action(
    matrix: sympy.Matrix, lattice: Optional[GramLattice] = None, index: int = 1, sign: int = -1
) -> int:
    """Returns k in [0, |dΛ|) with T(sign·ẽ/N) ≡ k·(sign·ẽ/N) modulo the lattice.

    Here ẽ is basis vector `index` (H̃ on both sides) and N = |dΛ|; the image of the generator of the
    M-side group is row `index` of T, scaled by sign/N, written in the L-side basis.

    Raises:
        LatticeError: If the image is not in the dual lattice, or is not a multiple of the generator.

    """
    lattice = lattice or intersection_lattice()
    order = discriminant_group(lattice).order
    image = sympy.Rational(sign, order) * matrix.row(index)
    if not all(value.is_integer for value in image * lattice.matrix):
        raise LatticeError(f"Image {list(image)} of the generator is not in the dual lattice")
    for multiplier in range(order):
        difference = image.copy()
        difference[index] -= sympy.Rational(sign * multiplier, order)
        if all(value.is_integer for value in difference):
            logger.debug(f"Discriminant action: multiplication by {multiplier} on Z/{order}")
            return multiplier
    raise LatticeError(f"Image {list(image)} is not a multiple of the generator")
