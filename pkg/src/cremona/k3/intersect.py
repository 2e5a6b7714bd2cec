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
"""Intersection numbers on the resolution of a Cremona transformation of P⁴ with a nodal surface base locus.

The base locus S has degree d and δ transverse double points; blowing up the nodes (exceptional divisors
Eᵢ) and then the proper transform of S (exceptional divisor E) gives P′, on which
M = nL − m(E + 2ΣEᵢ′). Every number here is an exact integer formula in the invariants of the
normalisation Σ of S.

Examples:

    >>> from cremona.k3.intersect import SurfaceInvariants, mixed_numbers
    >>> example = SurfaceInvariants.derive(n=4, m=1, xi=4, d=9, delta=3, kc=3, k2=-3, c2=27)
    >>> mixed_numbers(example)
    (4, 7, 4, 1)

"""

from __future__ import annotations

__all__ = [
    "InconsistentInvariantsError",
    "IntersectionTable",
    "InvalidInvariantsError",
    "NonIntegralError",
    "SurfaceInvariants",
    "double_point_class",
    "e4_formulas",
    "exceptional_numbers",
    "intersection_table",
    "le_numbers",
    "m4_expansion",
    "m4_formula",
    "m4_formulas",
    "mixed_numbers",
    "plocus_numbers",
    "xi_formula",
]

from dataclasses import asdict, dataclass, replace
from functools import lru_cache
import logging
from typing import Any, Mapping, Optional

import sympy

from cremona.k3 import CremonaError, InputError


logger = logging.getLogger(__name__)

# Cubic form of P³ blown up along two skew lines, basis (H, Q̃′, Q̃″); missing monomials are 0
_EXCEPTIONAL_CUBICS = {(3, 0, 0): 1, (1, 2, 0): -1, (1, 0, 2): -1, (0, 3, 0): -2, (0, 0, 3): -2}
_H, _Q1, _Q2 = sympy.symbols("H Q1 Q2")
_FIELDS = ("n", "m", "xi", "d", "delta", "kc", "k2", "c2", "chi", "g")


class InvalidInvariantsError(InputError):
    """Surface invariants violate a precondition (Noether, genus formula or a range)."""


class InconsistentInvariantsError(CremonaError):
    """Two formulas for the same intersection number disagree on the given invariants."""


class NonIntegralError(CremonaError):
    """A quantity that must be an integer (node count, multiplicity, secant degree) is not."""


@dataclass(frozen=True)
class SurfaceInvariants:
    """Numerical data of a Cremona transformation and of the normalisation Σ of its base surface.

    Attributes:
        n: Degree of the forms defining the map.
        m: Multiplicity of S in the base locus.
        xi: Degree of the inverse map, if known.
        d: Degree of S (C² for a general sectional curve C).
        delta: Number of transverse double points of S.
        kc: K_Σ·C.
        k2: K_Σ².
        c2: c₂(Σ).
        chi: χ(O_Σ), if known.
        g: Sectional genus g(C), if known.

    """

    n: int
    m: int
    d: int
    delta: int = 0
    kc: int = 0
    k2: int = 0
    c2: int = 0
    xi: Optional[int] = None
    chi: Optional[int] = None
    g: Optional[int] = None

    @classmethod
    def derive(cls, **values: int) -> SurfaceInvariants:
        """Returns the invariants with χ and g filled in from Noether's formula and the genus formula.

        Raises:
            NonIntegralError: If 12 ∤ K² + c₂ or d + K_ΣC is odd.

        """
        invariants = cls(**values)
        chi, remainder = divmod(invariants.k2 + invariants.c2, 12)
        if remainder:
            raise NonIntegralError(f"12χ = K² + c₂ = {invariants.k2 + invariants.c2} is not divisible by 12")
        genus, remainder = divmod(invariants.d + invariants.kc + 2, 2)
        if remainder:
            raise NonIntegralError(f"2g − 2 = d + K_ΣC = {invariants.d + invariants.kc} is odd")
        return replace(invariants, chi=chi, g=genus)

    @classmethod
    def from_dict(cls, content: Mapping[str, Any]) -> SurfaceInvariants:
        """Builds invariants from a JSON-like mapping; χ and g are derived when absent.

        Raises:
            InvalidInvariantsError: On unknown keys, missing keys or non-integer values.

        """
        unknown = set(content) - set(_FIELDS)
        if unknown:
            raise InvalidInvariantsError(f"Unknown invariant(s): {', '.join(sorted(unknown))}")
        values = {}
        for key, value in content.items():
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidInvariantsError(f"Invariant '{key}' must be an integer, got {value!r}")
            values[key] = value
        try:
            invariants = cls(**values)
        except TypeError as exc:
            raise InvalidInvariantsError(f"Missing invariant: {exc}") from exc
        if invariants.chi is None and invariants.g is None:
            try:
                return cls.derive(**values)
            except NonIntegralError:
                return invariants
        return invariants

    def to_dict(self) -> dict[str, Optional[int]]:
        return asdict(self)

    def check(self) -> None:
        """Checks the ranges and, when χ or g are set, Noether's and the genus formula.

        Raises:
            InvalidInvariantsError: Listing every violated condition.

        """
        problems = []
        if self.d < 1:
            problems.append(f"d = {self.d} < 1")
        if self.delta < 0:
            problems.append(f"δ = {self.delta} < 0")
        if self.m < 1:
            problems.append(f"m = {self.m} < 1")
        if self.n < 2:
            problems.append(f"n = {self.n} < 2")
        if self.chi is not None and 12 * self.chi != self.k2 + self.c2:
            problems.append(f"Noether: 12χ = {12 * self.chi} ≠ K² + c₂ = {self.k2 + self.c2}")
        if self.g is not None and 2 * self.g - 2 != self.d + self.kc:
            problems.append(f"genus: 2g − 2 = {2 * self.g - 2} ≠ d + K_ΣC = {self.d + self.kc}")
        if problems:
            raise InvalidInvariantsError("; ".join(problems))


@dataclass(frozen=True)
class IntersectionTable:
    """Exceptional, (L, E) and (L, M) intersection numbers of one datum."""

    exceptional: tuple[int, int, int, int, int]
    le: tuple[int, int, int, int]
    mixed: tuple[int, int, int, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "exceptional": dict(zip(("LEi", "E3Ei", "E2Ei2", "EEi3", "Ei4"), self.exceptional)),
            "le": dict(zip(("L3E", "L2E2", "LE3", "E4"), self.le)),
            "mixed": dict(zip(("L3M", "L2M2", "LM3", "M4"), self.mixed)),
        }


def _on_exceptional(expression: sympy.Expr) -> int:
    """Returns the degree of a cubic class on P³ blown up along two skew lines."""
    poly = sympy.Poly(sympy.expand(expression), _H, _Q1, _Q2)
    return int(sum(coeff * _EXCEPTIONAL_CUBICS.get(monom, 0) for monom, coeff in poly.terms()))


@lru_cache(maxsize=None)
def exceptional_numbers() -> tuple[int, int, int, int, int]:
    """Returns (LEᵢ′, E³Eᵢ′, E²Eᵢ′², EEᵢ′³, Eᵢ′⁴).

    Eᵢ′ is P³ blown up along the two lines over the i-th node, with E|Eᵢ′ = Q̃′ + Q̃″ and normal bundle
    O(−H); L misses Eᵢ′.

    """
    restricted_e = _Q1 + _Q2
    normal = -_H
    numbers = tuple(_on_exceptional(restricted_e ** (4 - b) * normal ** (b - 1)) for b in range(1, 5))
    return (0,) + numbers  # type: ignore[return-value]


def e4_formulas(s: SurfaceInvariants) -> tuple[int, int]:
    """Returns E⁴ by the Chern class formula and by the normal bundle formula, without comparing them."""
    chern = -15 * s.d - 5 * s.kc - s.c2 + 6 * s.delta
    normal = s.d**2 - 25 * s.d - 10 * s.kc - s.k2 + 4 * s.delta
    return chern, normal


def le_numbers(s: SurfaceInvariants) -> tuple[int, int, int, int]:
    """Returns (L³E, L²E², LE³, E⁴).

    Raises:
        InvalidInvariantsError: If the invariants fail `SurfaceInvariants.check()`.
        InconsistentInvariantsError: If the two formulas for E⁴ disagree.

    """
    s.check()
    chern, normal = e4_formulas(s)
    if chern != normal:
        raise InconsistentInvariantsError(
            f"E⁴ formulas disagree: {chern} (Chern classes) vs {normal} (normal bundle)"
        )
    return 0, -s.d, -5 * s.d - s.kc, chern


def xi_formula(s: SurfaceInvariants) -> int:
    """Returns LM³ = n³ − 3nm²d + m³(K_ΣC + 5d)."""
    return s.n**3 - 3 * s.n * s.m**2 * s.d + s.m**3 * (s.kc + 5 * s.d)


def m4_formulas(s: SurfaceInvariants) -> tuple[int, int]:
    """Returns M⁴ evaluated with either formula for E⁴, without comparing them."""
    common = s.n**4 - 6 * s.n**2 * s.m**2 * s.d + 4 * s.n * s.m**3 * (s.kc + 5 * s.d)
    chern, normal = e4_formulas(s)
    return common + s.m**4 * chern, common + s.m**4 * normal


def m4_formula(s: SurfaceInvariants) -> int:
    """Returns M⁴; the value 1 certifies that the map is birational.

    Raises:
        InconsistentInvariantsError: If the two evaluations disagree.

    """
    first, second = m4_formulas(s)
    if first != second:
        raise InconsistentInvariantsError(f"M⁴ evaluations disagree: {first} vs {second}")
    return first


def m4_expansion(s: SurfaceInvariants) -> int:
    """Returns M⁴ by expanding (nL − mE − 2mΣEᵢ′)⁴ term by term.

    Distinct Eᵢ′ are disjoint and L·Eᵢ′ = 0, so each node contributes the same pure (E, Eᵢ′) terms.

    """
    line, exc, node = sympy.symbols("L E N")
    poly = sympy.Poly(sympy.expand((s.n * line - s.m * exc - 2 * s.m * node) ** 4), line, exc, node)
    e_numbers = (1, 0, -s.d, -5 * s.d - s.kc, e4_formulas(s)[0])
    node_numbers = exceptional_numbers()
    total = 0
    for (a, b, c), coeff in poly.terms():
        if c == 0:
            total += int(coeff) * e_numbers[b]
        elif a == 0:
            total += int(coeff) * node_numbers[c] * s.delta
    return total


def mixed_numbers(s: SurfaceInvariants) -> tuple[int, int, int, int]:
    """Returns (L³M, L²M², LM³, M⁴)."""
    return s.n, s.n**2 - s.m**2 * s.d, xi_formula(s), m4_formula(s)


def intersection_table(s: SurfaceInvariants) -> IntersectionTable:
    return IntersectionTable(exceptional_numbers(), le_numbers(s), mixed_numbers(s))


def _segre_degree_zero(s: SurfaceInvariants) -> int:
    """Returns [ε*c(P⁴)·c(Σ)⁻¹]₀ with c(Σ)⁻¹ = 1 − c₁ + (c₁² − c₂), c₁(Σ) = −K_Σ."""
    hyperplane, canonical, point = sympy.symbols("C K pt")
    ambient = sympy.expand((1 + hyperplane) ** 5)
    inverse = 1 + canonical + (canonical**2 - s.c2 * point)
    product = sympy.Poly(sympy.expand(ambient * inverse), hyperplane, canonical, point)
    pairing = {(2, 0, 0): s.d, (1, 1, 0): s.kc, (0, 2, 0): s.k2, (0, 0, 1): 1}
    return int(sum(coeff * pairing.get(monom, 0) for monom, coeff in product.terms()))


def double_point_class(s: SurfaceInvariants) -> tuple[int, int]:
    """Returns the double point class 𝔻 = d² − [ε*c(P⁴)·c(Σ)⁻¹]₀ and the node count δ = 𝔻/2.

    Raises:
        NonIntegralError: If 𝔻 is odd.

    """
    value = s.d**2 - _segre_degree_zero(s)
    if value % 2:
        raise NonIntegralError(f"Double point class {value} is odd")
    logger.debug(f"Double point class {value} for d={s.d}, K·C={s.kc}, K²={s.k2}, c₂={s.c2}")
    return value, value // 2


def _exact_division(numerator: int, denominator: int, label: str) -> int:
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise NonIntegralError(f"{label} = {numerator}/{denominator} is not an integer")
    return quotient


def plocus_numbers(s: SurfaceInvariants, theta_degree: Optional[int] = None) -> tuple[int, int, int]:
    """Returns the multiplicity of the P-locus Θ along S, the degree of the curves l contracted onto the
    smooth points of the inverse base locus, and l·E_X.

    Uses E_X = (nL − M)/m on X and, symmetrically, F_X = ξM − L for the inverse, whose base locus has
    the same degree d.

    Args:
        s: Invariants with ξ set.
        theta_degree: Degree of Θ. Default: 5(n − 1), the degree of the Jacobian determinant.

    Raises:
        NonIntegralError: If a division is not exact.

    """
    l3m, l2m2, lm3, m4 = mixed_numbers(s)
    xi = s.xi if s.xi is not None else lm3
    theta_degree = 5 * (s.n - 1) if theta_degree is None else theta_degree
    m3_ex = _exact_division(s.n * lm3 - m4, s.m, "M³E_X")
    multiplicity = _exact_division(theta_degree * lm3, m3_ex, "multiplicity of Θ")
    secant_degree = _exact_division(xi * lm3 - l2m2, s.d, "L·l")
    secant_hits = _exact_division(s.n * xi * lm3 - s.n * l2m2 - xi * m4 + lm3, s.d, "E_X·l")
    return multiplicity, secant_degree, secant_hits
