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
"""Scissor arithmetic in the Grothendieck ring of varieties for the two sides of the Cremona transformation.

Classes are integer polynomials in the Lefschetz class 𝕃 and the opaque K3 classes [R_L], [R_M]. The
counting realisation sends 𝕃 to q and [R] to #R(F_q).

Examples:

    >>> from cremona.k3.motivic import annihilation_identity
    >>> str(annihilation_identity())
    'L*R_L - L*R_M'

"""

from __future__ import annotations

__all__ = [
    "BlowupStratification",
    "MotivicError",
    "MotivicExpression",
    "PointCountRealization",
    "annihilation_identity",
    "blowup_class",
    "blowup_strata",
    "point_count_realization",
    "projective_class",
]

from dataclasses import dataclass
import logging
from typing import Any, Union

import sympy

from cremona.k3 import CremonaError


logger = logging.getLogger(__name__)

_L, _RL, _RM = sympy.symbols("L R_L R_M")
_GENERATORS = (_L, _RL, _RM)
# Nodes of S; each has two preimages on R and comes from one blown-up point
_NODES = 3


class MotivicError(CremonaError):
    """Two expansions of the same class differ."""


@dataclass(frozen=True)
class MotivicExpression:
    """Z-linear combination of monomials 𝕃^a·[R_L]^b·[R_M]^c, kept in expanded form."""

    poly: sympy.Poly

    @classmethod
    def from_expr(cls, expression: Union[sympy.Expr, int]) -> MotivicExpression:
        return cls(sympy.Poly(sympy.expand(expression), *_GENERATORS, domain=sympy.ZZ))

    @classmethod
    def lefschetz(cls) -> MotivicExpression:
        return cls.from_expr(_L)

    @classmethod
    def k3(cls, side: str) -> MotivicExpression:
        """Returns [R_L] or [R_M].

        Raises:
            ValueError: If `side` is neither "L" nor "M".

        """
        if side not in ("L", "M"):
            raise ValueError(f"Side must be 'L' or 'M', got {side!r}")
        return cls.from_expr(_RL if side == "L" else _RM)

    def _coerce(self, other: Union[MotivicExpression, int]) -> MotivicExpression:
        return other if isinstance(other, MotivicExpression) else MotivicExpression.from_expr(other)

    def __add__(self, other: Union[MotivicExpression, int]) -> MotivicExpression:
        return MotivicExpression(self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __sub__(self, other: Union[MotivicExpression, int]) -> MotivicExpression:
        return MotivicExpression(self.poly - self._coerce(other).poly)

    def __rsub__(self, other: Union[MotivicExpression, int]) -> MotivicExpression:
        return self._coerce(other) - self

    def __mul__(self, other: Union[MotivicExpression, int]) -> MotivicExpression:
        return MotivicExpression(self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def __neg__(self) -> MotivicExpression:
        return MotivicExpression(-self.poly)

    def __pow__(self, exponent: int) -> MotivicExpression:
        return MotivicExpression(self.poly**exponent)

    def __str__(self) -> str:
        return str(self.poly.as_expr())

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def monomials(self) -> dict[tuple[int, int, int], int]:
        """Returns {(a, b, c): coefficient of 𝕃^a·[R_L]^b·[R_M]^c}."""
        return {monom: int(coeff) for monom, coeff in self.poly.terms() if coeff}

    def identify_sides(self) -> MotivicExpression:
        """Returns the expression with [R_L] replaced by [R_M]."""
        return MotivicExpression.from_expr(self.poly.as_expr().subs(_RL, _RM))

    def count(self, q: int, r_l: int, r_m: int) -> int:
        """Returns the counting realisation: 𝕃 ↦ q, [R_L] ↦ r_l, [R_M] ↦ r_m."""
        return int(self.poly.eval({_L: q, _RL: r_l, _RM: r_m}))


def projective_class(n: int) -> MotivicExpression:
    """Returns [Pⁿ] = 1 + 𝕃 + … + 𝕃ⁿ.

    Raises:
        ValueError: If `n` is negative.

    """
    if n < 0:
        raise ValueError(f"Projective space dimension must be non-negative, got {n}")
    return MotivicExpression.from_expr(sum(_L**i for i in range(n + 1)))


@dataclass(frozen=True)
class BlowupStratification:
    """Strata of X → P⁴, the blowup along the nodal surface S of one side.

    Attributes:
        side: "L" or "M".
        surface: [S] = [R] + 3𝕃 − 3, from Σ = R blown up at three points and S = Σ with three point pairs
            glued.
        complement: [P⁴] − [S].
        exceptional: ([S] − 3)[P¹] + 3[P¹]², the P¹-bundle over the smooth part plus a quadric per node.
        total: complement + exceptional.
        closed_form: [P⁴] + 3[P¹]𝕃 + [R]𝕃 + 3𝕃² − 3𝕃.

    """

    side: str
    surface: MotivicExpression
    complement: MotivicExpression
    exceptional: MotivicExpression
    total: MotivicExpression
    closed_form: MotivicExpression

    def to_dict(self) -> dict[str, str]:
        return {
            "surface": str(self.surface),
            "complement": str(self.complement),
            "exceptional": str(self.exceptional),
            "total": str(self.total),
            "closed_form": str(self.closed_form),
        }


def blowup_strata(side: str) -> BlowupStratification:
    """Returns the stratification of X on one side, each stratum expanded.

    Node quadrics are counted as [P¹]².

    """
    lefschetz = MotivicExpression.lefschetz()
    k3 = MotivicExpression.k3(side)
    line = projective_class(1)
    space = projective_class(4)
    surface = k3 + _NODES * lefschetz - _NODES
    complement = space - surface
    exceptional = (surface - _NODES) * line + _NODES * line**2
    closed_form = space + _NODES * line * lefschetz + k3 * lefschetz + _NODES * (lefschetz**2 - lefschetz)
    return BlowupStratification(side, surface, complement, exceptional, complement + exceptional, closed_form)


def blowup_class(side: str) -> MotivicExpression:
    """Returns [X] expanded from its stratification on the given side.

    Raises:
        MotivicError: If the expansion differs from the closed form.

    """
    strata = blowup_strata(side)
    if strata.total != strata.closed_form:
        raise MotivicError(
            f"[X] on side {side}: stratification {strata.total} ≠ closed form {strata.closed_form}"
        )
    logger.debug(f"[X] = {strata.total} (side {side})")
    return strata.total


def annihilation_identity() -> MotivicExpression:
    """Returns [X]_L − [X]_M, which is ([R_L] − [R_M])·𝕃.

    Raises:
        MotivicError: If the difference is not ([R_L] − [R_M])·𝕃 monomial by monomial.

    """
    difference = blowup_class("L") - blowup_class("M")
    expected = (MotivicExpression.k3("L") - MotivicExpression.k3("M")) * MotivicExpression.lefschetz()
    if difference.monomials() != expected.monomials():
        raise MotivicError(f"[X]_L − [X]_M = {difference}, expected {expected}")
    return difference


@dataclass(frozen=True)
class PointCountRealization:
    """Counting realisation of both stratifications over F_q.

    #R_M is not counted directly: it is recovered from the base locus T of the inverse, a projection of
    R_M with the same node structure, by #R_M = #T − 3q + 3.

    """

    q: int
    r_l: int
    s_l: int
    t: int
    r_m: int
    x_strata_l: int
    x_l: int
    x_m: int

    @property
    def scissor_holds(self) -> bool:
        """#S_L = #R_L + 3q − 3."""
        return self.s_l == self.r_l + _NODES * self.q - _NODES

    @property
    def annihilated(self) -> int:
        """Returns (#R_L − #R_M)·q."""
        return (self.r_l - self.r_m) * self.q

    @property
    def balanced(self) -> bool:
        return self.scissor_holds and self.x_strata_l == self.x_l and self.x_l == self.x_m

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "R_L": self.r_l,
            "S_L": self.s_l,
            "T": self.t,
            "R_M": self.r_m,
            "R_M_source": "#T - 3q + 3",
            "X_from_strata_L": self.x_strata_l,
            "X_L": self.x_l,
            "X_M": self.x_m,
            "difference_times_q": self.annihilated,
            "scissor_holds": self.scissor_holds,
            "balanced": self.balanced,
        }


def point_count_realization(q: int, count_r_l: int, count_s_l: int, count_t: int) -> PointCountRealization:
    """Evaluates both stratifications of X at F_q-point counts.

    The L-side strata are evaluated with the counted #S_L, the closed forms with #R_L and the reconstructed
    #R_M; all three agree iff #S_L = #R_L + 3q − 3 and #R_L = #R_M.

    Args:
        q: Field size.
        count_r_l: #R_L(F_q).
        count_s_l: #S_L(F_q).
        count_t: #T(F_q), T the base locus of the inverse.

    """
    count_r_m = count_t - _NODES * q + _NODES
    line = q + 1
    space = projective_class(4).count(q, 0, 0)
    x_strata = (space - count_s_l) + (count_s_l - _NODES) * line + _NODES * line**2
    realization = PointCountRealization(
        q=q,
        r_l=count_r_l,
        s_l=count_s_l,
        t=count_t,
        r_m=count_r_m,
        x_strata_l=x_strata,
        x_l=blowup_class("L").count(q, count_r_l, count_r_m),
        x_m=blowup_class("M").count(q, count_r_l, count_r_m),
    )
    logger.info(
        f"#R_L = {count_r_l}, #R_M = {count_r_m} over F_{q}; "
        f"#X = {realization.x_l} (L), {realization.x_m} (M)"
    )
    return realization
