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
"""Homogeneous ideals over F_p: Gröbner bases, normal forms, elimination, quotients, saturation and
Hilbert data.

Gröbner bases are computed with sympy's Buchberger implementation (normal selection strategy with the
Gebauer-Möller criteria); all linear algebra over F_p goes through galois.

Examples:

    >>> from cremona.k3.ffpoly import PolynomialRing
    >>> from cremona.k3.groebner import Ideal, hilbert_data, saturate
    >>> ring = PolynomialRing.indexed("x", 3)
    >>> x0, x1, x2 = ring.gens
    >>> ideal = Ideal(ring, [x0 * x2, x1 * x2])
    >>> [ring.format(g) for g in saturate(ideal, Ideal(ring, [x2])).generators]
    ['x0', 'x1']
    >>> hilbert_data(Ideal(ring, [x0])).degree
    1

"""

from __future__ import annotations

__all__ = [
    "GroebnerBasis",
    "HilbertData",
    "Ideal",
    "IdealFormatError",
    "NonHomogeneousError",
    "buchberger",
    "contains",
    "eliminate",
    "eliminated_piece_dimension",
    "graded_piece_dimension",
    "hilbert_data",
    "hilbert_function",
    "hilbert_series_numerator",
    "ideals_equal",
    "intersect_ideals",
    "normal_form",
    "quotient",
    "read_ideal",
    "same_saturation",
    "saturate",
    "saturate_by_variable",
    "write_ideal",
]

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
import itertools
import logging
from math import comb
from pathlib import Path
import re
from typing import Iterable, Literal, Optional, Sequence

import galois
import numpy as np
import sympy
from sympy.polys.groebnertools import groebner as sympy_groebner, spoly
from sympy.polys.rings import PolyElement

from cremona.k3 import CremonaError, InputError, StrPath
from cremona.k3.ffpoly import (
    Monomial,
    MonomialOrder,
    PolynomialParseError,
    PolynomialRing,
    PrimeField,
    coefficient_rows,
    degree_monomials,
    homogeneous_degree,
)
from cremona.k3.io import open_text
from cremona.k3.logging import log_duration


logger = logging.getLogger(__name__)

T = sympy.Symbol("t")

_HEADER = re.compile(r"^ring\s+p=(\d+)\s+vars=(\S+)\s+order=(\S+)\s*$")


class NonHomogeneousError(CremonaError):
    """An ideal generator is not a homogeneous polynomial."""


class IdealFormatError(InputError):
    """An ideal text file does not follow the `ring p=... vars=... order=...` format."""


@dataclass(frozen=True)
class Ideal:
    """Homogeneous ideal given by generators in a named polynomial ring.

    Zero generators are dropped; the remaining ones are moved into `ring` (matching variables by name).

    Raises:
        NonHomogeneousError: If a generator is not homogeneous.

    """

    ring: PolynomialRing
    generators: tuple[PolyElement, ...]

    def __post_init__(self) -> None:
        generators = []
        for generator in self.generators:
            converted = self.ring.convert(generator)
            if not converted:
                continue
            if homogeneous_degree(converted) is None:
                raise NonHomogeneousError(f"Generator '{self.ring.format(converted)}' is not homogeneous")
            generators.append(converted)
        object.__setattr__(self, "generators", tuple(generators))

    @classmethod
    def irrelevant(cls, ring: PolynomialRing) -> Ideal:
        """Returns the ideal generated by all the variables."""
        return cls(ring, ring.gens)

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def degrees(self) -> list[int]:
        return [sum(next(iter(g.itermonoms()))) for g in self.generators]

    @property
    def is_unit(self) -> bool:
        return any(g.is_ground for g in self.generators)

    @cached_property
    def groebner_basis(self) -> GroebnerBasis:
        """Reduced degrevlex Gröbner basis, computed once per ideal."""
        return buchberger(self, MonomialOrder.degrevlex())

    def formatted(self) -> list[str]:
        """Returns the generators in canonical text form."""
        return [self.ring.format(g) for g in self.generators]


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Gröbner basis: monic elements sorted by decreasing leading monomial in `ring.order`."""

    ring: PolynomialRing
    elements: tuple[PolyElement, ...]

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    @property
    def leading_monomials(self) -> list[Monomial]:
        return [g.LM for g in self.elements]

    def reduce(self, f: PolyElement) -> PolyElement:
        """Returns the normal form of `f`. See `normal_form()`."""
        f = self.ring.convert(f)
        return f.rem(list(self.elements)) if self.elements else f

    def spair_residues(self) -> list[PolyElement]:
        """Returns the nonzero normal forms of all S-polynomials (empty for a Gröbner basis)."""
        residues = []
        for f, g in itertools.combinations(self.elements, 2):
            residue = self.reduce(spoly(f, g, self.ring.sympy_ring))
            if residue:
                residues.append(residue)
        return residues

    def is_reduced(self) -> bool:
        """Returns `True` if every element is monic and no leading monomial divides a term of another."""
        for index, g in enumerate(self.elements):
            if int(g.LC) % self.ring.p != 1:
                return False
            for other_index, other in enumerate(self.elements):
                if index != other_index and any(_divides(g.LM, m) for m in other.itermonoms()):
                    return False
        return True


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _groebner_elements(polys: Sequence[PolyElement], ring: PolynomialRing) -> tuple[PolyElement, ...]:
    polys = [ring.convert(f) for f in polys if f]
    if not polys:
        return ()
    if any(f.is_ground for f in polys):
        return (ring.one,)
    with log_duration(f"Buchberger on {len(polys)} generators in {ring.ngens} variables", logger):
        basis = sympy_groebner(polys, ring.sympy_ring, method="buchberger")
    elements = tuple(sorted(basis, key=lambda g: ring.order.key(g.LM), reverse=True))
    logger.debug(f"Reduced {ring.order.name} basis has {len(elements)} elements")
    return elements


def buchberger(ideal: Ideal, order: Optional[MonomialOrder] = None) -> GroebnerBasis:
    """Returns the reduced Gröbner basis of `ideal` with respect to `order` (default degrevlex).

    The empty ideal gives the empty basis, any ideal containing a nonzero constant gives {1}.

    """
    ring = ideal.ring.with_order(order or MonomialOrder.degrevlex())
    return GroebnerBasis(ring, _groebner_elements(ideal.generators, ring))


def normal_form(f: PolyElement, basis: GroebnerBasis) -> PolyElement:
    """Returns the fully reduced remainder of `f` modulo `basis`.

    No monomial of the result is divisible by a leading monomial of the basis, and `f` minus the result
    lies in the ideal.

    """
    return basis.reduce(f)


def contains(ideal: Ideal, other: Ideal | PolyElement) -> bool:
    """Returns `True` if the polynomial (or every generator of the ideal) `other` lies in `ideal`."""
    members = other.generators if isinstance(other, Ideal) else (other,)
    basis = ideal.groebner_basis
    return all(not basis.reduce(ideal.ring.convert(f)) for f in members)


def ideals_equal(first: Ideal, second: Ideal) -> bool:
    """Returns `True` if both ideals have the same reduced degrevlex Gröbner basis."""
    if set(first.ring.variables) != set(second.ring.variables):
        return False
    if first.ring.variables != second.ring.variables:
        return contains(first, second) and contains(second, first)
    ring = first.groebner_basis.ring
    return first.groebner_basis.elements == tuple(ring.convert(g) for g in second.groebner_basis.elements)


def eliminate(ideal: Ideal, keep: Iterable[str], degree_bound: Optional[int] = None) -> Ideal:
    """Returns the elimination ideal `ideal` ∩ F_p[keep], in the ring of the kept variables.

    Args:
        ideal: Homogeneous ideal.
        keep: Names of the variables to keep; they keep the relative order they have in `ideal.ring`.
        degree_bound: If `None`, eliminate with a block order and keep the basis elements supported on
            `keep`. Otherwise compute the graded pieces of the elimination ideal up to this degree by
            linear algebra on normal forms modulo the degrevlex basis, and return minimal generators
            of degree at most `degree_bound`.

    """
    keep_set = set(keep)
    unknown = keep_set - set(ideal.ring.variables)
    if unknown:
        raise ValueError(f"Unknown variables to keep: {sorted(unknown)}")
    kept = tuple(name for name in ideal.ring.variables if name in keep_set)
    dropped = tuple(name for name in ideal.ring.variables if name not in keep_set)
    if not dropped:
        return ideal
    target = PolynomialRing(ideal.ring.field, kept)
    if degree_bound is None:
        elimination_ring = PolynomialRing(ideal.ring.field, dropped + kept, MonomialOrder.block(len(dropped)))
        elements = _groebner_elements(ideal.generators, elimination_ring)
        survivors = [
            g for g in elements if all(not any(m[: len(dropped)]) for m in g.itermonoms())
        ]
        logger.info(f"Block elimination kept {len(survivors)} of {len(elements)} basis elements")
        return Ideal(target, tuple(target.convert(g) for g in survivors))
    return _graded_elimination(ideal, target, degree_bound)


def _plain(array: galois.FieldArray) -> np.ndarray:
    return np.asarray(array.view(np.ndarray), dtype=np.int64)


def _graded_elimination(ideal: Ideal, target: PolynomialRing, degree_bound: int) -> Ideal:
    gf = ideal.ring.field.gf
    basis = ideal.groebner_basis
    positions = [ideal.ring.variables.index(name) for name in target.variables]
    generators: list[PolyElement] = []
    previous: Optional[galois.FieldArray] = None
    previous_monomials: tuple[Monomial, ...] = ()
    for degree in range(1, degree_bound + 1):
        monomials = target.monomials(degree)
        column = {m: i for i, m in enumerate(monomials)}
        images = []
        for monomial in monomials:
            exponents = [0] * ideal.ring.ngens
            for position, exponent in zip(positions, monomial):
                exponents[position] = exponent
            images.append(basis.reduce(ideal.ring.from_terms({tuple(exponents): 1})))
        matrix, _ = coefficient_rows(images)
        if matrix.shape[1] == 0:
            piece = gf.Identity(len(monomials))
        else:
            piece = gf(matrix).left_null_space()
        if piece.shape[0]:
            piece = piece.row_reduce()
        logger.debug(f"Elimination ideal has dimension {piece.shape[0]} in degree {degree}")
        # Multiples of the previous graded piece by the kept variables
        products = np.zeros((0, len(monomials)), dtype=np.int64)
        if previous is not None and previous.shape[0]:
            rows = []
            for vector in _plain(previous):
                for variable in range(target.ngens):
                    row = np.zeros(len(monomials), dtype=np.int64)
                    for index in np.flatnonzero(vector):
                        shifted = list(previous_monomials[index])
                        shifted[variable] += 1
                        row[column[tuple(shifted)]] = vector[index]
                    rows.append(row)
            products = np.array(rows, dtype=np.int64)
        span = gf(products)
        rank = int(np.linalg.matrix_rank(span)) if span.shape[0] else 0
        for vector in _plain(piece):
            candidate = gf(np.vstack([_plain(span), vector[None, :]]))
            candidate_rank = int(np.linalg.matrix_rank(candidate))
            if candidate_rank > rank:
                span, rank = candidate, candidate_rank
                terms = {monomials[i]: int(vector[i]) for i in np.flatnonzero(vector)}
                generators.append(target.from_terms(terms))
        previous, previous_monomials = piece, monomials
    logger.info(
        f"Graded elimination up to degree {degree_bound}: {len(generators)} minimal generators of degrees "
        f"{sorted(Counter(sum(next(iter(g.itermonoms()))) for g in generators).items())}"
    )
    return Ideal(target, tuple(generators))


def intersect_ideals(first: Ideal, second: Ideal) -> Ideal:
    """Returns the intersection of two ideals of the same ring, eliminating a tag variable t from
    t·I + (1 − t)·J.
    """
    ring = first.ring
    if not first.generators or not second.generators:
        return Ideal(ring, ())
    if first.is_unit:
        return Ideal(ring, second.generators)
    if second.is_unit:
        return Ideal(ring, first.generators)
    tag = _fresh_name("t", ring.variables)
    tagged_ring = PolynomialRing(ring.field, (tag,) + ring.variables, MonomialOrder.block(1))
    t = tagged_ring.gens[0]
    polys = [t * tagged_ring.convert(f) for f in first.generators]
    polys += [(tagged_ring.one - t) * tagged_ring.convert(g) for g in second.generators]
    elements = _groebner_elements(polys, tagged_ring)
    survivors = [g for g in elements if all(m[0] == 0 for m in g.itermonoms())]
    return Ideal(ring, tuple(ring.convert(g) for g in survivors))


def _fresh_name(stem: str, taken: Sequence[str]) -> str:
    for suffix in itertools.count():
        name = f"{stem}_{suffix}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")  # pragma: no cover


def _variable_index(f: PolyElement) -> Optional[int]:
    """Returns the index of x if `f` is a nonzero multiple of a single variable x."""
    if len(f) != 1:
        return None
    monomial = f.LM
    if sum(monomial) != 1:
        return None
    return monomial.index(1)


def _divide_by_variable(ideal: Ideal, index: int, saturate_fully: bool) -> Ideal:
    # In degrevlex with x last, x divides a homogeneous basis element iff it divides its leading term
    ring = ideal.ring
    name = ring.variables[index]
    others = tuple(v for v in ring.variables if v != name)
    last_ring = PolynomialRing(ring.field, others + (name,))
    elements = _groebner_elements(ideal.generators, last_ring)
    last = last_ring.ngens - 1
    divided = []
    for g in elements:
        power = min(m[last] for m in g.itermonoms())
        if power and not saturate_fully:
            power = 1
        if power:
            g = last_ring.sympy_ring.from_dict({m[:last] + (m[last] - power,): c for m, c in g.items()})
        divided.append(g)
    return Ideal(ring, tuple(ring.convert(g) for g in divided))


def saturate_by_variable(ideal: Ideal, name: str) -> Ideal:
    """Returns (I : x^∞) for the variable x called `name`, from a single degrevlex basis with x last."""
    return _divide_by_variable(ideal, ideal.ring.variables.index(name), saturate_fully=True)


def _quotient_by_element(ideal: Ideal, g: PolyElement) -> Ideal:
    ring = ideal.ring
    g = ring.convert(g)
    if g.is_ground:
        return ideal
    index = _variable_index(g)
    if index is not None:
        return _divide_by_variable(ideal, index, saturate_fully=False)
    multiples = intersect_ideals(ideal, Ideal(ring, (g,)))
    quotients = []
    for h in multiples.generators:
        q, r = h.div(g)
        if r:
            raise CremonaError(f"'{ring.format(h)}' is not a multiple of '{ring.format(g)}'")
        quotients.append(q)
    return Ideal(ring, tuple(quotients))


def quotient(ideal: Ideal, other: Ideal | PolyElement) -> Ideal:
    """Returns the ideal quotient (I : J).

    A single polynomial g is handled as ⟨g⟩. For a variable the degrevlex last-variable rule is used;
    otherwise (I : g) = (I ∩ ⟨g⟩)/g. For an ideal the quotients by its generators are intersected,
    skipping generators already in I.

    """
    ring = ideal.ring
    generators = other.generators if isinstance(other, Ideal) else (ring.convert(other),)
    generators = tuple(g for g in generators if g)
    if not generators:
        return Ideal(ring, (ring.one,))
    result: Optional[Ideal] = None
    for g in generators:
        if contains(ideal, g):
            continue
        partial = _quotient_by_element(ideal, g)
        result = partial if result is None else intersect_ideals(result, partial)
    return Ideal(ring, (ring.one,)) if result is None else result


def saturate(ideal: Ideal, other: Ideal) -> Ideal:
    """Returns (I : J^∞).

    When J is generated by variables, (I : J^∞) is the intersection of the (I : x^∞), each obtained from
    one basis; otherwise quotients by J are iterated until the ideal stabilises.

    """
    if other.is_unit:
        return ideal
    indices = [_variable_index(ideal.ring.convert(g)) for g in other.generators]
    if other.generators and None not in indices:
        partials = [_divide_by_variable(ideal, index, saturate_fully=True) for index in indices]
        if all(ideals_equal(partial, ideal) for partial in partials):
            return ideal
        result = partials[0]
        for partial in partials[1:]:
            result = intersect_ideals(result, partial)
        return result
    current = ideal
    for step in itertools.count(1):
        following = quotient(current, other)
        if ideals_equal(following, current):
            logger.debug(f"Saturation stable after {step} quotient(s)")
            return current
        current = following
    raise AssertionError("unreachable")  # pragma: no cover


@dataclass(frozen=True)
class HilbertData:
    """Hilbert polynomial, projective dimension and degree of R/I.

    Attributes:
        hilbert_polynomial: Polynomial in `t` over QQ.
        dimension: Projective dimension (-1 for an empty projective scheme).
        degree: Degree (0 for an empty projective scheme).
        numerator: Reduced Hilbert series numerator Q(t), with HS = Q(t) / (1 - t)^(dimension + 1).

    """

    hilbert_polynomial: sympy.Poly
    dimension: int
    degree: int
    numerator: sympy.Poly

    def as_dict(self) -> dict[str, object]:
        return {
            "dimension": self.dimension,
            "degree": self.degree,
            "hilbert_polynomial": str(self.hilbert_polynomial.as_expr()),
        }


def _minimalize(monomials: Iterable[Monomial]) -> tuple[Monomial, ...]:
    kept: list[Monomial] = []
    for monomial in sorted(set(monomials), key=lambda m: (sum(m), m)):
        if not any(_divides(other, monomial) for other in kept):
            kept.append(monomial)
    return tuple(sorted(kept))


def _monomial_numerator(generators: tuple[Monomial, ...], cache: dict) -> sympy.Poly:
    """Numerator N of the Hilbert series N(t)/(1-t)^n of the quotient by a minimal monomial ideal."""
    if generators in cache:
        return cache[generators]
    counts = Counter(i for m in generators for i, e in enumerate(m) if e)
    shared = [i for i, count in counts.items() if count > 1]
    if not shared:
        # Monomials with disjoint supports form a regular sequence
        result = sympy.Poly(1, T, domain=sympy.ZZ)
        for m in generators:
            result = result * sympy.Poly(1 - T ** sum(m), T, domain=sympy.ZZ)
    else:
        pivot = min(shared, key=lambda i: (-counts[i], i))
        unit = tuple(int(i == pivot) for i in range(len(generators[0])))
        added = _minimalize([m for m in generators if not m[pivot]] + [unit])
        colon = _minimalize(m[:pivot] + (max(m[pivot] - 1, 0),) + m[pivot + 1 :] for m in generators)
        result = _monomial_numerator(added, cache) + sympy.Poly(T, T, domain=sympy.ZZ) * _monomial_numerator(
            colon, cache
        )
    cache[generators] = result
    return result


def hilbert_series_numerator(ideal: Ideal) -> sympy.Poly:
    """Returns N(t) with HS(R/I) = N(t) / (1 - t)^n, from the leading monomials of the degrevlex basis."""
    leading = ideal.groebner_basis.leading_monomials
    if not leading:
        return sympy.Poly(1, T, domain=sympy.ZZ)
    return _monomial_numerator(_minimalize(leading), {})


def hilbert_function(ideal: Ideal, degree: int) -> int:
    """Returns dim over F_p of the degree `degree` piece of R/I."""
    n = ideal.ring.ngens
    numerator = hilbert_series_numerator(ideal)
    total = 0
    for (power,), coeff in numerator.terms():
        if power <= degree:
            total += int(coeff) * comb(degree - power + n - 1, n - 1)
    return total


def hilbert_data(ideal: Ideal) -> HilbertData:
    """Returns the Hilbert polynomial, projective dimension and degree of R/I.

    The unit ideal gives dimension -1 and degree 0; so does any ideal whose quotient has finite length.

    """
    zero = sympy.Poly(0, T, domain=sympy.QQ)
    numerator = hilbert_series_numerator(ideal)
    if numerator.is_zero:
        return HilbertData(zero, -1, 0, numerator)
    krull = ideal.ring.ngens
    one_minus_t = sympy.Poly(1 - T, T, domain=sympy.ZZ)
    while krull > 0 and numerator.eval(1) == 0:
        numerator = numerator.exquo(one_minus_t)
        krull -= 1
    if krull == 0:
        return HilbertData(zero, -1, 0, numerator)
    expression = sympy.Integer(0)
    for (power,), coeff in numerator.terms():
        expression += coeff * sympy.expand_func(sympy.binomial(T - power + krull - 1, krull - 1))
    polynomial = sympy.Poly(sympy.expand(expression), T, domain=sympy.QQ)
    data = HilbertData(polynomial, krull - 1, int(numerator.eval(1)), numerator)
    logger.debug(
        f"Hilbert polynomial {polynomial.as_expr()}, dimension {data.dimension}, degree {data.degree}"
    )
    return data


def graded_piece_dimension(
    ideal: Ideal, degree: int, method: Literal["span", "leading-terms"] = "span"
) -> int:
    """Returns dim over F_p of the degree `degree` piece of the ideal.

    Args:
        ideal: Homogeneous ideal.
        degree: Non-negative degree.
        method: "span" computes the rank of {monomial · generator}; "leading-terms" counts the degree
            `degree` monomials of the leading-term ideal of the degrevlex basis.

    """
    if degree < 0:
        raise ValueError(f"Degree must be non-negative, got {degree}")
    if method == "leading-terms":
        return comb(degree + ideal.ring.ngens - 1, degree) - hilbert_function(ideal, degree)
    rows = []
    for generator, generator_degree in zip(ideal.generators, ideal.degrees):
        if generator_degree > degree:
            continue
        for monomial in ideal.ring.monomials(degree - generator_degree):
            rows.append(generator.mul_monom(monomial))
    if not rows:
        return 0
    matrix, _ = coefficient_rows(rows, ideal.ring.monomials(degree))
    rank = int(np.linalg.matrix_rank(ideal.ring.field.gf(matrix)))
    logger.debug(f"Degree {degree} piece: {len(rows)} products of rank {rank}")
    return rank


def read_ideal(path: StrPath) -> Ideal:
    """Reads an ideal from a text file (gzip-compressed if it ends in ".gz").

    The first non-comment line is the header `ring p=<p> vars=<comma-list> order=<name>`, followed by one
    polynomial per line in canonical text form. Empty lines and lines starting with "#" are ignored.

    Raises:
        IdealFormatError: If the header or a polynomial line is malformed.

    """
    with open_text(path) as fh:
        lines = [line.strip() for line in fh]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise IdealFormatError(f"'{path}' is empty")
    header = _HEADER.match(lines[0])
    if header is None:
        raise IdealFormatError(f"Invalid ring header in '{path}': {lines[0]}")
    try:
        ring = PolynomialRing(
            PrimeField(int(header.group(1))),
            tuple(header.group(2).split(",")),
            MonomialOrder.from_name(header.group(3)),
        )
        generators = tuple(ring.parse(line) for line in lines[1:])
    except (PolynomialParseError, ValueError) as exc:
        raise IdealFormatError(f"Invalid ideal file '{path}': {exc}") from exc
    return Ideal(ring, generators)


def write_ideal(ideal: Ideal, path: StrPath) -> None:
    """Writes an ideal in the text format read by `read_ideal()`."""
    ring = ideal.ring
    lines = [f"ring p={ring.p} vars={','.join(ring.variables)} order={ring.order.name}"]
    lines += ideal.formatted()
    Path(path).write_text("\n".join(lines) + "\n")


def same_saturation(first: Ideal, second: Ideal) -> bool:
    """Returns `True` if both ideals define the same projective subscheme.

    Two homogeneous ideals have equal saturations with respect to the irrelevant ideal exactly when their
    saturations by each single variable agree, which avoids any ideal intersection.

    """
    for name in first.ring.variables:
        if not ideals_equal(saturate_by_variable(first, name), saturate_by_variable(second, name)):
            logger.info(f"Saturations by {name} differ")
            return False
    return True


def eliminated_piece_dimension(ideal: Ideal, keep: Iterable[str], degree: int) -> int:
    """Returns dim over F_p of the degree `degree` piece of `ideal` ∩ F_p[keep].

    The piece is the kernel of the normal form map on the degree `degree` monomials in the kept variables.

    """
    keep_set = set(keep)
    positions = [i for i, name in enumerate(ideal.ring.variables) if name in keep_set]
    basis = ideal.groebner_basis
    images = []
    for monomial in degree_monomials(len(positions), degree):
        exponents = [0] * ideal.ring.ngens
        for position, exponent in zip(positions, monomial):
            exponents[position] = exponent
        images.append(basis.reduce(ideal.ring.from_terms({tuple(exponents): 1})))
    matrix, _ = coefficient_rows(images)
    rank = int(np.linalg.matrix_rank(ideal.ring.field.gf(matrix))) if matrix.shape[1] else 0
    return len(images) - rank
