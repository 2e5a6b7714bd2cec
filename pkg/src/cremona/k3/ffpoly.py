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
"""Arithmetic in F_p and sparse multivariate polynomials over F_p with named variables.

Polynomials are sympy `PolyElement` objects of a `PolyRing` over `GF(p)`. A `PolynomialRing` wraps
such a ring together with the variable names and the `MonomialOrder` it sorts terms by, and provides the
canonical text form used by the ideal files and the golden tests: terms in descending degrevlex,
coefficients as residues in [1, p), coefficient 1 omitted, exponents written with `^`.

Examples:

    >>> from cremona.k3.ffpoly import PolynomialRing, PrimeField
    >>> ring = PolynomialRing(PrimeField(7), ("x", "y"))
    >>> x, y = ring.gens
    >>> ring.format((x + y) * (x - y))
    'x^2 + 6*y^2'
    >>> PrimeField(7).inverse(3)
    5

"""

from __future__ import annotations

__all__ = [
    "FieldDivisionError",
    "FieldError",
    "MatrixShapeError",
    "Monomial",
    "MonomialOrder",
    "PolynomialParseError",
    "PolynomialRing",
    "PrimeField",
    "PrimeFieldPolynomial",
    "RingMismatchError",
    "coefficient_rows",
    "degree_monomials",
    "evaluate_many",
    "field_inverse",
    "homogeneous_degree",
    "jacobian_determinant",
    "jacobian_matrix",
    "poly_arith",
    "power_products",
    "projective_points",
    "substitute",
    "substitute_many",
    "substitute_linear",
    "total_degree",
]

from dataclasses import dataclass
from functools import lru_cache
import itertools
import logging
from operator import itemgetter
import re
from typing import Any, Iterator, Literal, Mapping, Optional, Sequence

import galois
import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import GF
from sympy.polys.orderings import ProductOrder, grevlex, lex
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.rings import PolyElement, PolyRing

from cremona.k3 import CremonaError, InputError


logger = logging.getLogger(__name__)

PrimeFieldPolynomial = PolyElement
Monomial = tuple[int, ...]
ArithOp = Literal["add", "mul", "scale", "substitute-linear"]

_BLOCK_NAME = re.compile(r"^block\((\d+)\)$")
_VARIABLE_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_INT64_LIMIT = 2**63


class FieldError(InputError):
    """The modulus of a prime field is not a prime number."""


class FieldDivisionError(CremonaError, ZeroDivisionError):
    """Division by zero in F_p."""


class RingMismatchError(CremonaError):
    """Polynomials from rings with different variables, field or order were combined."""


class MatrixShapeError(CremonaError):
    """A substitution matrix does not match the number of old and new variables."""


class PolynomialParseError(InputError):
    """A text polynomial could not be parsed in the requested ring."""


@lru_cache(maxsize=None)
def _sympy_domain(p: int) -> Any:
    return GF(p, symmetric=False)


@lru_cache(maxsize=None)
def _galois_field(p: int) -> type[galois.FieldArray]:
    return galois.GF(p)


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p.

    Args:
        p: Prime modulus.

    Raises:
        FieldError: If `p` is not a prime number.

    """

    p: int = 7

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int) or not sympy.isprime(self.p):
            raise FieldError(f"Field modulus must be a prime number, got {self.p!r}")

    @property
    def domain(self) -> Any:
        """sympy's `GF(p)` domain with residues in [0, p)."""
        return _sympy_domain(self.p)

    @property
    def gf(self) -> type[galois.FieldArray]:
        """galois' `GF(p)` array class, used for all linear algebra over F_p."""
        return _galois_field(self.p)

    def residue(self, a: int) -> int:
        """Returns the canonical residue of `a` in [0, p)."""
        return int(a) % self.p

    def inverse(self, a: int) -> int:
        """Returns the multiplicative inverse of `a` modulo p.

        Raises:
            FieldDivisionError: If `a` is zero modulo p.

        """
        a = self.residue(a)
        if a == 0:
            raise FieldDivisionError(f"0 has no inverse in F_{self.p}")
        return int(self.gf(a) ** -1)


def field_inverse(a: int, p: int = 7) -> int:
    """Returns the inverse of `a` in F_p. See `PrimeField.inverse()`."""
    return PrimeField(p).inverse(a)


_KNOWN_ORDERS: dict[tuple[str, int], "MonomialOrder"] = {}


@lru_cache(maxsize=None)
def _sympy_order(kind: str, split: int) -> Any:
    if kind == "degrevlex":
        return grevlex
    if kind == "lex":
        return lex
    # Cached so that equal block orders share one object and therefore one sympy ring
    return ProductOrder((grevlex, itemgetter(slice(0, split))), (grevlex, itemgetter(slice(split, None))))


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order: degrevlex, lex or the block-elimination order with split index `split`.

    In the block order the variables of index < `split` are compared first (degrevlex within the block),
    so any monomial involving one of them exceeds every monomial in the remaining variables.

    """

    kind: Literal["degrevlex", "lex", "block"] = "degrevlex"
    split: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"Unknown monomial order '{self.kind}'")
        if (self.kind == "block") != (self.split > 0):
            raise ValueError("A positive split index is required by, and only by, the block order")

    @classmethod
    def degrevlex(cls) -> MonomialOrder:
        return cls("degrevlex")

    @classmethod
    def lex(cls) -> MonomialOrder:
        return cls("lex")

    @classmethod
    def block(cls, split: int) -> MonomialOrder:
        return cls("block", split)

    @classmethod
    def from_name(cls, name: str) -> MonomialOrder:
        """Parses "degrevlex", "lex" or "block(k)"."""
        if name in ("degrevlex", "lex"):
            return cls(name)  # type: ignore[arg-type]
        match = _BLOCK_NAME.match(name)
        if match is None:
            raise ValueError(f"Unknown monomial order '{name}'")
        return cls.block(int(match.group(1)))

    @property
    def name(self) -> str:
        return f"block({self.split})" if self.kind == "block" else self.kind

    @property
    def sympy_order(self) -> Any:
        _KNOWN_ORDERS.setdefault((self.kind, self.split), self)
        return _sympy_order(self.kind, self.split)

    def key(self, monomial: Monomial) -> Any:
        """Sort key of `monomial`: larger keys are larger monomials."""
        return self.sympy_order(monomial)

    def compare(self, a: Monomial, b: Monomial) -> int:
        """Returns -1, 0 or 1 as `a` is smaller than, equal to or greater than `b`."""
        key_a, key_b = self.key(a), self.key(b)
        return (key_a > key_b) - (key_a < key_b)


@lru_cache(maxsize=None)
def _sympy_ring(variables: tuple[str, ...], p: int, order: MonomialOrder) -> PolyRing:
    return PolyRing(variables, _sympy_domain(p), order.sympy_order)


@lru_cache(maxsize=None)
def degree_monomials(nvars: int, degree: int) -> tuple[Monomial, ...]:
    """Returns the exponent vectors of total degree `degree` in `nvars` variables, descending degrevlex."""
    monomials = []
    for combination in itertools.combinations_with_replacement(range(nvars), degree):
        exponents = [0] * nvars
        for index in combination:
            exponents[index] += 1
        monomials.append(tuple(exponents))
    return tuple(sorted(monomials, key=grevlex, reverse=True))


@dataclass(frozen=True)
class PolynomialRing:
    """Polynomial ring F_p[variables] sorted by `order`.

    Args:
        field: Coefficient field.
        variables: Variable names, in the order that defines the exponent vectors.
        order: Monomial order of the ring.

    """

    field: PrimeField
    variables: tuple[str, ...]
    order: MonomialOrder = MonomialOrder()

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("A polynomial ring needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"Repeated variable names in {self.variables}")
        for name in self.variables:
            if not _VARIABLE_NAME.match(name):
                raise ValueError(f"Invalid variable name '{name}'")

    @classmethod
    def indexed(
        cls,
        prefix: str,
        count: int,
        field: Optional[PrimeField] = None,
        order: Optional[MonomialOrder] = None,
    ) -> PolynomialRing:
        """Returns the ring in variables `prefix0`, ..., `prefix{count-1}`."""
        names = tuple(f"{prefix}{i}" for i in range(count))
        return cls(field or PrimeField(), names, order or MonomialOrder())

    @classmethod
    def of(cls, f: PolyElement) -> PolynomialRing:
        """Returns the `PolynomialRing` a sympy polynomial lives in."""
        sympy_ring = f.ring
        names = tuple(str(symbol) for symbol in sympy_ring.symbols)
        order = _order_of(sympy_ring.order)
        return cls(PrimeField(int(sympy_ring.domain.characteristic())), names, order)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def ngens(self) -> int:
        return len(self.variables)

    @property
    def sympy_ring(self) -> PolyRing:
        return _sympy_ring(self.variables, self.field.p, self.order)

    @property
    def gens(self) -> tuple[PolyElement, ...]:
        return tuple(self.sympy_ring.gens)

    @property
    def zero(self) -> PolyElement:
        return self.sympy_ring.zero

    @property
    def one(self) -> PolyElement:
        return self.sympy_ring.one

    def variable(self, name: str) -> PolyElement:
        """Returns the generator called `name`."""
        return self.gens[self.variables.index(name)]

    def owns(self, f: PolyElement) -> bool:
        """Returns `True` if `f` is an element of this very ring (same variables, field and order)."""
        return isinstance(f, PolyElement) and f.ring == self.sympy_ring

    def from_terms(self, terms: Mapping[Monomial, int]) -> PolyElement:
        """Builds a polynomial from a monomial to integer coefficient mapping, reducing modulo p."""
        p = self.field.p
        return self.sympy_ring.from_dict({tuple(m): c % p for m, c in terms.items() if c % p})

    def terms(self, f: PolyElement) -> list[tuple[Monomial, int]]:
        """Returns the terms of `f` with integer residues, sorted descending in this ring's order."""
        p = self.field.p
        ordered = sorted(f.items(), key=lambda t: self.order.key(t[0]), reverse=True)
        return [(m, int(c) % p) for m, c in ordered]

    def monomials(self, degree: int) -> tuple[Monomial, ...]:
        """Returns every monomial of total degree `degree`, descending in degrevlex."""
        return degree_monomials(self.ngens, degree)

    def with_order(self, order: MonomialOrder) -> PolynomialRing:
        return PolynomialRing(self.field, self.variables, order)

    def renamed(self, variables: Sequence[str]) -> PolynomialRing:
        """Returns the ring with the same field and order and new variable names."""
        if len(variables) != self.ngens:
            raise RingMismatchError(f"Expected {self.ngens} variable names, got {len(variables)}")
        return PolynomialRing(self.field, tuple(variables), self.order)

    def convert(self, f: PolyElement) -> PolyElement:
        """Returns `f` as an element of this ring, matching variables by name.

        Raises:
            RingMismatchError: If the characteristic differs or `f` involves a variable unknown here.

        """
        if f.ring == self.sympy_ring:
            return f
        if int(f.ring.domain.characteristic()) != self.field.p:
            raise RingMismatchError(
                f"Cannot move a polynomial over F_{f.ring.domain.characteristic()} to F_{self.p}"
            )
        if tuple(str(symbol) for symbol in f.ring.symbols) == self.variables:
            return self.sympy_ring.from_dict({m: int(c) for m, c in f.items()})
        positions = []
        for symbol in f.ring.symbols:
            name = str(symbol)
            positions.append(self.variables.index(name) if name in self.variables else None)
        terms: dict[Monomial, int] = {}
        for monomial, coeff in f.items():
            exponents = [0] * self.ngens
            for position, exponent in zip(positions, monomial):
                if exponent == 0:
                    continue
                if position is None:
                    raise RingMismatchError(f"Polynomial involves a variable missing from {self.variables}")
                exponents[position] = exponent
            terms[tuple(exponents)] = int(coeff)
        return self.from_terms(terms)

    def parse(self, text: str) -> PolyElement:
        """Parses a polynomial written with `+`, `-`, `*` and `^` (or `**`) in this ring's variables.

        Raises:
            PolynomialParseError: If the text is not a polynomial in the ring variables.

        """
        local_dict = {name: sympy.Symbol(name) for name in self.variables}
        try:
            expression = parse_expr(
                text, local_dict=local_dict, transformations=standard_transformations + (convert_xor,)
            )
            return self.sympy_ring.from_expr(expression)
        except (SyntaxError, TypeError, ValueError, CoercionFailed, sympy.SympifyError) as exc:
            ring_name = f"F_{self.p}[{', '.join(self.variables)}]"
            raise PolynomialParseError(f"Cannot parse '{text}' in {ring_name}") from exc

    def format(self, f: PolyElement) -> str:
        """Returns the canonical text form of `f`."""
        if not f:
            return "0"
        p = self.field.p
        chunks = []
        for monomial, coeff in sorted(f.items(), key=lambda t: grevlex(t[0]), reverse=True):
            value = int(coeff) % p
            factors = [
                name if exponent == 1 else f"{name}^{exponent}"
                for name, exponent in zip(self.variables, monomial)
                if exponent
            ]
            if not factors:
                chunks.append(str(value))
            elif value == 1:
                chunks.append("*".join(factors))
            else:
                chunks.append("*".join([str(value)] + factors))
        return " + ".join(chunks)


def _order_of(sympy_order: Any) -> MonomialOrder:
    for order in _KNOWN_ORDERS.values():
        if order.sympy_order == sympy_order:
            return order
    raise ValueError(f"Unsupported sympy monomial order {sympy_order!r}")


def total_degree(f: PolyElement) -> int:
    """Returns the total degree of `f` (-1 for the zero polynomial)."""
    return max((sum(m) for m in f.itermonoms()), default=-1)


def homogeneous_degree(f: PolyElement) -> Optional[int]:
    """Returns the common degree of the terms of `f`, or `None` if `f` is zero or not homogeneous."""
    degrees = {sum(m) for m in f.itermonoms()}
    return degrees.pop() if len(degrees) == 1 else None


def _check_same_ring(f: PolyElement, g: PolyElement) -> None:
    if f.ring == g.ring:
        return
    if tuple(f.ring.symbols) != tuple(g.ring.symbols):
        raise RingMismatchError(f"Variable sets differ: {f.ring.symbols} and {g.ring.symbols}")
    raise RingMismatchError("Polynomials belong to rings with different field or monomial order")


def substitute(
    f: PolyElement, forms: Sequence[PolyElement], target: Optional[PolyRing | PolynomialRing] = None
) -> PolyElement:
    """Returns f(forms), replacing the i-th variable of `f` by `forms[i]`. See `substitute_many()`."""
    return substitute_many([f], forms, target)[0]


def substitute_many(
    polys: Sequence[PolyElement],
    forms: Sequence[PolyElement],
    target: Optional[PolyRing | PolynomialRing] = None,
) -> list[PolyElement]:
    """Returns [f(forms) for f in polys], replacing the i-th variable by `forms[i]`.

    Monomial images are built incrementally and shared between all terms of all polynomials, so composing
    forms of equal degree costs one multiplication per distinct monomial prefix.

    Args:
        polys: Polynomials of one ring to substitute into.
        forms: One polynomial per variable of that ring, all in the same ring.
        target: Ring of the result when `forms` is empty or to assert the destination ring.

    Raises:
        RingMismatchError: If the number of forms differs from the number of variables.

    """
    if any(len(forms) != f.ring.ngens for f in polys):
        raise RingMismatchError(f"Expected one form per variable, got {len(forms)}")
    if target is not None:
        ring = target.sympy_ring if isinstance(target, PolynomialRing) else target
    elif forms:
        ring = forms[0].ring
    else:
        raise RingMismatchError("Cannot infer the target ring of an empty substitution")
    p = int(ring.domain.characteristic())
    cache: dict[Monomial, PolyElement] = {tuple([0] * len(forms)): ring.one}

    def image(monomial: Monomial) -> PolyElement:
        if monomial not in cache:
            last = max(i for i, e in enumerate(monomial) if e)
            previous = monomial[:last] + (monomial[last] - 1,) + monomial[last + 1 :]
            cache[monomial] = image(previous) * forms[last]
        return cache[monomial]

    results = []
    for f in polys:
        accumulated: dict[Monomial, int] = {}
        for monomial, coeff in sorted(f.items(), key=lambda t: grevlex(t[0])):
            c = int(coeff) % p
            for image_monomial, image_coeff in image(monomial).items():
                value = accumulated.get(image_monomial, 0) + c * int(image_coeff)
                accumulated[image_monomial] = value % p
        results.append(ring.from_dict({m: c for m, c in accumulated.items() if c}))
    return results


def substitute_linear(f: PolyElement, matrix: Sequence[Sequence[int]], target: PolynomialRing) -> PolyElement:
    """Pulls `f` back along the linear map x_j = sum_i matrix[i][j] * z_i.

    Args:
        f: Polynomial in n variables x_0..x_{n-1}.
        matrix: k x n matrix over F_p; row i holds the coefficients of the new variable z_i.
        target: Ring of the k new variables.

    Raises:
        MatrixShapeError: If the matrix is not k x n.

    """
    rows = [list(row) for row in matrix]
    if len(rows) != target.ngens or any(len(row) != f.ring.ngens for row in rows):
        raise MatrixShapeError(
            f"Expected a {target.ngens}x{f.ring.ngens} matrix, got {len(rows)}x{len(rows[0]) if rows else 0}"
        )
    p = target.p
    forms = []
    for column in range(f.ring.ngens):
        terms = {
            tuple(int(i == r) for i in range(target.ngens)): rows[r][column] % p for r in range(len(rows))
        }
        forms.append(target.from_terms(terms))
    return substitute(f, forms, target)


def poly_arith(
    f: PolyElement, g: Any, op: ArithOp, target: Optional[PolynomialRing] = None
) -> PolyElement:
    """Exact arithmetic dispatcher.

    Args:
        f: Left operand.
        g: Right operand: a polynomial for "add" and "mul", an integer for "scale", a k x n matrix for
            "substitute-linear".
        op: Operation name.
        target: Ring of the new variables, required by "substitute-linear".

    Raises:
        RingMismatchError: If `f` and `g` live in different rings.
        MatrixShapeError: If the substitution matrix has the wrong shape.

    """
    if op == "add":
        _check_same_ring(f, g)
        return f + g
    if op == "mul":
        _check_same_ring(f, g)
        return f * g
    if op == "scale":
        return f * (int(g) % int(f.ring.domain.characteristic()))
    if op == "substitute-linear":
        if target is None:
            raise RingMismatchError("substitute-linear requires the target ring of the new variables")
        return substitute_linear(f, g, target)
    raise ValueError(f"Unknown polynomial operation '{op}'")


def power_products(forms: Sequence[PolyElement], degree: int) -> dict[Monomial, PolyElement]:
    """Returns m(forms) for every monomial m of total degree `degree` in len(forms) variables.

    Each product is obtained from its prefix by one multiplication, following non-decreasing index
    sequences, so every monomial is built exactly once.

    """
    ring = forms[0].ring
    level: dict[Monomial, PolyElement] = {tuple([0] * len(forms)): ring.one}
    for _ in range(degree):
        following: dict[Monomial, PolyElement] = {}
        for monomial, value in level.items():
            last = max((i for i, e in enumerate(monomial) if e), default=0)
            for index in range(last, len(forms)):
                exponents = list(monomial)
                exponents[index] += 1
                following[tuple(exponents)] = value * forms[index]
        level = following
        logger.debug(f"Power products: {len(level)} monomial images computed")
    return level


def _evaluation_dtype(p: int) -> Any:
    """Returns int64 when a product of two residues stays below 2⁶³, else object."""
    return np.int64 if (p - 1) ** 2 < _INT64_LIMIT else object


def evaluate_many(f: PolyElement, points: Any, chunk_size: int = 65536) -> np.ndarray:
    """Evaluates `f` at every row of `points` and returns the residues.

    Every product is reduced before the terms are summed. Small fields use int64 arithmetic; once a product
    of two residues could pass 2⁶³ the work arrays hold Python integers instead, so the result is exact
    for every prime.

    Args:
        f: Polynomial over F_p.
        points: Integer array of shape (N, number of variables of `f`).
        chunk_size: Upper bound on the number of points evaluated at once.

    Returns:
        An int64 array when p < 2⁶³, an object array of Python integers otherwise.

    """
    p = int(f.ring.domain.characteristic())
    dtype = _evaluation_dtype(p)
    points = np.asarray(points, dtype=dtype) % p
    if points.ndim != 2 or points.shape[1] != f.ring.ngens:
        raise MatrixShapeError(f"Expected points with {f.ring.ngens} coordinates, got shape {points.shape}")
    result_dtype = np.int64 if p <= _INT64_LIMIT else object
    result = np.zeros(points.shape[0], dtype=result_dtype)
    if not f:
        return result
    if dtype is object:
        logger.debug(f"Evaluating {len(f)} terms over F_{p} with Python integers")
    monomials = np.array(list(f.itermonoms()), dtype=np.int64).reshape(-1, f.ring.ngens)
    coeffs = np.array([int(c) % p for c in f.itercoeffs()], dtype=dtype)
    max_exponent = int(monomials.max())
    # Keep the (points x terms) work array around 32 MB
    step = max(1, min(chunk_size, (1 << 22) // len(coeffs)))
    for start in range(0, points.shape[0], step):
        block = points[start : start + step]
        powers = np.ones((block.shape[0], block.shape[1], max_exponent + 1), dtype=dtype)
        for exponent in range(1, max_exponent + 1):
            powers[:, :, exponent] = powers[:, :, exponent - 1] * block % p
        values = np.ones((block.shape[0], len(coeffs)), dtype=dtype)
        for variable in range(block.shape[1]):
            values = values * powers[:, variable, monomials[:, variable]] % p
        result[start : start + step] = (values * coeffs % p).sum(axis=1) % p
    return result


def projective_points(p: int, n: int, chunk_size: int = 65536) -> Iterator[np.ndarray]:
    """Yields every point of Pⁿ(F_p), normalised so the first nonzero coordinate is 1, in chunks.

    Points are produced in a fixed order: by position of the leading 1, then lexicographically.

    Args:
        p: Field size.
        n: Projective dimension.
        chunk_size: Maximum number of rows per yielded array.

    """
    for lead in range(n + 1):
        free = n - lead
        total = p**free
        weights = p ** np.arange(free - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, chunk_size):
            indices = np.arange(start, min(total, start + chunk_size), dtype=np.int64)
            chunk = np.zeros((len(indices), n + 1), dtype=np.int64)
            chunk[:, lead] = 1
            if free:
                chunk[:, lead + 1 :] = (indices[:, None] // weights[None, :]) % p
            yield chunk


def jacobian_matrix(forms: Sequence[PolyElement]) -> list[list[PolyElement]]:
    """Returns the matrix of first partial derivatives, one row per form."""
    gens = forms[0].ring.gens
    return [[form.diff(x) for x in gens] for form in forms]


def jacobian_determinant(forms: Sequence[PolyElement]) -> PolyElement:
    """Returns det of the square Jacobian matrix of `forms`.

    Laplace expansion along the rows, memoising the minors on the set of remaining columns (2^n - 1 of
    them for n forms).

    """
    matrix = jacobian_matrix(forms)
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise MatrixShapeError(f"The Jacobian of {size} forms in {len(matrix[0])} variables is not square")
    ring = forms[0].ring
    minors: dict[tuple[int, ...], PolyElement] = {}

    def minor(columns: tuple[int, ...]) -> PolyElement:
        if not columns:
            return ring.one
        if columns not in minors:
            row = size - len(columns)
            total = ring.zero
            for position, column in enumerate(columns):
                entry = matrix[row][column]
                if not entry:
                    continue
                rest = minor(columns[:position] + columns[position + 1 :])
                term = entry * rest
                total = total - term if position % 2 else total + term
            minors[columns] = total
        return minors[columns]

    determinant = minor(tuple(range(size)))
    logger.debug(f"Jacobian determinant from {len(minors)} minors, {len(determinant)} terms")
    return determinant


def coefficient_rows(
    polys: Sequence[PolyElement], columns: Optional[Sequence[Monomial]] = None
) -> tuple[np.ndarray, list[Monomial]]:
    """Returns the coefficient matrix of `polys` (one row each) and its monomial columns.

    Args:
        polys: Polynomials of one ring.
        columns: Monomials indexing the columns. Default: every monomial present, descending degrevlex.

    """
    if columns is None:
        present = {m for f in polys for m in f.itermonoms()}
        columns = sorted(present, key=grevlex, reverse=True)
    index = {m: i for i, m in enumerate(columns)}
    matrix = np.zeros((len(polys), len(columns)), dtype=np.int64)
    for row, f in enumerate(polys):
        p = int(f.ring.domain.characteristic())
        for monomial, coeff in f.items():
            matrix[row, index[monomial]] = int(coeff) % p
    return matrix, list(columns)

