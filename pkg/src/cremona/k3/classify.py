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
"""Uniqueness of the nodal quartic Cremona transformation as replayable arithmetic.

Every admissible (n, m, ξ) row is either excluded by an `ExclusionCertificate` or survives with a finite
list of (d, δ). A certificate is an ordered list of steps: `arithmetic` steps carry a sympy expression
and the value it evaluates to, so they can be recomputed from scratch; `cited-assumption` steps record
geometric inputs (adjunction theory, Stein factorisation, Hodge numbers) that are not re-proven here.

Examples:

    >>> from cremona.k3.classify import final_classification
    >>> report = final_classification()
    >>> report.survivor
    (4, 1, 4, 9, 3)

"""

from __future__ import annotations

__all__ = [
    "ARITHMETIC",
    "CITED",
    "CaseInvariants",
    "CaseTableError",
    "CertificateStep",
    "ClassificationError",
    "ClassificationReport",
    "CremonaCase",
    "ExclusionCertificate",
    "case_b_certificate",
    "case_certificate",
    "case_table",
    "derive_case_invariants",
    "exclude_87",
    "exclude_case_a",
    "exclude_parity_divisibility",
    "exclude_section_counts",
    "final_classification",
    "final_k3_identification",
    "get_case",
    "ruled_surface_chi",
    "survivors_case_b",
]

from dataclasses import dataclass, field
from functools import reduce
import logging
from math import gcd
from pathlib import Path
from typing import Any, Callable, Optional

import sympy
import yaml

from cremona.k3 import CremonaError, InputError, StrPath
from cremona.k3.intersect import (
    SurfaceInvariants,
    double_point_class,
    m4_formula,
    m4_formulas,
    xi_formula,
)
from cremona.k3.io import data_path, open_text


logger = logging.getLogger(__name__)

ARITHMETIC = "arithmetic"
CITED = "cited-assumption"

_D, _DELTA, _KC, _K2, _C2 = sympy.symbols("d delta kc k2 c2", integer=True)
_SYMBOLS = {symbol.name: symbol for symbol in (_D, _DELTA, _KC, _K2, _C2)}
# Sections of M, i.e. the forms defining a map to P⁴
_SECTIONS = 5
# d < (n/m)², cited for the quartic case
_DEGREE_BOUND = 15


class ClassificationError(CremonaError):
    """A certificate does not replay, or the survivors are not the expected unique case."""


class CaseTableError(InputError):
    """The case table fixture is malformed or has an inconsistent row."""


@dataclass(frozen=True)
class CremonaCase:
    """One admissible (n, m, ξ) row of the case table."""

    label: str
    n: int
    m: int
    xi: int

    def symbolic(self) -> SurfaceInvariants:
        """Returns the case with d, δ, K_ΣC, K_Σ² and c₂ left as integer symbols."""
        return SurfaceInvariants(n=self.n, m=self.m, xi=self.xi, **_SYMBOLS)  # type: ignore[arg-type]

    def xi_relation(self) -> sympy.Expr:
        """Returns LM³ − ξ, a linear polynomial in d and K_ΣC."""
        return sympy.expand(xi_formula(self.symbolic()) - self.xi)

    def kc_solution(self) -> Optional[sympy.Expr]:
        """Returns K_ΣC as a function of d, or None if LM³ = ξ has no solution."""
        solutions = sympy.solve(self.xi_relation(), _KC)
        return solutions[0] if solutions else None

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "n": self.n, "m": self.m, "xi": self.xi}


def case_table(path: Optional[StrPath] = None) -> list[CremonaCase]:
    """Returns the admissible (n, m, ξ) rows of the case table fixture.

    Args:
        path: YAML file to read instead of the packaged `case_table.yaml`.

    Raises:
        CaseTableError: If the file is malformed, or a row has m < 1 or no rational solution of LM³ = ξ.

    """
    source = data_path("case_table.yaml") if path is None else Path(path)
    with open_text(source) as fh:
        content = yaml.safe_load(fh)
    try:
        cases = [
            CremonaCase(str(row["label"]), int(row["n"]), int(row["m"]), int(row["xi"]))
            for row in content["cases"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise CaseTableError(f"Malformed case table '{source}': {exc}") from exc
    for case in cases:
        if case.m < 1 or case.kc_solution() is None:
            raise CaseTableError(f"Case ({case.label}) = {case.n, case.m, case.xi} admits no solution")
    logger.debug(f"Loaded {len(cases)} cases from {source} ({content.get('provenance', 'no provenance')})")
    return cases


def get_case(label: str, cases: Optional[list[CremonaCase]] = None) -> CremonaCase:
    for case in cases if cases is not None else case_table():
        if case.label == label:
            return case
    raise ClassificationError(f"Unknown case '{label}'")


@dataclass(frozen=True)
class CaseInvariants:
    """Invariants of Σ in one case as polynomials in d and δ.

    Attributes:
        case: The case row.
        kc: K_ΣC.
        k2: K_Σ².
        c2: c₂(Σ).
        twelve_chi: 12χ(O_Σ).
        genus: g(C).
        chi_surface: χ(S′, nC − 2ΣQᵢ) on the normalisation blown up at the node preimages.
        chi_ideal: χ(P, I_{S′}(n)) on P⁴ blown up at the nodes.
        constraint: Polynomial whose vanishing is χ(P, I_{S′}(n)) = 5, normalised with positive d².

    """

    case: CremonaCase
    kc: sympy.Expr
    k2: sympy.Expr
    c2: sympy.Expr
    twelve_chi: sympy.Expr
    genus: sympy.Expr
    chi_surface: sympy.Expr
    chi_ideal: sympy.Expr
    constraint: sympy.Expr

    def node_count(self) -> sympy.Expr:
        """Returns δ as a function of d from the constraint."""
        return sympy.solve(self.constraint, _DELTA)[0]

    def evaluate(self, d: int, delta: int) -> SurfaceInvariants:
        """Returns the invariants of the row at (d, δ), with χ and g derived.

        Raises:
            NonIntegralError: If χ or g is not an integer at (d, δ).

        """
        values = {_D: d, _DELTA: delta}
        return SurfaceInvariants.derive(
            n=self.case.n,
            m=self.case.m,
            xi=self.case.xi,
            d=d,
            delta=delta,
            kc=int(self.kc.subs(values)),
            k2=int(self.k2.subs(values)),
            c2=int(self.c2.subs(values)),
        )

    def to_dict(self) -> dict[str, str]:
        return {
            "kc": str(self.kc),
            "k2": str(self.k2),
            "c2": str(self.c2),
            "twelve_chi": str(self.twelve_chi),
            "genus": str(self.genus),
            "constraint": f"{sympy.factor(self.constraint + 2 * _DELTA)} = 2*delta",
        }


def derive_case_invariants(case: CremonaCase) -> CaseInvariants:
    """Solves LM³ = ξ for K_ΣC, both M⁴ = 1 formulas for c₂ and K², then Noether and the genus formula.

    The constraint comes from χ(P, I_{S′}(n)) = h⁰(P′, M) = 5, with χ(S′, nC − 2ΣQᵢ) by Riemann-Roch on
    the normalisation blown up at the 2δ preimages of the nodes.

    Raises:
        ClassificationError: If `case` is not one of (a), (b).

    """
    if case.label not in ("a", "b"):
        raise ClassificationError(f"Invariants are only derived for cases (a) and (b), not ({case.label})")
    n = case.n
    kc = case.kc_solution()
    chern, normal = m4_formulas(case.symbolic())
    c2 = sympy.expand(sympy.solve(chern.subs(_KC, kc) - 1, _C2)[0])
    k2 = sympy.expand(sympy.solve(normal.subs(_KC, kc) - 1, _K2)[0])
    twelve_chi = sympy.expand(k2 + c2)
    genus = sympy.expand((_D + kc + 2) / 2)
    # D = nC − 2ΣQᵢ: D² = n²d − 8δ and D·K = n·K_ΣC + 4δ
    chi_surface = sympy.expand(twelve_chi / 12 + (n**2 * _D - 8 * _DELTA - n * kc - 4 * _DELTA) / 2)
    chi_ideal = sympy.expand(sympy.binomial(n + 4, 4) - 5 * _DELTA - chi_surface)
    constraint = sympy.expand(-12 * (chi_ideal - _SECTIONS))
    row = CaseInvariants(case, kc, k2, c2, twelve_chi, genus, chi_surface, chi_ideal, constraint)
    logger.debug(f"Case ({case.label}) invariants: {row.to_dict()}")
    return row


@dataclass(frozen=True)
class CertificateStep:
    """One step of an exclusion argument.

    Arithmetic steps carry a sympy expression (free symbols d, delta, kc, k2, c2 are integers) and the
    text of the value it evaluates to.

    """

    claim: str
    kind: str = ARITHMETIC
    expression: Optional[str] = None
    value: Optional[str] = None

    def replay(self) -> bool:
        """Returns True if the expression still evaluates to the recorded value."""
        if self.kind == CITED or self.expression is None:
            return True
        computed = sympy.sympify(self.expression, locals=_SYMBOLS)
        expected = sympy.sympify(self.value, locals=_SYMBOLS)
        if isinstance(computed, sympy.Expr) and isinstance(expected, sympy.Expr):
            return sympy.expand(computed - expected) == 0
        return bool(computed == expected)

    @property
    def result(self) -> Any:
        return sympy.sympify(self.value, locals=_SYMBOLS)

    def to_dict(self) -> dict[str, Optional[str]]:
        return {"claim": self.claim, "kind": self.kind, "expression": self.expression, "value": self.value}


def _arithmetic(claim: str, expression: str, expected: Optional[Any] = None) -> CertificateStep:
    """Returns an arithmetic step; `expected`, computed independently, is what replay compares against."""
    value = sympy.sympify(expression, locals=_SYMBOLS) if expected is None else expected
    return CertificateStep(claim, ARITHMETIC, expression, str(value))


def _cited(claim: str) -> CertificateStep:
    return CertificateStep(claim, CITED)


@dataclass(frozen=True)
class ExclusionCertificate:
    """Ordered steps and the verdict they support.

    Attributes:
        label: Case label, e.g. "c" or "b(8,7)".
        steps: The argument.
        verdict: "excluded" or "survives".
        survivors: (d, δ) pairs left when the verdict is "survives".
        rebuild: Builds the certificate again from scratch.

    """

    label: str
    steps: tuple[CertificateStep, ...]
    verdict: str
    survivors: tuple[tuple[int, int], ...] = ()
    rebuild: Optional[Callable[[], ExclusionCertificate]] = field(default=None, compare=False, repr=False)

    @property
    def excluded(self) -> bool:
        return self.verdict == "excluded"

    def replay(self) -> bool:
        """Re-evaluates every arithmetic step and rebuilds the certificate; True if nothing changed."""
        for step in self.steps:
            if not step.replay():
                logger.warning(f"Step '{step.claim}' of case ({self.label}) does not replay")
                return False
        return self.rebuild is None or self.rebuild() == self

    def to_dict(self, show_steps: bool = False) -> dict[str, Any]:
        content: dict[str, Any] = {
            "label": self.label,
            "verdict": self.verdict,
            "survivors": [list(pair) for pair in self.survivors],
        }
        if show_steps:
            content["steps"] = [step.to_dict() for step in self.steps]
        return content


def _verdict(excluded: bool) -> str:
    return "excluded" if excluded else "survives"


def _content(expression: sympy.Expr) -> int:
    """Returns the gcd of the integer coefficients of a polynomial."""
    coefficients = sympy.Poly(expression, *sorted(expression.free_symbols, key=str)).coeffs()
    return reduce(gcd, (abs(int(value)) for value in coefficients), 0)


def _split_constant(expression: sympy.Expr) -> tuple[int, sympy.Expr]:
    """Returns (c, r) with expression = r − c and r without constant term."""
    constant = int(expression.as_coeff_Add()[0])
    return -constant, sympy.expand(expression - constant)


def _m4_text(case: CremonaCase, kc: str = "kc") -> str:
    """Returns M⁴ with the Chern class formula for E⁴, as text."""
    n, m = case.n, case.m
    return (
        f"{n}**4 - 6*{n}**2*{m}**2*d + 4*{n}*{m}**3*(({kc}) + 5*d)"
        f" + {m}**4*(-15*d - 5*({kc}) - c2 + 6*delta)"
    )


def _xi_text(case: CremonaCase) -> str:
    n, m = case.n, case.m
    return f"{n}**3 - 3*{n}*{m}**2*d + {m}**3*(kc + 5*d) - {case.xi}"


def _parity_certificate(case: CremonaCase) -> ExclusionCertificate:
    kc = case.kc_solution()
    xi_content = _content(case.xi_relation())
    relation = sympy.expand(m4_formulas(case.symbolic())[0].subs(_KC, kc) - 1)
    content = _content(relation)
    left, right = _split_constant(sympy.expand(relation / content))
    coefficients = ", ".join(str(abs(int(value))) for value in sympy.Poly(right, _D, _C2, _DELTA).coeffs())
    xi_reduced = sympy.expand(case.xi_relation() / xi_content)
    steps = (
        _arithmetic(
            f"LM³ = ξ divided by {xi_content}: {xi_reduced} = 0",
            f"expand(({_xi_text(case)})/{xi_content})",
            xi_reduced,
        ),
        _arithmetic(f"K_ΣC = {kc}", f"solve({_xi_text(case)}, kc)[0]", kc),
        _arithmetic(
            f"M⁴ = 1 with K_ΣC substituted, divided by {content}: {left} = {right}",
            f"expand(({_m4_text(case, str(kc))} - 1)/{content})",
            right - left,
        ),
        _arithmetic(f"{left} is odd", f"Mod({left}, 2)"),
        _arithmetic(f"every coefficient of {right} is even", f"Mod(igcd({coefficients}), 2)"),
    )
    excluded = steps[3].result == 1 and steps[4].result == 0
    return ExclusionCertificate(
        case.label, steps, _verdict(excluded), rebuild=lambda: _parity_certificate(case)
    )


def _divisibility_certificate(case: CremonaCase) -> ExclusionCertificate:
    xi_content = _content(case.xi_relation())
    reduced = sympy.expand(case.xi_relation() / xi_content)
    d_coefficient = int(reduced.coeff(_D))
    rest = sympy.expand(reduced - d_coefficient * _D)
    prime = _content(rest)
    # Every term of M⁴ − 1 but the constant carries a factor m²
    scale = case.m**2
    left, right = _split_constant(sympy.expand((m4_formulas(case.symbolic())[0] - 1) / scale))
    d_prime = sympy.Symbol("d1", integer=True)
    scaled = sympy.expand(right.subs(_D, prime * d_prime))
    coefficients = ", ".join(str(abs(int(value))) for value in sympy.Poly(scaled).coeffs())
    rest_coefficients = ", ".join(str(abs(int(value))) for value in sympy.Poly(rest).coeffs())
    steps = (
        _arithmetic(
            f"LM³ = ξ divided by {xi_content}: {-d_coefficient}*d = {rest}",
            f"expand(({_xi_text(case)})/{xi_content})",
            reduced,
        ),
        _arithmetic(
            f"{prime} divides every coefficient of {rest}", f"Mod(igcd({rest_coefficients}), {prime})"
        ),
        _arithmetic(
            f"gcd({abs(d_coefficient)}, {prime}) = 1, so {prime} divides d", f"igcd({d_coefficient}, {prime})"
        ),
        _arithmetic(
            f"M⁴ = 1 divided by m² = {scale}: {left} = {right}",
            f"expand(({_m4_text(case)} - 1)/{scale})",
            right - left,
        ),
        _arithmetic(
            f"with d = {prime}*d1, {prime} divides every coefficient of the right side",
            f"Mod(igcd({coefficients}), {prime})",
        ),
        _arithmetic(f"{prime} does not divide {left}", f"Mod({left}, {prime})"),
    )
    excluded = (
        steps[1].result == 0 and steps[2].result == 1 and steps[4].result == 0 and steps[5].result != 0
    )
    return ExclusionCertificate(
        case.label, steps, _verdict(excluded), rebuild=lambda: _divisibility_certificate(case)
    )


def exclude_parity_divisibility(case: CremonaCase) -> ExclusionCertificate:
    """Certifies that cases (c) and (e) contradict M⁴ = 1 modulo 2 and modulo 5 respectively.

    Raises:
        ClassificationError: If `case` is not (c) or (e).

    """
    if case.label == "c":
        return _parity_certificate(case)
    if case.label == "e":
        return _divisibility_certificate(case)
    raise ClassificationError(f"No parity or divisibility argument for case ({case.label})")


def _section_count_certificate(case: CremonaCase) -> ExclusionCertificate:
    n, m = case.n, case.m
    spare = n - 4 * m
    steps = [
        _cited(f"h⁰(P⁴, I_S^{m}({n})) = h⁰(P′, M) = {_SECTIONS}"),
        _cited(
            f"the product maps ⊕ H⁰(I_S(k₁))⊗…⊗H⁰(I_S(k_{m})) → H⁰(I_S^{m}({n}))"
            f" over k₁+…+k_{m} = {n} are onto"
        ),
        _arithmetic(
            f"h⁰(I_S(4)) = 0: some kᵢ ≤ ⌊{n}/{m}⌋ ≤ 4, so h⁰(I_S^{m}({n})) = 0 ≠ {_SECTIONS}",
            f"floor(Rational({n}, {m})) <= 4",
        ),
    ]
    count = sympy.binomial(spare + 4, 4)
    if count > _SECTIONS:
        steps += [
            _cited(f"for 0 ≠ A ∈ H⁰(I_S(4)), multiplication by A^{m} injects the {spare}-forms"),
            _arithmetic(f"h⁰(I_S(4)) ≥ 1: C({spare + 4},4) = {count}", f"binomial({spare + 4}, 4)"),
            _arithmetic(f"{count} > {_SECTIONS}", f"binomial({spare + 4}, 4) > {_SECTIONS}"),
        ]
    elif count == _SECTIONS:
        steps += [
            _cited(f"h⁰(I_S(4)) = 1 with generator A: H⁰(I_S^{m}({4 * m})) is spanned by A^{m}"),
            _arithmetic(
                f"A^{m}X₀, …, A^{m}X₄ are C({spare + 4},4) = {_SECTIONS} forms: "
                f"|I_S^{m}({n})| is an automorphism",
                f"Eq(binomial({spare + 4}, 4), {_SECTIONS})",
            ),
            _cited(f"h⁰(I_S(4)) ≥ 2 with A, B independent: some A^{m}Xᵢ is independent of the ABXⱼ"),
            _arithmetic(
                f"h⁰(I_S^{m}({n})) ≥ 1 + {_SECTIONS} = 6", f"1 + binomial({spare + 4}, 4)"
            ),
            _arithmetic(f"6 > {_SECTIONS}", f"1 + binomial({spare + 4}, 4) > {_SECTIONS}"),
        ]
    else:
        raise ClassificationError(f"No section count argument for case ({case.label})")
    excluded = all(step.result is sympy.true for step in steps if step.value in ("True", "False"))
    return ExclusionCertificate(
        case.label, tuple(steps), _verdict(excluded), rebuild=lambda: _section_count_certificate(case)
    )


def exclude_section_counts(case: CremonaCase) -> ExclusionCertificate:
    """Certifies that cases (d), (f) and (g) force h⁰(P⁴, I_S^m(n)) ≠ 5 whatever h⁰(I_S(4)) is.

    Raises:
        ClassificationError: If `case` is not (d), (f) or (g).

    """
    if case.label not in ("d", "f", "g"):
        raise ClassificationError(f"No section count argument for case ({case.label})")
    return _section_count_certificate(case)


def _at(expression: sympy.Expr, d: int, delta: Optional[int] = None) -> str:
    """Returns text evaluating `expression` at d (and δ)."""
    if delta is None:
        return f"Lambda(d, {expression})({d})"
    return f"Lambda((d, delta), {expression})({d}, {delta})"


def exclude_case_a() -> ExclusionCertificate:
    """Certifies that case (a) forces δ = 0."""
    row = derive_case_invariants(get_case("a"))
    delta = row.node_count()
    steps = (
        _cited("case (a) has d = 5 by the argument for smooth base loci (Crauder-Katz, Theorem 3.3)"),
        _arithmetic(f"(d − 5)² = 2δ at d = 5: δ = {delta.subs(_D, 5)}", _at(delta, 5)),
        _arithmetic(f"g(C) = {row.genus} at d = 5 is an integer", _at(row.genus, 5)),
        _arithmetic("δ = 0 contradicts δ > 0", f"{_at(delta, 5)} > 0"),
    )
    excluded = steps[3].result is sympy.false
    return ExclusionCertificate("a", steps, _verdict(excluded), rebuild=exclude_case_a)


def survivors_case_b() -> list[SurfaceInvariants]:
    """Returns the invariant rows of case (b) with g ≥ 0, d ≤ 15 and δ > 0 integral."""
    row = derive_case_invariants(get_case("b"))
    delta = row.node_count()
    survivors = []
    for d in range(1, _DEGREE_BOUND + 1):
        value = delta.subs(_D, d)
        if row.genus.subs(_D, d) < 0 or not value.is_integer or value <= 0:
            continue
        survivors.append(row.evaluate(d, int(value)))
    logger.debug(f"Case (b) survivors: {[(s.d, s.delta) for s in survivors]}")
    return survivors


def case_b_certificate() -> ExclusionCertificate:
    """Returns the certificate of case (b), which survives with (d, δ) ∈ {(8, 7), (9, 3)}."""
    row = derive_case_invariants(get_case("b"))
    delta = row.node_count()
    low = int(sympy.ceiling(sympy.solve(row.genus, _D)[0]))
    steps = [
        _arithmetic(f"g(C) = {row.genus} ≥ 0 gives d ≥ {low}", f"ceiling(solve({row.genus}, d)[0])"),
        _cited(f"d < (n/m)² = 16 (Crauder-Katz, Formulae 0.3), so d ≤ {_DEGREE_BOUND}"),
    ]
    steps += [
        _arithmetic(f"d = {d}: δ = (d − 10)(d − 15)/2", _at(delta, d)) for d in range(low, _DEGREE_BOUND + 1)
    ]
    survivors = tuple((s.d, s.delta) for s in survivors_case_b())
    return ExclusionCertificate("b", tuple(steps), "survives", survivors, rebuild=case_b_certificate)


def ruled_surface_chi(h: int, f: sympy.Expr) -> sympy.Expr:
    """Returns χ(hH₀ + fF) on a ruled surface over an elliptic curve, as a polynomial in m = H₀².

    Uses H₀² = m, H₀F = 1, F² = 0, K = −2H₀ + mF and χ(O) = 0.

    """
    square = sympy.Symbol("m", integer=True)
    gram = sympy.Matrix([[square, 1], [1, 0]])
    divisor = sympy.Matrix([[h, f]])
    canonical = sympy.Matrix([[-2, square]])
    return sympy.expand((divisor * gram * (divisor - canonical).T)[0] / 2)


def _ruled_text(h: int, f: str) -> str:
    gram = "Matrix([[m, 1], [1, 0]])"
    return f"expand((Matrix([[{h}, {f}]]) * {gram} * Matrix([[{h + 2}], [{f} - m]]))[0] / 2)"


def exclude_87() -> ExclusionCertificate:
    """Certifies that (d, δ) = (8, 7) of case (b) is impossible: χ(H) = 11 is not a multiple of 3."""
    row = derive_case_invariants(get_case("b")).evaluate(8, 7)
    # q = 1 and p_g = 0 for a surface ruled over an elliptic curve
    h11 = row.c2 - 2 + 4
    blown_up = h11 - 2
    h2 = row.d + blown_up
    kh = row.kc - blown_up
    chi_h = row.chi + sympy.Rational(h2 - kh, 2)
    fibre = sympy.Symbol("b", integer=True)
    chi_ruled = ruled_surface_chi(2, fibre)
    ruled_coefficients = ", ".join(str(abs(int(value))) for value in sympy.Poly(chi_ruled).coeffs())
    steps = (
        _arithmetic(
            f"h⁰(K_Σ + C) = χ + ½(K_ΣC + C²) = {row.chi} + ½({row.kc}+{row.d})",
            f"{row.chi} + Rational({row.kc} + {row.d}, 2)",
        ),
        _cited(
            f"c₂ = {row.c2}: Σ is not P², P¹×P¹ or minimal ruled, so K_Σ + C is globally generated (Sommese)"
        ),
        _arithmetic(f"dim φ(Σ) = 0 would give g(C) = 1, but g(C) = {row.g}", f"Ne({row.g}, 1)"),
        _arithmetic(
            f"Σ′ = P¹ would make R a Hirzebruch surface with χ = 1, but χ = {row.chi}", f"Ne({row.chi}, 1)"
        ),
        _cited("the Stein factorisation makes Σ a blown-up P¹-bundle R over an elliptic curve"),
        _arithmetic(
            f"Hodge diamond with q = 1, p_g = 0: h¹¹ = c₂ − 2 + 4q − 2p_g = {h11}", f"{row.c2} - 2 + 4 - 0"
        ),
        _arithmetic(f"ρ(R) = 2, so Σ is R blown up at h¹¹ − 2 = {blown_up} points", f"{h11} - 2"),
        _arithmetic(f"C² = H² − {blown_up}: H² = {h2}", f"{row.d} + {blown_up}"),
        _arithmetic(f"K_ΣC = K_R·H + {blown_up}: K_R·H = {kh}", f"{row.kc} - {blown_up}"),
        _arithmetic(f"χ(H) = χ(O_R) + ½H(H − K_R) = 0 + ½({h2}+{-kh})", f"0 + Rational({h2} - ({kh}), 2)"),
        _arithmetic("χ(h) = m on R (h² = m, hf = 1, f² = 0, K = −2h + mf)", _ruled_text(1, "0")),
        _arithmetic("χ(2h) = 3m", _ruled_text(2, "0")),
        _arithmetic(f"χ(H) = χ(2h + bf) = {chi_ruled}", _ruled_text(2, "b"), chi_ruled),
        _arithmetic(f"3 divides {chi_ruled}", f"Mod(igcd({ruled_coefficients}), 3)"),
        _arithmetic(f"{chi_h} is not divisible by 3", f"Mod({chi_h}, 3)"),
    )
    excluded = steps[-1].result != 0 and _content(chi_ruled) % 3 == 0
    return ExclusionCertificate("b(8,7)", steps, _verdict(excluded), rebuild=exclude_87)


def final_k3_identification() -> ExclusionCertificate:
    """Replays the arithmetic identifying Σ′ for (d, δ) = (9, 3) as a degree 12 K3 surface blown down.

    The Kodaira dimension argument itself is a cited step.

    """
    row = derive_case_invariants(get_case("b")).evaluate(9, 3)
    sections = row.chi + (row.kc + row.d) // 2
    k = sympy.Symbol("k", integer=True)
    # C = r*H − ΣFᵢ and K_Σ = r*K′ + ΣFᵢ over k points
    chi_h = sympy.expand(row.chi + ((row.d + k) - (row.kc - k)) / 2)
    blown_up = int(sympy.solve(chi_h - sections, k)[0])
    steps = (
        _arithmetic(
            f"h⁰(K_Σ + C) = χ + ½(K_ΣC + C²) = {row.chi} + ½({row.kc}+{row.d})",
            f"{row.chi} + Rational({row.kc} + {row.d}, 2)",
        ),
        _cited(f"c₂ = {row.c2}: K_Σ + C is globally generated and defines φ: Σ → P^{sections - 1} (Sommese)"),
        _arithmetic(f"dim φ(Σ) = 0 would give g(C) = 1, but g(C) = {row.g}", f"Ne({row.g}, 1)"),
        _arithmetic(f"dim φ(Σ) = 1 would give χ ≤ 1, but χ = {row.chi}", f"{row.chi} > 1"),
        _cited("dim φ(Σ) = 2: Σ is Σ′ blown up at k points and Σ′ embeds by H"),
        _arithmetic(
            f"χ(H) = {chi_h} = {sections} gives k = {blown_up}", f"solve({chi_h} - {sections}, k)[0]"
        ),
        _arithmetic(f"deg Σ′ = H² = {row.d} + k", f"{row.d} + {blown_up}"),
        _arithmetic("K_Σ′·H = K_ΣC − k", f"{row.kc} - {blown_up}"),
        _arithmetic("K_Σ′² = K_Σ² + k", f"{row.k2} + {blown_up}"),
        _arithmetic("c₂(Σ′) = c₂(Σ) − k", f"{row.c2} - {blown_up}"),
        _arithmetic("χ(O_Σ′) = (K² + c₂)/12", f"Rational({row.k2 + blown_up} + {row.c2 - blown_up}, 12)"),
        _cited("K_Σ′·H = 0 and K_Σ′² = 0 with χ = 2 make Σ′ a K3 surface (Kodaira dimension)"),
    )
    survives = (
        blown_up == 3 and steps[6].result == 12 and steps[7].result == 0 and steps[8].result == 0
        and steps[9].result == 24 and steps[10].result == 2
    )
    return ExclusionCertificate(
        "b(9,3)",
        steps,
        _verdict(not survives),
        ((9, 3),) if survives else (),
        rebuild=final_k3_identification,
    )


def case_certificate(case: CremonaCase) -> ExclusionCertificate:
    """Returns the certificate of one row of the case table."""
    if case.label == "a":
        return exclude_case_a()
    if case.label == "b":
        return case_b_certificate()
    if case.label in ("c", "e"):
        return exclude_parity_divisibility(case)
    return exclude_section_counts(case)


@dataclass(frozen=True)
class ClassificationReport:
    """All certificates with the unique surviving (n, m, ξ, d, δ)."""

    certificates: tuple[ExclusionCertificate, ...]
    survivor: tuple[int, int, int, int, int]
    excluded: tuple[str, ...]
    cross_checks: dict[str, int]

    def certificate(self, label: str) -> ExclusionCertificate:
        for certificate in self.certificates:
            if certificate.label == label:
                return certificate
        raise KeyError(label)

    def to_dict(self, show_steps: bool = False) -> dict[str, Any]:
        return {
            "survivor": dict(zip(("n", "m", "xi", "d", "delta"), self.survivor)),
            "excluded": list(self.excluded),
            "cross_checks": dict(self.cross_checks),
            "certificates": [certificate.to_dict(show_steps) for certificate in self.certificates],
        }


def final_classification() -> ClassificationReport:
    """Runs every certificate and returns the unique survivor.

    Raises:
        ClassificationError: If a certificate does not replay, the survivor is not unique, or the survivor
            fails the intersection number cross-checks.

    """
    cases = case_table()
    certificates = [case_certificate(case) for case in cases]
    certificates += [exclude_87(), final_k3_identification()]
    for certificate in certificates:
        if not certificate.replay():
            raise ClassificationError(f"Certificate of case ({certificate.label}) does not replay")
        logger.debug(f"Case ({certificate.label}): {certificate.verdict}")
    excluded = tuple(c.label for c in certificates if c.excluded)
    excluded_pairs = {c.label for c in certificates if c.excluded}
    survivors = [
        (case, pair)
        for case, certificate in zip(cases, certificates)
        if not certificate.excluded
        for pair in certificate.survivors
        if f"{case.label}({pair[0]},{pair[1]})" not in excluded_pairs
    ]
    if len(survivors) != 1:
        raise ClassificationError(f"Expected a unique survivor, got {survivors}")
    case, (d, delta) = survivors[0]
    row = derive_case_invariants(case).evaluate(d, delta)
    cross_checks = {
        "m4": m4_formula(row),
        "xi": xi_formula(row),
        "double_point_class": double_point_class(row)[0],
    }
    if cross_checks != {"m4": 1, "xi": case.xi, "double_point_class": 2 * delta}:
        raise ClassificationError(f"Survivor ({case.label}, {d}, {delta}) fails cross-checks {cross_checks}")
    survivor = (case.n, case.m, case.xi, d, delta)
    logger.info(f"Unique survivor (n, m, ξ, d, δ) = {survivor}; excluded {', '.join(excluded)}")
    return ClassificationReport(tuple(certificates), survivor, excluded, cross_checks)
