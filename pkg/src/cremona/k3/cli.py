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
"""Command line front end: `cremona_k3 <command>` prints a JSON verification report.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on unreadable or malformed input.

Examples:

    $ cremona_k3 --json report.json verify-example --section example_section.json
    $ cremona_k3 classify --case f
    $ cremona_k3 --quiet intersection --invariants my_invariants.json

"""

from __future__ import annotations

__all__ = [
    "EXIT_FAILURE",
    "EXIT_INPUT_ERROR",
    "EXIT_SUCCESS",
    "cmd_classify",
    "cmd_intersection",
    "cmd_lattice",
    "cmd_motivic",
    "cmd_verify_example",
    "main",
]

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

from cremona.k3 import CremonaError, InputError, StrPath, __version__
from cremona.k3.argparse import ArgumentParser
from cremona.k3.classify import case_certificate, final_classification, get_case
from cremona.k3.config import PipelineConfig, load_config
from cremona.k3.intersect import (
    InvalidInvariantsError,
    NonIntegralError,
    SurfaceInvariants,
    double_point_class,
    e4_formulas,
    exceptional_numbers,
    m4_formulas,
    plocus_numbers,
    xi_formula,
)
from cremona.k3.io import data_path, file_digest
from cremona.k3.k3pipeline import SectionInput, SectionInputError, run_pipeline, verification_checks
from cremona.k3.lattice import (
    discriminant_action,
    discriminant_group,
    flip_node_signs,
    full_base_change,
    h_m_constraints,
    intersection_lattice,
    inverse_base_change,
    m_squared_constraints,
    solve_class_decomposition,
)
from cremona.k3.logging import init_logging_with_args, log_duration
from cremona.k3.motivic import annihilation_identity, blowup_strata, point_count_realization
from cremona.k3.report import CheckRecord, VerificationReport, dump_json


logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2

_CASE_LABELS = ("a", "b", "c", "d", "e", "f", "g")
_EXPECTED_VERDICTS = {
    "a": "excluded",
    "b": "survives",
    "c": "excluded",
    "d": "excluded",
    "e": "excluded",
    "f": "excluded",
    "g": "excluded",
    "b(8,7)": "excluded",
    "b(9,3)": "survives",
}


def cmd_verify_example(section_path: StrPath, config: Optional[PipelineConfig] = None) -> VerificationReport:
    """Runs the whole pipeline on a section input file and records every expected value.

    A section that fails validation gives a report with the single failing `section-input` record.

    Raises:
        SectionFormatError: If the file cannot be read or parsed.

    """
    section = SectionInput.from_json(section_path)
    details = {"section": {"path": str(section_path), "sha256": file_digest(section_path)}}
    try:
        result = run_pipeline(section, config, section_path=section_path)
    except SectionInputError as exc:
        record = CheckRecord(
            "section-input",
            "H has rank 8 and its last three rows are points of OG(5,10)",
            {"rank": 8, "og_violations": []},
            {
                "rank": section.rank,
                "og_violations": [list(pair) for pair in section.og_violations()],
                "error": str(exc),
            },
            verdict="fail",
        )
        return VerificationReport("verify-example", [record], details)
    details["config"] = result.config.to_dict()
    return VerificationReport("verify-example", verification_checks(result), details)


def _read_invariants(path: StrPath) -> SurfaceInvariants:
    try:
        content = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInvariantsError(f"Cannot read invariants '{path}': {exc}") from exc
    if not isinstance(content, dict):
        raise InvalidInvariantsError(f"Invariants '{path}' must hold a JSON object")
    return SurfaceInvariants.from_dict(content)


def cmd_intersection(invariants_path: Optional[StrPath] = None) -> VerificationReport:
    """Evaluates the intersection numbers of a datum, both formulas side by side.

    The report fails when M⁴ ≠ 1 or when the two E⁴ (hence M⁴) evaluations disagree.

    Raises:
        InvalidInvariantsError: If the file is unreadable or violates the invariant ranges.

    """
    source = invariants_path if invariants_path is not None else data_path("example_invariants.json")
    invariants = _read_invariants(source)
    invariants.check()
    report = VerificationReport("intersection")
    with log_duration("Intersection numbers", logger) as timer:
        e4_chern, e4_normal = e4_formulas(invariants)
        m4_chern, m4_normal = m4_formulas(invariants)
        lm3 = xi_formula(invariants)
    report.add(
        CheckRecord("e4-agreement", "E⁴ by Chern classes equals E⁴ by the normal bundle", e4_chern, e4_normal)
    )
    report.add(CheckRecord("m4", "M⁴ = 1, the map is birational", 1, m4_chern, elapsed_ms=timer.elapsed_ms))
    report.add(CheckRecord("m4-agreement", "both evaluations of M⁴ agree", m4_chern, m4_normal))
    if invariants.xi is not None:
        report.add(CheckRecord("xi", "LM³ is the degree of the inverse", invariants.xi, lm3))
    table: dict[str, Any] = {
        "exceptional": dict(zip(("LEi", "E3Ei", "E2Ei2", "EEi3", "Ei4"), exceptional_numbers())),
        "le": {"L3E": 0, "L2E2": -invariants.d, "LE3": -5 * invariants.d - invariants.kc, "E4": e4_chern},
        "mixed": {
            "L3M": invariants.n,
            "L2M2": invariants.n**2 - invariants.m**2 * invariants.d,
            "LM3": lm3,
            "M4": m4_chern,
        },
        "E4_formulas": {"chern": e4_chern, "normal": e4_normal},
        "M4_formulas": {"chern": m4_chern, "normal": m4_normal},
    }
    try:
        table["double_point_class"] = double_point_class(invariants)[0]
    except NonIntegralError as exc:
        logger.warning(str(exc))
        table["double_point_class"] = None
    if m4_chern == m4_normal:
        try:
            plocus = plocus_numbers(invariants)
            table["plocus"] = dict(zip(("multiplicity", "secant_degree", "secant_hits"), plocus))
        except NonIntegralError as exc:
            logger.warning(str(exc))
    report.details = {"invariants": invariants.to_dict(), "table": table}
    return report


def cmd_classify(case: Optional[str] = None, show_steps: bool = False) -> VerificationReport:
    """Replays the classification, or the certificate of a single case.

    Raises:
        ClassificationError: If a certificate does not replay or the survivor is not unique.

    """
    report = VerificationReport("classify")
    if case is not None:
        with log_duration(f"Case ({case})", logger) as timer:
            certificate = case_certificate(get_case(case))
            replayed = certificate.replay()
        report.add(
            CheckRecord(
                f"case-{certificate.label}",
                f"certificate of case ({certificate.label}) replays",
                {"verdict": _EXPECTED_VERDICTS[certificate.label], "replays": True},
                {"verdict": certificate.verdict, "replays": replayed},
                elapsed_ms=timer.elapsed_ms,
            )
        )
        report.details = {"certificates": [certificate.to_dict(show_steps=True)]}
        return report
    with log_duration("Classification", logger) as timer:
        classification = final_classification()
    for certificate in classification.certificates:
        report.add(
            CheckRecord(
                f"case-{certificate.label}",
                f"certificate of case ({certificate.label}) replays",
                _EXPECTED_VERDICTS[certificate.label],
                certificate.verdict,
            )
        )
    report.add(
        CheckRecord(
            "survivor",
            "the only nodal case is (n, m, ξ, d, δ) = (4, 1, 4, 9, 3)",
            [4, 1, 4, 9, 3],
            list(classification.survivor),
            elapsed_ms=timer.elapsed_ms,
        )
    )
    report.details = classification.to_dict(show_steps)
    return report


def cmd_lattice() -> VerificationReport:
    """Recovers M² and H̃_M in the L-side basis and the action of the base change on the discriminant group.

    Raises:
        DecompositionError: If a decomposition is not unique.
        LatticeError: If the base change is not an isometry.

    """
    report = VerificationReport("lattice")
    lattice = intersection_lattice()
    with log_duration("Lattice", logger) as timer:
        group = discriminant_group(lattice)
        m_squared = solve_class_decomposition(m_squared_constraints())
        h_m = solve_class_decomposition(h_m_constraints(m_squared))
        matrix = full_base_change(lattice)
        inverse = inverse_base_change(matrix, lattice)
        multiplier = discriminant_action(matrix, lattice)
        flipped = discriminant_action(flip_node_signs(matrix, (1, 2, 3)), lattice)
    report.add(
        CheckRecord(
            "discriminant-group", "A_L(X) has discriminant group Z/12", [12], list(group.invariant_factors)
        )
    )
    report.add(
        CheckRecord(
            "m-squared",
            "M² = 7L² − 3H̃_L + 4ΣF̃ᵢ + 2ΣQᵢ",
            [7, -3, 4, 4, 4, 2, 2, 2],
            list(m_squared.coefficients),
        )
    )
    report.add(
        CheckRecord(
            "h-m",
            "H̃_M = 36L² − 17H̃_L + 24ΣF̃ᵢ + 12ΣQᵢ",
            [36, -17, 24, 24, 24, 12, 12, 12],
            list(h_m.coefficients),
        )
    )
    report.add(
        CheckRecord(
            "base-change",
            "the decompositions are the first rows of the base change",
            [list(m_squared.coefficients), list(h_m.coefficients)],
            [[int(v) for v in matrix.row(i)] for i in (0, 1)],
        )
    )
    report.add(
        CheckRecord(
            "norms",
            "(M²)² = 1 and H̃_M² = −12",
            [1, -12],
            [int(lattice.norm(list(matrix.row(i)))) for i in (0, 1)],
        )
    )
    report.add(
        CheckRecord(
            "discriminant-action",
            "the base change acts on Z/12 as multiplication by 7",
            7,
            multiplier,
            elapsed_ms=timer.elapsed_ms,
        )
    )
    report.add(CheckRecord("sign-flips", "flipping every Qᵢ keeps the multiplier", multiplier, flipped))
    report.details = {
        "generator": [str(v) for v in group.generator or ()],
        "base_change": [[int(v) for v in matrix.row(i)] for i in range(matrix.rows)],
        "inverse_base_change": [[int(v) for v in inverse.row(i)] for i in range(inverse.rows)],
    }
    return report


def cmd_motivic(
    points_path: Optional[StrPath] = None, config: Optional[PipelineConfig] = None
) -> VerificationReport:
    """Expands both stratifications of the resolved graph and their difference.

    With `points_path`, also evaluates the counting realisation on the point counts of that section.

    Raises:
        SectionFormatError: If the section input cannot be read.

    """
    report = VerificationReport("motivic")
    strata = {side: blowup_strata(side) for side in ("L", "M")}
    for side, stratification in strata.items():
        report.add(
            CheckRecord(
                f"blowup-{side}",
                f"[X] from the blowup of P⁴ along S_{side}",
                str(stratification.closed_form),
                str(stratification.total),
            )
        )
    report.add(
        CheckRecord("annihilation", "([R_L] − [R_M])·𝕃 = 0", "L*R_L - L*R_M", str(annihilation_identity()))
    )
    details: dict[str, Any] = {side: stratification.to_dict() for side, stratification in strata.items()}
    if points_path is not None:
        section = SectionInput.from_json(points_path)
        result = run_pipeline(section, config, section_path=points_path)
        assert result.counts is not None
        counts = result.counts
        realization = point_count_realization(counts.q, counts.r, counts.s, counts.t)
        report.add(
            CheckRecord(
                "scissor", "#S_L = #R_L + 3q − 3", counts.r + 3 * counts.q - 3, counts.s
            )
        )
        report.add(
            CheckRecord(
                "point-counts",
                "both stratifications give the same #X, so #R_L = #R_M",
                {"balanced": True, "difference_times_q": 0},
                {"balanced": realization.balanced, "difference_times_q": realization.annihilated},
            )
        )
        details["points"] = realization.to_dict()
    report.details = details
    return report


def _add_tuning_arguments(parser: ArgumentParser) -> None:
    """Adds the pipeline settings that may override the configuration file."""
    parser.add_argument_src_path("--config", default=None, help="YAML, JSON or dotenv pipeline configuration")
    parser.add_numeric_argument(
        "--elimination-degree", min_value=2, default=None, help="degree bound of the graded elimination"
    )
    parser.add_numeric_argument(
        "--cutout-degree", min_value=1, default=None, help="degree of the cut-out comparison"
    )
    parser.add_numeric_argument("--seed", min_value=0, default=None, help="seed of the sample points")


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    """Returns the configuration from file and environment, with the command line options applied last."""
    overrides = {
        "elimination_degree_bound": args.elimination_degree,
        "cutout_check_degree": args.cutout_degree,
        "seed": args.seed,
    }
    return load_config(args.config).updated({k: v for k, v in overrides.items() if v is not None})


def _build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="cremona_k3", description="Verify the quartic Cremona example")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_report_arguments()
    parser.add_log_arguments(add_log_file=True)
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    verify = subparsers.add_parser("verify-example", help="run the whole construction on a section input")
    verify.add_argument_src_path(
        "--section", default=data_path("example_section.json"), help="SectionInput JSON file"
    )
    _add_tuning_arguments(verify)
    verify.set_defaults(handler=lambda args: cmd_verify_example(args.section, _pipeline_config(args)))

    intersection = subparsers.add_parser("intersection", help="intersection numbers of a datum")
    intersection.add_argument_src_path(
        "--invariants", default=None, help="JSON invariants n, m, xi, d, delta, kc, k2, c2"
    )
    intersection.set_defaults(handler=lambda args: cmd_intersection(args.invariants))

    classify = subparsers.add_parser("classify", help="replay the exclusion certificates")
    classify.add_argument("--case", choices=_CASE_LABELS, default=None, help="replay a single case")
    classify.add_argument("--show-steps", action="store_true", help="include every certificate step")
    classify.set_defaults(handler=lambda args: cmd_classify(args.case, args.show_steps))

    lattice = subparsers.add_parser("lattice", help="base change of the algebraic lattice")
    lattice.set_defaults(handler=lambda args: cmd_lattice())

    motivic = subparsers.add_parser("motivic", help="Grothendieck ring identity")
    motivic.add_argument_src_path("--points", default=None, help="SectionInput JSON file to count points on")
    _add_tuning_arguments(motivic)
    motivic.set_defaults(handler=lambda args: cmd_motivic(args.points, _pipeline_config(args)))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of `cremona_k3`; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    init_logging_with_args(args)
    try:
        report: VerificationReport = args.handler(args)
    except InputError as exc:
        logger.error(str(exc))
        return EXIT_INPUT_ERROR
    except CremonaError as exc:
        logger.error(f"Verification failed: {exc}")
        return EXIT_FAILURE
    text = dump_json(report.to_dict(), args.json_path)
    if not args.quiet:
        print(text, end="")
    for record in report.records:
        if not record.passed:
            logger.error(f"Check {record.id} failed: expected {record.expected}, got {record.computed}")
    return EXIT_SUCCESS if report.passed else EXIT_FAILURE
