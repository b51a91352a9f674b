"""Command-line front end: validate documents, diagnose, analyze covers.

Commands read KB and observation documents from files and print canonical
reports to standard output, so identical inputs give identical bytes.
Exit codes: 0 success, 1 valid inputs but an empty result, 2 invalid
inputs or usage, 3 file trouble.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import covers as covers_mod
from . import kbio
from .core import KnowledgeBase, Observation
from .crisp import (
    INCOMPLETE,
    CrispObservation,
    Explanation,
    diagnose_incomplete,
    explainer_subsets_incomplete,
)
from .errors import DiagnosisError
from .fuzzy import explain_plausibility, rank_disorders, search_multi

OK = 0
EMPTY_RESULT = 1
INVALID = 2
IO_FAILURE = 3


@dataclass(frozen=True)
class CommandOutcome:
    """What a command run produced, before any printing happens."""

    exit_code: int
    stdout: str
    stderr: str


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse wants to sys.exit on usage problems; surface them instead
    def error(self, message: str) -> None:
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="abdiag",
        description="Diagnosis over causal knowledge with graded certainty.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser, obs_required: bool = True) -> None:
        p.add_argument("--kb", required=True, help="knowledge base JSON file")
        p.add_argument(
            "--obs",
            required=obs_required,
            help="observation JSON file",
        )
        p.add_argument("--output", help="also write the report to this file")

    validate = sub.add_parser("validate", help="check documents and report issues")
    common(validate, obs_required=False)

    diagnose = sub.add_parser("diagnose", help="rank disorders against evidence")
    common(diagnose)
    diagnose.add_argument(
        "--mode",
        choices=("fuzzy", "crisp"),
        default="fuzzy",
        help="graded ranking (default) or yes/no screening",
    )
    diagnose.add_argument(
        "--multi",
        type=int,
        metavar="MAXCARD",
        help="search disorder subsets up to this size",
    )
    diagnose.add_argument(
        "--threshold",
        default="1",
        help="stop the subset search at this level (fuzzy --multi only)",
    )
    diagnose.add_argument(
        "--exhaustive",
        action="store_true",
        help="keep searching past the first successful size (crisp --multi only)",
    )

    covers = sub.add_parser("covers", help="enumerate covering disorder subsets")
    common(covers)
    covers.add_argument("--max-card", type=int, default=None, help="largest subset size")
    covers.add_argument(
        "--class",
        dest="cover_class",
        choices=("relevant", "irredundant", "minimum", "all"),
        default="all",
        help="keep only covers of this grade",
    )

    explain = sub.add_parser("explain", help="audit one disorder's level")
    common(explain)
    explain.add_argument("--disorder", required=True, help="disorder to audit")

    return parser


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------


def _issue_lines(issues: Iterable[kbio.DocumentIssue]) -> list[str]:
    return [f"{i.severity}: {i.path}: {i.message}" for i in issues]


def _load_inputs(
    args: argparse.Namespace, notes: list[str]
) -> tuple[KnowledgeBase, Observation | None]:
    kb_text = Path(args.kb).read_text(encoding="utf-8")
    kb, issues = kbio.parse_kb(kb_text)
    notes.extend(_issue_lines(issues))
    if kb is None:
        raise DiagnosisError(f"knowledge base {args.kb} is invalid")
    obs = None
    if getattr(args, "obs", None):
        obs_text = Path(args.obs).read_text(encoding="utf-8")
        obs, issues = kbio.parse_observation(obs_text, kb)
        notes.extend(_issue_lines(issues))
        if obs is None:
            raise DiagnosisError(f"observation {args.obs} is invalid")
    return kb, obs


def _run_validate(args: argparse.Namespace, notes: list[str]) -> CommandOutcome:
    _load_inputs(args, notes)
    return CommandOutcome(OK, "ok\n", _join(notes))


def _crisp_observation(obs: Observation) -> CrispObservation:
    if not obs.is_crisp():
        raise DiagnosisError(
            "crisp mode needs an observation graded only at 0 or 1"
        )
    return CrispObservation(obs.present.support(), obs.absent.support())


def _run_diagnose(args: argparse.Namespace, notes: list[str]) -> CommandOutcome:
    kb, obs = _load_inputs(args, notes)
    assert obs is not None
    if args.multi is not None and args.multi < 1:
        raise DiagnosisError("--multi must be at least 1")
    if args.mode == "crisp":
        if not kb.is_crisp():
            raise DiagnosisError("crisp mode needs a knowledge base graded only at 0 or 1")
        cobs = _crisp_observation(obs)
        if args.multi is not None:
            found = explainer_subsets_incomplete(
                kb, cobs, args.multi, exhaustive=args.exhaustive
            )
        else:
            survivors = diagnose_incomplete(kb, cobs)
            found = tuple(
                Explanation.of([d], INCOMPLETE) for d in sorted(survivors)
            )
        text = kbio.write_report(found, kind=kbio.EXPLANATIONS)
        code = OK if found else EMPTY_RESULT
        return _emit(args, code, text, notes)
    try:
        threshold = kbio.parse_level(args.threshold)
    except ValueError as exc:
        raise DiagnosisError(f"--threshold: {exc}") from None
    if args.multi is not None:
        ranking = search_multi(kb, obs, threshold=threshold, max_card=args.multi)
        reached = any(e.level >= threshold for e in ranking)
        code = OK if reached else EMPTY_RESULT
    else:
        ranking = rank_disorders(kb, obs)
        code = OK if ranking.support() else EMPTY_RESULT
    return _emit(args, code, kbio.write_report(ranking), notes)


def _run_covers(args: argparse.Namespace, notes: list[str]) -> CommandOutcome:
    kb, obs = _load_inputs(args, notes)
    assert obs is not None
    if args.max_card is not None and args.max_card < 0:
        raise DiagnosisError("--max-card must be at least 0")
    rel = covers_mod.CausalRelation.from_kb(kb)
    reports = covers_mod.classify_covers(
        rel, obs.present.support(), max_card=args.max_card
    )
    if args.cover_class != "all":
        reports = tuple(
            r for r in reports if getattr(r, args.cover_class)
        )
    text = kbio.write_report(reports, kind=kbio.COVERS)
    code = OK if reports else EMPTY_RESULT
    return _emit(args, code, text, notes)


def _run_explain(args: argparse.Namespace, notes: list[str]) -> CommandOutcome:
    kb, obs = _load_inputs(args, notes)
    assert obs is not None
    breakdown = explain_plausibility(kb, obs, [args.disorder])
    return _emit(args, OK, kbio.write_report(breakdown), notes)


def _emit(
    args: argparse.Namespace, code: int, text: str, notes: list[str]
) -> CommandOutcome:
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    return CommandOutcome(code, text, _join(notes))


def _join(lines: list[str]) -> str:
    return "".join(f"{line}\n" for line in lines)


_COMMANDS = {
    "validate": _run_validate,
    "diagnose": _run_diagnose,
    "covers": _run_covers,
    "explain": _run_explain,
}


def run(argv: Sequence[str]) -> CommandOutcome:
    """Execute one command line and collect its outcome without printing."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return CommandOutcome(INVALID, "", f"{exc}\n")
    except SystemExit as exc:  # --help prints and leaves
        return CommandOutcome(int(exc.code or 0), "", "")
    notes: list[str] = []
    try:
        return _COMMANDS[args.command](args, notes)
    except OSError as exc:
        return CommandOutcome(IO_FAILURE, "", _join(notes) + f"error: {exc}\n")
    except DiagnosisError as exc:
        detail = str(exc) or "invalid input"
        return CommandOutcome(INVALID, "", _join(notes) + f"error: {detail}\n")


def main() -> None:
    outcome = run(sys.argv[1:])
    if outcome.stdout:
        sys.stdout.write(outcome.stdout)
    if outcome.stderr:
        sys.stderr.write(outcome.stderr)
    raise SystemExit(outcome.exit_code)


if __name__ == "__main__":
    main()
