"""Documents: parse and validate knowledge bases, observations, reports.

All documents are UTF-8 JSON.  Certainty levels travel as exact strings
("1/4", "0.5", "1") and are parsed to rationals without ever passing
through binary floats, so a level that goes in comes back out unchanged.
Serialization is canonical (sorted keys, two-space indent, exact level
strings, trailing newline): equal values produce identical bytes.

Parsing never raises on bad content; it returns the value (or None) plus
a list of located issues.  The ``load_*`` wrappers raise instead, for
callers that have no use for partial results.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .core import (
    ADDITIVE,
    EXPLICIT,
    CertaintyScale,
    DisorderProfile,
    FuzzySet,
    KnowledgeBase,
    Level,
    Observation,
    TwofoldSet,
    twofold_violations,
)
from .covers import CoverReport
from .crisp import Explanation
from .errors import DiagnosisError, DocumentError
from .fuzzy import (
    ConflictWitness,
    PlausibilityBreakdown,
    PlausibilityRanking,
    RankingEntry,
)

FORMAT_VERSION = 1

ERROR = "error"
WARNING = "warning"

_IDENTIFIER = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class DocumentIssue:
    """One located problem in a document."""

    path: str
    severity: str
    message: str


def has_errors(issues: Iterable[DocumentIssue]) -> bool:
    return any(i.severity == ERROR for i in issues)


# ---------------------------------------------------------------------------
# JSON plumbing
# ---------------------------------------------------------------------------


def _reject_constant(name: str) -> Any:
    raise ValueError(f"{name} is not a valid level or value")


def parse_document(text: str) -> tuple[Any, list[DocumentIssue]]:
    """Decode JSON with exact decimal handling (floats become rationals)."""
    try:
        value = json.loads(
            text, parse_float=Fraction, parse_constant=_reject_constant
        )
    except ValueError as exc:
        return None, [DocumentIssue("$", ERROR, f"malformed JSON: {exc}")]
    return value, []


def canonical_json(value: Any) -> str:
    """Byte-stable rendering: sorted keys, fixed indent, trailing newline."""
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_level(raw: Any) -> Level:
    """One certainty level from its document form ("1/4", "0.5", 1, ...)."""
    if isinstance(raw, bool):
        raise ValueError("booleans are not levels")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str):
        return Fraction(raw)
    raise ValueError(f"cannot read a level from {type(raw).__name__}")


def level_to_str(level: Level) -> str:
    return str(Fraction(level))


# ---------------------------------------------------------------------------
# knowledge base documents
# ---------------------------------------------------------------------------


def parse_kb(text: str) -> tuple[KnowledgeBase | None, tuple[DocumentIssue, ...]]:
    doc, issues = parse_document(text)
    if issues:
        return None, tuple(issues)
    return build_kb(doc)


def build_kb(doc: Any) -> tuple[KnowledgeBase | None, tuple[DocumentIssue, ...]]:
    """Validate an already-decoded KB document."""
    issues: list[DocumentIssue] = []

    def err(path: str, message: str) -> None:
        issues.append(DocumentIssue(path, ERROR, message))

    def warn(path: str, message: str) -> None:
        issues.append(DocumentIssue(path, WARNING, message))

    if not isinstance(doc, dict):
        err("$", "document must be a JSON object")
        return None, tuple(issues)
    _check_version(doc, err)

    scale = _read_scale(doc, err)
    manifestations = _read_identifiers(doc, "manifestations", err, required=True)

    raw_disorders = doc.get("disorders")
    if not isinstance(raw_disorders, list):
        err("$.disorders", "required: an array of disorder objects")
        raw_disorders = []

    composition = doc.get("composition", ADDITIVE)
    if composition not in (ADDITIVE, EXPLICIT):
        err("$.composition", f"must be {ADDITIVE!r} or {EXPLICIT!r}")
        composition = ADDITIVE

    if scale is None or manifestations is None:
        return None, tuple(issues)

    universe = tuple(manifestations)
    profiles: list[DisorderProfile] = []
    seen_ids: set[str] = set()
    referenced: set[str] = set()
    for i, entry in enumerate(raw_disorders):
        path = f"$.disorders[{i}]"
        if not isinstance(entry, dict):
            err(path, "each disorder must be an object")
            continue
        disorder = entry.get("id")
        if not _valid_identifier(disorder):
            err(f"{path}.id", "required: an identifier ([A-Za-z0-9_.-]+)")
            continue
        if disorder in seen_ids:
            err(f"{path}.id", f"duplicate disorder {disorder!r}")
            continue
        seen_ids.add(disorder)
        effects = _read_twofold(entry, path, scale, universe, err, referenced)
        if effects is None:
            continue
        if effects.positive.is_empty() and effects.negative.is_empty():
            warn(path, f"no knowledge recorded for disorder {disorder!r}")
        profiles.append(DisorderProfile(disorder, effects))

    multi_profiles: dict[frozenset[str], TwofoldSet] = {}
    raw_multi = doc.get("multi_profiles", [])
    if not isinstance(raw_multi, list):
        err("$.multi_profiles", "must be an array of profile objects")
        raw_multi = []
    for i, entry in enumerate(raw_multi):
        path = f"$.multi_profiles[{i}]"
        if not isinstance(entry, dict):
            err(path, "each multi-profile must be an object")
            continue
        members = _read_member_list(entry.get("members"), f"{path}.members", err)
        if members is None:
            continue
        strangers = members - seen_ids
        if strangers:
            err(f"{path}.members", f"unknown disorders {sorted(strangers)}")
            continue
        if members in multi_profiles:
            err(f"{path}.members", f"duplicate profile for {sorted(members)}")
            continue
        effects = _read_twofold(entry, path, scale, universe, err, referenced)
        if effects is not None:
            multi_profiles[members] = effects

    admissible: frozenset[frozenset[str]] | None = None
    if "admissible" in doc:
        raw_adm = doc["admissible"]
        if not isinstance(raw_adm, list):
            err("$.admissible", "must be an array of member arrays")
        else:
            collected: set[frozenset[str]] = set()
            for i, entry in enumerate(raw_adm):
                members = _read_member_list(entry, f"$.admissible[{i}]", err)
                if members is None:
                    continue
                strangers = members - seen_ids
                if strangers:
                    err(f"$.admissible[{i}]", f"unknown disorders {sorted(strangers)}")
                    continue
                collected.add(members)
            admissible = frozenset(collected)

    for m in universe:
        if m not in referenced:
            warn("$.manifestations", f"{m!r} is not graded by any profile")

    if has_errors(issues):
        return None, tuple(issues)
    try:
        kb = KnowledgeBase(
            scale,
            universe,
            tuple(profiles),
            multi_profiles=multi_profiles,
            admissible=admissible,
            composition=composition,
        )
    except DiagnosisError as exc:
        err("$", str(exc))
        return None, tuple(issues)
    return kb, tuple(issues)


def _check_version(doc: Mapping[str, Any], err) -> None:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        err(
            "$.format_version",
            f"required: the number {FORMAT_VERSION} (got {version!r})",
        )


def _valid_identifier(value: Any) -> bool:
    return isinstance(value, str) and bool(_IDENTIFIER.match(value))


def _read_scale(doc: Mapping[str, Any], err) -> CertaintyScale | None:
    if "scale" not in doc:
        return CertaintyScale.default()
    raw = doc["scale"]
    if not isinstance(raw, list):
        err("$.scale", "must be an array of levels")
        return None
    levels = []
    bad = False
    for i, entry in enumerate(raw):
        try:
            levels.append(parse_level(entry))
        except (ValueError, ZeroDivisionError) as exc:
            err(f"$.scale[{i}]", str(exc))
            bad = True
    if bad:
        return None
    try:
        return CertaintyScale(tuple(levels))
    except DiagnosisError as exc:
        err("$.scale", str(exc))
        return None


def _read_identifiers(
    doc: Mapping[str, Any], key: str, err, required: bool
) -> list[str] | None:
    raw = doc.get(key)
    if raw is None:
        if required:
            err(f"$.{key}", "required: an array of identifiers")
        return None
    if not isinstance(raw, list):
        err(f"$.{key}", "must be an array of identifiers")
        return None
    names: list[str] = []
    ok = True
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        if not _valid_identifier(entry):
            err(f"$.{key}[{i}]", "identifiers must match [A-Za-z0-9_.-]+")
            ok = False
            continue
        if entry in seen:
            err(f"$.{key}[{i}]", f"duplicate identifier {entry!r}")
            ok = False
            continue
        seen.add(entry)
        names.append(entry)
    return names if ok else None


def _read_member_list(raw: Any, path: str, err) -> frozenset[str] | None:
    if not isinstance(raw, list) or not raw:
        err(path, "must be a non-empty array of disorder identifiers")
        return None
    members: set[str] = set()
    for i, entry in enumerate(raw):
        if not _valid_identifier(entry):
            err(f"{path}[{i}]", "identifiers must match [A-Za-z0-9_.-]+")
            return None
        members.add(entry)
    return frozenset(members)


def _read_grades(
    raw: Any,
    path: str,
    scale: CertaintyScale,
    universe: tuple[str, ...],
    err,
    referenced: set[str] | None = None,
) -> dict[str, Level] | None:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        err(path, "must be an object mapping manifestations to levels")
        return None
    known = set(universe)
    grades: dict[str, Level] = {}
    ok = True
    for name, entry in raw.items():
        if name not in known:
            err(f"{path}.{name}", f"unknown manifestation {name!r}")
            ok = False
            continue
        try:
            level = parse_level(entry)
        except (ValueError, ZeroDivisionError) as exc:
            err(f"{path}.{name}", str(exc))
            ok = False
            continue
        if level not in scale:
            err(
                f"{path}.{name}",
                f"level {level_to_str(level)} is not on the scale",
            )
            ok = False
            continue
        grades[name] = level
        if referenced is not None:
            referenced.add(name)
    return grades if ok else None


def _read_twofold(
    entry: Mapping[str, Any],
    path: str,
    scale: CertaintyScale,
    universe: tuple[str, ...],
    err,
    referenced: set[str] | None = None,
) -> TwofoldSet | None:
    certain = _read_grades(
        entry.get("certain"), f"{path}.certain", scale, universe, err, referenced
    )
    excluded = _read_grades(
        entry.get("excluded"), f"{path}.excluded", scale, universe, err, referenced
    )
    if certain is None or excluded is None:
        return None
    positive = FuzzySet(scale, universe, certain)
    negative = FuzzySet(scale, universe, excluded)
    conflicts = twofold_violations(positive, negative)
    if conflicts:
        for c in conflicts:
            err(
                f"{path}.certain.{c.manifestation}",
                f"graded certain at {level_to_str(c.positive)} and excluded "
                f"at {level_to_str(c.negative)}; one of the two must be 0",
            )
        return None
    return TwofoldSet(positive, negative)


# ---------------------------------------------------------------------------
# observation documents
# ---------------------------------------------------------------------------


def parse_observation(
    text: str, kb: KnowledgeBase
) -> tuple[Observation | None, tuple[DocumentIssue, ...]]:
    doc, issues = parse_document(text)
    if issues:
        return None, tuple(issues)
    return build_observation(doc, kb)


def build_observation(
    doc: Any, kb: KnowledgeBase
) -> tuple[Observation | None, tuple[DocumentIssue, ...]]:
    """Validate an already-decoded observation document against a KB."""
    issues: list[DocumentIssue] = []

    def err(path: str, message: str) -> None:
        issues.append(DocumentIssue(path, ERROR, message))

    if not isinstance(doc, dict):
        err("$", "document must be a JSON object")
        return None, tuple(issues)
    _check_version(doc, err)
    present = _read_grades(
        doc.get("present"), "$.present", kb.scale, kb.manifestations, err
    )
    absent = _read_grades(
        doc.get("absent"), "$.absent", kb.scale, kb.manifestations, err
    )
    if has_errors(issues) or present is None or absent is None:
        return None, tuple(issues)
    pos = FuzzySet(kb.scale, kb.manifestations, present)
    neg = FuzzySet(kb.scale, kb.manifestations, absent)
    conflicts = twofold_violations(pos, neg)
    if conflicts:
        for c in conflicts:
            err(
                f"$.present.{c.manifestation}",
                f"reported present at {level_to_str(c.positive)} and absent "
                f"at {level_to_str(c.negative)}; one of the two must be 0",
            )
        return None, tuple(issues)
    return Observation(pos, neg), tuple(issues)


# ---------------------------------------------------------------------------
# raising wrappers
# ---------------------------------------------------------------------------


def load_kb(text: str) -> KnowledgeBase:
    kb, issues = parse_kb(text)
    if kb is None:
        raise DocumentError(issues)
    return kb


def load_observation(text: str, kb: KnowledgeBase) -> Observation:
    obs, issues = parse_observation(text, kb)
    if obs is None:
        raise DocumentError(issues)
    return obs


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def _grades_to_json(f: FuzzySet) -> dict[str, str]:
    return {m: level_to_str(g) for m, g in sorted(f.grades.items())}


def kb_to_json(kb: KnowledgeBase) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "scale": [level_to_str(lv) for lv in kb.scale.levels],
        "manifestations": list(kb.manifestations),
        "disorders": [
            {
                "id": p.disorder,
                "certain": _grades_to_json(p.certain),
                "excluded": _grades_to_json(p.excluded),
            }
            for p in kb.profiles
        ],
        "composition": kb.composition,
    }
    if kb.multi_profiles:
        doc["multi_profiles"] = [
            {
                "members": sorted(members),
                "certain": _grades_to_json(effects.positive),
                "excluded": _grades_to_json(effects.negative),
            }
            for members, effects in sorted(
                kb.multi_profiles.items(), key=lambda kv: sorted(kv[0])
            )
        ]
    if kb.admissible is not None:
        doc["admissible"] = sorted(sorted(s) for s in kb.admissible)
    return doc


def observation_to_json(obs: Observation) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "present": _grades_to_json(obs.present),
        "absent": _grades_to_json(obs.absent),
    }


def write_kb(kb: KnowledgeBase) -> str:
    return canonical_json(kb_to_json(kb))


def write_observation(obs: Observation) -> str:
    return canonical_json(observation_to_json(obs))


RANKING = "ranking"
COVERS = "covers"
EXPLANATIONS = "explanations"
BREAKDOWN = "breakdown"


def ranking_to_json(ranking: PlausibilityRanking) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": RANKING,
        "scale": [level_to_str(lv) for lv in ranking.scale.levels],
        "entries": [
            {"disorders": list(e.disorders), "level": level_to_str(e.level)}
            for e in ranking.entries
        ],
    }


def covers_to_json(reports: Iterable[CoverReport]) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": COVERS,
        "reports": [
            {
                "subset": list(r.subset),
                "is_cover": r.is_cover,
                "relevant": r.relevant,
                "irredundant": r.irredundant,
                "minimum": r.minimum,
            }
            for r in reports
        ],
    }


def explanations_to_json(explanations: Iterable[Explanation]) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": EXPLANATIONS,
        "entries": [
            {
                "disorders": list(e.disorders),
                "mode": e.mode,
                "cardinality": e.cardinality,
            }
            for e in explanations
        ],
    }


def breakdown_to_json(b: PlausibilityBreakdown) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": BREAKDOWN,
        "disorders": list(b.disorders),
        "level": level_to_str(b.level),
        "certain_vs_absent": level_to_str(b.certain_vs_absent),
        "excluded_vs_present": level_to_str(b.excluded_vs_present),
        "conflicts": [
            {
                "manifestation": w.manifestation,
                "term": w.term,
                "profile_level": level_to_str(w.profile_level),
                "observed_level": level_to_str(w.observed_level),
                "overlap": level_to_str(w.overlap),
            }
            for w in b.conflicts
        ],
    }


def write_report(report: Any, kind: str | None = None) -> str:
    """Serialize any engine output to its canonical document."""
    if isinstance(report, PlausibilityRanking):
        return canonical_json(ranking_to_json(report))
    if isinstance(report, PlausibilityBreakdown):
        return canonical_json(breakdown_to_json(report))
    items = tuple(report)
    if kind == COVERS or (kind is None and items and isinstance(items[0], CoverReport)):
        return canonical_json(covers_to_json(items))
    if kind == EXPLANATIONS or (
        kind is None and items and isinstance(items[0], Explanation)
    ):
        return canonical_json(explanations_to_json(items))
    if kind is None:
        raise ValueError("cannot infer the report kind from an empty sequence")
    raise ValueError(f"unknown report kind {kind!r}")


def parse_report(text: str):
    """Rebuild an engine output from its canonical document."""
    doc = json.loads(text, parse_float=Fraction)
    kind = doc.get("kind")
    if kind == RANKING:
        scale = CertaintyScale(tuple(parse_level(v) for v in doc["scale"]))
        return PlausibilityRanking(
            scale,
            tuple(
                RankingEntry(tuple(e["disorders"]), parse_level(e["level"]))
                for e in doc["entries"]
            ),
        )
    if kind == COVERS:
        return tuple(
            CoverReport(
                subset=tuple(r["subset"]),
                is_cover=r["is_cover"],
                relevant=r["relevant"],
                irredundant=r["irredundant"],
                minimum=r["minimum"],
            )
            for r in doc["reports"]
        )
    if kind == EXPLANATIONS:
        return tuple(
            Explanation(tuple(e["disorders"]), e["mode"], e["cardinality"])
            for e in doc["entries"]
        )
    if kind == BREAKDOWN:
        return PlausibilityBreakdown(
            tuple(doc["disorders"]),
            parse_level(doc["level"]),
            parse_level(doc["certain_vs_absent"]),
            parse_level(doc["excluded_vs_present"]),
            tuple(
                ConflictWitness(
                    w["manifestation"],
                    w["term"],
                    parse_level(w["profile_level"]),
                    parse_level(w["observed_level"]),
                    parse_level(w["overlap"]),
                )
                for w in doc["conflicts"]
            ),
        )
    raise ValueError(f"unknown report kind {kind!r}")
