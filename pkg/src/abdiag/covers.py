"""Cover taxonomy over the may-cause relation.

When knowledge only says which manifestations a disorder certainly rules
out, the honest relation left is "may cause": everything not ruled out.
A disorder set covers the findings when its may-cause sets jointly reach
every observed manifestation.  Covers are graded by parsimony: relevant
(every member pulls weight), irredundant (no member can be dropped) and
minimum (smallest possible).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import KnowledgeBase
from .crisp import CrispObservation
from .errors import (
    ModeError,
    UnknownDisorderError,
    UnknownManifestationError,
    ValidationError,
)

_ONE = Fraction(1)


@dataclass(frozen=True)
class CausalRelation:
    """Which manifestations each disorder may cause.

    Derived from a knowledge base by complementing the excluded parts:
    d may cause m unless it certainly rules m out.
    """

    disorders: tuple[str, ...]
    manifestations: tuple[str, ...]
    possible: dict[str, frozenset[str]]

    def __post_init__(self) -> None:
        disorders = tuple(self.disorders)
        manifestations = tuple(self.manifestations)
        known = frozenset(manifestations)
        table: dict[str, frozenset[str]] = {}
        for d, reach in self.possible.items():
            if d not in disorders:
                raise UnknownDisorderError(f"relation row for unknown disorder {d!r}")
            strays = frozenset(reach) - known
            if strays:
                raise UnknownManifestationError(
                    f"relation row {d!r} reaches unknown manifestations "
                    f"{sorted(strays)}"
                )
            table[d] = frozenset(reach)
        for d in disorders:
            table.setdefault(d, frozenset())
        object.__setattr__(self, "disorders", disorders)
        object.__setattr__(self, "manifestations", manifestations)
        object.__setattr__(self, "possible", table)

    @classmethod
    def from_kb(cls, kb: KnowledgeBase) -> "CausalRelation":
        possible = {
            d: frozenset(
                m
                for m in kb.manifestations
                if kb.profile(d).excluded.grade(m) < _ONE
            )
            for d in kb.disorders()
        }
        return cls(kb.disorders(), kb.manifestations, possible)

    def reach(self, disorder: str) -> frozenset[str]:
        try:
            return self.possible[disorder]
        except KeyError:
            raise UnknownDisorderError(f"unknown disorder {disorder!r}") from None


@dataclass(frozen=True)
class CoverReport:
    """One covering subset with its parsimony grades.

    The flags are nested: a minimum cover is irredundant, an irredundant
    cover is relevant, and all of them cover.
    """

    subset: tuple[str, ...]
    is_cover: bool
    relevant: bool
    irredundant: bool
    minimum: bool

    @property
    def cardinality(self) -> int:
        return len(self.subset)


def _check_target(rel: CausalRelation, present: Iterable[str]) -> frozenset[str]:
    target = frozenset(present)
    strays = target - frozenset(rel.manifestations)
    if strays:
        raise UnknownManifestationError(
            f"observation mentions unknown manifestations {sorted(strays)}"
        )
    return target


def is_cover(
    rel: CausalRelation, disorders: Iterable[str], present: Iterable[str]
) -> bool:
    """True when the subset's may-cause sets jointly reach every finding."""
    target = _check_target(rel, present)
    union: frozenset[str] = frozenset()
    for d in set(disorders):
        union |= rel.reach(d)
    return target <= union


def classify_covers(
    rel: CausalRelation,
    present: Iterable[str],
    max_card: int | None = None,
    relevant_only: bool = False,
) -> tuple[CoverReport, ...]:
    """Every cover up to ``max_card``, flagged by parsimony grade.

    ``relevant_only`` restricts the search to disorders that may cause at
    least one finding; covers containing an idle disorder are redundant by
    construction, so the restriction loses no irredundant or minimum
    cover, only bulk.
    """
    target = _check_target(rel, present)
    if max_card is None:
        max_card = len(rel.disorders)
    if max_card < 0:
        raise ValidationError("max_card must be at least 0")
    pool = sorted(rel.disorders)
    if relevant_only and target:
        pool = [d for d in pool if rel.possible[d] & target]
    pulls_weight = {d: bool(rel.possible[d] & target) for d in pool}
    reports: list[CoverReport] = []
    minimum_card: int | None = None
    covers_below: set[frozenset[str]] = set()
    frontier: list[tuple[int, tuple[str, ...], frozenset[str]]] = [(-1, (), frozenset())]
    for card in range(0, max_card + 1):
        if card > 0:
            frontier = [
                (j, members + (pool[j],), union | rel.possible[pool[j]])
                for i, members, union in frontier
                for j in range(i + 1, len(pool))
            ]
        tier_covers: set[frozenset[str]] = set()
        for _, members, union in frontier:
            if not target <= union:
                continue
            key = frozenset(members)
            tier_covers.add(key)
            if minimum_card is None:
                minimum_card = card
            # a proper covering subset, if any, shows up one member down
            irredundant = not any(key - {d} in covers_below for d in members)
            reports.append(
                CoverReport(
                    subset=members,
                    is_cover=True,
                    relevant=all(pulls_weight[d] for d in members),
                    irredundant=irredundant,
                    minimum=card == minimum_card,
                )
            )
        covers_below = tier_covers
        if not frontier:
            break
    reports.sort(key=lambda r: (r.cardinality, r.subset))
    return tuple(reports)


def extended_relevant(
    kb: KnowledgeBase,
    obs: CrispObservation,
    max_card: int | None = None,
) -> tuple[tuple[str, ...], ...]:
    """Covering subsets where every member speaks to both evidence sides.

    A member must possibly cause something seen and possibly lack
    something missing; either requirement goes vacuous when its side of
    the observation is empty, which collapses the whole notion to plain
    relevant covers when nothing is reported absent.
    """
    if not kb.is_crisp():
        raise ModeError("cover analysis needs a crisp knowledge base")
    rel = CausalRelation.from_kb(kb)
    target = _check_target(rel, obs.present)
    strays = obs.absent - frozenset(rel.manifestations)
    if strays:
        raise UnknownManifestationError(
            f"observation mentions unknown manifestations {sorted(strays)}"
        )
    if max_card is None:
        max_card = len(rel.disorders)
    if max_card < 0:
        raise ValidationError("max_card must be at least 0")
    may_lack = {
        d: frozenset(
            m for m in kb.manifestations if kb.profile(d).certain.grade(m) < _ONE
        )
        for d in kb.disorders()
    }
    pool = sorted(rel.disorders)
    if target:
        pool = [d for d in pool if rel.possible[d] & target]
    if obs.absent:
        pool = [d for d in pool if may_lack[d] & obs.absent]
    found: list[tuple[str, ...]] = []
    frontier: list[tuple[int, tuple[str, ...], frozenset[str]]] = [(-1, (), frozenset())]
    for card in range(0, max_card + 1):
        if card > 0:
            frontier = [
                (j, members + (pool[j],), union | rel.possible[pool[j]])
                for i, members, union in frontier
                for j in range(i + 1, len(pool))
            ]
        for _, members, union in frontier:
            if target <= union:
                found.append(members)
        if not frontier:
            break
    found.sort(key=lambda s: (len(s), s))
    return tuple(found)
