"""Graded diagnosis: rank disorders by how well evidence tolerates them.

A disorder is demoted to the extent that what it certainly causes overlaps
what is certainly absent, or what it certainly rules out overlaps what is
certainly present.  The one-complement of the worse of those two overlaps
is the disorder's plausibility.  Everything stays on the knowledge base's
ordinal chain: min, max and mirror-negation only, so a plausibility is
always traceable to specific grades in the inputs.

The crisp engines are the two-level special case; with richer chains the
ranking separates disorders a yes/no screening would lump together.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .core import (
    EXPLICIT,
    LEVEL_ZERO,
    CertaintyScale,
    KnowledgeBase,
    Level,
    Observation,
    TwofoldSet,
    combine_profiles,
    consistency,
)
from .errors import (
    LevelNotOnScaleError,
    UniverseMismatchError,
    ValidationError,
)

CERTAIN_VS_ABSENT = "certain-vs-absent"
EXCLUDED_VS_PRESENT = "excluded-vs-present"


@dataclass(frozen=True)
class RankingEntry:
    """One disorder set with its plausibility level."""

    disorders: tuple[str, ...]
    level: Level

    @property
    def cardinality(self) -> int:
        return len(self.disorders)


@dataclass(frozen=True)
class PlausibilityRanking:
    """Plausibility levels in display order.

    Sorted by level (most plausible first); ties go to the smaller set,
    then to identifier order.  Both parsimony and plausibility matter and
    the model does not collapse them into one number, so the sort is a
    presentation default, not a verdict.
    """

    scale: CertaintyScale
    entries: tuple[RankingEntry, ...]

    @classmethod
    def ranked(
        cls,
        scale: CertaintyScale,
        pairs: Iterable[tuple[tuple[str, ...], Level]],
    ) -> "PlausibilityRanking":
        entries = [RankingEntry(members, level) for members, level in pairs]
        entries.sort(
            key=lambda e: (-scale.index(e.level), e.cardinality, e.disorders)
        )
        return cls(scale, tuple(entries))

    def __iter__(self) -> Iterator[RankingEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def level_of(self, disorders: Iterable[str]) -> Level:
        wanted = tuple(sorted(disorders))
        for entry in self.entries:
            if entry.disorders == wanted:
                return entry.level
        raise KeyError(f"no entry for {list(wanted)}")

    def core(self) -> frozenset[frozenset[str]]:
        """Entries at the top of the chain: the fully plausible sets."""
        return frozenset(
            frozenset(e.disorders) for e in self.entries if e.level == self.scale.top
        )

    def support(self) -> frozenset[frozenset[str]]:
        """Entries above the bottom: everything not ruled out outright."""
        return frozenset(
            frozenset(e.disorders) for e in self.entries if e.level > LEVEL_ZERO
        )


@dataclass(frozen=True)
class ConflictWitness:
    """One manifestation pulling a disorder set's plausibility down."""

    manifestation: str
    term: str
    profile_level: Level
    observed_level: Level
    overlap: Level


@dataclass(frozen=True)
class PlausibilityBreakdown:
    """The full audit trail behind one plausibility level.

    ``certain_vs_absent`` is the overlap between what the disorders
    certainly cause and what is certainly absent; ``excluded_vs_present``
    the overlap between what they rule out and what is certainly present.
    The level is the negation of the worse overlap, and ``conflicts``
    names every manifestation contributing a positive overlap.
    """

    disorders: tuple[str, ...]
    level: Level
    certain_vs_absent: Level
    excluded_vs_present: Level
    conflicts: tuple[ConflictWitness, ...]


# ---------------------------------------------------------------------------
# single-set evaluation
# ---------------------------------------------------------------------------


def _check_obs(kb: KnowledgeBase, obs: Observation) -> None:
    if obs.scale != kb.scale or obs.universe != kb.manifestations:
        raise UniverseMismatchError(
            "observation does not share the knowledge base's scale and universe"
        )


def _level_from_terms(
    scale: CertaintyScale, against_absent: Level, against_present: Level
) -> Level:
    return scale.negate(max(against_absent, against_present))


def _evaluate(effects: TwofoldSet, obs: Observation) -> Level:
    scale = effects.scale
    return _level_from_terms(
        scale,
        consistency(effects.positive, obs.absent),
        consistency(effects.negative, obs.present),
    )


def plausibility_single(kb: KnowledgeBase, obs: Observation, disorder: str) -> Level:
    """Plausibility of one disorder acting alone."""
    _check_obs(kb, obs)
    return _evaluate(kb.profile(disorder).effects, obs)


def rank_disorders(kb: KnowledgeBase, obs: Observation) -> PlausibilityRanking:
    """Every disorder taken singly, most plausible first."""
    _check_obs(kb, obs)
    return PlausibilityRanking.ranked(
        kb.scale,
        (
            ((d,), _evaluate(kb.profile(d).effects, obs))
            for d in kb.disorders()
        ),
    )


def plausibility_subset(
    kb: KnowledgeBase, obs: Observation, disorders: Iterable[str]
) -> Level:
    """Plausibility of a set of disorders acting together."""
    _check_obs(kb, obs)
    return _evaluate(combine_profiles(kb, disorders), obs)


def explain_plausibility(
    kb: KnowledgeBase, obs: Observation, disorders: Iterable[str]
) -> PlausibilityBreakdown:
    """Evaluate a disorder set and say which manifestations demote it."""
    _check_obs(kb, obs)
    members = tuple(sorted(set(disorders)))
    if len(members) == 1:
        effects = kb.profile(members[0]).effects
    else:
        effects = combine_profiles(kb, members)
    against_absent = consistency(effects.positive, obs.absent)
    against_present = consistency(effects.negative, obs.present)
    conflicts = [
        *_witnesses(CERTAIN_VS_ABSENT, effects.positive, obs.absent),
        *_witnesses(EXCLUDED_VS_PRESENT, effects.negative, obs.present),
    ]
    conflicts.sort(key=lambda w: (w.term, w.manifestation))
    return PlausibilityBreakdown(
        members,
        _level_from_terms(kb.scale, against_absent, against_present),
        against_absent,
        against_present,
        tuple(conflicts),
    )


def _witnesses(term, profile_side, observed_side) -> Iterator[ConflictWitness]:
    for m, grade in profile_side.grades.items():
        seen = observed_side.grades.get(m, LEVEL_ZERO)
        overlap = min(grade, seen)
        if overlap > LEVEL_ZERO:
            yield ConflictWitness(m, term, grade, seen, overlap)


# ---------------------------------------------------------------------------
# multi-disorder search
# ---------------------------------------------------------------------------


def search_multi(
    kb: KnowledgeBase,
    obs: Observation,
    threshold: Level,
    max_card: int,
) -> PlausibilityRanking:
    """Deepening search for disorder sets that explain the evidence well.

    Evaluates every admissible subset one cardinality at a time and stops
    at the end of the first tier containing a level at or above the
    threshold, keeping whole tiers because a subset's level is not
    monotone in its members (certain effects accumulate against the
    absent evidence while exclusions dissolve against the present one).
    Everything evaluated is returned, so near-misses stay visible.
    """
    _check_obs(kb, obs)
    threshold = Fraction(threshold)
    if threshold not in kb.scale:
        raise LevelNotOnScaleError(f"threshold {threshold} is not on the KB scale")
    if max_card < 1:
        raise ValidationError("max_card must be at least 1")
    pairs: list[tuple[tuple[str, ...], Level]] = []
    hit = False
    for tier in _subset_tiers(kb, max_card):
        for members, effects in tier:
            if not kb.is_admissible(members):
                continue
            level = _evaluate_parts(kb.scale, effects, obs)
            pairs.append((members, level))
            if level >= threshold:
                hit = True
        if hit:
            break
    return PlausibilityRanking.ranked(kb.scale, pairs)


Parts = tuple[Mapping[str, Level], Mapping[str, Level]]


def _evaluate_parts(scale: CertaintyScale, parts: Parts, obs: Observation) -> Level:
    pos, neg = parts
    return _level_from_terms(
        scale,
        _overlap(pos, obs.absent.grades),
        _overlap(neg, obs.present.grades),
    )


def _overlap(f: Mapping[str, Level], g: Mapping[str, Level]) -> Level:
    if len(g) < len(f):
        f, g = g, f
    best = LEVEL_ZERO
    for m, a in f.items():
        b = g.get(m, LEVEL_ZERO)
        if a < b:
            b = a
        if b > best:
            best = b
    return best


def _subset_tiers(
    kb: KnowledgeBase, max_card: int
) -> Iterator[list[tuple[tuple[str, ...], Parts]]]:
    """Subsets by cardinality with their combined certain/excluded grades."""
    if kb.composition == EXPLICIT:
        yield from _declared_tiers(kb, max_card)
        return
    order = sorted(kb.disorders())
    pos = {d: kb.profile(d).certain.grades for d in order}
    neg = {d: kb.profile(d).excluded.grades for d in order}
    frontier = [(i, (d,), pos[d], neg[d]) for i, d in enumerate(order)]
    yield [(members, (p, n)) for _, members, p, n in frontier]
    for _ in range(1, max_card):
        grown = []
        for i, members, p, n in frontier:
            for j in range(i + 1, len(order)):
                d = order[j]
                wider = dict(p)
                for m, g in pos[d].items():
                    if g > wider.get(m, LEVEL_ZERO):
                        wider[m] = g
                narrower = {
                    m: min(g, n[m]) for m, g in neg[d].items() if m in n
                }
                grown.append((j, members + (d,), wider, narrower))
        if not grown:
            return
        yield [(members, (p, n)) for _, members, p, n in grown]
        frontier = grown


def _declared_tiers(
    kb: KnowledgeBase, max_card: int
) -> Iterator[list[tuple[tuple[str, ...], Parts]]]:
    """Under explicit composition only declared subsets are searchable."""
    if kb.admissible is not None:
        pool = set(kb.admissible)
    else:
        pool = {frozenset((d,)) for d in kb.disorders()}
        pool.update(kb.multi_profiles)
    by_card: dict[int, list[frozenset[str]]] = {}
    for subset in pool:
        if subset and len(subset) <= max_card:
            by_card.setdefault(len(subset), []).append(subset)
    for card in range(1, max_card + 1):
        tier = []
        for subset in sorted(by_card.get(card, []), key=sorted):
            effects = combine_profiles(kb, subset)
            tier.append(
                (
                    tuple(sorted(subset)),
                    (effects.positive.grades, effects.negative.grades),
                )
            )
        yield tier
