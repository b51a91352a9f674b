"""Yes/no diagnosis: exact explanation and compatibility screening.

Two regimes over crisp knowledge bases.  When every disorder's effects are
fully known (the excluded part is exactly the rest of the universe), a
disorder set explains the observations iff its effects match them exactly.
When knowledge is incomplete, exactness is unattainable and diagnosis
retreats to compatibility: nothing certainly caused may be certainly
absent, and nothing certainly ruled out may be certainly present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .core import EXPLICIT, KnowledgeBase, combine_profiles
from .errors import ModeError, UnknownManifestationError, ValidationError

COMPLETE = "complete"
INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class CrispObservation:
    """Manifestations seen and manifestations checked-and-missing.

    ``absent`` is evidence in its own right, not the complement of
    ``present``: anything in neither set simply has not been looked at.
    """

    present: frozenset[str]
    absent: frozenset[str]

    def __post_init__(self) -> None:
        present = frozenset(self.present)
        absent = frozenset(self.absent)
        overlap = present & absent
        if overlap:
            listed = ", ".join(sorted(overlap))
            raise ValidationError(
                f"manifestations reported both present and absent: {listed}"
            )
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "absent", absent)

    @classmethod
    def fully_informed(
        cls, universe: Iterable[str], present: Iterable[str]
    ) -> "CrispObservation":
        """Observation where everything unseen is known absent."""
        present = frozenset(present)
        return cls(present, frozenset(universe) - present)

    def swapped(self) -> "CrispObservation":
        return CrispObservation(self.absent, self.present)


@dataclass(frozen=True)
class Explanation:
    """One disorder subset accounting for the observations."""

    disorders: tuple[str, ...]
    mode: str
    cardinality: int

    @classmethod
    def of(cls, members: Iterable[str], mode: str) -> "Explanation":
        ordered = tuple(sorted(members))
        return cls(ordered, mode, len(ordered))


# ---------------------------------------------------------------------------
# knowledge base views
# ---------------------------------------------------------------------------


def _require_crisp(kb: KnowledgeBase) -> None:
    if not kb.is_crisp():
        raise ModeError("this engine needs a crisp knowledge base (grades 0 or 1)")


def _require_complete(kb: KnowledgeBase) -> None:
    if not kb.is_complete():
        raise ModeError(
            "this engine needs a fully informed knowledge base "
            "(excluded part = complement of certain part)"
        )


def _check_known(kb: KnowledgeBase, names: Iterable[str]) -> None:
    strays = set(names) - set(kb.manifestations)
    if strays:
        raise UnknownManifestationError(
            f"observation mentions unknown manifestations {sorted(strays)}"
        )


def _caused(kb: KnowledgeBase) -> dict[str, frozenset[str]]:
    return {d: kb.profile(d).certain.support() for d in kb.disorders()}


def _ruled_out(kb: KnowledgeBase) -> dict[str, frozenset[str]]:
    return {d: kb.profile(d).excluded.support() for d in kb.disorders()}


# ---------------------------------------------------------------------------
# completely informed model
# ---------------------------------------------------------------------------


def diagnose_complete(kb: KnowledgeBase, present: Iterable[str]) -> frozenset[str]:
    """Disorders that alone account exactly for everything observed."""
    _require_complete(kb)
    target = frozenset(present)
    _check_known(kb, target)
    return frozenset(d for d, m in _caused(kb).items() if m == target)


def partial_explainers(kb: KnowledgeBase, present: Iterable[str]) -> frozenset[str]:
    """Disorders whose every effect was observed (they explain part of it).

    Always a superset of ``diagnose_complete``: exact matches in
    particular produce nothing outside the observations.
    """
    _require_complete(kb)
    target = frozenset(present)
    _check_known(kb, target)
    return frozenset(d for d, m in _caused(kb).items() if m <= target)


def explainer_subsets_complete(
    kb: KnowledgeBase,
    present: Iterable[str],
    max_card: int,
    exhaustive: bool = False,
) -> tuple[Explanation, ...]:
    """Disorder subsets whose joint effects equal the observed set.

    Searches by growing cardinality; by default stops at the first
    cardinality producing matches (smaller subsets being the more
    plausible), with ``exhaustive`` continuing up to ``max_card``.
    """
    _require_complete(kb)
    target = frozenset(present)
    _check_known(kb, target)
    return _subset_search(
        kb,
        max_card,
        mode=COMPLETE,
        keep_prefix=lambda pos: pos <= target,
        accept=lambda pos, neg: pos == target,
        exhaustive=exhaustive,
    )


# ---------------------------------------------------------------------------
# incomplete model
# ---------------------------------------------------------------------------


def _compatible(
    pos: frozenset[str], neg: frozenset[str], obs: CrispObservation
) -> bool:
    return pos.isdisjoint(obs.absent) and neg.isdisjoint(obs.present)


def diagnose_incomplete(
    kb: KnowledgeBase, obs: CrispObservation
) -> frozenset[str]:
    """Disorders not contradicted by the evidence.

    A disorder survives when none of its certain effects is certainly
    absent and none of its certainly ruled-out manifestations is certainly
    present.  A disorder nothing is known about survives any observation.
    """
    _require_crisp(kb)
    _check_known(kb, obs.present | obs.absent)
    ruled_out = _ruled_out(kb)
    return frozenset(
        d
        for d, pos in _caused(kb).items()
        if _compatible(pos, ruled_out[d], obs)
    )


def explainer_subsets_incomplete(
    kb: KnowledgeBase,
    obs: CrispObservation,
    max_card: int,
    exhaustive: bool = False,
) -> tuple[Explanation, ...]:
    """Disorder subsets whose combined effects survive both screenings.

    Under additive composition the certain side only grows with the
    subset, so a subset already touching the absent evidence is pruned
    with all its supersets; the exclusion side shrinks and is checked on
    each candidate individually.
    """
    _require_crisp(kb)
    _check_known(kb, obs.present | obs.absent)
    return _subset_search(
        kb,
        max_card,
        mode=INCOMPLETE,
        keep_prefix=lambda pos: pos.isdisjoint(obs.absent),
        accept=lambda pos, neg: _compatible(pos, neg, obs),
        exhaustive=exhaustive,
    )


# ---------------------------------------------------------------------------
# subset enumeration
# ---------------------------------------------------------------------------


def _subset_search(
    kb: KnowledgeBase,
    max_card: int,
    mode: str,
    keep_prefix: Callable[[frozenset[str]], bool],
    accept: Callable[[frozenset[str], frozenset[str]], bool],
    exhaustive: bool,
) -> tuple[Explanation, ...]:
    if max_card < 1:
        raise ValidationError("max_card must be at least 1")
    if kb.composition == EXPLICIT:
        tiers = _explicit_tiers(kb, max_card)
    else:
        tiers = _additive_tiers(kb, max_card, keep_prefix)
    found: list[Explanation] = []
    for tier in tiers:
        hits = [
            Explanation.of(members, mode)
            for members, pos, neg in tier
            if kb.is_admissible(members) and accept(pos, neg)
        ]
        found.extend(sorted(hits, key=lambda e: e.disorders))
        if found and not exhaustive:
            break
    return tuple(found)


def _additive_tiers(
    kb: KnowledgeBase,
    max_card: int,
    keep_prefix: Callable[[frozenset[str]], bool],
) -> Iterator[list[tuple[tuple[str, ...], frozenset[str], frozenset[str]]]]:
    """Candidate subsets tier by tier (cardinality 1, 2, ...).

    A prefix failing ``keep_prefix`` on its certain side is dropped with
    every extension; correctness relies on the certain side being
    monotone under additive combination.
    """
    order = sorted(kb.disorders())
    caused = _caused(kb)
    ruled_out = _ruled_out(kb)
    # frontier rows: (last index, members, combined certain, combined excluded)
    frontier = [
        (i, (d,), caused[d], ruled_out[d])
        for i, d in enumerate(order)
        if keep_prefix(caused[d])
    ]
    yield [(members, pos, neg) for _, members, pos, neg in frontier]
    for _ in range(1, max_card):
        grown = []
        for i, members, pos, neg in frontier:
            for j in range(i + 1, len(order)):
                d = order[j]
                wider = pos | caused[d]
                if keep_prefix(wider):
                    grown.append((j, members + (d,), wider, neg & ruled_out[d]))
        yield [(members, pos, neg) for _, members, pos, neg in grown]
        frontier = grown
        if not frontier:
            return


def _explicit_tiers(
    kb: KnowledgeBase, max_card: int
) -> Iterator[list[tuple[tuple[str, ...], frozenset[str], frozenset[str]]]]:
    """Candidates under explicit composition: only declared subsets exist.

    With an admissibility list the candidates are exactly its members;
    otherwise singletons plus the subsets given their own joint profile.
    """
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
        for subset in by_card.get(card, []):
            effects = combine_profiles(kb, subset)
            tier.append(
                (
                    tuple(sorted(subset)),
                    effects.positive.support(),
                    effects.negative.support(),
                )
            )
        yield tier
