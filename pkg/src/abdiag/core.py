"""Ordinal certainty algebra: scales, fuzzy sets, twofold descriptions, profiles.

A knowledge base relates disorders to manifestations through twofold
descriptions: the manifestations a disorder more or less certainly causes
(its certain part) and the ones it more or less certainly rules out (its
excluded part).  Certainty is qualitative: grades live on a finite chain
closed under min, max and an order-reversing negation, so no arithmetic
beyond comparisons ever happens.

Everything in this module is immutable after construction and every
operation is pure, so values can be shared freely between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    InadmissibleAssociationError,
    LevelNotOnScaleError,
    MissingProfileError,
    TwofoldViolationError,
    UniverseMismatchError,
    UnknownDisorderError,
    UnknownManifestationError,
    ValidationError,
)

Level = Fraction

LEVEL_ZERO = Fraction(0)
LEVEL_ONE = Fraction(1)

ADDITIVE = "additive"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class CertaintyScale:
    """Finite, totally ordered chain of certainty levels from 0 to 1.

    Negation mirrors indices (level i maps to level n-1-i), which makes it
    involutive and order reversing on any chain, symmetric or not.  All
    min/max/negation performed by the engines stays inside the chain.
    """

    levels: tuple[Level, ...]
    _index: dict[Level, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        levels = tuple(Fraction(v) for v in self.levels)
        if len(levels) < 2:
            raise ValidationError("a certainty scale needs at least two levels")
        for lo, hi in zip(levels, levels[1:]):
            if lo >= hi:
                raise ValidationError(
                    f"scale levels must be strictly increasing, got {lo} before {hi}"
                )
        if levels[0] != LEVEL_ZERO or levels[-1] != LEVEL_ONE:
            raise ValidationError("a certainty scale must start at 0 and end at 1")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "_index", {lv: i for i, lv in enumerate(levels)})

    @classmethod
    def default(cls) -> "CertaintyScale":
        """The five-level chain 0 < 1/4 < 1/2 < 3/4 < 1."""
        return cls(tuple(Fraction(i, 4) for i in range(5)))

    @classmethod
    def binary(cls) -> "CertaintyScale":
        """The two-level chain 0 < 1 (crisp degeneration)."""
        return cls((LEVEL_ZERO, LEVEL_ONE))

    def __len__(self) -> int:
        return len(self.levels)

    def __contains__(self, level: object) -> bool:
        return level in self._index

    def index(self, level: Level) -> int:
        try:
            return self._index[level]
        except KeyError:
            raise LevelNotOnScaleError(
                f"{level} is not a level of the scale {list(self.levels)}"
            ) from None

    def negate(self, level: Level) -> Level:
        """Order-reversing involution: the mirror level across the chain."""
        return self.levels[len(self.levels) - 1 - self.index(level)]

    @property
    def bottom(self) -> Level:
        return self.levels[0]

    @property
    def top(self) -> Level:
        return self.levels[-1]


@dataclass(frozen=True)
class FuzzySet:
    """Graded set of manifestations over a fixed universe and scale.

    Grades are stored sparsely; a manifestation without an entry sits at
    level 0.  Zero grades are dropped on construction so equality is
    structural equality of the non-zero graph.
    """

    scale: CertaintyScale
    universe: tuple[str, ...]
    grades: dict[str, Level]
    _members: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        universe = tuple(self.universe)
        members = frozenset(universe)
        cleaned: dict[str, Level] = {}
        for name, raw in self.grades.items():
            grade = Fraction(raw)
            if name not in members:
                raise UnknownManifestationError(
                    f"{name!r} is graded but not part of the universe"
                )
            if grade not in self.scale:
                raise LevelNotOnScaleError(
                    f"grade {grade} for {name!r} is not on the scale"
                )
            if grade != LEVEL_ZERO:
                cleaned[name] = grade
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "grades", cleaned)
        object.__setattr__(self, "_members", members)

    @classmethod
    def empty(cls, scale: CertaintyScale, universe: Iterable[str]) -> "FuzzySet":
        return cls(scale, tuple(universe), {})

    @classmethod
    def from_crisp(
        cls, scale: CertaintyScale, universe: Iterable[str], members: Iterable[str]
    ) -> "FuzzySet":
        """Characteristic function of a crisp set (grade 1 on members)."""
        return cls(scale, tuple(universe), {m: LEVEL_ONE for m in members})

    def grade(self, manifestation: str) -> Level:
        if manifestation not in self._members:
            raise UnknownManifestationError(
                f"{manifestation!r} is not part of the universe"
            )
        return self.grades.get(manifestation, LEVEL_ZERO)

    def support(self) -> frozenset[str]:
        """Manifestations with any positive grade."""
        return frozenset(self.grades)

    def core(self) -> frozenset[str]:
        """Manifestations graded at the top of the chain."""
        return frozenset(m for m, g in self.grades.items() if g == LEVEL_ONE)

    def complement(self) -> "FuzzySet":
        """Pointwise negation over the whole universe."""
        return FuzzySet(
            self.scale,
            self.universe,
            {m: self.scale.negate(self.grades.get(m, LEVEL_ZERO)) for m in self.universe},
        )

    def is_empty(self) -> bool:
        return not self.grades

    def is_crisp(self) -> bool:
        """True when every grade sits at an endpoint of the chain."""
        return all(g == LEVEL_ONE for g in self.grades.values())

    def raise_to(self, manifestation: str, level: Level) -> "FuzzySet":
        """Copy with one grade replaced (a convenience for what-if tests)."""
        updated = dict(self.grades)
        updated[manifestation] = level
        return FuzzySet(self.scale, self.universe, updated)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        inner = ", ".join(f"{m}: {g}" for m, g in sorted(self.grades.items()))
        return f"FuzzySet({{{inner}}})"


def _check_compatible(f: FuzzySet, g: FuzzySet) -> None:
    if f.scale != g.scale:
        raise UniverseMismatchError("fuzzy sets use different certainty scales")
    if f.universe != g.universe:
        raise UniverseMismatchError("fuzzy sets range over different universes")


def consistency(f: FuzzySet, g: FuzzySet) -> Level:
    """Degree to which two graded sets overlap: sup of the pointwise min.

    Qualitative by construction: the result is 0 or one of the input grades.
    """
    _check_compatible(f, g)
    best = LEVEL_ZERO
    small, large = (f, g) if len(f.grades) <= len(g.grades) else (g, f)
    for name, grade in small.grades.items():
        other = large.grades.get(name, LEVEL_ZERO)
        overlap = min(grade, other)
        if overlap > best:
            best = overlap
    return best


def inclusion(f: FuzzySet, g: FuzzySet) -> Level:
    """Degree to which ``f`` lies inside ``g``: inf of max(neg(f), g).

    Equals 1 exactly when support(f) is contained in core(g); equals the
    negation of consistency(f, complement(g)) on every pair.
    """
    _check_compatible(f, g)
    worst = f.scale.top
    # Members outside support(f) contribute max(1, g) = 1 and never lower
    # the infimum, so only the support needs visiting.
    for name, grade in f.grades.items():
        term = max(f.scale.negate(grade), g.grades.get(name, LEVEL_ZERO))
        if term < worst:
            worst = term
    return worst


@dataclass(frozen=True)
class GradeConflict:
    """One manifestation graded both certainly present and certainly absent."""

    manifestation: str
    positive: Level
    negative: Level


def twofold_violations(
    positive: FuzzySet, negative: FuzzySet
) -> tuple[GradeConflict, ...]:
    """Manifestations where the two parts overlap (pointwise min above 0).

    An empty result certifies the pair as a valid twofold description,
    which is equivalent to support(positive) fitting inside the core of
    the complement of ``negative``.
    """
    _check_compatible(positive, negative)
    conflicts = []
    for name in sorted(positive.grades.keys() & negative.grades.keys()):
        conflicts.append(
            GradeConflict(name, positive.grades[name], negative.grades[name])
        )
    return tuple(conflicts)


@dataclass(frozen=True)
class TwofoldSet:
    """Pair of graded sets with disjoint supports: certain vs. excluded.

    The positive part collects what is more or less certainly in, the
    negative part what is more or less certainly out; everything else is
    simply unknown.  Construction rejects overlapping parts.
    """

    positive: FuzzySet
    negative: FuzzySet

    def __post_init__(self) -> None:
        conflicts = twofold_violations(self.positive, self.negative)
        if conflicts:
            raise TwofoldViolationError(conflicts)

    @classmethod
    def empty(cls, scale: CertaintyScale, universe: Iterable[str]) -> "TwofoldSet":
        blank = FuzzySet.empty(scale, universe)
        return cls(blank, blank)

    @property
    def scale(self) -> CertaintyScale:
        return self.positive.scale

    @property
    def universe(self) -> tuple[str, ...]:
        return self.positive.universe

    def possible(self) -> FuzzySet:
        """What is more or less possibly in: the complement of the excluded part."""
        return self.negative.complement()


def union_twofold(a: TwofoldSet, b: TwofoldSet) -> TwofoldSet:
    """Union of twofold descriptions: max of positives, min of negatives.

    Models non-interfering accumulation of effects: anything either source
    certainly produces is certainly produced, and only what both sources
    certainly exclude stays excluded.  Associative and commutative; the
    identity element is (empty positive, all-ones negative).
    """
    _check_compatible(a.positive, b.positive)
    pos = dict(a.positive.grades)
    for name, grade in b.positive.grades.items():
        if grade > pos.get(name, LEVEL_ZERO):
            pos[name] = grade
    neg = {
        name: min(a.negative.grades[name], b.negative.grades[name])
        for name in a.negative.grades.keys() & b.negative.grades.keys()
    }
    scale, universe = a.positive.scale, a.positive.universe
    return TwofoldSet(FuzzySet(scale, universe, pos), FuzzySet(scale, universe, neg))


@dataclass(frozen=True)
class DisorderProfile:
    """Causal description of a single disorder acting alone."""

    disorder: str
    effects: TwofoldSet

    @property
    def certain(self) -> FuzzySet:
        """Manifestations the disorder more or less certainly produces."""
        return self.effects.positive

    @property
    def excluded(self) -> FuzzySet:
        """Manifestations the disorder more or less certainly rules out."""
        return self.effects.negative

    def unknown(self) -> frozenset[str]:
        """Manifestations the profile says nothing about."""
        taken = self.certain.support() | self.excluded.support()
        return frozenset(self.effects.universe) - taken


@dataclass(frozen=True)
class Observation:
    """Evidence at hand: what is certainly seen and what is certainly not.

    The two parts cannot both grade the same manifestation above zero; a
    manifestation can be somewhat-certainly present or somewhat-certainly
    absent, never both.  Manifestations graded by neither part are simply
    not (yet) observed, which is the whole point of keeping ``absent``
    separate from "everything not in ``present``".
    """

    present: FuzzySet
    absent: FuzzySet

    def __post_init__(self) -> None:
        conflicts = twofold_violations(self.present, self.absent)
        if conflicts:
            raise TwofoldViolationError(conflicts)

    @classmethod
    def empty(cls, scale: CertaintyScale, universe: Iterable[str]) -> "Observation":
        blank = FuzzySet.empty(scale, universe)
        return cls(blank, blank)

    @property
    def scale(self) -> CertaintyScale:
        return self.present.scale

    @property
    def universe(self) -> tuple[str, ...]:
        return self.present.universe

    def is_crisp(self) -> bool:
        return self.present.is_crisp() and self.absent.is_crisp()


@dataclass(frozen=True)
class KnowledgeBase:
    """Universe, scale and per-disorder profiles, plus optional extras.

    ``multi_profiles`` assigns effects to specific disorder subsets for the
    case where joint effects are not the plain union of individual ones;
    it is consulted only under ``composition == "explicit"``.
    ``admissible`` restricts which disorder subsets may be considered to
    co-occur at all; ``None`` leaves every subset admissible.
    """

    scale: CertaintyScale
    manifestations: tuple[str, ...]
    profiles: tuple[DisorderProfile, ...]
    multi_profiles: dict[frozenset[str], TwofoldSet] = field(default_factory=dict)
    admissible: frozenset[frozenset[str]] | None = None
    composition: str = ADDITIVE
    _by_id: dict[str, DisorderProfile] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        manifestations = tuple(self.manifestations)
        if len(set(manifestations)) != len(manifestations):
            raise ValidationError("duplicate manifestation identifiers")
        profiles = tuple(self.profiles)
        by_id: dict[str, DisorderProfile] = {}
        for profile in profiles:
            if profile.disorder in by_id:
                raise ValidationError(f"duplicate disorder {profile.disorder!r}")
            if profile.effects.universe != manifestations:
                raise UniverseMismatchError(
                    f"profile {profile.disorder!r} ranges over a different universe"
                )
            if profile.effects.scale != self.scale:
                raise UniverseMismatchError(
                    f"profile {profile.disorder!r} uses a different scale"
                )
            by_id[profile.disorder] = profile
        if self.composition not in (ADDITIVE, EXPLICIT):
            raise ValidationError(f"unknown composition rule {self.composition!r}")
        multi = {frozenset(k): v for k, v in self.multi_profiles.items()}
        for members, effects in multi.items():
            if not members:
                raise ValidationError("multi-profile for the empty subset")
            strays = members - by_id.keys()
            if strays:
                raise UnknownDisorderError(
                    f"multi-profile references unknown disorders {sorted(strays)}"
                )
            if effects.universe != manifestations or effects.scale != self.scale:
                raise UniverseMismatchError(
                    f"multi-profile {sorted(members)} is incompatible with the base"
                )
        admissible = self.admissible
        if admissible is not None:
            admissible = frozenset(frozenset(s) for s in admissible)
            for subset in admissible:
                strays = subset - by_id.keys()
                if strays:
                    raise UnknownDisorderError(
                        f"admissible set references unknown disorders {sorted(strays)}"
                    )
        object.__setattr__(self, "manifestations", manifestations)
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "multi_profiles", multi)
        object.__setattr__(self, "admissible", admissible)
        object.__setattr__(self, "_by_id", by_id)

    def disorders(self) -> tuple[str, ...]:
        return tuple(p.disorder for p in self.profiles)

    def profile(self, disorder: str) -> DisorderProfile:
        try:
            return self._by_id[disorder]
        except KeyError:
            raise UnknownDisorderError(f"unknown disorder {disorder!r}") from None

    def fuzzy(self, grades: Mapping[str, Level] | None = None) -> FuzzySet:
        """Build a fuzzy set over this base's universe and scale."""
        return FuzzySet(self.scale, self.manifestations, dict(grades or {}))

    def observation(
        self,
        present: Mapping[str, Level] | None = None,
        absent: Mapping[str, Level] | None = None,
    ) -> Observation:
        return Observation(self.fuzzy(present), self.fuzzy(absent))

    def is_admissible(self, disorders: Iterable[str]) -> bool:
        if self.admissible is None:
            return True
        return frozenset(disorders) in self.admissible

    def is_crisp(self) -> bool:
        """Every grade in every profile sits at 0 or 1."""
        parts = [
            part
            for p in self.profiles
            for part in (p.certain, p.excluded)
        ]
        parts.extend(
            part
            for eff in self.multi_profiles.values()
            for part in (eff.positive, eff.negative)
        )
        return all(part.is_crisp() for part in parts)

    def is_complete(self) -> bool:
        """Crisp and fully informed: excluded part is exactly the rest."""
        if not self.is_crisp():
            return False
        full = frozenset(self.manifestations)
        return all(
            p.excluded.support() == full - p.certain.support() for p in self.profiles
        )


def combine_profiles(kb: KnowledgeBase, disorders: Iterable[str]) -> TwofoldSet:
    """Effects of a set of disorders acting together.

    Under the additive rule the parts combine as a twofold union (certain
    effects accumulate, exclusions must be unanimous); under the explicit
    rule the subset's declared profile is looked up instead.  Singletons
    always reduce to the member's own profile.
    """
    members = tuple(sorted(set(disorders)))
    if not members:
        raise ValidationError("cannot combine an empty set of disorders")
    for d in members:
        kb.profile(d)  # raises UnknownDisorderError early
    key = frozenset(members)
    if kb.admissible is not None and key not in kb.admissible:
        raise InadmissibleAssociationError(
            f"association {list(members)} is not admissible"
        )
    if kb.composition == EXPLICIT:
        declared = kb.multi_profiles.get(key)
        if declared is not None:
            return declared
        if len(members) == 1:
            return kb.profile(members[0]).effects
        raise MissingProfileError(
            f"no declared profile for the association {list(members)}"
        )
    combined = kb.profile(members[0]).effects
    for d in members[1:]:
        combined = union_twofold(combined, kb.profile(d).effects)
    return combined
