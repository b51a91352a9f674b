"""Seeded generators shared by the acceptance sweeps.

Everything takes an explicit ``random.Random`` so runs are reproducible;
the acceptance tests fix their seeds and never fetch global randomness.
"""

import random
from fractions import Fraction as F
from itertools import combinations

from abdiag.core import (
    CertaintyScale,
    DisorderProfile,
    FuzzySet,
    KnowledgeBase,
    TwofoldSet,
)
from abdiag.covers import CausalRelation, CoverReport

L2 = CertaintyScale.binary()
L5 = CertaintyScale.default()
SOFT = (F(1, 4), F(1, 2), F(3, 4))


def profile(d, universe, certain, excluded, scale):
    return DisorderProfile(
        d,
        TwofoldSet(
            FuzzySet(scale, universe, certain),
            FuzzySet(scale, universe, excluded),
        ),
    )


def crisp_profile(d, universe, caused, ruled_out, scale=L2):
    return profile(
        d,
        universe,
        {m: F(1) for m in caused},
        {m: F(1) for m in ruled_out},
        scale,
    )


def universe_of(rng: random.Random, max_size: int, min_size: int = 1):
    return tuple(f"m{i}" for i in range(rng.randint(min_size, max_size)))


def subset_of(rng: random.Random, pool):
    return frozenset(m for m in pool if rng.random() < 0.5)


def complete_crisp_kb(rng: random.Random, max_d=8, max_m=10, d_count=None):
    """Fully informed KB: each disorder causes its set and excludes the rest.

    Returns the KB and the plain effect-set map it was built from.
    """
    universe = universe_of(rng, max_m)
    effects = {}
    profiles = []
    for i in range(d_count or rng.randint(1, max_d)):
        d = f"d{i}"
        caused = subset_of(rng, universe)
        effects[d] = caused
        profiles.append(crisp_profile(d, universe, caused, set(universe) - caused))
    return KnowledgeBase(L2, universe, tuple(profiles)), effects


def incomplete_crisp_kb(rng: random.Random, max_d=6, max_m=8, d_count=None):
    """Crisp KB with possibly-partial knowledge: pos/neg disjoint, union free."""
    universe = universe_of(rng, max_m)
    profiles = []
    for i in range(d_count or rng.randint(1, max_d)):
        d = f"d{i}"
        caused = subset_of(rng, universe)
        ruled_out = subset_of(rng, [m for m in universe if m not in caused])
        profiles.append(crisp_profile(d, universe, caused, ruled_out))
    return KnowledgeBase(L2, universe, tuple(profiles))


def graded_kb(rng: random.Random, max_d=6, max_m=8, d_count=None):
    """KB with grades drawn from the 5-level chain on disjoint supports."""
    universe = universe_of(rng, max_m)
    profiles = []
    for i in range(d_count or rng.randint(1, max_d)):
        d = f"d{i}"
        caused = subset_of(rng, universe)
        ruled_out = subset_of(rng, [m for m in universe if m not in caused])
        certain = {m: rng.choice(SOFT + (F(1),)) for m in caused}
        excluded = {m: rng.choice(SOFT + (F(1),)) for m in ruled_out}
        profiles.append(profile(d, universe, certain, excluded, L5))
    return KnowledgeBase(L5, universe, tuple(profiles))


def crisp_observation_sets(rng: random.Random, universe):
    """Disjoint present/absent subsets, leaving some manifestations unseen."""
    present, absent = set(), set()
    for m in universe:
        roll = rng.random()
        if roll < 1 / 3:
            present.add(m)
        elif roll < 2 / 3:
            absent.add(m)
    return frozenset(present), frozenset(absent)


def graded_observation(rng: random.Random, kb: KnowledgeBase):
    present, absent = {}, {}
    for m in kb.manifestations:
        roll = rng.random()
        if roll < 1 / 3:
            present[m] = rng.choice(SOFT + (F(1),))
        elif roll < 2 / 3:
            absent[m] = rng.choice(SOFT + (F(1),))
    return kb.observation(present=present, absent=absent)


def aligned_fuzzy_setup(rng: random.Random, max_d=4, max_m=4):
    """Graded KB whose profiles sharpen an underlying crisp description.

    The certain part's support is the crisp effect set and its core the
    sure effects; mirrored for the excluded part on the complement.
    Returns (kb, effect sets, (sure caused, sure ruled out), present, absent).
    """
    universe = universe_of(rng, max_m, min_size=2)
    profiles = []
    crisp_effects = {}
    sure = {}
    for i in range(rng.randint(1, max_d)):
        d = f"d{i}"
        effect_set = subset_of(rng, universe)
        sure_caused = subset_of(rng, effect_set)
        rest = [m for m in universe if m not in effect_set]
        sure_ruled_out = subset_of(rng, rest)
        certain = {
            m: F(1) if m in sure_caused else rng.choice(SOFT) for m in effect_set
        }
        excluded = {
            m: F(1) if m in sure_ruled_out else rng.choice(SOFT) for m in rest
        }
        profiles.append(profile(d, universe, certain, excluded, L5))
        crisp_effects[d] = effect_set
        sure[d] = (sure_caused, sure_ruled_out)
    kb = KnowledgeBase(L5, universe, tuple(profiles))
    present, absent = crisp_observation_sets(rng, universe)
    return kb, crisp_effects, sure, present, absent


def random_relation(rng: random.Random, max_d=8, max_m=8):
    universe = universe_of(rng, max_m)
    disorders = tuple(f"d{i}" for i in range(rng.randint(1, max_d)))
    possible = {d: subset_of(rng, universe) for d in disorders}
    return CausalRelation(disorders, universe, possible)


def brute_force_cover_reports(rel: CausalRelation, target, max_card):
    """Oracle over all subsets: flags computed from first principles."""
    target = frozenset(target)
    disorders = sorted(rel.disorders)
    all_covers = set()
    for k in range(len(disorders) + 1):
        for sub in combinations(disorders, k):
            union = frozenset().union(*(rel.possible[d] for d in sub)) if sub else frozenset()
            if target <= union:
                all_covers.add(frozenset(sub))
    min_card = min((len(c) for c in all_covers), default=None)
    reports = []
    for k in range(max_card + 1):
        for sub in combinations(disorders, k):
            key = frozenset(sub)
            if key not in all_covers:
                continue
            reports.append(
                CoverReport(
                    subset=tuple(sub),
                    is_cover=True,
                    relevant=all(rel.possible[d] & target for d in sub),
                    irredundant=not any(c < key for c in all_covers),
                    minimum=len(sub) == min_card,
                )
            )
    return tuple(reports)


def all_fuzzy_sets(scale: CertaintyScale, universe):
    """Every fuzzy set on the universe with grades from the scale."""
    sets = [{}]
    for m in universe:
        sets = [
            {**grades, m: level} if level else grades
            for grades in sets
            for level in scale.levels
        ]
    return [FuzzySet(scale, universe, grades) for grades in sets]
