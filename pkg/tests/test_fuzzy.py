"""Tests for graded diagnosis: plausibility levels, ranking, subset search."""

from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abdiag.core import (
    CertaintyScale,
    DisorderProfile,
    FuzzySet,
    KnowledgeBase,
    Observation,
    TwofoldSet,
    inclusion,
)
from abdiag.crisp import CrispObservation, diagnose_incomplete
from abdiag.errors import (
    InadmissibleAssociationError,
    LevelNotOnScaleError,
    UnknownDisorderError,
    ValidationError,
)
from abdiag.fuzzy import (
    PlausibilityRanking,
    RankingEntry,
    explain_plausibility,
    plausibility_single,
    plausibility_subset,
    rank_disorders,
    search_multi,
)

L5 = CertaintyScale.default()
L2 = CertaintyScale.binary()
NONZERO = (F(1, 4), F(1, 2), F(3, 4), F(1))
SOFT = (F(1, 4), F(1, 2), F(3, 4))


def graded_profile(d, universe, certain, excluded, scale=L5):
    return DisorderProfile(
        d,
        TwofoldSet(
            FuzzySet(scale, universe, certain), FuzzySet(scale, universe, excluded)
        ),
    )


U4 = ("m1", "m2", "m3", "m4")


def demo_kb():
    return KnowledgeBase(
        L5,
        U4,
        (
            graded_profile("d1", U4, {"m1": F(1), "m2": F(3, 4)}, {"m3": F(1)}),
            graded_profile("d2", U4, {"m3": F(1, 2)}, {"m1": F(3, 4)}),
            graded_profile("d3", U4, {}, {}),
        ),
    )


def demo_obs(kb):
    return kb.observation(
        present={"m1": F(1), "m2": F(1, 2)}, absent={"m3": F(3, 4)}
    )


# ---------------------------------------------------------------------------
# single-disorder plausibility
# ---------------------------------------------------------------------------


class TestPlausibilitySingle:
    def test_untouched_disorder_fully_plausible(self):
        kb = demo_kb()
        assert plausibility_single(kb, demo_obs(kb), "d1") == F(1)

    def test_demoted_by_worse_overlap(self):
        kb = demo_kb()
        # certain m3 at 1/2 against absent m3 at 3/4 gives overlap 1/2;
        # excluded m1 at 3/4 against present m1 at 1 gives overlap 3/4
        assert plausibility_single(kb, demo_obs(kb), "d2") == F(1, 4)

    def test_ignorance_is_fully_plausible(self):
        kb = demo_kb()
        assert plausibility_single(kb, demo_obs(kb), "d3") == F(1)

    def test_unknown_disorder(self):
        kb = demo_kb()
        with pytest.raises(UnknownDisorderError):
            plausibility_single(kb, demo_obs(kb), "dx")

    def test_level_stays_on_scale(self):
        kb = demo_kb()
        obs = demo_obs(kb)
        for d in kb.disorders():
            assert plausibility_single(kb, obs, d) in L5


class TestRankDisorders:
    def test_demo_ranking(self):
        kb = demo_kb()
        ranking = rank_disorders(kb, demo_obs(kb))
        assert [(e.disorders, e.level) for e in ranking] == [
            (("d1",), F(1)),
            (("d3",), F(1)),
            (("d2",), F(1, 4)),
        ]

    def test_empty_observation_ranks_everything_top(self):
        kb = demo_kb()
        ranking = rank_disorders(kb, Observation.empty(L5, U4))
        assert all(e.level == F(1) for e in ranking)

    def test_two_level_scale_reproduces_crisp_screening(self):
        universe = ("m1", "m2", "m3")
        kb = KnowledgeBase(
            L2,
            universe,
            (
                graded_profile("d1", universe, {"m1": F(1)}, {"m3": F(1)}, L2),
                graded_profile("d2", universe, {"m3": F(1)}, {"m1": F(1)}, L2),
                graded_profile("d3", universe, {}, {}, L2),
            ),
        )
        obs = kb.observation(present={"m1": F(1)}, absent={"m3": F(1)})
        ranking = rank_disorders(kb, obs)
        crisp = diagnose_incomplete(
            kb, CrispObservation(frozenset({"m1"}), frozenset({"m3"}))
        )
        assert ranking.core() == {frozenset({d}) for d in crisp}
        assert all(e.level in (F(0), F(1)) for e in ranking)

    def test_core_and_support_of_ranking(self):
        kb = demo_kb()
        ranking = rank_disorders(kb, demo_obs(kb))
        assert ranking.core() == {frozenset({"d1"}), frozenset({"d3"})}
        assert ranking.support() == {
            frozenset({"d1"}),
            frozenset({"d2"}),
            frozenset({"d3"}),
        }

    def test_level_of(self):
        kb = demo_kb()
        ranking = rank_disorders(kb, demo_obs(kb))
        assert ranking.level_of(["d2"]) == F(1, 4)
        with pytest.raises(KeyError):
            ranking.level_of(["dx"])


# ---------------------------------------------------------------------------
# subsets
# ---------------------------------------------------------------------------


class TestPlausibilitySubset:
    def test_singleton_matches_single(self):
        kb = demo_kb()
        obs = demo_obs(kb)
        for d in kb.disorders():
            assert plausibility_subset(kb, obs, [d]) == plausibility_single(
                kb, obs, d
            )

    def test_pair_explains_jointly(self):
        kb = demo_kb()
        obs = kb.observation(present={"m1": F(1), "m3": F(1, 2)})
        # the pair certainly causes m3 (via d2) while neither excludes it:
        # d2's exclusion of m1 dissolves in the union
        assert plausibility_subset(kb, obs, ["d1", "d2"]) == F(1)

    def test_adding_ignorance_never_lowers(self):
        kb = demo_kb()
        observations = [
            demo_obs(kb),
            kb.observation(present={"m3": F(1)}, absent={"m1": F(1, 2)}),
            kb.observation(absent={"m1": F(1), "m2": F(1), "m3": F(1)}),
        ]
        for obs in observations:
            for base in (["d1"], ["d2"], ["d1", "d2"]):
                with_ignorant = plausibility_subset(kb, obs, base + ["d3"])
                assert with_ignorant >= plausibility_subset(kb, obs, base)

    def test_empty_subset_rejected(self):
        kb = demo_kb()
        with pytest.raises(ValidationError):
            plausibility_subset(kb, demo_obs(kb), [])

    def test_inadmissible_subset_rejected(self):
        kb = KnowledgeBase(
            L5,
            U4,
            demo_kb().profiles,
            admissible=frozenset({frozenset({"d1"})}),
        )
        with pytest.raises(InadmissibleAssociationError):
            plausibility_subset(kb, demo_obs(kb), ["d1", "d2"])


class TestExplainPlausibility:
    def test_demo_breakdown(self):
        kb = demo_kb()
        b = explain_plausibility(kb, demo_obs(kb), ["d2"])
        assert b.level == F(1, 4)
        assert b.certain_vs_absent == F(1, 2)
        assert b.excluded_vs_present == F(3, 4)
        assert [
            (w.manifestation, w.term, w.profile_level, w.observed_level, w.overlap)
            for w in b.conflicts
        ] == [
            ("m3", "certain-vs-absent", F(1, 2), F(3, 4), F(1, 2)),
            ("m1", "excluded-vs-present", F(3, 4), F(1), F(3, 4)),
        ]

    def test_clean_disorder_has_no_conflicts(self):
        kb = demo_kb()
        b = explain_plausibility(kb, demo_obs(kb), ["d1"])
        assert b.level == F(1)
        assert b.conflicts == ()
        assert b.certain_vs_absent == b.excluded_vs_present == F(0)

    def test_level_matches_terms(self):
        kb = demo_kb()
        obs = demo_obs(kb)
        for d in kb.disorders():
            b = explain_plausibility(kb, obs, [d])
            assert b.level == L5.negate(
                max(b.certain_vs_absent, b.excluded_vs_present)
            )
            assert b.level == plausibility_single(kb, obs, d)

    def test_subset_breakdown(self):
        kb = demo_kb()
        obs = kb.observation(present={"m1": F(1), "m3": F(1, 2)})
        b = explain_plausibility(kb, obs, ["d1", "d2"])
        assert b.disorders == ("d1", "d2")
        assert b.level == F(1)


# ---------------------------------------------------------------------------
# multi-disorder search
# ---------------------------------------------------------------------------


def entry_sets(ranking):
    return {frozenset(e.disorders) for e in ranking}


class TestSearchMulti:
    def test_stops_when_singleton_hits(self):
        kb = demo_kb()
        ranking = search_multi(kb, demo_obs(kb), threshold=F(1), max_card=3)
        assert all(e.cardinality == 1 for e in ranking)
        assert len(ranking) == 3

    def test_pair_beats_singletons(self):
        universe = ("m1", "m2")
        kb = KnowledgeBase(
            L5,
            universe,
            (
                graded_profile("da", universe, {"m1": F(1)}, {"m2": F(1)}),
                graded_profile("db", universe, {"m2": F(1)}, {"m1": F(1)}),
            ),
        )
        obs = kb.observation(present={"m1": F(1), "m2": F(1)})
        ranking = search_multi(kb, obs, threshold=F(1, 2), max_card=2)
        assert [(e.disorders, e.level) for e in ranking] == [
            (("da", "db"), F(1)),
            (("da",), F(0)),
            (("db",), F(0)),
        ]

    def test_unreachable_threshold_enumerates_fully(self):
        universe = ("m1", "m2")
        kb = KnowledgeBase(
            L5,
            universe,
            (
                graded_profile("da", universe, {"m1": F(1)}, {}),
                graded_profile("db", universe, {"m2": F(1)}, {}),
            ),
        )
        obs = kb.observation(absent={"m1": F(3, 4), "m2": F(3, 4)})
        ranking = search_multi(kb, obs, threshold=F(1), max_card=2)
        assert entry_sets(ranking) == {
            frozenset({"da"}),
            frozenset({"db"}),
            frozenset({"da", "db"}),
        }
        assert all(e.level == F(1, 4) for e in ranking)

    def test_inadmissible_subsets_skipped(self):
        kb = KnowledgeBase(
            L5,
            U4,
            demo_kb().profiles,
            admissible=frozenset(
                {frozenset({"d2"}), frozenset({"d1", "d2"})}
            ),
        )
        ranking = search_multi(kb, demo_obs(kb), threshold=F(1), max_card=2)
        assert entry_sets(ranking) == {
            frozenset({"d2"}),
            frozenset({"d1", "d2"}),
        }

    def test_threshold_must_be_on_scale(self):
        kb = demo_kb()
        with pytest.raises(LevelNotOnScaleError):
            search_multi(kb, demo_obs(kb), threshold=F(1, 3), max_card=2)

    def test_max_card_validated(self):
        kb = demo_kb()
        with pytest.raises(ValidationError):
            search_multi(kb, demo_obs(kb), threshold=F(1), max_card=0)

    def test_explicit_composition_searches_declared_only(self):
        universe = ("m1", "m2")
        joint = TwofoldSet(
            FuzzySet(L5, universe, {"m1": F(1), "m2": F(1)}),
            FuzzySet.empty(L5, universe),
        )
        kb = KnowledgeBase(
            L5,
            universe,
            (
                graded_profile("da", universe, {"m1": F(1)}, {"m2": F(1)}),
                graded_profile("db", universe, {"m2": F(1)}, {"m1": F(1)}),
                graded_profile("dc", universe, {}, {}),
            ),
            multi_profiles={frozenset({"da", "db"}): joint},
            composition="explicit",
        )
        obs = kb.observation(present={"m1": F(1), "m2": F(1)})
        ranking = search_multi(kb, obs, threshold=F(1), max_card=3)
        # dc already reaches the threshold alone, so search stops at
        # cardinality 1; the declared pair is never needed
        assert entry_sets(ranking) == {
            frozenset({"da"}),
            frozenset({"db"}),
            frozenset({"dc"}),
        }
        harder = search_multi(kb, obs, threshold=F(1), max_card=3)
        assert harder.level_of(["dc"]) == F(1)

    def test_subset_levels_match_direct_evaluation(self):
        kb = demo_kb()
        obs = demo_obs(kb)
        ranking = search_multi(kb, obs, threshold=F(1), max_card=3)
        for e in ranking:
            assert e.level == plausibility_subset(kb, obs, e.disorders)


class TestRankingOrder:
    def test_sort_level_then_cardinality_then_name(self):
        ranking = PlausibilityRanking.ranked(
            L5,
            [
                (("d2",), F(1)),
                (("d1", "d3"), F(1)),
                (("d1",), F(1, 2)),
                (("a1",), F(1)),
            ],
        )
        assert [e.disorders for e in ranking] == [
            ("a1",),
            ("d2",),
            ("d1", "d3"),
            ("d1",),
        ]

    def test_entries_expose_cardinality(self):
        assert RankingEntry(("d1", "d2"), F(1)).cardinality == 2


# ---------------------------------------------------------------------------
# structural properties
# ---------------------------------------------------------------------------


@st.composite
def fuzzy_setups(draw, scale=L5):
    universe = tuple(f"m{i}" for i in range(draw(st.integers(2, 4))))
    profiles = []
    for i in range(draw(st.integers(1, 4))):
        pos, neg = {}, {}
        for m in universe:
            side = draw(st.sampled_from(["pos", "neg", "off", "off"]))
            if side == "pos":
                pos[m] = draw(st.sampled_from(NONZERO))
            elif side == "neg":
                neg[m] = draw(st.sampled_from(NONZERO))
        profiles.append(graded_profile(f"d{i}", universe, pos, neg, scale))
    kb = KnowledgeBase(scale, universe, tuple(profiles))
    present, absent = {}, {}
    for m in universe:
        side = draw(st.sampled_from(["present", "absent", "unknown"]))
        if side == "present":
            present[m] = draw(st.sampled_from(NONZERO))
        elif side == "absent":
            absent[m] = draw(st.sampled_from(NONZERO))
    return kb, kb.observation(present=present, absent=absent)


class TestGradedProperties:
    @settings(max_examples=200)
    @given(fuzzy_setups())
    def test_inclusion_form_agrees(self, setup):
        """The level equals the worse of two graded-inclusion readings."""
        kb, obs = setup
        for d in kb.disorders():
            p = kb.profile(d)
            via_inclusion = min(
                inclusion(p.certain, obs.absent.complement()),
                inclusion(p.excluded, obs.present.complement()),
            )
            assert plausibility_single(kb, obs, d) == via_inclusion

    @settings(max_examples=200)
    @given(fuzzy_setups())
    def test_positive_only_observation_reading(self, setup):
        """With nothing absent, the level is how well the seen evidence
        fits inside what the disorder leaves possible."""
        kb, obs = setup
        positive_only = Observation(
            obs.present, FuzzySet.empty(kb.scale, kb.manifestations)
        )
        for d in kb.disorders():
            p = kb.profile(d)
            fit = inclusion(positive_only.present, p.excluded.complement())
            assert plausibility_single(kb, positive_only, d) == fit

    @settings(max_examples=150)
    @given(fuzzy_setups(), st.data())
    def test_more_evidence_never_promotes(self, setup, data):
        kb, obs = setup
        candidates = [
            (m, side)
            for m in kb.manifestations
            for side in ("present", "absent")
            if (obs.absent if side == "present" else obs.present).grade(m) == 0
        ]
        if not candidates:
            return
        m, side = data.draw(st.sampled_from(candidates))
        current = (obs.present if side == "present" else obs.absent).grade(m)
        higher = data.draw(
            st.sampled_from([lv for lv in L5.levels if lv > current] or [F(1)])
        )
        if side == "present":
            raised = Observation(obs.present.raise_to(m, higher), obs.absent)
        else:
            raised = Observation(obs.present, obs.absent.raise_to(m, higher))
        for d in kb.disorders():
            assert plausibility_single(kb, raised, d) <= plausibility_single(
                kb, obs, d
            )

    @settings(max_examples=150)
    @given(fuzzy_setups())
    def test_levels_always_on_scale(self, setup):
        kb, obs = setup
        ranking = search_multi(kb, obs, threshold=F(1), max_card=3)
        for e in ranking:
            assert e.level in kb.scale

    @settings(max_examples=150)
    @given(fuzzy_setups())
    def test_crisp_observation_sandwich(self, setup):
        """Exact-fit disorders are fully plausible; fully plausible ones
        survive the yes/no screening of the profile cores."""
        kb, _ = setup
        names = list(kb.manifestations)
        present = frozenset(names[::2])
        absent = frozenset(names) - present
        obs = kb.observation(
            present={m: F(1) for m in present},
            absent={m: F(1) for m in absent},
        )
        ranking = rank_disorders(kb, obs)
        top = {d for s in ranking.core() for d in s}
        exact = {
            d
            for d in kb.disorders()
            if present <= kb.profile(d).certain.support()
            and kb.profile(d).certain.support().isdisjoint(absent)
        }
        screened = {
            d
            for d in kb.disorders()
            if kb.profile(d).certain.core().isdisjoint(absent)
            and kb.profile(d).excluded.core().isdisjoint(present)
        }
        assert exact <= top <= screened


@st.composite
def aligned_setups(draw):
    """KBs whose graded profiles sharpen an underlying crisp description:
    support of the certain part = the crisp effect set, its core = the
    sure effects; mirrored for the excluded part."""
    universe = tuple(f"m{i}" for i in range(draw(st.integers(2, 4))))
    profiles = []
    crisp_effects = {}
    sure = {}
    for i in range(draw(st.integers(1, 4))):
        d = f"d{i}"
        effect_set = {m for m in universe if draw(st.booleans())}
        sure_caused = {m for m in effect_set if draw(st.booleans())}
        sure_ruled_out = {
            m for m in universe if m not in effect_set and draw(st.booleans())
        }
        pos = {
            m: F(1) if m in sure_caused else draw(st.sampled_from(SOFT))
            for m in effect_set
        }
        neg = {
            m: F(1) if m in sure_ruled_out else draw(st.sampled_from(SOFT))
            for m in universe
            if m not in effect_set
        }
        profiles.append(graded_profile(d, universe, pos, neg))
        crisp_effects[d] = frozenset(effect_set)
        sure[d] = (frozenset(sure_caused), frozenset(sure_ruled_out))
    kb = KnowledgeBase(L5, universe, tuple(profiles))
    seen = {m: draw(st.sampled_from(["present", "absent", "unknown"])) for m in universe}
    present = frozenset(m for m, s in seen.items() if s == "present")
    absent = frozenset(m for m, s in seen.items() if s == "absent")
    return kb, crisp_effects, sure, present, absent


class TestCrispRecovery:
    """The graded ranking collapses to the two crisp readings.

    When each profile's grades sharpen a crisp effect set as described in
    ``aligned_setups``, the fully-plausible disorders are exactly the
    exact-match explainers of the effect sets, and the not-ruled-out
    disorders are exactly the survivors of the sure-knowledge screening.
    """

    @settings(max_examples=200)
    @given(aligned_setups())
    def test_core_and_support_recover_crisp_sets(self, setup):
        kb, crisp_effects, sure, present, absent = setup
        obs = kb.observation(
            present={m: F(1) for m in present},
            absent={m: F(1) for m in absent},
        )
        ranking = rank_disorders(kb, obs)
        exact_match = {
            d
            for d, effects in crisp_effects.items()
            if present <= effects and effects.isdisjoint(absent)
        }
        screened = {
            d
            for d, (sure_caused, sure_ruled_out) in sure.items()
            if sure_caused.isdisjoint(absent) and sure_ruled_out.isdisjoint(present)
        }
        assert ranking.core() == {frozenset({d}) for d in exact_match}
        assert ranking.support() == {frozenset({d}) for d in screened}
