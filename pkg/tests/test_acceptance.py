"""Acceptance sweep: oracle and property checks at fixed seeds.

One test per criterion, each printing a single verdict line (through the
capture, so it lands in the terminal) with its elapsed time.  Criteria
with runtime bounds assert them.  The level-closure criterion feeds on
levels collected by the earlier sweeps plus a sweep of its own.
"""

import random
import time
from fractions import Fraction as F
from itertools import combinations

import helpers
from abdiag.cli import run as cli_run
from abdiag.core import (
    KnowledgeBase,
    combine_profiles,
    consistency,
    inclusion,
    union_twofold,
)
from abdiag.covers import classify_covers
from abdiag.crisp import (
    CrispObservation,
    diagnose_complete,
    diagnose_incomplete,
)
from abdiag.fuzzy import explain_plausibility, rank_disorders, search_multi

L2 = helpers.L2
L5 = helpers.L5

# (level, allowed set) pairs accumulated by the sweeps for criterion 7
EMITTED: list[tuple[F, frozenset]] = []


def closure(levels, scale):
    """Input levels with boundaries, closed under the scale's negation."""
    base = set(levels) | {F(0), F(1)}
    return frozenset(base | {scale.negate(x) for x in base})


def kb_input_levels(kb):
    for p in kb.profiles:
        yield from p.certain.grades.values()
        yield from p.excluded.grades.values()


def obs_input_levels(obs):
    yield from obs.present.grades.values()
    yield from obs.absent.grades.values()


def record_levels(levels, allowed):
    EMITTED.extend((lv, allowed) for lv in levels)


def verdict(capsys, number, text, elapsed, bound=None):
    if bound is not None:
        assert elapsed < bound, f"criterion {number} took {elapsed:.2f}s"
        timing = f"{elapsed:.2f}s < {bound:.0f}s"
    else:
        timing = f"{elapsed:.2f}s"
    with capsys.disabled():
        print(f"\nPASS criterion {number}: {text} ({timing})")


def test_criterion_1_reduction_chain(capsys):
    rng = random.Random(101)
    start = time.perf_counter()
    for _ in range(200):
        kb, effects = helpers.complete_crisp_kb(rng)
        universe = kb.manifestations
        if rng.random() < 0.5:
            target = effects[rng.choice(sorted(effects))]
        else:
            target = helpers.subset_of(rng, universe)
        exact = diagnose_complete(kb, target)
        completed = CrispObservation.fully_informed(universe, target)
        screened = diagnose_incomplete(kb, completed)
        assert screened == exact

        obs = kb.observation(
            present={m: F(1) for m in completed.present},
            absent={m: F(1) for m in completed.absent},
        )
        ranking = rank_disorders(kb, obs)
        top_slice = {e.disorders[0] for e in ranking.entries if e.level == F(1)}
        assert top_slice == screened
        record_levels((e.level for e in ranking.entries), closure([F(1)], L2))
    verdict(
        capsys,
        1,
        "screening equals exact diagnosis on 200 completed crisp cases, "
        "two-level ranking slices to the same set",
        time.perf_counter() - start,
        bound=5.0,
    )


def test_criterion_2_crisp_recovery(capsys):
    rng = random.Random(202)
    start = time.perf_counter()
    for _ in range(200):
        kb, crisp_effects, sure, present, absent = helpers.aligned_fuzzy_setup(rng)
        obs = kb.observation(
            present={m: F(1) for m in present},
            absent={m: F(1) for m in absent},
        )
        ranking = rank_disorders(kb, obs)
        exact_match = {
            d
            for d, effect_set in crisp_effects.items()
            if present <= effect_set and effect_set.isdisjoint(absent)
        }
        screened = {
            d
            for d, (sure_caused, sure_ruled_out) in sure.items()
            if sure_caused.isdisjoint(absent) and sure_ruled_out.isdisjoint(present)
        }
        assert ranking.core() == {frozenset({d}) for d in exact_match}
        assert ranking.support() == {frozenset({d}) for d in screened}
        allowed = closure(kb_input_levels(kb), L5)
        record_levels((e.level for e in ranking.entries), allowed)
    verdict(
        capsys,
        2,
        "rankings over sharpened profiles collapse to the exact-match core "
        "and screened support on 200 cases",
        time.perf_counter() - start,
        bound=5.0,
    )


def test_criterion_3_cover_oracle(capsys):
    rng = random.Random(303)
    start = time.perf_counter()
    for _ in range(100):
        rel = helpers.random_relation(rng)
        target = helpers.subset_of(rng, rel.manifestations)
        max_card = len(rel.disorders)
        got = classify_covers(rel, target, max_card=max_card)
        assert got == helpers.brute_force_cover_reports(rel, target, max_card)
        for r in got:
            if r.minimum:
                assert r.irredundant
            if r.irredundant:
                assert r.relevant
            if r.relevant:
                assert r.is_cover
    verdict(
        capsys,
        3,
        "cover classification matches brute force on 100 random relations "
        "and the minimum/irredundant/relevant/cover chain never breaks",
        time.perf_counter() - start,
        bound=10.0,
    )


def test_criterion_4_inclusion_identities(capsys):
    start = time.perf_counter()
    pairs = 0
    for size in range(4):
        universe = tuple(f"m{i}" for i in range(size))
        sets = helpers.all_fuzzy_sets(L5, universe)
        for f in sets:
            for g in sets:
                pairs += 1
                inc = inclusion(f, g)
                assert inc == L5.negate(consistency(f, g.complement()))
                assert (inc == F(1)) == (f.support() <= g.core())
    verdict(
        capsys,
        4,
        f"inclusion/overlap duality and the full-inclusion test hold on all "
        f"{pairs} pairs over universes up to size 3",
        time.perf_counter() - start,
        bound=5.0,
    )


def test_criterion_5_monotonicity_and_symmetry(capsys):
    rng = random.Random(505)
    start = time.perf_counter()

    raised = 0
    while raised < 500:
        kb = helpers.graded_kb(rng)
        obs = helpers.graded_observation(rng, kb)
        candidates = []
        for m in kb.manifestations:
            p, a = obs.present.grade(m), obs.absent.grade(m)
            if p < F(1) and a == 0:
                candidates.append(("present", m, p))
            if a < F(1) and p == 0:
                candidates.append(("absent", m, a))
        if not candidates:
            continue
        side, m, current = rng.choice(candidates)
        higher = rng.choice([lv for lv in L5.levels if lv > current])
        present = dict(obs.present.grades)
        absent = dict(obs.absent.grades)
        (present if side == "present" else absent)[m] = higher
        stronger = kb.observation(present=present, absent=absent)

        before = {e.disorders[0]: e.level for e in rank_disorders(kb, obs).entries}
        after = {e.disorders[0]: e.level for e in rank_disorders(kb, stronger).entries}
        assert all(after[d] <= before[d] for d in before)
        allowed = closure(
            list(kb_input_levels(kb))
            + list(obs_input_levels(obs))
            + list(obs_input_levels(stronger)),
            L5,
        )
        record_levels(before.values(), allowed)
        record_levels(after.values(), allowed)
        raised += 1

    for _ in range(500):
        kb = helpers.incomplete_crisp_kb(rng)
        present, absent = helpers.crisp_observation_sets(rng, kb.manifestations)
        obs = CrispObservation(present, absent)
        mirrored_profiles = tuple(
            helpers.crisp_profile(
                p.disorder,
                kb.manifestations,
                p.excluded.support(),
                p.certain.support(),
            )
            for p in kb.profiles
        )
        mirrored_kb = KnowledgeBase(kb.scale, kb.manifestations, mirrored_profiles)
        assert diagnose_incomplete(kb, obs) == diagnose_incomplete(
            mirrored_kb, obs.swapped()
        )
    verdict(
        capsys,
        5,
        "raising evidence never raises plausibility (500 cases) and crisp "
        "screening is invariant under the present/absent mirror (500 cases)",
        time.perf_counter() - start,
        bound=10.0,
    )


def test_criterion_6_composition_laws(capsys):
    rng = random.Random(606)
    start = time.perf_counter()
    for _ in range(40):
        kb = helpers.graded_kb(rng, d_count=4)
        by_name = {p.disorder: p.effects for p in kb.profiles}
        names = sorted(by_name)
        for a, b in combinations(names, 2):
            assert union_twofold(by_name[a], by_name[b]) == union_twofold(
                by_name[b], by_name[a]
            )
            assert combine_profiles(kb, [a, b]) == union_twofold(
                by_name[a], by_name[b]
            )
        for a, b, c in combinations(names, 3):
            left = union_twofold(union_twofold(by_name[a], by_name[b]), by_name[c])
            right = union_twofold(by_name[a], union_twofold(by_name[b], by_name[c]))
            assert left == right == combine_profiles(kb, [a, b, c])

    for _ in range(40):
        kb, effects = helpers.complete_crisp_kb(rng, d_count=4, max_m=8)
        names = sorted(effects)
        subsets = list(combinations(names, 2)) + list(combinations(names, 3))
        for sub in subsets:
            combined = combine_profiles(kb, sub)
            joint_effects = frozenset().union(*(effects[d] for d in sub))
            assert combined.positive.support() == joint_effects
            assert combined.positive.is_crisp() and combined.negative.is_crisp()
            # everything jointly excluded is exactly what no member causes
            assert combined.negative.support() == frozenset(
                kb.manifestations
            ) - joint_effects
    verdict(
        capsys,
        6,
        "profile combination is commutative and associative on 4-disorder "
        "KBs and reduces to effect-set union in the crisp complete case",
        time.perf_counter() - start,
        bound=5.0,
    )


def test_criterion_7_level_closure(capsys):
    rng = random.Random(707)
    start = time.perf_counter()
    for _ in range(100):
        kb = helpers.graded_kb(rng)
        obs = helpers.graded_observation(rng, kb)
        allowed = closure(
            list(kb_input_levels(kb)) + list(obs_input_levels(obs)), L5
        )
        ranking = rank_disorders(kb, obs)
        record_levels((e.level for e in ranking.entries), allowed)
        deep = search_multi(kb, obs, threshold=F(1), max_card=2)
        record_levels((e.level for e in deep.entries), allowed)
        some = rng.choice(sorted(kb.disorders()))
        breakdown = explain_plausibility(kb, obs, [some])
        record_levels(
            [
                breakdown.level,
                breakdown.certain_vs_absent,
                breakdown.excluded_vs_present,
            ],
            allowed,
        )
        record_levels((c.overlap for c in breakdown.conflicts), allowed)

    assert EMITTED, "earlier criteria should have collected levels"
    for level, allowed in EMITTED:
        assert level in allowed, f"level {level} escapes the input closure"
    verdict(
        capsys,
        7,
        f"all {len(EMITTED)} levels emitted across the sweeps stay in the "
        "negation closure of their input levels",
        time.perf_counter() - start,
    )


def test_criterion_8_cli_determinism(capsys):
    from pathlib import Path

    demo = Path(__file__).resolve().parent.parent / "demo"
    start = time.perf_counter()
    commands = [
        ["diagnose", "--kb", str(demo / "kb_fuzzy.json"), "--obs", str(demo / "obs_fuzzy.json")],
        ["covers", "--kb", str(demo / "kb_covers.json"), "--obs", str(demo / "obs_covers.json")],
    ]
    for argv in commands:
        outcomes = [cli_run(argv) for _ in range(3)]
        first = outcomes[0]
        assert first.exit_code == 0
        for other in outcomes[1:]:
            assert other.exit_code == first.exit_code
            assert other.stdout.encode() == first.stdout.encode()
            assert other.stderr.encode() == first.stderr.encode()
    verdict(
        capsys,
        8,
        "three repeated runs of the demo diagnose and covers commands are "
        "byte-identical",
        time.perf_counter() - start,
    )
