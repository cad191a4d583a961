"""Quine detection, maximal collections, profiling, random eggs."""

import itertools
import math
import random

import pytest

from chemgraph.engine import ReductionConfig, conflicts, find_matches
from chemgraph.errors import ParityMismatch
from chemgraph.molcore import canonical_code, is_isomorphic, serialize_mol
from chemgraph.quines import (
    MaximalCollections,
    empirical_profile,
    is_quine,
    maximal_collections,
    random_egg,
    replay_collection,
)

from .conftest import FOUR_NODE_MOL


def brute_force_maximal_sets(matches):
    """Every subset that is non-conflicting and inclusion-maximal."""
    n = len(matches)
    independent = []
    for mask in range(1, 1 << n):
        chosen = [matches[i] for i in range(n) if mask >> i & 1]
        if all(
            not conflicts(a, b) for a, b in itertools.combinations(chosen, 2)
        ):
            independent.append(mask)
    maximal = []
    for mask in independent:
        if not any(
            other != mask and other & mask == mask for other in independent
        ):
            maximal.append(frozenset(
                m.describe() for i, m in enumerate(matches) if mask >> i & 1
            ))
    return set(maximal)


class TestMaximalCollections:
    def test_no_matches_no_collections(self, chemlambda):
        mol = chemlambda.parse_molecule("L b b v\nFROUT v")
        assert list(maximal_collections(mol, chemlambda, 10)) == []

    def test_single_match_single_collection(self, chemlambda):
        mol = chemlambda.parse("L c b a\nA a d e")
        got = list(maximal_collections(mol, chemlambda, 10))
        assert len(got) == 1 and len(got[0]) == 1

    def test_two_conflicting_matches_two_singletons(self, chemlambda):
        pat = chemlambda.parse("L 1 2 a\nA a 4 c\nFO c 5 6")
        got = list(maximal_collections(pat, chemlambda, 10))
        assert sorted(len(c) for c in got) == [1, 1]

    def test_matches_brute_force_enumeration(self, chemlambda, ic, rng):
        cases = 0
        for _ in range(60):
            chem, types = (
                (chemlambda, ["A", "L", "FI", "FO", "FOE", "T"])
                if rng.random() < 0.5
                else (ic, ["GAMMA", "GAMMA", "DELTA", "DELTA", "GAMMA", "DELTA"])
            )
            try:
                egg = random_egg(types, chem, rng)
            except ParityMismatch:
                continue
            matches = find_matches(egg, chem)
            if not matches or len(matches) > 15:
                continue
            got = {
                frozenset(m.describe() for m in c)
                for c in maximal_collections(egg, chem, 10_000)
            }
            assert got == brute_force_maximal_sets(matches)
            cases += 1
        assert cases >= 10

    def test_limit_truncation_flag(self, ic, rng):
        for _ in range(50):
            egg = random_egg(["GAMMA", "GAMMA", "DELTA", "DELTA"] * 2, ic, rng)
            enum = maximal_collections(egg, ic, limit=1)
            got = list(enum)
            total = len(list(maximal_collections(egg, ic, limit=10_000)))
            if total > 1:
                assert len(got) == 1 and enum.truncated
                return
        pytest.fail("never found an egg with two maximal collections")


class TestIsQuine:
    def test_matchless_molecule_is_not_quine(self, chemlambda):
        mol = chemlambda.parse_molecule("L b b v\nFROUT v")
        verdict = is_quine(mol, chemlambda)
        assert verdict.status == "not_quine"
        assert verdict.collections_examined == 0

    def test_toy_rewrite_changes_types(self, toy):
        mol = toy.parse_molecule(FOUR_NODE_MOL)
        verdict = is_quine(mol, toy)
        assert verdict.status == "not_quine"
        assert verdict.collections_examined <= 3

    def test_truncation_gives_inconclusive(self, ic, rng):
        for _ in range(100):
            egg = random_egg(["GAMMA", "GAMMA", "DELTA", "DELTA"] * 2, ic, rng)
            total = len(list(maximal_collections(egg, ic, limit=10_000)))
            if total > 1 and not is_quine(egg, ic).is_quine:
                verdict = is_quine(egg, ic, limit=1)
                assert verdict.status == "inconclusive"
                assert verdict.limit == 1
                return
        pytest.fail("no suitable egg found")

    def test_random_egg_verdicts_replay(self, ic, chemlambda, rng):
        checked = 0
        for _ in range(60):
            chem, types = (
                (ic, ["GAMMA", "GAMMA", "DELTA", "DELTA"])
                if rng.random() < 0.5
                else (chemlambda, ["A", "L", "FI", "FO"])
            )
            egg = random_egg(types, chem, rng)
            verdict = is_quine(egg, chem, limit=200)
            if verdict.is_quine:
                result = replay_collection(egg, verdict.witness, chem)
                assert canonical_code(result) == canonical_code(egg)
            checked += 1
        assert checked == 60


class TestEmpiricalProfile:
    def test_dead_graph_dies_at_step_zero(self, chemlambda):
        mol = chemlambda.parse_molecule("L b b v\nFROUT v")
        profile = empirical_profile(
            mol, chemlambda, ReductionConfig(seed=5, max_steps=20), trials=10
        )
        assert profile.outcomes["died"] == 10
        assert set(profile.lifespans) == {0}

    def test_tallies_sum_to_trials(self, chemlambda, rng):
        mol = random_egg(["A", "L", "FI", "FO"] * 2, chemlambda, rng)
        profile = empirical_profile(
            mol, chemlambda, ReductionConfig(seed=9, max_steps=30), trials=25
        )
        assert sum(profile.outcomes.values()) == 25
        assert len(profile.lifespans) == 25

    def test_reproducible_across_thread_counts(self, chemlambda, rng):
        mol = random_egg(["A", "L", "FI", "FO"] * 2, chemlambda, rng)
        config = ReductionConfig(seed=17, max_steps=25)
        profiles = [
            empirical_profile(mol, chemlambda, config, trials=12, threads=k)
            for k in (1, 4)
        ]
        assert profiles[0] == profiles[1]


class TestRandomEgg:
    def test_ic_four_node_egg(self, ic, rng):
        egg = random_egg(["GAMMA", "GAMMA", "DELTA", "DELTA"], ic, rng)
        assert len(egg) == 4
        assert len(egg.bound_tags()) == 6
        assert egg.free_tags() == frozenset()

    def test_oriented_egg_valid(self, chemlambda, rng):
        for _ in range(50):
            egg = random_egg(["A", "L", "FI", "FO"], chemlambda, rng)
            from chemgraph.molcore import validate_orientation

            validate_orientation(egg)

    def test_parity_mismatch(self, chemlambda, rng):
        with pytest.raises(ParityMismatch):
            random_egg(["T"], chemlambda, rng)

    def test_unoriented_odd_slots(self, ic, rng):
        with pytest.raises(ParityMismatch):
            random_egg(["GAMMA"], ic, rng)

    def test_pairing_distribution_uniform(self, ic):
        # fix GAMMA#0 port 0; with 4 nodes there are 11 possible partners;
        # each should appear with frequency within 5 sigma of uniform
        trials = 10_000
        rng = random.Random(123)
        counts = {}
        for _ in range(trials):
            egg = random_egg(["GAMMA", "GAMMA", "DELTA", "DELTA"], ic, rng)
            partner = egg.partner(0, 0)
            counts[partner] = counts.get(partner, 0) + 1
        assert len(counts) == 11
        p = 1 / 11
        sigma = math.sqrt(trials * p * (1 - p))
        for partner, n in counts.items():
            assert abs(n - trials * p) < 5 * sigma, (partner, n)


class TestRuleMasking:
    def test_masked_detector_ignores_other_rules(self, chemlambda):
        from chemgraph.library import get_entry

        mol = chemlambda.parse_molecule(get_entry("ouroboros").mol_text)
        full = is_quine(mol, chemlambda)
        assert full.status == "quine"
        masked = is_quine(mol, chemlambda, rules=frozenset({"L-A"}))
        assert masked.status == "not_quine"
        witness_rules = frozenset(m.rewrite.name for m in full.witness)
        again = is_quine(mol, chemlambda, rules=witness_rules)
        assert again.status == "quine"
