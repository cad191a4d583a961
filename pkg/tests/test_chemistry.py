"""Chemistry loading, builtins, and rewrite validation."""

import pytest

from chemgraph.chemistry import builtin, load_chemistry, validate_rewrite
from chemgraph.errors import (
    DuplicateRewriteName,
    InterfaceMismatch,
    UnknownChemistry,
    UnknownType,
)

AUTOFILTER = ["L", "A", "FI", "D", "FOE", "FOX", "FO", "T", "Arrow", "GAMMA", "DELTA"]


class TestBuiltins:
    def test_chemlambda_node_types(self, chemlambda):
        assert set(chemlambda.node_types) == set(AUTOFILTER) | {"FRIN", "FROUT"}
        assert chemlambda.oriented

    def test_packaged_valences(self, chemlambda):
        bits = {n: t.valence_bits for n, t in chemlambda.node_types.items()}
        assert bits["L"] == (0, 1, 1)
        assert bits["A"] == (0, 0, 1)
        assert bits["FI"] == (0, 0, 1)
        assert bits["D"] == (0, 0, 1)
        assert bits["FOE"] == (0, 1, 1)
        assert bits["FOX"] == (0, 1, 1)
        assert bits["FO"] == (0, 1, 1)
        assert bits["T"] == (0,)
        assert bits["FRIN"] == (1,)
        assert bits["FROUT"] == (0,)
        assert bits["Arrow"] == (0, 1)
        assert bits["GAMMA"] == (0, 0, 0)
        assert bits["DELTA"] == (0, 0, 0)

    def test_beta_rule_matches_reference_form(self, chemlambda):
        la = chemlambda.rewrite("L-A")
        assert la.kind == "BETA"
        assert (la.left, la.right) == ("L", "A")
        assert (la.right_port, la.left_port) == (2, 0)
        lhs = la.lhs_template(chemlambda)
        assert [n.line() for n in lhs] == ["L 1 2 3", "A 3 4 5"]
        assert [n.line() for n in la.rhs_template] == ["Arrow 1 5", "Arrow 4 2"]

    def test_a_fo_rewrite_object(self, chemlambda):
        rw = chemlambda.rewrite("A-FO")
        assert rw.left == "A" and rw.right == "FO"
        assert rw.action == "DIST1"
        assert rw.rhs_types == ("FOE", "FOE", "A", "A")
        assert rw.blocks == ("FOE-A",)
        assert rw.kind == "DIST"

    def test_ic_rules(self, ic):
        assert {t: ic.node_types[t].valence for t in ("GAMMA", "DELTA")} == {
            "GAMMA": 3,
            "DELTA": 3,
        }
        assert not ic.oriented
        kinds = sorted(rw.kind for rw in ic.rewrites)
        assert kinds == ["IC-ANNIHILATE", "IC-ANNIHILATE", "IC-COMMUTE"]
        # principal-port rules: contact on port 0 of both nodes
        for rw in ic.rewrites:
            assert rw.left_port == 0 and rw.right_port == 0

    def test_combined_chemistry(self, both):
        assert set(both.node_types) >= {"L", "A", "GAMMA", "DELTA", "FREE"}
        names = {rw.name for rw in both.rewrites}
        assert {"L-A", "GAMMA-GAMMA", "GAMMA-DELTA"} <= names
        assert not both.oriented

    def test_unknown_chemistry(self):
        with pytest.raises(UnknownChemistry):
            builtin("chemlambda-v9")


class TestValidation:
    def test_all_packaged_rules_valid(self, chemlambda, ic, both):
        for chem in (chemlambda, ic, both):
            for rw in chem.rewrites:
                assert validate_rewrite(rw, chem) == []

    def test_interface_equality_holds_everywhere(self, chemlambda, both):
        for chem in (chemlambda, both):
            for rw in chem.rewrites:
                assert rw.interface(chem) == rw.rhs_template.free_tags()

    def test_lhs_is_two_nodes_one_contact(self, chemlambda, ic):
        for chem in (chemlambda, ic):
            for rw in chem.rewrites:
                lhs = rw.lhs_template(chem)
                assert len(lhs) == 2
                assert not any(n.node_type.is_arrow for n in lhs)
                assert len(lhs.bound_tags()) == 1

    def test_node_delta_by_kind(self, chemlambda, ic):
        for chem in (chemlambda, ic):
            for rw in chem.rewrites:
                delta = rw.node_delta()
                if rw.kind == "DIST" or rw.kind == "IC-COMMUTE":
                    assert delta == 2
                elif rw.kind in ("BETA", "FAN-IN", "IC-ANNIHILATE"):
                    assert delta == 0  # two Arrows before COMB
                    assert all(n.node_type.is_arrow for n in rw.rhs_template)
                elif rw.kind == "TERM":
                    assert delta <= 0

    def test_blocks_resolve(self, chemlambda):
        for rw in chemlambda.rewrites:
            for entry in rw.blocks:
                left, _, right = entry.partition("-")
                assert left in chemlambda.node_types
                assert right in chemlambda.node_types

    def test_dropped_interface_tag_rejected(self):
        with pytest.raises(InterfaceMismatch):
            load_chemistry(
                """
[chemistry]
name bad
oriented false
[types]
A 0 0 0
Arrow 0 1
FREE 0
[rewrites]
name A-A
left A
right A
contact 2 0
action X
kind BETA
rhs Arrow 1 2 ^ Arrow 4 4
"""
            )  # drops interface tag 5, binds 4 twice

    def test_unknown_type_in_rule(self):
        with pytest.raises(UnknownType):
            load_chemistry(
                """
[chemistry]
name bad
[types]
A 0 0 1
Arrow 0 1
FRIN 1
[rewrites]
name A-Z
left A
right Z
contact 2 0
action X
kind BETA
rhs Arrow 1 2
"""
            )

    def test_duplicate_rewrite_name(self):
        config = """
[chemistry]
name dup
oriented false
[types]
A 0 0 0
Arrow 0 1
FREE 0
[rewrites]
name A-A
left A
right A
contact 2 0
action X
kind BETA
rhs Arrow 1 4 ^ Arrow 2 5

name A-A
left A
right A
contact 2 0
action X
kind BETA
rhs Arrow 1 4 ^ Arrow 2 5
"""
        with pytest.raises(DuplicateRewriteName):
            load_chemistry(config)

    def test_arrow_and_cap_families_required(self):
        with pytest.raises(Exception, match="Arrow"):
            load_chemistry("[chemistry]\nname x\n[types]\nA 0 0 1\nFRIN 1\n[rewrites]\n")

    def test_comb_rules_not_listed(self, chemlambda):
        assert all(rw.kind != "COMB" for rw in chemlambda.rewrites)

    def test_validation_report_lists_problems(self, chemlambda):
        from chemgraph.chemistry import Rewrite
        from chemgraph.molcore import MolPattern, MolNode

        arrow = chemlambda.node_types["Arrow"]
        bad = Rewrite(
            name="X-X",
            left="L",
            right="A",
            left_port=0,
            right_port=2,
            action="X",
            kind="BETA",
            rhs_template=MolPattern([MolNode(arrow, ("1", "2"))]),
            rhs_types=("Arrow",),
        )
        report = validate_rewrite(bad, chemlambda)
        assert report and "interface mismatch" in report[0]


class TestPatternPairValidation:
    def test_beta_interface(self, chemlambda):
        from chemgraph.chemistry import validate_patterns

        lhs = chemlambda.parse("L c b a\nA a d e")
        rhs = chemlambda.parse("Arrow c e\nArrow d b")
        assert validate_patterns(lhs, rhs) == []
        assert lhs.free_tags() == frozenset("cbde")

    def test_comb_loop_rule_valid_with_empty_interface(self, chemlambda):
        from chemgraph.chemistry import validate_patterns
        from chemgraph.molcore import MolPattern

        loop = chemlambda.parse("Arrow a a")
        assert validate_patterns(loop, MolPattern(())) == []
        assert loop.free_tags() == frozenset()

    def test_dropped_tag_reported(self, chemlambda):
        from chemgraph.chemistry import validate_patterns

        lhs = chemlambda.parse("L c b a\nA a d e")
        rhs = chemlambda.parse("Arrow c e")
        report = validate_patterns(lhs, rhs)
        assert report and "interface mismatch" in report[0]

    def test_dist_node_delta_recorded(self, chemlambda):
        rw = chemlambda.rewrite("A-FO")
        assert rw.node_delta() == 2
