"""CLI behavior: validation, reduction traces, exports, exit codes."""

import json

import pytest
from click.testing import CliRunner

from chemgraph.cli import main

from .conftest import FOUR_NODE_MOL

BETA = "L c b a\nA a d e\n"


@pytest.fixture()
def runner():
    return CliRunner()


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestValidate:
    def test_valid_mol_exit_zero(self, runner, tmp_path, toy):
        # the worked 4-node example validates under its chemistry config
        chem_cfg = write(
            tmp_path,
            "toy.chem",
            "[chemistry]\nname toy\noriented false\n"
            "[types]\nA 0 0 0\nB 0 0 0\nC 0 0\nArrow 0 1\nFREE 0\n[rewrites]\n",
        )
        mol = write(tmp_path, "m.mol", FOUR_NODE_MOL)
        result = runner.invoke(main, ["validate", mol, "--chem-config", chem_cfg])
        assert result.exit_code == 0, result.output
        assert "4 nodes" in result.output

    def test_tag_overuse_exit_one(self, runner, tmp_path):
        mol = write(tmp_path, "bad.mol", "L a a a\n")
        result = runner.invoke(main, ["validate", mol])
        assert result.exit_code == 1
        assert "line 1" in result.output

    def test_arity_reports_line(self, runner, tmp_path):
        mol = write(tmp_path, "bad.mol", "L a b c\nL a b\n")
        result = runner.invoke(main, ["validate", mol])
        assert result.exit_code == 1
        assert "line 2" in result.output


class TestReduce:
    def test_identity_application(self, runner, tmp_path):
        mol = write(tmp_path, "id.mol", "L a a l\nA l v r\nL b b v\nFROUT r\n")
        result = runner.invoke(main, ["reduce", mol, "--seed", "2", "--steps", "20"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert len(lines) == 2
        assert sorted(l.split()[0] for l in lines) == ["FROUT", "L"]

    def test_steps_zero_echoes_input(self, runner, tmp_path):
        mol = write(tmp_path, "b.mol", BETA)
        result = runner.invoke(main, ["reduce", mol, "--steps", "0", "--no-cap"])
        assert result.exit_code == 1  # free tags refused with --no-cap
        result = runner.invoke(main, ["reduce", mol, "--steps", "0"])
        assert result.exit_code == 0
        # capped input comes back unchanged
        assert result.output.startswith("L c b a\nA a d e\n")

    def test_seed_replay_byte_identical(self, runner, tmp_path):
        egg = runner.invoke(main, ["egg", "--types", "A,L,FI,FO,A,L,FI,FO", "--seed", "3"])
        assert egg.exit_code == 0
        mol = write(tmp_path, "egg.mol", egg.output)
        outs = []
        for k in range(3):
            trace = str(tmp_path / f"t{k}.trace")
            result = runner.invoke(
                main,
                ["reduce", mol, "--seed", "42", "--steps", "30", "--trace", trace],
            )
            assert result.exit_code == 0, result.output
            outs.append(open(trace).read())
        assert outs[0] == outs[1] == outs[2]

    def test_figures_written(self, runner, tmp_path):
        mol = write(tmp_path, "id.mol", "L a a l\nA l v r\nL b b v\nFROUT r\n")
        figdir = tmp_path / "figs"
        result = runner.invoke(
            main, ["reduce", mol, "--steps", "10", "--figures", str(figdir)]
        )
        assert result.exit_code == 0, result.output
        assert (figdir / "size.png").exists()

    def test_output_reparses(self, runner, tmp_path, chemlambda):
        mol = write(tmp_path, "b.mol", BETA)
        result = runner.invoke(main, ["reduce", mol, "--seed", "0"])
        assert result.exit_code == 0
        chemlambda.parse(result.output)

    def test_hapax_conserves_counts(self, runner, tmp_path):
        egg = runner.invoke(main, ["egg", "--types", "A,L,FI,FO", "--seed", "5"])
        assert egg.exit_code == 0
        mol = write(tmp_path, "egg.mol", egg.output)
        trace = str(tmp_path / "h.trace")
        result = runner.invoke(
            main,
            ["reduce", mol, "--seed", "1", "--steps", "10", "--hapax",
             "--trace", trace],
        )
        assert result.exit_code == 0, result.output
        assert "hapax=true" in open(trace).read()


class TestQuineCommand:
    def test_matchless_not_quine(self, runner, tmp_path):
        mol = write(tmp_path, "m.mol", "L b b v\nFROUT v\n")
        result = runner.invoke(main, ["quine", mol])
        assert result.exit_code == 0
        assert "status=not_quine" in result.output

    def test_empirical_profile(self, runner, tmp_path):
        mol = write(tmp_path, "m.mol", "L b b v\nFROUT v\n")
        result = runner.invoke(
            main, ["quine", mol, "--empirical", "--trials", "5", "--steps", "10"]
        )
        assert result.exit_code == 0
        assert "died=5" in result.output


class TestEgg:
    def test_eggs_parse_and_replay(self, runner, chemlambda):
        args = ["egg", "--types", "A,L,FI,FO", "--seed", "9", "--count", "3"]
        one = CliRunner().invoke(main, args)
        two = CliRunner().invoke(main, args)
        assert one.exit_code == 0
        assert one.output == two.output
        for block in one.output.strip().split("\n\n"):
            assert len(chemlambda.parse(block)) == 4

    def test_parity_error(self, runner):
        result = runner.invoke(main, ["egg", "--types", "T"])
        assert result.exit_code == 1


class TestLambda2Mol:
    def test_identity(self, runner, chemlambda):
        result = runner.invoke(main, ["lambda2mol", "\\x.x"])
        assert result.exit_code == 0
        mol = chemlambda.parse(result.output)
        assert mol.type_counts() == {"L": 1, "FROUT": 1}

    def test_fanout_option(self, runner, chemlambda):
        result = runner.invoke(main, ["lambda2mol", "\\x.(x x)", "--fanout", "FOE"])
        assert "FOE" in result.output

    def test_syntax_error(self, runner):
        result = runner.invoke(main, ["lambda2mol", "\\x"])
        assert result.exit_code == 1


class TestExportD3:
    def test_field_names_exact(self, runner, tmp_path):
        mol = write(tmp_path, "l.mol", "L a b c\n")
        result = runner.invoke(main, ["export-d3", mol])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert list(doc) == ["nodes", "links"]
        for node in doc["nodes"]:
            assert list(node) == ["id", "type", "x", "y", "vx", "vy", "links", "age"]
        for link in doc["links"]:
            assert list(link) == ["source", "target", "value", "age"]

    def test_counts_for_capped_l_node(self, runner, tmp_path):
        mol = write(tmp_path, "l.mol", "L a b c\n")
        doc = json.loads(CliRunner().invoke(main, ["export-d3", mol]).output)
        # 4 centers (L + 3 caps) and 6 ports
        assert len(doc["nodes"]) == 10
        centers = [n for n in doc["nodes"] if n["type"] not in ("in", "middle", "out")]
        assert len(centers) == 4
        values = {l["value"] for l in doc["links"]}
        assert values == {1, 2}

    def test_empty_molecule(self, runner, tmp_path):
        mol = write(tmp_path, "e.mol", "")
        doc = json.loads(CliRunner().invoke(main, ["export-d3", mol]).output)
        assert doc == {"nodes": [], "links": []}


class TestCode:
    def test_share_code_stable_under_renaming(self, runner, tmp_path):
        a = write(tmp_path, "a.mol", "L c b a\nA a d e\n")
        b = write(tmp_path, "b.mol", "A zz q w\nL k j zz\n")
        ca = CliRunner().invoke(main, ["code", a]).output
        cb = CliRunner().invoke(main, ["code", b]).output
        assert ca == cb


class TestLibrary:
    def test_list_and_show(self, runner):
        result = runner.invoke(main, ["library", "list"])
        assert result.exit_code == 0, result.output
        first = result.output.splitlines()[0].split("\t")[0]
        shown = CliRunner().invoke(main, ["library", "show", first])
        assert shown.exit_code == 0

    def test_entries_parse_under_their_chemistry(self):
        from chemgraph.library import load_library

        entries = load_library()
        assert entries, "packaged library must not be empty"
        for entry in entries.values():
            pattern = entry.parse()
            assert len(pattern) > 0

    def test_lib_input_source(self, runner):
        from chemgraph.library import load_library

        any_id = sorted(load_library())[0]
        result = runner.invoke(main, ["validate", f"lib:{any_id}"])
        assert result.exit_code == 0, result.output


class TestEggStream:
    def test_multi_egg_stream_is_one_valid_pattern(self, runner, ic):
        result = runner.invoke(
            main,
            ["egg", "--types", "GAMMA,GAMMA,DELTA,DELTA", "--chem", "ic",
             "--seed", "3", "--count", "3"],
        )
        assert result.exit_code == 0
        whole = ic.parse(result.output)
        assert len(whole) == 12  # all three eggs coexist tag-disjointly
        for block in result.output.strip().split("\n\n"):
            assert len(ic.parse(block)) == 4
