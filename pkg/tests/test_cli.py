import json

import pytest

from config import TestingConfig
from gpk.cli import main
from gpk.corpus import corpus, named_graph
from gpk.structures import write_graph_file

BROKEN = """
(recursive-definition broken
  (order EdgesFirst)
  (indeterminates X)
  (rule edge
    (guard (PE x))
    (scheme delete-edge)
    (coeff (+ (const X) (tv (exists y (and (PE y) (!= y x) (exists z (and (N z x) (N z y)))))))))
  (rule vertex
    (guard (PV x))
    (scheme delete-vertex)
    (coeff 1)))
"""

STUCK = """
(recursive-definition stuck
  (order true)
  (rule edge (guard (PE x)) (scheme delete-edge) (coeff 1)))
"""


class SmallUniverseConfig(TestingConfig):
    MAX_UNIVERSE = 3


def run(capsys, *argv, config=TestingConfig):
    code = main(list(argv), config)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_prints_the_polynomial(capsys):
    code, out, _ = run(capsys, "eval", "--graph", "k2", "--poly", "potts")
    assert code == 0
    assert out == "q^2 + q*v\n"


@pytest.mark.parametrize("engine", ["recursive", "expansion", "oracle", "synthesized"])
def test_eval_on_every_engine(capsys, engine):
    code, out, _ = run(capsys, "eval", "--graph", "p3", "--poly", "matching", "--engine", engine)
    assert code == 0
    assert out.strip() == "X^3 + 2*X*Y"


def test_eval_machine_format(capsys):
    code, out, _ = run(capsys, "eval", "--graph", "k2", "--poly", "xi", "--format", "machine")
    document = json.loads(out)
    assert code == 0
    assert document["command"] == "eval"
    assert document["config"]["poly"] == "xi"
    assert document["result"]["polynomial"] == "X^2 + X*Y + Z"
    assert document["result"]["terms"] == [[1, {"X": 2}], [1, {"X": 1, "Y": 1}], [1, {"Z": 1}]]


def test_builtin_graphs_are_read_as_directed_for_the_cover(capsys):
    code, out, _ = run(capsys, "eval", "--graph", "loop1", "--poly", "cover")
    assert code == 0
    assert out.strip() == "X + Y"


@pytest.mark.parametrize("poly", ["tutte", "potts", "matching", "xi", "noble-welsh"])
def test_the_empty_graph_evaluates_to_one_on_the_oracle(capsys, poly):
    code, out, _ = run(capsys, "eval", "--graph", "empty", "--poly", poly, "--engine", "oracle")
    assert code == 0
    assert out.strip() == "1"


def test_eval_reads_graph_and_order_files(capsys, tmp_path):
    graph_file = tmp_path / "k2.graph"
    write_graph_file(named_graph("k2"), str(graph_file))
    order_file = tmp_path / "k2.order"
    order_file.write_text("e1 v2 v1\n")
    code, out, _ = run(capsys, "eval", "--graph", str(graph_file), "--poly", "potts",
                       "--order", f"file:{order_file}")
    assert code == 0
    assert out.strip() == "q^2 + q*v"


def test_invalid_order_exits_with_two(capsys):
    code, _, err = run(capsys, "eval", "--graph", "k2", "--poly", "potts", "--order", "declaration")
    assert code == 2
    assert "violates the order formula" in err


def test_infeasible_order_exits_with_two(capsys, tmp_path):
    definition = tmp_path / "stuck.gpk"
    definition.write_text(STUCK)
    code, _, _ = run(capsys, "eval", "--graph", "k2", "--definition", str(definition), "--order", "declaration")
    assert code == 2


def test_capacity_exits_with_three(capsys):
    code, _, _ = run(capsys, "eval", "--graph", "p3", "--poly", "potts", config=SmallUniverseConfig)
    assert code == 3


@pytest.mark.parametrize("argv", [
    ("eval", "--graph", "k2"),
    ("eval", "--graph", "nowhere9", "--poly", "potts"),
    ("eval", "--graph", "k2", "--poly", "chromatic"),
    ("eval", "--graph", "k2", "--poly", "noble-welsh"),
    ("eval", "--graph", "k2", "--poly", "potts", "--order", "sideways"),
    ("check",),
])
def test_usage_errors_exit_with_one(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_expansion_needs_a_catalog_entry(capsys, tmp_path):
    definition = tmp_path / "broken.gpk"
    definition.write_text(BROKEN)
    code, _, _ = run(capsys, "eval", "--graph", "p3", "--definition", str(definition), "--engine", "expansion")
    assert code == 1


def test_definition_files_evaluate(capsys, tmp_path):
    definition = tmp_path / "broken.gpk"
    definition.write_text(BROKEN)
    code, out, _ = run(capsys, "eval", "--graph", "p3", "--definition", str(definition))
    assert code == 0
    assert out.strip() == "X^2 + X"


def test_check_passes_on_the_tiny_corpus(capsys):
    code, out, _ = run(capsys, "check", "--poly", "matching")
    assert code == 0
    assert out.rstrip().endswith("PASS")
    assert f"matching: {len(corpus('tiny'))} graph(s), engines recursive, expansion, oracle" in out


def test_check_with_synthesis(capsys):
    code, out, _ = run(capsys, "check", "--poly", "potts", "--synthesis", "--synthesis-size", "4",
                       "--format", "machine")
    result = json.loads(out)["result"]
    assert code == 0
    assert result["passed"]
    assert result["synthesis"]["checked"] > 0


def test_invariance_of_a_builtin(capsys):
    code, out, _ = run(capsys, "invariance", "--poly", "tutte", "--graph", "c3")
    assert code == 0
    assert "36 order(s), 1 distinct" in out


def test_invariance_catches_an_order_dependent_definition(capsys, tmp_path):
    definition = tmp_path / "broken.gpk"
    definition.write_text(BROKEN)
    code, out, _ = run(capsys, "invariance", "--definition", str(definition), "--graph", "p4",
                       "--format", "machine")
    report = json.loads(out)["result"]["reports"][0]
    assert code == 4
    assert report["distinct"] > 1
    assert not report["invariant"]


def test_invariance_with_sampled_orders(capsys):
    code, out, _ = run(capsys, "invariance", "--poly", "potts", "--graph", "c4", "--orders", "5")
    assert code == 0
    assert "5 order(s), 1 distinct" in out


def test_fundamental(capsys):
    code, out, _ = run(capsys, "fundamental", "--trials", "20", "--max-size", "3", "--composition", "5")
    assert code == 0
    assert "random: 20/20 agree" in out
    assert "composition: 5/5 agree" in out


def test_corpus_writes_graph_files(capsys, tmp_path):
    out_dir = tmp_path / "graphs"
    code, out, _ = run(capsys, "corpus", "--name", "tiny", "--out", str(out_dir))
    expected = len(corpus("tiny"))
    assert code == 0
    assert out.rstrip().endswith(f"{expected} graph(s)")
    assert len(list(out_dir.iterdir())) == expected


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--poly", "potts", "--engines", "oracle,recursive", "--format", "machine")
    rows = json.loads(out)["result"]["rows"]
    assert code == 0
    assert [row["engine"] for row in rows] == ["oracle", "recursive"]
    assert all(row["graphs"] == len(corpus("tiny")) for row in rows)
