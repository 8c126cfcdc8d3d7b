import json
import os
from typing import List, Optional, Sequence

import click

from gpk.catalog import ENGINES, check_entry, get_entry
from gpk.cli import cli
from gpk.corpus import CORPORA, corpus, named_graph
from gpk.errors import MISMATCH_EXIT_CODE, InvalidOrderError
from gpk.polyring import Polynomial
from gpk.structures import MultiGraph, dump_graph, read_graph_file, to_incidence, write_graph_file
from gpk.utils import ORDER_SOURCES, render_report, resolve_order, stopwatch

FORMATS = ("text", "machine")

_CHECK_TEMPLATE = """\
{{ entry }}: {{ checked }} graph(s), engines {{ engines|join(", ") }}
{% for m in mismatches %}
  MISMATCH graph #{{ m.graph }} {{ m.summary }}
{% for engine, value in m["values"]|dictsort %}
    {{ engine }}: {{ value }}
{% endfor %}
{% endfor %}
{% if synthesis %}
synthesis: {{ synthesis.checked }} instance(s), {{ synthesis.mismatches|length }} mismatch(es)
{% endif %}
{{ "PASS" if passed else "FAIL" }}
"""

_INVARIANCE_TEMPLATE = """\
{% for r in reports %}
{{ r.structure }}: {{ r.orders_checked }} order(s), {{ r.distinct }} distinct
{% for value in r["values"] %}
  {{ value }}
{% endfor %}
{% for e in r.errors %}
  error at {{ e.order }}: {{ e.error }}
{% endfor %}
{% endfor %}
{{ "PASS" if passed else "FAIL" }}
"""

_FUNDAMENTAL_TEMPLATE = """\
{% for name, r in suites|dictsort %}
{{ name }}: {{ r.agreed }}/{{ r.checked }} agree{{ " (truncated)" if r.truncated }}
{% endfor %}
{{ "PASS" if passed else "FAIL" }}
"""

_BENCH_TEMPLATE = """\
{{ "%-12s"|format("engine") }} {{ "%8s"|format("graphs") }} {{ "%12s"|format("ms") }}
{% for row in rows %}
{{ "%-12s"|format(row.engine) }} {{ "%8d"|format(row.graphs) }} {{ "%12.1f"|format(row.ms) }}
{% endfor %}
"""


def _emit(fmt: str, command: str, config: dict, result: dict, template: Optional[str] = None) -> None:
    if fmt == "machine":
        document = {"command": command, "config": config, "result": result}
        click.echo(json.dumps(document, sort_keys=True, indent=2))
    elif template is not None:
        click.echo(render_report(template, result).rstrip("\n"))


def _graph(source: str, directed: bool = False) -> MultiGraph:
    """A graph file, or a built-in name; built-in graphs are read as directed when asked."""
    if os.path.exists(source):
        return read_graph_file(source)
    try:
        graph = named_graph(source)
    except ValueError as err:
        raise click.BadParameter(str(err), param_hint="--graph") from None
    if directed and not graph.directed:
        return MultiGraph(True, graph.vertices, graph.edges)
    return graph


def _graphs(graph: Optional[str], corpus_name: Optional[str], directed: bool) -> List[MultiGraph]:
    if graph:
        return [_graph(graph, directed)]
    return corpus(corpus_name or "tiny", directed=directed)


def _definition(workbench, poly: Optional[str], definition_path: Optional[str]):
    from gpk.recurrence import load_definition_file

    if definition_path:
        return load_definition_file(definition_path)
    return get_entry(poly).definition(workbench.config["DEFINITIONS_DIR"])


def _order(structure, source: str, definition=None) -> Sequence[str]:
    from gpk.recurrence import check_order_valid

    order = tuple(resolve_order(structure, source))
    if definition is not None and not check_order_valid(definition, structure, order):
        raise InvalidOrderError(f"order {' '.join(order)} violates the order formula of {definition.name}")
    return order


def _polynomial_result(value: Polynomial) -> dict:
    return {"polynomial": str(value), "terms": value.to_machine()}


order_option = click.option("--order", "order_source", default="edges-first", show_default=True,
                            help=f"Order source: {', '.join(ORDER_SOURCES)}.")
format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)


@cli.command("eval")
@click.option("--graph", "graph_source", required=True, help="Graph file or built-in name (k2, p3, loop1, ...).")
@click.option("--poly", default=None, help="Catalog polynomial.")
@click.option("--definition", "definition_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Recursive definition file to evaluate instead of a catalog entry.")
@click.option("--engine", type=click.Choice(ENGINES), default="recursive", show_default=True)
@order_option
@format_option
@click.pass_obj
def eval_command(workbench, graph_source, poly, definition_path, engine, order_source, fmt):
    """Evaluate one polynomial on one graph."""
    if not poly and not definition_path:
        raise click.UsageError("give --poly or --definition")
    options = workbench.options()
    budget = workbench.budget()
    if definition_path:
        from gpk.recurrence import DeconstructionEvaluator
        from gpk.synthesis import synthesize

        definition = _definition(workbench, None, definition_path)
        graph = _graph(graph_source, definition.vocabulary.name == "directed2")
        structure = to_incidence(graph, definition.vocabulary)
        order = _order(structure, order_source, definition)
        if engine == "recursive":
            value = DeconstructionEvaluator(definition, memoize=options["memoize"],
                                            use_surgeries=options["use_surgeries"],
                                            arity_cap=options["arity_cap"], budget=budget,
                                            max_universe=options["max_universe"]).evaluate(structure, order)
        elif engine == "synthesized":
            value = synthesize(definition, use_surgeries=options["use_surgeries"], arity_cap=options["arity_cap"],
                               max_colorings=options["max_colorings"], budget=budget).evaluate(structure, order)
        else:
            raise click.UsageError(f"engine {engine} needs a catalog polynomial")
    else:
        entry = get_entry(poly)
        graph = _graph(graph_source, entry.directed)
        structure = to_incidence(graph, entry.vocabulary)
        definition = entry.definition(options["directory"]) if engine in ("recursive", "synthesized") else None
        order = _order(structure, order_source, definition)
        value = entry.evaluate(graph, engine, order=order, budget=budget, **options)
    config = {"graph": graph_source, "poly": poly, "definition": definition_path, "engine": engine,
              "order": order_source}
    if fmt == "machine":
        _emit(fmt, "eval", config, _polynomial_result(value))
    else:
        click.echo(str(value))
    return 0


@cli.command("check")
@click.option("--poly", required=True)
@click.option("--corpus", "corpus_name", type=click.Choice(sorted(CORPORA)), default="tiny", show_default=True)
@click.option("--graph", "graph_source", default=None, help="Check a single graph instead of a corpus.")
@click.option("--engines", default=None, help="Comma-separated engines (default: every available one).")
@click.option("--synthesis/--no-synthesis", default=False, help="Also compare the synthesized expansion.")
@click.option("--synthesis-size", type=int, default=6, show_default=True,
              help="Largest universe the synthesized comparison visits.")
@format_option
@click.pass_obj
def check_command(workbench, poly, corpus_name, graph_source, engines, synthesis, synthesis_size, fmt):
    """Three-way engine agreement on a corpus."""
    entry = get_entry(poly)
    graphs = _graphs(graph_source, corpus_name, entry.directed)
    chosen = [e.strip() for e in engines.split(",")] if engines else None
    budget = workbench.budget()
    report = check_entry(entry, graphs, engines=chosen, budget=budget, **workbench.options())
    result = report.to_dict()
    result["synthesis"] = None
    passed = report.passed
    if synthesis:
        from gpk.synthesis import equivalence_check

        structures = [entry.structure(g) for g in graphs]
        structures = [s for s in structures if len(s) <= synthesis_size]
        options = workbench.options()
        equivalence = equivalence_check(entry.definition(options["directory"]), structures, budget=budget,
                                        use_surgeries=options["use_surgeries"], arity_cap=options["arity_cap"],
                                        max_colorings=options["max_colorings"])
        result["synthesis"] = equivalence.to_dict()
        passed = passed and equivalence.passed
    result["passed"] = passed
    config = {"poly": poly, "corpus": None if graph_source else corpus_name, "graph": graph_source,
              "engines": list(report.engines), "synthesis": synthesis}
    _emit(fmt, "check", config, result, _CHECK_TEMPLATE)
    return 0 if passed else MISMATCH_EXIT_CODE


@cli.command("invariance")
@click.option("--poly", default=None)
@click.option("--definition", "definition_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--graph", "graph_source", default=None)
@click.option("--corpus", "corpus_name", type=click.Choice(sorted(CORPORA)), default=None)
@click.option("--orders", default="all", show_default=True,
              help="'all' for every valid order up to the configured limit, or a sample count.")
@format_option
@click.pass_obj
def invariance_command(workbench, poly, definition_path, graph_source, corpus_name, orders, fmt):
    """Evaluate under many valid orders and report the distinct results."""
    from gpk.recurrence import all_valid_orders, check_order_invariance, sample_valid_orders

    if not poly and not definition_path:
        raise click.UsageError("give --poly or --definition")
    definition = _definition(workbench, poly, definition_path)
    directed = definition.vocabulary.name == "directed2"
    graphs = _graphs(graph_source, corpus_name, directed)
    config = workbench.config
    options = workbench.options()
    reports = []
    for graph in graphs:
        structure = to_incidence(graph, definition.vocabulary)
        if orders == "all":
            found = all_valid_orders(definition, structure, config["EXHAUSTIVE_ORDER_LIMIT"])
            if found is None:
                found = sample_valid_orders(definition, structure, config["INVARIANCE_SAMPLES"], config["SEED"])
        elif orders.isdigit():
            found = sample_valid_orders(definition, structure, int(orders), config["SEED"])
        else:
            raise click.BadParameter("use 'all' or a number", param_hint="--orders")
        reports.append(check_order_invariance(definition, structure, found, memoize=options["memoize"],
                                              use_surgeries=options["use_surgeries"],
                                              arity_cap=options["arity_cap"]))
    passed = all(r.invariant and not r.errors for r in reports)
    result = {"reports": [r.to_dict() for r in reports], "passed": passed}
    _emit(fmt, "invariance", {"poly": poly, "definition": definition_path, "graph": graph_source,
                              "corpus": corpus_name, "orders": orders}, result, _INVARIANCE_TEMPLATE)
    return 0 if passed else MISMATCH_EXIT_CODE


@cli.command("fundamental")
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--max-size", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to the configured seed.")
@click.option("--exhaustive/--no-exhaustive", default=False, help="Also sweep the fixed suite exhaustively.")
@click.option("--composition", type=int, default=0, show_default=True, help="Composition triples to check.")
@format_option
@click.pass_obj
def fundamental_command(workbench, trials, max_size, seed, exhaustive, composition, fmt):
    """Translation against transduction on random and fixed triples."""
    from gpk.fundamental import composition_suite, exhaustive_suite, random_suite

    seed = workbench.config["SEED"] if seed is None else seed
    budget = workbench.budget()
    suites = {"random": random_suite(trials, max_size, seed, budget)}
    if exhaustive:
        suites["exhaustive"] = exhaustive_suite(max_size, budget=budget)
    if composition:
        suites["composition"] = composition_suite(composition, max_size, seed, budget)
    passed = all(r.passed for r in suites.values())
    result = {"suites": {name: r.to_dict() for name, r in suites.items()}, "passed": passed}
    _emit(fmt, "fundamental", {"trials": trials, "max_size": max_size, "seed": seed, "exhaustive": exhaustive,
                               "composition": composition}, result, _FUNDAMENTAL_TEMPLATE)
    return 0 if passed else MISMATCH_EXIT_CODE


@cli.command("bench")
@click.option("--poly", required=True)
@click.option("--corpus", "corpus_name", type=click.Choice(sorted(CORPORA)), default="tiny", show_default=True)
@click.option("--engines", default=None, help="Comma-separated engines (default: every available one).")
@format_option
@click.pass_obj
def bench_command(workbench, poly, corpus_name, engines, fmt):
    """Time each engine over a corpus."""
    entry = get_entry(poly)
    graphs = corpus(corpus_name, directed=entry.directed)
    chosen = [e.strip() for e in engines.split(",")] if engines else list(entry.engines)
    options = workbench.options()
    budget = workbench.budget()
    rows = []
    for engine in chosen:
        with stopwatch() as elapsed:
            for graph in graphs:
                entry.evaluate(graph, engine, budget=budget, **options)
        rows.append({"engine": engine, "graphs": len(graphs), "ms": round(elapsed[0], 1)})
    _emit(fmt, "bench", {"poly": poly, "corpus": corpus_name, "engines": chosen}, {"rows": rows}, _BENCH_TEMPLATE)
    return 0


@cli.command("corpus")
@click.option("--name", "corpus_name", type=click.Choice(sorted(CORPORA)), default="tiny", show_default=True)
@click.option("--directed", is_flag=True, default=False)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Write one graph file per instance into this directory.")
@format_option
def corpus_command(corpus_name, directed, out_dir, fmt):
    """List or write the generated corpus."""
    graphs = corpus(corpus_name, directed=directed)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for index, graph in enumerate(graphs):
            write_graph_file(graph, os.path.join(out_dir, f"{corpus_name}-{index:04d}.graph"))
    if fmt == "machine":
        result = {"count": len(graphs), "graphs": [dump_graph(g) for g in graphs]}
        _emit(fmt, "corpus", {"name": corpus_name, "directed": directed, "out": out_dir}, result)
    else:
        for index, graph in enumerate(graphs):
            click.echo(f"{index:4d}  {graph.summary()}")
        click.echo(f"{len(graphs)} graph(s)")
    return 0
