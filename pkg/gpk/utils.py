import random
import time
from contextlib import contextmanager
from typing import Iterator, List, Optional, Sequence, Tuple

from jinja2 import Template

from gpk.errors import BudgetExceededError, GpkError
from gpk.structures import IncidenceStructure, edges_first_order

ORDER_SOURCES = ("edges-first", "declaration", "random:SEED", "file:PATH")


class Budget:
    """Wall-time cap shared by a run; 0 ms means unlimited."""

    def __init__(self, ms: int = 0):
        self.ms = int(ms or 0)
        self.started = time.monotonic()

    @property
    def elapsed_ms(self) -> float:
        return (time.monotonic() - self.started) * 1000.0

    @property
    def expired(self) -> bool:
        return bool(self.ms) and self.elapsed_ms > self.ms

    def check(self, what: str = "run") -> None:
        if self.expired:
            raise BudgetExceededError(f"{what} exceeded the {self.ms} ms budget")


def render_report(template_string: str, context: dict) -> str:
    """Render a text report from a Jinja template string."""
    return Template(template_string, trim_blocks=True, lstrip_blocks=True).render(**context)


@contextmanager
def stopwatch() -> Iterator[List[float]]:
    """Yields a one-item list that holds the elapsed milliseconds on exit."""
    box = [0.0]
    started = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - started) * 1000.0


def parse_order_source(text: str) -> Tuple[str, Optional[str]]:
    """Split an --order value into (kind, argument)."""
    kind, _, argument = text.partition(":")
    if kind in ("edges-first", "declaration") and not argument:
        return kind, None
    if kind == "random" and argument.lstrip("-").isdigit():
        return kind, argument
    if kind == "file" and argument:
        return kind, argument
    raise GpkError(f"unknown order source {text!r}; use one of {', '.join(ORDER_SOURCES)}")


def random_edges_first_order(structure: IncidenceStructure, seed: int) -> Tuple[str, ...]:
    """Edges in random order followed by the remaining elements in random order."""
    rng = random.Random(seed)
    edges = [a for a in structure.universe if a in structure.incidence.edges]
    rest = [a for a in structure.universe if a not in structure.incidence.edges]
    rng.shuffle(edges)
    rng.shuffle(rest)
    return tuple(edges + rest)


def read_order_file(path: str) -> Tuple[str, ...]:
    with open(path, encoding="utf-8") as handle:
        return tuple(handle.read().split())


def resolve_order(structure: IncidenceStructure, source: str = "edges-first") -> Sequence[str]:
    kind, argument = parse_order_source(source)
    if kind == "declaration":
        return structure.universe
    if kind == "random":
        return random_edges_first_order(structure, int(argument))
    if kind == "file":
        order = read_order_file(argument)
        if sorted(order) != sorted(structure.universe):
            raise GpkError(f"order file {argument} is not a permutation of the universe")
        return order
    return edges_first_order(structure)
