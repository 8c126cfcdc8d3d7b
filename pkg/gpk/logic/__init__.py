import os
from functools import lru_cache
from typing import Dict

from gpk.logic import natives
from gpk.logic.syntax import (
    FALSE,
    TRUE,
    And,
    Constant,
    Equal,
    ExistsFO,
    ExistsSO,
    ForallFO,
    ForallSO,
    Formula,
    Implies,
    Native,
    Not,
    Or,
    RelArg,
    RelAtom,
    RelVarAtom,
    SortArg,
    Truth,
    Var,
    conj,
    disj,
    free_relation_variables,
    free_variables,
    iff,
    neq,
    substitute,
    to_text,
)
from gpk.logic.evaluator import Assignment, Checker, as_relation, evaluate
from gpk.logic.reader import FormulaReader, Macro, parse, parse_macros, read_sexprs

DEFINITIONS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "definitions")


def native_predicate(name: str, structure, arguments):
    return natives.native_predicate(name, structure, arguments)


@lru_cache(maxsize=None)
def _load_macros(path: str) -> Dict[str, Macro]:
    with open(path, encoding="utf-8") as handle:
        return parse_macros(handle.read())


def helper_macros(directory: str = DEFINITIONS_DIR) -> Dict[str, Macro]:
    """The helper formula library (Connected, Cycle, LastInComp, ...) as macros."""
    return dict(_load_macros(os.path.join(directory, "helpers.gpk")))


def parse_with_helpers(text: str, vocabulary="graph2", constants=(), free_relations=None) -> Formula:
    return parse(text, vocabulary, constants, free_relations, helper_macros())
