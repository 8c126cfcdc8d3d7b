from typing import Optional


class GpkError(Exception):
    """Base class for everything the kit raises on purpose."""

    exit_code = 1


class VocabularyMismatchError(GpkError):
    pass


class ElementKindError(GpkError):
    pass


class LoopContractionError(ElementKindError):
    pass


class GraphFormatError(GpkError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(GpkError):
    """DSL reader failure; `position` is the character offset when known."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class UnknownSymbolError(ParseError):
    pass


class ArityMismatchError(ParseError):
    pass


class UnassignedVariableError(GpkError):
    pass


class TranslationError(GpkError):
    pass


class DefinitionError(GpkError):
    pass


class MissingIndeterminateError(GpkError):
    pass


class RenamingError(GpkError):
    pass


class CapacityError(GpkError):
    exit_code = 3


class BudgetExceededError(GpkError):
    exit_code = 3


class InfeasibleOrderError(GpkError):
    exit_code = 2

    def __init__(self, context, structure_summary: str = ""):
        self.context = context
        detail = f"no deconstruction enabled at context {context!r}"
        if structure_summary:
            detail = f"{detail} in {structure_summary}"
        super().__init__(detail)


class InvalidOrderError(GpkError):
    exit_code = 2


MISMATCH_EXIT_CODE = 4


def exit_code_for(error: BaseException) -> int:
    """Exit code contract for the CLI: 1 usage, 2 infeasible order, 3 budget."""
    return getattr(error, "exit_code", 1)
