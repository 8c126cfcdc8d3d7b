import logging
from typing import Callable, Dict, Optional, Type

from config import Config

logger = logging.getLogger(__name__)


class Workbench:
    """Configuration, logger, catalog and error handlers for one run."""

    def __init__(self, config: dict):
        self.config = config
        self.logger = logger
        self.catalog = {}
        self._handlers: Dict[Type[BaseException], Callable[[BaseException], int]] = {}

    def errorhandler(self, error_class: Type[BaseException]):
        def register(handler: Callable[[BaseException], int]):
            self._handlers[error_class] = handler
            return handler

        return register

    def handle(self, error: BaseException) -> Optional[int]:
        """Run the handler of the most specific registered class; None when nothing matches."""
        for cls in type(error).__mro__:
            handler = self._handlers.get(cls)
            if handler is not None:
                return handler(error)
        return None

    def budget(self):
        from gpk.utils import Budget

        return Budget(self.config["BUDGET_MS"])

    def options(self) -> dict:
        """Keyword arguments the engines take from the configuration."""
        return {
            "memoize": self.config["MEMOIZE"],
            "use_surgeries": self.config["USE_SURGERIES"],
            "arity_cap": self.config["LARGE_SUM_ARITY_CAP"],
            "max_universe": self.config["MAX_UNIVERSE"],
            "max_colorings": self.config["MAX_COLORINGS"],
            "directory": self.config["DEFINITIONS_DIR"],
        }


def _configure_logging(level: str) -> None:
    package_logger = logging.getLogger(__name__)
    if not package_logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(handler)
    package_logger.setLevel(level.upper())


def create_app(config_class: type = Config) -> Workbench:
    config = {key: getattr(config_class, key) for key in dir(config_class) if key.isupper()}
    _configure_logging(config.get("LOG_LEVEL", "WARNING"))
    workbench = Workbench(config)

    from gpk.catalog import CATALOG
    from gpk.errors import (
        BudgetExceededError,
        CapacityError,
        GpkError,
        InfeasibleOrderError,
        exit_code_for,
    )

    workbench.catalog = dict(CATALOG)

    @workbench.errorhandler(InfeasibleOrderError)
    def handle_infeasible_order(error):
        logger.error("Infeasible order: %s", error, exc_info=True)
        return exit_code_for(error)

    @workbench.errorhandler(BudgetExceededError)
    def handle_budget(error):
        logger.error("Budget exceeded: %s", error, exc_info=True)
        return exit_code_for(error)

    @workbench.errorhandler(CapacityError)
    def handle_capacity(error):
        logger.error("Capacity exceeded: %s", error, exc_info=True)
        return exit_code_for(error)

    @workbench.errorhandler(GpkError)
    def handle_gpk_error(error):
        logger.error("Run failed: %s", error, exc_info=True)
        return exit_code_for(error)

    return workbench
