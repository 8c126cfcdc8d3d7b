import os

from dotenv import load_dotenv

BASE_DIR = os.path.abspath(os.path.dirname(__file__))

load_dotenv(os.path.join(BASE_DIR, ".env"))


class Config:
    # 0 disables the wall-time cap
    BUDGET_MS = int(os.environ.get("GPK_BUDGET_MS", 0))
    MAX_UNIVERSE = int(os.environ.get("GPK_MAX_UNIVERSE", 12))
    MAX_COLORINGS = int(os.environ.get("GPK_MAX_COLORINGS", 2_000_000))
    LARGE_SUM_ARITY_CAP = int(os.environ.get("GPK_LARGE_SUM_ARITY_CAP", 2))
    MEMOIZE = os.environ.get("GPK_MEMOIZE", "true").lower() == "true"
    USE_SURGERIES = os.environ.get("GPK_USE_SURGERIES", "true").lower() == "true"
    LOG_LEVEL = os.environ.get("GPK_LOG_LEVEL", "WARNING")
    SEED = int(os.environ.get("GPK_SEED", 7))
    INVARIANCE_SAMPLES = int(os.environ.get("GPK_INVARIANCE_SAMPLES", 20))
    EXHAUSTIVE_ORDER_LIMIT = int(os.environ.get("GPK_EXHAUSTIVE_ORDER_LIMIT", 720))
    DEFINITIONS_DIR = os.environ.get(
        "GPK_DEFINITIONS_DIR", os.path.join(BASE_DIR, "gpk", "definitions")
    )


class DevelopmentConfig(Config):
    LOG_LEVEL = "DEBUG"


class TestingConfig(Config):
    BUDGET_MS = 0
    LOG_LEVEL = "WARNING"
    MEMOIZE = True
    USE_SURGERIES = True
