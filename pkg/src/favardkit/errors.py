"""Error types shared across modules.

Each class carries the process exit code used by the command line driver.
"""


class ConfigError(ValueError):
    """Invalid configuration or arguments."""

    exit_code = 2


class BudgetError(RuntimeError):
    """A computation exceeded its configured resource budget."""

    exit_code = 3


class HypothesisFailure(RuntimeError):
    """A required hypothesis inequality could not be satisfied."""

    exit_code = 4
