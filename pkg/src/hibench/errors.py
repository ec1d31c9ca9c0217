"""Exception types shared across the harness.

The CLI maps these onto exit codes: ``ConfigError`` -> 1, ``DataError`` -> 2,
anything else -> 3.
"""


class HarnessError(Exception):
    """Base class for errors raised deliberately by the harness."""


class ConfigError(HarnessError, ValueError):
    pass


class DataError(HarnessError, ValueError):
    pass
