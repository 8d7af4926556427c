"""
Exceptions raised by the benchmark harness.

All of them are ValueError subclasses so callers that only care about
"bad input" can keep catching ValueError.
"""

from typing import Optional


class InfeasibleBudgetError(ValueError):
    """A privacy budget / subsample combination makes a noise-scale formula undefined."""


class DataFormatError(ValueError):
    """A CSV file could not be parsed into a numeric design matrix."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
