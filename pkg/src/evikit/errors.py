"""Exception types shared across the toolkit."""

from __future__ import annotations


class EvikitError(Exception):
    """Base class for all toolkit errors."""


class DataError(EvikitError):
    """Inconsistent or missing data (bad cross-references, out-of-range ids)."""


class ConfigError(EvikitError):
    """Invalid configuration (empty validation set, bad grid, M < 2, ...)."""


class ParseError(DataError):
    """A record file line could not be parsed."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class CorpusValidationError(DataError):
    """A loaded corpus failed cross-reference validation."""

    def __init__(self, errors: list[str]):
        preview = "; ".join(errors[:5])
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        super().__init__(f"{len(errors)} validation error(s): {preview}{more}")
        self.errors = errors
