"""Exception types shared across the package."""


class DialtileError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DialtileError):
    """Invalid configuration: unknown format tag, bad option value, bad config file."""


class CorpusError(DialtileError):
    """A corpus could not be loaded."""


class ParseError(CorpusError):
    """A corpus file failed to parse; message names the file and line."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class MetricError(DialtileError):
    """A metric is undefined for the given inputs (e.g. fewer than 2 utterances)."""
