"""Exception hierarchy shared across the engine.

Every error class maps to a distinct CLI exit code (see ``cli.EXIT_CODES``)
and, where applicable, an HTTP status + machine-readable reason.
"""


class JointEmbError(Exception):
    """Base class for all engine errors."""


class CorpusFormatError(JointEmbError):
    """A corpus file line could not be parsed (carries the line number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(JointEmbError):
    """Input violates an invariant (duplicate id, ragged features, ...)."""


class ConfigError(JointEmbError):
    """Invalid configuration value or unreadable config file."""


class ArtifactFormatError(JointEmbError):
    """Persisted artifact has a bad magic, version, or truncated payload."""


class DegenerateQueryError(JointEmbError):
    """Query terms cancel out: the composed vector has (near-)zero norm."""


class UnembeddableQueryError(JointEmbError):
    """No token of the query is representable by the text embedder."""


class PrerequisiteError(JointEmbError):
    """An operation's data prerequisite is unmet (no test split, no labels, ...)."""
