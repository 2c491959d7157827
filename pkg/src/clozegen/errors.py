"""Exception types shared across the package."""


class ClozegenError(Exception):
    """Base class for all package-specific errors."""


class BackendError(ClozegenError):
    """An inference backend failed; the original cause is chained."""


class ContractViolation(ClozegenError, ValueError):
    """A caller broke a documented precondition."""


class SequenceLengthError(ClozegenError):
    """A token sequence exceeds the backend's maximum length."""


class SpanError(ClozegenError, ValueError):
    """An answer span does not fit inside its context."""


class ParseError(ClozegenError):
    """An input file does not match the expected schema."""


class ResolveError(ClozegenError):
    """An answer string could not be located inside its context."""


class ConfigError(ClozegenError):
    """Invalid or incomplete configuration."""
