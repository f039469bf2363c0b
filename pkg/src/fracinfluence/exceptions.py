"""Exception hierarchy. CLI exit codes are attached to the classes."""


class FracInfluenceError(Exception):
    exit_code = 1


class ConfigError(FracInfluenceError, ValueError):
    """Invalid parameters or experiment configuration."""

    exit_code = 2


class DomainError(ConfigError):
    """A numeric argument is outside its allowed range."""


class FeasibilityError(ConfigError):
    """An allocation violates the budget or the f_v(y_v) <= 1 constraint."""


class DataError(FracInfluenceError):
    """Input data could not be read, parsed or retrieved."""

    exit_code = 3


class ParseError(DataError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NetworkError(DataError):
    """Download failed; retrying may succeed."""

    retryable = True


class IntegrityError(DataError):
    """Downloaded content does not match the pinned checksum."""


class SizeError(FracInfluenceError, ValueError):
    """Instance too large for exhaustive enumeration."""

    exit_code = 4
