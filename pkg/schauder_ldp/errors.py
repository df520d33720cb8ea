"""
Exception hierarchy shared by the numerical core, the runner and the CLI.
"""

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


class SchauderLDPError(Exception):
    pass


class DomainError(SchauderLDPError, ValueError):
    """A precondition of a numerical operation is violated."""


class ConfigError(SchauderLDPError, ValueError):
    """Spectrum, divergent-sequence or tail-series configuration is invalid."""


class IngestionError(SchauderLDPError, ValueError):
    """An input file is malformed."""


class UsageError(SchauderLDPError, ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class RefusedError(DomainError):
    """Monte Carlo refused because too few hits are expected."""


VALIDATION_ERRORS = (DomainError, ConfigError, IngestionError, UsageError)


def exit_code_for(ex: BaseException) -> int:
    if isinstance(ex, VALIDATION_ERRORS):
        return EXIT_VALIDATION
    return EXIT_RUNTIME
