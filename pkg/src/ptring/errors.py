"""Exception hierarchy shared by all ptring modules."""


class PTRingError(Exception):
    """Base class for every error raised by ptring."""


class ConfigurationError(PTRingError, ValueError):
    """An invalid lattice or run parameter.

    ``field`` names the offending parameter so callers (and the CLI) can
    report it without parsing the message.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigParseError(ConfigurationError):
    """A malformed line in a ``key = value`` config file."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}", message)


class NumericalError(PTRingError, ArithmeticError):
    """A numerical routine failed; ``config`` records the offending lattice."""

    def __init__(self, message, config=None):
        self.config = config
        super().__init__(message if config is None else f"{message} [{config}]")


class NoTransitionError(NumericalError):
    """No unbroken-to-broken transition was found inside the search bracket."""


class DomainError(PTRingError, ValueError):
    """A function was evaluated outside its mathematical domain."""
