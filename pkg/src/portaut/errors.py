"""Exception hierarchy shared by the kernel and the command line."""


class PortAutError(Exception):
    """Base class for every error raised by this package."""


class MismatchError(PortAutError):
    """Two morphisms or objects that must line up do not."""


class InvalidInputError(PortAutError):
    """An automaton, morphism, connector or net failed validation."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NonCommutingError(PortAutError):
    """A square or cube that is required to commute does not."""


class UnsupportedError(PortAutError):
    """The construction is not defined for this input (e.g. non-injective primitive maps)."""


class ResourceError(PortAutError):
    """Base class for guard violations; the CLI maps these to exit code 3."""


class SearchBudgetExceeded(ResourceError):
    """A morphism search ran out of budget before reaching an answer.

    Distinct from a negative answer: nothing is known about existence.
    """


class SizeGuardError(ResourceError):
    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class UnknownStateError(PortAutError):
    pass


class ParseError(PortAutError):
    def __init__(self, message, line=None, column=None):
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column
