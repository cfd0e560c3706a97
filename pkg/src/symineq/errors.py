"""Exception hierarchy shared by the library and the CLI exit-code contract."""


class InputError(ValueError):
    """Rejected user input (bad parameters, malformed files). CLI exit code 2."""


class DimensionMismatch(InputError):
    pass


class InternalInvariantError(RuntimeError):
    """An invariant that holds by construction was observed to fail. CLI exit code 3."""


class TheoremViolation(InternalInvariantError):
    """A checked inequality failed on concrete exact values.

    The inequalities are theorems, so this always points at a bug in the
    artifact rather than in the mathematics. ``context`` carries the
    offending exact values.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}
