class ArgumentError(ValueError):
    """Invalid argument: out-of-range index, wrong space, missing arity."""


class PreconditionError(ArgumentError):
    """A mathematical hypothesis of the requested construction fails."""
