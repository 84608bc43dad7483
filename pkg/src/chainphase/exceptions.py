"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the range an operation is defined on."""


class DegenerateStateError(DomainError):
    """A state or schedule carries no amplitude (zero norm or zero dose)."""


class DivergentLimitError(DomainError):
    """A closed form diverges at the requested argument (e.g. a transparent sample)."""


class UnattainableError(DomainError):
    """A requested target can only be reached in a limit."""


class DegenerateScheduleError(DegenerateStateError):
    """A beamsplitter schedule couples no amplitude into the sample arm."""
