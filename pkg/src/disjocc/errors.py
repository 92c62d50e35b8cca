"""Exception hierarchy shared by every module of the package."""


class DisjoccError(Exception):
    """Base class for all package errors."""


class InvalidFactorError(DisjoccError, ValueError):
    """A factor failed validation (order axioms or weights)."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class CapExceededError(DisjoccError):
    """An exact enumeration would exceed its configured cap."""


class SpaceTooLargeError(CapExceededError):
    pass


class FactorTooLargeError(CapExceededError):
    pass


class TooManyEventsError(CapExceededError):
    pass


class InstanceTooLargeError(CapExceededError):
    pass


class SpaceMismatchError(DisjoccError, ValueError):
    """Outcomes or events do not belong to the same product space."""


class HypothesisError(DisjoccError):
    """A theorem hypothesis required by an operation does not hold."""


class SpecFormatError(DisjoccError, ValueError):
    """A space/event/graph file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
