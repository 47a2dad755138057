"""Exception hierarchy shared by all modules."""


class KorenblumError(Exception):
    """Base class for library errors."""


class DomainError(KorenblumError, ValueError):
    """An argument lies outside the operation's domain."""


class InfeasibleError(KorenblumError):
    """A construction cannot be realized with the given parameters."""


class InvariantViolation(KorenblumError):
    """A structural invariant failed; carries the offending index when known."""

    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class PrecisionError(KorenblumError):
    """Evaluation requested too close to the unit circle for double precision."""


class CertificationFailed(KorenblumError):
    """Minorant certification did not succeed within the scale cap."""

    def __init__(self, message, worst_sample=None):
        super().__init__(message)
        self.worst_sample = worst_sample
