"""Exception types shared across the package."""


class RigidsatError(Exception):
    """Base class for all errors raised by this package."""


class InvalidQueryError(RigidsatError, ValueError):
    pass


class SizeCapError(RigidsatError):
    """Exhaustive search refused: input exceeds the configured vertex cap."""


class ContractError(RigidsatError, ValueError):
    """A precondition stated by an operation was violated by the caller."""


class ScheduleError(RigidsatError, ValueError):
    pass


class ConstructionError(RigidsatError):
    """A finite construction could not be completed (e.g. witnesses ran out)."""


class MetricError(RigidsatError, ValueError):
    pass
