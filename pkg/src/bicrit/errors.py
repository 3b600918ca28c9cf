"""Exception hierarchy shared by all bicrit modules."""


class BicritError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(BicritError):
    """Malformed instance document (syntax, missing or ill-typed fields)."""


class InvariantError(BicritError):
    """Structurally well-formed data that violates a type invariant."""


class BadParams(BicritError):
    """Generator or algorithm parameters outside their documented domain."""


class DimensionError(BicritError):
    """Vector/matrix dimensions or index ranges do not line up."""


class IterationLimit(BicritError):
    """The simplex iteration cap was exceeded (never a silent approximation)."""


class ConfigExplosion(BicritError):
    """Configuration enumeration would exceed the column cap."""


class InfeasibleClp(BicritError):
    """The configuration LP has no feasible point: some job cannot fit in T."""


class InvalidAssignment(BicritError):
    """A schedule references an unschedulable or out-of-range pair."""


class NoPlantedWitness(BicritError):
    """planted LP mode requested on an instance without a planted witness."""


class NonIntegralDummyCount(BicritError):
    """(1 - alpha) * n is not an integer, so dummy items cannot be created."""


class MissingWitness(BicritError):
    """A reduction that needs a planted witness got an instance without one."""


class TooLarge(BicritError):
    """Instance exceeds the hard size guard of a brute-force oracle."""


class MismatchError(BicritError):
    """CLI algorithm is incompatible with the instance kind."""
