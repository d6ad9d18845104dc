"""Exception types shared across the package."""


class MeltMapError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(MeltMapError):
    """A caller violated a documented precondition (bad shapes, bad config)."""


class DomainError(MeltMapError):
    """Inputs are structurally valid but mathematically degenerate
    (constant target, zero-variance column, log of a non-positive value)."""


class SchemaError(MeltMapError):
    """A CSV header does not match the required schema."""


class CsvParseError(MeltMapError):
    """A CSV cell could not be parsed as a number."""


class ValidationError(MeltMapError):
    """A record violates a dataset invariant."""
