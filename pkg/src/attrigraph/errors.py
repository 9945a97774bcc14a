"""Exception hierarchy shared across the pipeline."""


class AttrigraphError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatchError(AttrigraphError):
    """Operand shapes are incompatible for the requested operation."""


class ValidationError(AttrigraphError):
    """A manifest, config, or aggregate failed an invariant check."""


class FormatError(AttrigraphError):
    """A serialized file is malformed or truncated."""
