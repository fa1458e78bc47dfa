"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid data: broken invariants, bad shapes, degenerate inputs."""


class SchemaError(DataError):
    """A file is missing required columns or has a malformed header."""


class ParseError(DataError):
    """A cell could not be parsed; the message names the offending row."""


class LabelConflictError(DataError):
    """Two overlapping intervals carry different labels."""


class ConfigError(ValueError):
    """An unknown option value or an inconsistent parameter combination."""
