"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class ConfigError(ValueError):
    """A configuration value is out of its legal range."""


class ParseError(ValueError):
    """External input (CSV, JSON, corpus files) could not be parsed."""


class FitError(RuntimeError):
    """Training could not proceed (for example a non-finite objective)."""


class EvaluationError(ValueError):
    """An evaluation routine received degenerate input."""
