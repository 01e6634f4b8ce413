"""Exception classes shared across modules.

The CLI maps these onto exit codes, so each class marks a failure category
rather than a specific site.
"""


class InputError(ValueError):
    """Malformed or mismatched input (files, graph specs, catalogs)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GraphSpecError(InputError):
    pass


class NumericalError(ValueError):
    """A computation hit a degenerate configuration."""


class DegenerateNormalizationError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    pass


class InconsistentFeaturesError(NumericalError):
    pass
