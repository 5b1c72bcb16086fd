"""Exception hierarchy.

Data problems (bad files, bad shapes) derive from :class:`DataError`;
optimizer failures derive from :class:`NumericalError`.  The CLI maps the
two families onto distinct exit codes.
"""


class HTDMLError(Exception):
    """Base class for every error raised by this package."""


class DataError(HTDMLError, ValueError):
    pass


class FormatError(DataError):
    """Malformed file content (ragged rows, truncated model files, ...)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(FormatError):
    pass


class EmptyInputError(DataError):
    pass


class AlignmentError(DataError):
    def __init__(self, n_source, n_target):
        self.n_source = n_source
        self.n_target = n_target
        super().__init__(
            f"correspondence files are misaligned: {n_source} source rows "
            f"vs {n_target} target rows")


class PairIndexError(DataError, IndexError):
    pass


class LabelError(DataError):
    pass


class DimensionError(DataError):
    pass


class NotSymmetricError(DataError):
    pass


class NotPSDError(DataError):
    pass


class DegenerateBandwidthError(DataError):
    pass


class VersionError(FormatError):
    pass


class ConfigError(HTDMLError):
    """Invalid configuration or hyper-parameter values."""


class NumericalError(HTDMLError, ArithmeticError):
    pass


class StagnationError(NumericalError):
    def __init__(self, message, iterate=None, iteration=None):
        self.iterate = iterate
        self.iteration = iteration
        super().__init__(message)


class NonFiniteError(NumericalError):
    pass
