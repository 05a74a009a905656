"""Exception hierarchy shared by the library and the CLI exit codes."""


class TubecastError(Exception):
    """Base class for every error raised by tubecast."""

    exit_code = 1


class SpecError(TubecastError, ValueError):
    """Malformed or structurally inconsistent model or input document."""

    exit_code = 2


class DimensionError(TubecastError, ValueError):
    """Arrays whose shapes do not agree with the model or with each other."""

    exit_code = 3


class NumericalError(TubecastError, ArithmeticError):
    """A solve or factorization produced a non-finite or invalid result."""

    exit_code = 4
