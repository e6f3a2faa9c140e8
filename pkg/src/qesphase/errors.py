"""Exception hierarchy shared by the library and the command-line driver."""


class QESError(Exception):
    """Base class for all errors raised by qesphase."""


class DimensionError(QESError, ValueError):
    """Two objects live in Fock spaces of different truncation."""


class GaugeUndefinedError(QESError, ValueError):
    """The gauge rate lambda = sum(A_s) is not strictly positive."""


class ConfigError(QESError, ValueError):
    """A run configuration failed validation."""


class NumericalError(QESError, ArithmeticError):
    """A numerical self-check failed (residue too large, solver failure, ...)."""
