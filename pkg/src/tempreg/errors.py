"""Exception types raised by the numerical routines."""


class TempRegError(Exception):
    """Base class for all package errors."""


class NonConvergence(TempRegError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class ZeroMass(TempRegError, ValueError):
    """A stationary probability is too small to divide by."""


class DimensionMismatch(TempRegError, ValueError):
    pass


class SingularSystem(TempRegError, ArithmeticError):
    pass


class TrajectoryTooShort(TempRegError, RuntimeError):
    pass


class Divergence(TempRegError, FloatingPointError):
    """Online parameter estimate blew up (step size too large)."""
