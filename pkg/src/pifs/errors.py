class CarrierError(ValueError):
    """A point, set or map image lies outside the carrier, or has the wrong shape."""


class PreconditionError(ValueError):
    """An operation was called on inputs violating its contract."""


class ConvergenceError(RuntimeError):
    """An iteration hit its cap before meeting its stopping rule."""


class SizeCapError(RuntimeError):
    """A set or enumeration grew past its configured limit."""
