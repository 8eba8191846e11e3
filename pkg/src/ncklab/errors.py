"""Exception and warning types raised across the package."""


class NCKError(Exception):
    """Base class for every error raised by ncklab."""


class NotHermitian(NCKError, ValueError):
    pass


class NotPSD(NCKError, ValueError):
    pass


class NoConvergence(NCKError, ArithmeticError):
    pass


class CapExceeded(NCKError, ValueError):
    """A size cap (enumeration, solver size, verification) was exceeded."""


class NotCommuting(NCKError, ValueError):
    pass


class DegenerateSupport(NCKError, ArithmeticError):
    pass


class MajorizationViolated(NCKError, ValueError):
    pass


class NumericalBreakdown(NCKError, ArithmeticError):
    pass


class KernelMismatch(NCKError, ValueError):
    """``ker b`` is not contained in ``ker a``."""


class MalformedInput(NCKError, ValueError):
    """Unparseable or structurally invalid input; carries the position when known."""

    def __init__(self, msg, where=None, line=None, column=None):
        self.where = where
        self.line = line
        self.column = column
        loc = []
        if line is not None:
            loc.append(f"line {line}, column {column}")
        if where is not None:
            loc.append(f"at {where}")
        super().__init__(f"{msg} ({'; '.join(loc)})" if loc else msg)


class MaxIterExceeded(RuntimeWarning):
    """Issued (not raised) when an iterative solver hits its iteration cap.

    The solver still returns its last iterate together with diagnostics.
    """
