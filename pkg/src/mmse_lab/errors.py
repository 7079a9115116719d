"""Exception hierarchy shared by the library and the CLI."""


class MmseLabError(Exception):
    """Base class for all library errors."""


class DistributionError(MmseLabError, ValueError):
    """Invalid input distribution or unsupported operation on one."""


class QuadratureError(MmseLabError, ArithmeticError):
    """A numerical integral failed to reach the requested tolerance."""


class VerificationError(MmseLabError, AssertionError):
    """A property that must hold mathematically was violated numerically.

    Raised when a checker finds something the theory forbids (a second
    crossing, a converse step that fails); it signals a bug, not a finding.
    """
