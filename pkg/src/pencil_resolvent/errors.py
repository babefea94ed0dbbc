"""Exception hierarchy shared by every module."""


class PencilError(Exception):
    """Base class for all package errors."""


class InvalidShape(PencilError, ValueError):
    """Matrix or subspace dimensions are missing or inconsistent."""


class EmptyWindow(PencilError, ValueError):
    """A growth-rate fit was requested on fewer than two points."""


class MissingCoefficient(PencilError, LookupError):
    """A Laurent coefficient needed for a residual is not stored."""

    def __init__(self, j: int):
        super().__init__(f"coefficient R_{j} is not in the expansion")
        self.j = j


class SingularShift(PencilError, ArithmeticError):
    """A shifted operator in the closed-form resolvent is singular at z."""


class ChainBlocked(PencilError):
    """A Jordan chain cannot be continued past ``step``."""

    def __init__(self, step: int, message: str | None = None):
        super().__init__(message or f"chain blocked at step {step}")
        self.step = step


class NotComplementary(PencilError):
    """Two subspaces do not form a direct-sum decomposition."""

    def __init__(self, message: str, dims: tuple[int, ...] = ()):
        super().__init__(message)
        self.dims = dims


class NotInvertibleOnSubspace(PencilError):
    """A pencil coefficient is not injective on a generating subspace."""


class OutsideAnnulus(PencilError, ValueError):
    """An evaluation point lies outside the annulus of validity."""


class SingularNode(PencilError, ArithmeticError):
    """The pencil is numerically singular at a quadrature node."""

    def __init__(self, node: int, z: complex):
        super().__init__(f"A(z) is singular at quadrature node {node} (z={z:.6g})")
        self.node = node
        self.z = z


class InvalidParams(PencilError, ValueError):
    """Family parameters are not admissible."""


class NoReference(PencilError, LookupError):
    """No closed-form reference is available for this family or region."""


class ResampleLimitExceeded(PencilError, RuntimeError):
    """A random constructor failed to meet its acceptance test."""


class ParseError(PencilError, ValueError):
    """A pencil document is malformed."""
