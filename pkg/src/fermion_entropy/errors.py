"""Exception hierarchy shared by every module of the package."""


class FermionEntropyError(Exception):
    """Base class for all package errors."""


class ModelError(FermionEntropyError, ValueError):
    """Model parameters outside the supported (critical) phase."""


class TableRangeError(FermionEntropyError, ValueError):
    """A Fourier table does not cover the lags a matrix needs."""


class DuplicateSite(FermionEntropyError, ValueError):
    pass


class NonPositiveSite(FermionEntropyError, ValueError):
    pass


class OverlappingParts(FermionEntropyError, ValueError):
    pass


class SpanTooLarge(FermionEntropyError, ValueError):
    pass


class TooLarge(FermionEntropyError, ValueError):
    pass


class SingularCore(FermionEntropyError, ArithmeticError):
    """The shared separator block is numerically singular.

    Callers should fall back to a path that does not invert the core.
    """


class NotSymmetric(FermionEntropyError, ValueError):
    pass


class NoConvergence(FermionEntropyError, ArithmeticError):
    pass


class NearSingularShift(FermionEntropyError, ArithmeticError):
    """``lambda * I - A`` is numerically singular at the requested shift."""


class DomainError(FermionEntropyError, ValueError):
    """A mode eigenvalue lies outside [-1, 1] beyond tolerance."""


class BadAlpha(FermionEntropyError, ValueError):
    pass


class ContourError(FermionEntropyError, ValueError):
    pass


class QuadratureError(FermionEntropyError, ArithmeticError):
    pass


class DegenerateGroundState(FermionEntropyError, ArithmeticError):
    pass


class DegenerateFermiLevel(FermionEntropyError, ArithmeticError):
    pass
