"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation (e.g. beta <= 0)."""


class InvalidModelError(ValueError):
    """A model or measure violates its construction invariants."""


class CapTooSmallError(InvalidModelError):
    """A scan cap was reached before the bound-state set closed."""


class UnsupportedModelError(NotImplementedError):
    """The model is valid but its reduction is not implemented."""


class InvalidBinningError(ValueError):
    pass


class InadmissibleCollisionError(ValueError):
    """The energy gap of the requested collision channel is negative."""


class DegeneratePairError(ValueError):
    """Colliding partners have identical velocities."""


class MajorantViolationError(RuntimeError):
    """A DSMC acceptance probability exceeded one."""


class PositivityError(RuntimeError):
    """A finite-volume update produced nonpositive density or internal energy."""


class ConversionError(ValueError):
    pass
