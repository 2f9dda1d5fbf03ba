"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or invalid shapes."""


class NumericFailure(RuntimeError):
    """A numerical routine failed (non-convergence, residuals out of range)."""


class BorderlineInstance(NumericFailure):
    """Eigenvalue clustering is ambiguous: the instance is numerically borderline."""


class HypothesisViolation(ValueError):
    """The algebraic hypotheses of a block formula are not satisfied."""


class GroupInverseError(ValueError):
    """The group inverse does not exist (matrix index exceeds one)."""


class InfeasibleSpec(ValueError):
    """A generator specification cannot be realised at the requested dimensions."""
