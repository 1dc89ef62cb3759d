"""Semantic exception hierarchy.

Every failure mode that callers are expected to branch on gets its own class.
The CLI maps these onto exit codes (numerical failures exit 3, validation
failures exit 4); library users can catch :class:`SquimldError` wholesale.
"""


class SquimldError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(SquimldError, ValueError):
    """Parameter combination outside the model's admissible region."""


class NearBoundary(SquimldError):
    """Evaluation point is not strictly inside the domain D.

    Raised when min q(y) over [-1, 1] falls below the strict-interior
    threshold, where the closed forms for 1/q integrals lose meaning.
    """


class NoRoot(SquimldError):
    """The axis function H has no second zero for these parameters."""


class OutOfThetaRange(SquimldError):
    """theta lies outside the open interval where 1 - 2*theta*A(x) > 0."""


class HypothesisViolation(SquimldError):
    """A theorem hypothesis needed by the requested computation fails."""


class DegenerateWeights(SquimldError):
    """Importance weights collapsed: denominator effective sample size < 100."""


class NoConstraintPoints(SquimldError):
    """No sampled point landed in the constraint set G (marker condition)."""


class InsufficientCurve(SquimldError):
    """Rate curve has too few valid points for interpolation."""
