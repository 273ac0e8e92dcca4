"""Exception hierarchy shared by all kernels.

The CLI maps these onto exit codes: :class:`DomainError` -> 2,
:class:`QuadratureError` -> 3.
"""


class DomainError(ValueError):
    """Input outside the domain where a formula is defined."""


class RegularizationError(DomainError):
    """Lossless mirror (xi = 0) evaluated on a resonance."""


class ExpansionError(DomainError):
    """Small-amplitude expansion requested for motion that is not small."""


class SpectrumVariantError(TypeError):
    """Pointwise value requested for a distributional (line) spectrum."""


class QuadratureError(ArithmeticError):
    """Base class for numerical integration failures.

    ``best`` holds the last estimate (a QuadResult-like object) when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConvergenceError(QuadratureError):
    pass


class DivergenceError(QuadratureError):
    pass


class SingularityError(QuadratureError):
    """Non-integrable singularity, or a pole that was expected to cancel did not."""


class NonFiniteError(QuadratureError):
    pass


class RangeError(ArithmeticError):
    """Result under/overflowed double precision."""
