"""Exception hierarchy.

Everything raised on purpose derives from :class:`OptoCausalError`. The CLI
maps :class:`ValidationError` to exit code 2 and :class:`NumericalError` to
exit code 3.
"""


class OptoCausalError(Exception):
    pass


class ValidationError(OptoCausalError, ValueError):
    pass


class NumericalError(OptoCausalError, ArithmeticError):
    pass


class NonPositiveRate(ValidationError):
    pass


class NegativeCoupling(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class DenominatorZero(NumericalError):
    pass


class DegenerateSlabPhase(NumericalError):
    pass


class PerfectMirror(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class WindowTooNarrow(NumericalError):
    pass


class Unstable(NumericalError):
    pass


class UnphysicalCovariance(NumericalError):
    pass


class UnphysicalMoments(NumericalError):
    pass


class NegativeDiscriminant(NumericalError):
    pass


class NonPositiveEta(NumericalError):
    pass


class NoSignChange(NumericalError):
    pass


class DefectiveMatrixWarning(RuntimeWarning):
    """Eigenvectors of the drift matrix are too ill-conditioned to use."""
