"""Exception hierarchy shared by all solver modules."""


class SpinorLightError(Exception):
    """Base class for numerical and domain failures."""


class ConfigError(SpinorLightError, ValueError):
    """Invalid or inconsistent configuration."""


class PhaseSingular(SpinorLightError):
    """The Rabi matrix is (numerically) singular: |sin S| below the guard."""


class ZeroDetuning(SpinorLightError):
    """A quantity that diverges at zero two-photon detuning was requested."""


class NonZeroDelta(SpinorLightError):
    """A zero-detuning closed form was called with delta != 0."""


class DenominatorVanishes(SpinorLightError):
    pass


class AsymptoticRegimeViolated(SpinorLightError):
    pass


class SingularBoundarySystem(SpinorLightError):
    pass


class CflViolation(SpinorLightError):
    pass


class NotConverged(SpinorLightError):
    """Steady state not reached before t_max.

    The partial result is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SweepPointError(SpinorLightError):
    """A single sweep point failed; ``index`` is the row index."""

    def __init__(self, index, cause):
        super().__init__(f"row {index}: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause
