"""Exception hierarchy shared by all qbphase modules."""


class QBPhaseError(Exception):
    """Base class for every error raised by qbphase."""


class NonHermitianInput(QBPhaseError, ValueError):
    pass


class DimensionTooLarge(QBPhaseError, ValueError):
    pass


class DimensionMismatch(QBPhaseError, ValueError):
    pass


class NegativeRate(QBPhaseError, ValueError):
    pass


class InvalidAmplitudes(QBPhaseError, ValueError):
    pass


class NonzeroRates(QBPhaseError, ValueError):
    pass


class GridMismatch(QBPhaseError, ValueError):
    pass


class UnknownFigure(QBPhaseError, KeyError):
    pass


class ConfigError(QBPhaseError, ValueError):
    pass


class ToleranceFailure(QBPhaseError, RuntimeError):
    pass


class PhysicalityViolation(QBPhaseError, RuntimeError):
    """A propagated state left the set of density matrices.

    Attributes
    ----------
    time : float
        First grid time at which the guard tripped.
    magnitude : float
        Size of the violation (trace deviation or negative eigenvalue).
    kind : str
        ``"trace"`` or ``"positivity"``.
    """

    def __init__(self, kind, time, magnitude):
        super().__init__(kind, time, magnitude)
        self.kind = kind
        self.time = time
        self.magnitude = magnitude

    def __str__(self):
        return f"{self.kind} guard tripped at t={self.time:.6g} (magnitude {self.magnitude:.3e})"


class InitialStateNotPure(QBPhaseError, ValueError):
    pass


class BranchAmbiguity(QBPhaseError, RuntimeError):
    """Eigenstate tracking could not tell two branches apart."""

    def __init__(self, time, separation, gap):
        super().__init__(time, separation, gap)
        self.time = time
        self.separation = separation
        self.gap = gap

    def __str__(self):
        return (f"ambiguous eigenbranch at t={self.time:.6g}: overlap separation "
                f"{self.separation:.3e}, spectral gap {self.gap:.3e}")


class OrthogonalNeighbors(QBPhaseError, ValueError):
    pass


class ScenarioError(QBPhaseError):
    """Wraps a failure inside one scenario run with its name attached."""

    def __init__(self, name, cause):
        super().__init__(name, cause)
        self.name = name
        self.cause = cause

    def __str__(self):
        return f"scenario {self.name!r} failed: {type(self.cause).__name__}: {self.cause}"
