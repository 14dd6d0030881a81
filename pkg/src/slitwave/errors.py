"""
Exception hierarchy for slitwave.

Every error raised on purpose by the package derives from SlitwaveError so
callers (and the CLI) can separate domain failures from programming errors.
"""


class SlitwaveError(Exception):
    """Base class for all slitwave errors."""
    pass


class DimensionError(SlitwaveError):
    """Raised when a quantity has an unknown unit or incompatible dimension."""
    pass


class ZeroMomentumError(SlitwaveError):
    """Raised when a kinematic quantity needs a nonzero central momentum."""
    pass


class SpecialFunctionDomainError(SlitwaveError):
    """Raised when a special function receives a non-finite argument."""
    pass


class DomainError(SlitwaveError):
    """Raised when an evaluator is called outside its domain (e.g. t <= 0)."""
    pass


class NoOscillationError(DomainError):
    """Raised when a transient period is requested where the density does not oscillate."""
    pass


class EvanescentOrderError(SlitwaveError):
    """Raised when a diffraction order has |sin(theta)| > 1."""
    pass


class BelowThresholdOrderError(SlitwaveError):
    """Raised when an energy-domain order corresponds to p_n <= 0."""
    pass


class GeometryError(SlitwaveError):
    """Raised when an initial state does not fit on the requested grid."""
    pass


class UnderResolvedError(SlitwaveError):
    """Raised when the grid spacing cannot resolve the regularization width."""
    pass


class MomentumWindowError(SlitwaveError):
    """Raised when the FFT momentum grid would alias the state's spectrum."""
    pass


class FeaturelessSeriesError(SlitwaveError):
    """Raised when a comparison needs fringe peaks and a series has none."""
    pass


class SamplingError(SlitwaveError):
    """Raised when events cannot be drawn from a density."""
    pass


class InsufficientOscillationsError(SlitwaveError):
    """Raised when a series has too few midline crossings to extract periods."""
    pass


class ScenarioError(SlitwaveError):
    """Base class for scenario catalog and override errors."""
    pass


class UnknownScenarioError(ScenarioError):
    """Raised when a scenario name is not in the catalog."""
    pass


class InvalidOverrideError(ScenarioError):
    """Raised when a key=value override does not apply to a scenario spec."""
    pass


class ScenarioCollisionError(ScenarioError):
    """Raised when two definition files declare the same scenario name."""
    pass
