"""Exception hierarchy.

Every failure raised by the numerical core derives from :class:`SpectralError`
so callers (the CLI in particular) can map computation errors to one exit code.
"""


class SpectralError(Exception):
    """Base class for computation errors."""


class CountMismatch(SpectralError):
    """Number of bracketed roots disagrees with the counting certificate."""


class ConvergenceFailure(SpectralError):
    """Root refinement stalled."""


class GapResolutionFailure(SpectralError):
    """A periodic gap could not be classified as open or closed."""


class DegenerateEntry(SpectralError):
    """A monodromy entry that must be nonzero at an eigenvalue vanished."""


class CrossCheckFailure(SpectralError):
    """Two independent evaluations of the same quantity disagree."""


class AlternationViolation(SpectralError):
    """Two spectra do not strictly alternate."""


class UnsupportedSigma(SpectralError):
    """Sign sequence without an explicit lamplighter transform."""


class NegativeDiscriminant(SpectralError):
    """A squared gap-map component came out negative beyond round-off."""


class WindowMismatch(SpectralError):
    """Spectral windows with incompatible index ranges were combined."""


class GridMismatch(ValueError):
    """Gradient fields sampled on different grids."""


class PotentialConfigError(ValueError):
    """Malformed potential configuration; message carries the line number."""
