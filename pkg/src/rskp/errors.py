"""Exception types shared across the package.

Every failure mode that a caller can reasonably branch on gets its own
class here.  All of them inherit from RskpError so that the CLI can catch
the whole family at one place and map it to an exit code.
"""


class RskpError(Exception):
    """Base class for all package-specific errors."""


class CollisionError(RskpError):
    """Two particles violate a gap invariant |x_i - x_j| or |x_i - x_j - 1|.

    Attributes
    ----------
    pair : tuple of int
        Indices (i, j) of the offending particles.
    gap : float
        The offending gap value x_i - x_j.
    trajectory : object or None
        Partial trajectory accumulated before the abort, when raised
        from inside an integration.
    """

    def __init__(self, pair, gap, message=None, trajectory=None):
        self.pair = pair
        self.gap = gap
        self.trajectory = trajectory
        if message is None:
            i, j = pair
            message = f"particles {i} and {j} collide: gap x_{i}-x_{j} = {gap!r}"
        super().__init__(message)


class NonpositiveRapidityArgument(RskpError):
    """The rapidity relation requires a positive argument to the logarithm.

    Raised when -xdot_i * prod_s (x_i-x_s)/(x_i-x_s+1) <= 0 for some i,
    which puts the state outside the real-rapidity regime.
    """

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"rapidity argument for particle {index} is {value!r}, must be > 0"
        )


class StepSizeUnderflow(RskpError):
    """Adaptive step size fell below the hard floor (1e-14)."""


class ComplexRootsEncountered(RskpError):
    """The root matrix has nonreal eigenvalues; outside the real generic regime.

    The complex spectrum is attached as the ``roots`` attribute so callers
    that merely flag (rather than abort) can still use it.
    """

    def __init__(self, roots, message=None):
        self.roots = roots
        super().__init__(message or "nonreal roots encountered")


class DegenerateEigenvalue(RskpError):
    """Eigenvalue too ill-conditioned for reliable derivative extraction."""


class SpectralRadiusViolation(RskpError):
    """|z| is not safely above the spectral radius of Y0."""


class SingularShiftMatrix(RskpError):
    """z*I + Y0 is numerically singular, the Miwa shift cannot be resummed."""


class TauZeroDenominator(RskpError):
    """tau(n;t) = 0 at a requested sample, wave values are undefined there."""


class TruncationExhausted(RskpError):
    """A requested coefficient lies below the trustworthy truncation order."""


class IllConditionedExtraction(RskpError):
    """Linear solve for series coefficients exceeded the condition bound."""
