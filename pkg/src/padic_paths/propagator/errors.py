"""Exception hierarchy for the propagator engine.

Every error carries the process exit code the command-line front end maps
it to, so handlers never need a lookup table.
"""


class PropagatorError(ValueError):
    """Base class for all domain errors."""

    exit_code: int = 3

    @property
    def name(self) -> str:
        """Return the error name printed on standard error."""
        return type(self).__name__


class NotPrime(PropagatorError):
    """A place was requested for a non-prime integer."""


class ZeroInput(PropagatorError):
    """Digit expansion of zero was requested."""


class EvenPrime(PropagatorError):
    """Legendre symbol requested for p = 2."""


class ZeroAlpha(PropagatorError):
    """Degenerate quadratic form in a Gauss integral."""


class MeshTooCoarse(PropagatorError):
    """The mesh is coarser than the local constancy radius of the integrand."""


class SumTooLarge(PropagatorError):
    """A brute-force sum would exceed the configured term budget."""

    exit_code = 4


class NoStabilization(PropagatorError):
    """Ball integrals did not stabilize within the term budget."""

    exit_code = 4


class ZeroInterval(PropagatorError):
    """t_end equals t_start."""


class ZeroMass(PropagatorError):
    """Mass parameter is zero."""


class OutsideDisk(PropagatorError):
    """Argument lies outside the convergence disk of the p-adic series."""


class TimeMismatch(PropagatorError):
    """Actions do not share the intermediate time."""


class DegenerateComposition(PropagatorError):
    """The quadratic coefficient of the intermediate variable vanishes."""


class DegenerateRelation(PropagatorError):
    """A second derivative or its inverse needed by the u/v relations vanishes."""


class PrecisionLoss(PropagatorError):
    """A series-backed value is not determined to the precision required."""
