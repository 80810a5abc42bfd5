"""Error taxonomy.

Every failure raised by this package derives from :class:`JcgError` and
carries a process exit code so the command line front end can translate
failures uniformly: rejected input exits 1, a malformed invocation exits 2,
and a numerical procedure that failed or left its validity domain exits 3.
"""


class JcgError(Exception):
    exit_code = 1


class ValidationError(JcgError):
    """Input rejected before (or instead of) running numerics."""

    exit_code = 1


class UsageError(JcgError):
    """Malformed command line or request."""

    exit_code = 2


class NumericError(JcgError):
    """A numerical procedure failed or produced an untrustworthy result."""

    exit_code = 3


class IoError(ValidationError):
    """A file could not be read, parsed, or written."""


class TooManySpins(ValidationError):
    """Spin count outside the supported range 1..20."""


class CasimirViolation(ValidationError):
    """A spin vector does not sit on the sphere of radius s (or drifted off it)."""


class DegenerateRoots(ValidationError):
    """Level splittings or Bethe roots closer than the resolvable threshold."""


class NotFocusFocus(ValidationError):
    """The requested construction needs a focus-focus pair that is not there."""


class OscillatorVanishes(ValidationError):
    """The oscillator amplitude is zero, so separated coordinates degenerate."""


class CoincidentLambdas(ValidationError):
    """Separation coordinates collide; Lagrange interpolation would blow up."""


class ZeroAmplitude(ValidationError):
    """A soliton amplitude X_l is zero; the torus coordinates degenerate."""


class PoleAtEpsilon(ValidationError):
    """Evaluation point too close to a pole of the Lax matrix."""


class SingularFiber(ValidationError):
    """Requested a cycle on (or indistinguishably close to) the critical fiber."""


class NoConvergence(NumericError):
    """An iteration hit its budget without meeting the tolerance."""


class StepSizeUnderflow(NumericError):
    """The adaptive integrator was forced below the smallest usable step."""


class IntegratorFailure(NumericError):
    """The ODE integrator stopped for a reason other than step underflow."""


class RootConditioning(NumericError):
    """Root extraction too ill-conditioned to trust."""


class SingularDeterminant(NumericError):
    """A linear system or determinant needed by a reconstruction is singular."""


class NegativeBBbar(NumericError):
    """The reconstructed oscillator weight came out non-positive or inconsistent."""


class DivisionResidue(NumericError):
    """A polynomial identity that should hold exactly left a large remainder."""


class ContourCollision(NumericError):
    """An integration contour cannot be placed clear of other singular points."""


class BranchTrackingLoss(NumericError):
    """Continuity tracking of a square-root branch became ambiguous."""


class LeftNeighborhood(NumericError):
    """A trajectory or synthesis left the neighborhood where the chart is valid."""
