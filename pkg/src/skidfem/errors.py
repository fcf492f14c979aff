"""Exception hierarchy shared by all skidfem modules."""


class SkidfemError(Exception):
    """Base class for all package errors."""


# --- input / profile errors -------------------------------------------------

class ParseError(SkidfemError):
    """Malformed input file. Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TooFewPoints(SkidfemError):
    """Profile does not contain enough points for the operation."""


class CutoffTooLarge(SkidfemError):
    """Gaussian S-filter cutoff exceeds a tenth of the profile extent."""


class NonMonotonicKnots(SkidfemError):
    """Spline knots are not strictly increasing."""


# --- roughness errors -------------------------------------------------------

class TooFewPointsPerSection(SkidfemError):
    """Sectioning scheme leaves fewer than 10 points per section."""


class NoElementsFound(SkidfemError):
    """Profile never crosses its mean line twice."""


# --- material errors --------------------------------------------------------

class NoRoot(SkidfemError):
    """The loading-duration equation has no root in the search bracket."""


class RankDeficient(SkidfemError):
    """Relaxation-time grid is collinear for the sampled frequency range."""


# --- fem / solver errors ----------------------------------------------------

class InvalidGrading(SkidfemError):
    """Mesh grading constraints unsatisfiable for the given parameters."""


class SingularSystem(SkidfemError):
    """Assembled system has insufficient constraints."""


class FactorizationFailed(SkidfemError):
    """Sparse factorization failed or produced an inaccurate solution."""


# --- simulation errors ------------------------------------------------------

class ContactLoopDiverged(SkidfemError):
    """Active-set fixed-point loop did not stabilize."""


class ProfileExhausted(SkidfemError):
    """Skid would slide past the last profile point."""


class WindowTooShort(SkidfemError):
    """Time series too short to declare a steady-state window."""
