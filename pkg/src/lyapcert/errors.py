"""Exception types raised across the package."""


class LyapcertError(Exception):
    """Base class for all package errors."""


# --- linear algebra kernel ---

class NotHurwitz(LyapcertError):
    """A matrix required to be Hurwitz has an eigenvalue with real part >= -1e-12."""


class SingularSystem(LyapcertError):
    """A linear solve was numerically rank-deficient."""


class Overflow(LyapcertError):
    """Matrix exponential entries exceeded the representable range."""


class TailNotConvergent(LyapcertError):
    """The Gramian integrand norm failed to decrease while doubling the horizon."""


# --- damping catalogue ---

class DomainError(LyapcertError):
    """Function evaluated outside its domain (e.g. unbounded h at zero)."""


# --- model builders ---

class NotDissipative(LyapcertError):
    """The drift matrix fails the dissipativity test for the given inner product."""


class NotControllable(LyapcertError):
    """The pair (A, B) fails the Kalman rank test."""


class NotStabilized(LyapcertError):
    """The closed-loop matrix A - k B B* is not Hurwitz."""


class NotDissipativeDiscretization(LyapcertError):
    """An assembled discretization violates the dissipativity sign condition."""


# --- certificates ---

class WrongNormChoice(LyapcertError):
    """Damping/norm combination incompatible with the requested certificate kind."""


class MissingCS(LyapcertError):
    """The embedding constant estimate is required but was not supplied."""


class CalibrationFailed(LyapcertError):
    """The supplied decay constants fail the probe-trajectory check."""


# --- time integration ---

class StepRejectionLimit(LyapcertError):
    """Local error target unreachable after the maximum number of step halvings."""


class ContractionViolation(LyapcertError):
    """State norm increased beyond tolerance; the scheme or model is inconsistent."""


# --- analysis ---

class InsufficientData(LyapcertError):
    """Too few usable samples for the requested fit."""


class NoLinearPhase(LyapcertError):
    """Trajectory never leaves the unit ball or has too few pre-entry samples."""


# --- config / CLI ---

class ParseError(LyapcertError):
    """Config text violates the grammar; message carries the line number."""


class ValidationError(LyapcertError):
    """Config parsed but one or more values violate their constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingInput(LyapcertError):
    """A subcommand's required input file is absent from the run directory."""
