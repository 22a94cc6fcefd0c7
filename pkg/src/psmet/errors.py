"""Exception hierarchy.

Two families: :class:`InputError` for contract violations by the caller
(bad shapes, non-Hermitian generators, invalid configs) and
:class:`NumericalDomainError` for inputs that are well formed but sit where
the requested quantity does not exist as a finite number.
"""


class PsmetError(Exception):
    """Base class for every error raised by this package."""


class InputError(PsmetError, ValueError):
    """Caller supplied data that violates a documented precondition."""


class NumericalDomainError(PsmetError, ArithmeticError):
    """The requested quantity is undefined or infinite at this input."""


class NotHermitian(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotTraceless(InputError):
    pass


class NotPure(InputError):
    pass


class NotAProbability(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class InvalidDim(InputError):
    pass


class InvalidConfig(InputError):
    pass


class InvalidProbability(InputError):
    pass


class NonpositiveInformation(InputError):
    pass


class SingularOutcome(NumericalDomainError):
    """An outcome with vanishing probability still moves with theta."""


class VanishingPostselection(NumericalDomainError):
    """Postselection probability is at or below the 1e-12 floor."""


class DegenerateGenerator(NumericalDomainError):
    """Generator is totally degenerate, so evolution imprints no phase."""


class DivergentInformation(NumericalDomainError):
    """Closed-form denominator vanishes; the information is infinite."""


class SingularOverlap(NumericalDomainError):
    """Some basis overlap <f|a> is zero and no perturbation rescued it."""


class OrthogonalPostselection(NumericalDomainError):
    """Weak value requested with <f|psi> = 0."""


class LimitMismatch(PsmetError, AssertionError):
    """An ordered-limit sequence failed to converge to the expected value."""

    def __init__(self, message, sequence=None):
        super().__init__(message)
        self.sequence = sequence
