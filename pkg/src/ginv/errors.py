"""Exception types shared across the package."""


class GinvError(Exception):
    """Base class for all package errors."""


class MismatchedAmbient(GinvError):
    """Two subspaces live in spaces of different dimension."""


class NotComplementary(GinvError):
    """The given pair of subspaces does not split the whole space."""


class PerturbationTooLarge(GinvError):
    """Requested perturbation size cannot be reached without losing complementarity."""


class NotExists(GinvError):
    """The requested generalized inverse does not exist for this input."""


class IllConditioned(NotExists):
    """Existence is formally undecidable: the core matrix is numerically singular."""


class NoGroupInverse(GinvError):
    """The matrix has no group inverse (its rank drops on squaring)."""


class DimMismatch(GinvError):
    """Ranks of the two idempotents do not sum to the ambient dimension."""


class BadWitness(GinvError):
    """A supplied witness matrix fails its idempotency precondition."""


class RepresentationMismatch(GinvError):
    """Two formulas that must agree produced different matrices."""


class SideConditionViolated(GinvError):
    """A required algebraic side condition on the perturbed idempotent fails."""


class GenerationFailed(GinvError):
    """Random instance generation did not produce a valid scenario within the retry budget."""


class ExactSingular(GinvError):
    """Exact inversion was requested for a rank-deficient rational matrix."""


class InputError(GinvError):
    """Malformed user input (file contents, flags, or environment)."""
