"""Exception and warning types shared across the package."""


class NCGError(Exception):
    pass


class NonConvergence(NCGError):
    pass


class DimensionMismatch(NCGError, ValueError):
    pass


class CapExceeded(NCGError, ValueError):
    pass


class SpaceMismatch(NCGError, ValueError):
    pass


class InvalidState(NCGError, ValueError):
    pass


class NotInAlgebra(NCGError, ValueError):
    pass


class ImpureState(NCGError, ValueError):
    pass


class NotNormal(NCGError, ValueError):
    pass


class MissingLabel(NCGError, KeyError):
    pass


class LabelMismatch(NCGError, ValueError):
    pass


class PreconditionViolated(NCGError, ValueError):
    pass


class DimensionTooSmall(NCGError, ValueError):
    pass


class EquivalenceInconsistent(NCGError):
    """Pairwise equivalence tests disagree with transitivity."""


class ClusterInstability(UserWarning):
    """Two eigenvalue clusters sit closer than the merge radius and were merged."""
