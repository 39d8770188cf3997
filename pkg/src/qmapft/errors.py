"""Exception types shared across the package."""

from __future__ import annotations


class QmapError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(QmapError):
    """Operands have incompatible shapes."""


class NonHermitianError(QmapError):
    """A matrix required to be Hermitian deviates beyond tolerance."""


class NotUnitaryError(QmapError):
    """A matrix required to be unitary deviates beyond tolerance."""


class SingularStateError(QmapError):
    """A state required to be strictly positive has a (near-)zero eigenvalue."""


class NonUniqueInvariantState(QmapError):
    """The fixed-point subspace of a map has dimension greater than one.

    The caller must supply the invariant state explicitly.
    """

    def __init__(self, subspace_dim: int, candidate=None):
        self.subspace_dim = subspace_dim
        self.candidate = candidate
        super().__init__(
            f"invariant state is not unique (fixed subspace dimension "
            f"{subspace_dim}); supply pi explicitly"
        )


class ZeroProbabilityBranch(QmapError):
    """A conditional state was requested for an outcome of (near-)zero probability."""


class MixedPotentialOperator(QmapError):
    """A Kraus operator connects eigenstate pairs with two distinct potential gaps."""

    def __init__(self, operator_index: int, gaps):
        self.operator_index = operator_index
        self.gaps = list(gaps)
        super().__init__(
            f"Kraus operator {operator_index} straddles distinct potential "
            f"gaps {self.gaps}; the map is outside the ladder family"
        )


class AbsoluteContinuityViolation(QmapError):
    """A forward trajectory has no counterpart of nonzero probability in the dual process."""

    def __init__(self, trajectory, probability: float):
        self.trajectory = trajectory
        self.probability = probability
        super().__init__(
            f"forward trajectory {trajectory} has probability {probability} "
            f"but its reverse is absent from the dual process"
        )


class EnumerationTooLarge(QmapError):
    """Exact enumeration would exceed the configured branch cap."""

    def __init__(self, branch_count: int, cap: int):
        self.branch_count = branch_count
        self.cap = cap
        super().__init__(
            f"enumeration needs {branch_count} branches, above the cap {cap}; "
            f"use Monte Carlo sampling instead"
        )


class ProcessFileError(QmapError):
    """A map or process file could not be parsed."""
