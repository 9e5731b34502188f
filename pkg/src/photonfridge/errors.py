"""Exception types shared across the package."""

from __future__ import annotations


class PhotonFridgeError(Exception):
    """Base class for all package-specific errors."""


class DegenerateSteadyState(PhotonFridgeError):
    """The steady state is not unique (no coupling to the support bath, G = 0).

    With G = 0 the kinetic equations conserve total photon number, so a
    one-parameter family of stationary distributions exists; use the
    chemical-potential solvers in :mod:`photonfridge.equilibria` instead.
    """


class NotConverged(PhotonFridgeError):
    """The nonlinear solver stopped before reaching the residual tolerance."""

    def __init__(self, message: str, *, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CutoffNotConverged(PhotonFridgeError):
    """Observables kept changing up to the hard mode-cutoff cap."""


class AbsorbingState(PhotonFridgeError):
    """All jump channels have zero propensity; the trajectory cannot leave."""

    def __init__(self, message: str, *, trajectory: int | None = None):
        super().__init__(message)
        self.trajectory = trajectory


class FlaggedConstituent(PhotonFridgeError):
    """A spectral average requested over flagged (infinite/inverted) entries."""

    def __init__(self, message: str, *, k: int):
        super().__init__(message)
        self.k = k


class NoCrossoverRoot(PhotonFridgeError):
    """The crossover relation has no root in the mode range."""
