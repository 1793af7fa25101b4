"""Exception hierarchy for TrotterQPE."""

from __future__ import annotations

from typing import Any


class TrotterQpeError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# Integrals
# ---------------------------------------------------------------------------

class ParseError(TrotterQpeError):
    """Malformed FCIDUMP header or data line."""


class OrbitalIndexError(TrotterQpeError, IndexError):
    """FCIDUMP index outside 0..NORB."""


class ConsistencyError(TrotterQpeError):
    """Symmetry-equivalent integral entries disagree."""


class CapacityError(TrotterQpeError):
    """Problem size exceeds what the simulator accepts."""


class RotationError(TrotterQpeError):
    """Orbital rotation is not orthogonal or has the wrong shape."""


# ---------------------------------------------------------------------------
# Encoding / oracle
# ---------------------------------------------------------------------------

class SymmetryError(TrotterQpeError):
    """A tapered qubit carries X or Y."""


class HermiticityError(TrotterQpeError):
    """Operator or matrix is not Hermitian within tolerance."""


class SectorError(TrotterQpeError):
    """Occupation string does not belong to the requested sector."""


class DegeneracyError(TrotterQpeError):
    """Ground state is degenerate, so the full-CI input is ill defined."""


# ---------------------------------------------------------------------------
# Statevector / QPE
# ---------------------------------------------------------------------------

class QubitIndexError(TrotterQpeError, IndexError):
    """Invalid or duplicate qubit index."""


class IdentityRotationError(TrotterQpeError):
    """Pauli rotation requested for the identity string."""


class OverlapError(TrotterQpeError):
    """Control qubit lies inside the support of the controlled operator."""


class BranchError(TrotterQpeError):
    """Energy outside the eigenphase window -2*pi < E*t <= 0."""


# ---------------------------------------------------------------------------
# Analysis / experiments
# ---------------------------------------------------------------------------

class NoPeakError(TrotterQpeError):
    """Distribution has no maximum to fit."""


class FitError(TrotterQpeError):
    """Gaussian fit did not converge; ``fallback`` holds the initial-guess fit."""

    def __init__(self, message: str, fallback: Any = None) -> None:
        super().__init__(message)
        self.fallback = fallback


class PairingError(TrotterQpeError):
    """Monomer run has no dimer companion (or vice versa)."""


class ConfigError(TrotterQpeError):
    """Invalid experiment configuration."""
