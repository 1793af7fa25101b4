"""Quantum phase estimation drivers: Trotter plans, naive and sequential circuits.

Ancilla k (k = 1 is the most significant phase bit) lives on qubit L + k - 1
in both drivers and controls U^(2^(N-k)). The sequential driver adds the
ancillas one at a time, so each controlled power acts only on the qubits that
exist at that point and its control is always the top qubit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from hamiltonian.encoding import OrderingStrategy, QubitHamiltonian, order_terms, to_dense_matrix
from hamiltonian.oracle import SectorBasis, SpectrumResult, determinant_to_qubit_index
from simulation.statevector import (
    MAX_QUBITS,
    Statevector,
    apply_hadamard,
    apply_phase,
    extend_with_zero_qubit,
    inverse_qft,
    marginal_distribution,
)
from simulation import statevector as sv
from utils.debug import Timer
from utils.errors import BranchError, CapacityError, DegeneracyError, OverlapError
from utils.validators import validate_probabilities

EXACT_MAX_QUBITS = 12
DEGENERACY_GAP = 1e-10


class TrotterOrder(int, Enum):
    FIRST = 1
    SECOND = 2


class InputState(str, Enum):
    HARTREE_FOCK = "hf"
    FULL_CI = "fci"


@dataclass(frozen=True)
class TrotterPlan:
    order: TrotterOrder = TrotterOrder.SECOND
    slices: int = 1
    time: float = 1.0
    ordering: OrderingStrategy = OrderingStrategy.MAGNITUDE

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", TrotterOrder(self.order))
        object.__setattr__(self, "ordering", OrderingStrategy(self.ordering))
        if self.slices < 1:
            raise ValueError(f"slice count must be >= 1, got {self.slices}")


@dataclass(frozen=True)
class TrotterFree:
    """Exact e^{-iHt}, used as the reference evolution."""

    time: float = 1.0


@dataclass(frozen=True)
class QpeConfig:
    n_ancilla: int = 10
    input_state: InputState = InputState.FULL_CI
    plan: TrotterPlan | TrotterFree = field(default_factory=TrotterPlan)

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_state", InputState(self.input_state))
        if self.n_ancilla < 1:
            raise ValueError(f"at least one ancilla is required, got {self.n_ancilla}")

    @property
    def time(self) -> float:
        return self.plan.time


@dataclass(frozen=True)
class PhaseDistribution:
    """Probability of each ancilla outcome x; bin x sits at phase x / 2^N."""

    n_ancilla: int
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probabilities = np.asarray(self.probabilities, dtype=float)
        if probabilities.size != 1 << self.n_ancilla:
            raise ValueError(f"expected {1 << self.n_ancilla} bins, got {probabilities.size}")
        if not validate_probabilities(probabilities):
            raise ValueError("phase distribution is not normalized")
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def n_bins(self) -> int:
        return 1 << self.n_ancilla

    @property
    def phases(self) -> np.ndarray:
        return np.arange(self.n_bins) / self.n_bins

    @property
    def peak_bin(self) -> int:
        return int(np.argmax(self.probabilities))


# ---------------------------------------------------------------------------
# Energy <-> phase
# ---------------------------------------------------------------------------

def check_eigenphase_branch(energy: float, time: float) -> None:
    """Reject energies outside -2*pi < E*t <= 0, where phase = -E*t/(2*pi) is unique."""
    if not -2 * np.pi < energy * time <= 0:
        raise BranchError(
            f"E*t = {energy * time:.6f} is outside (-2pi, 0]; phases would alias"
        )


def energy_to_phase(energy: float | np.ndarray, time: float) -> float | np.ndarray:
    return np.mod(-np.asarray(energy) * time / (2 * np.pi), 1.0)


def total_variation_distance(a: PhaseDistribution, b: PhaseDistribution) -> float:
    return 0.5 * float(np.sum(np.abs(a.probabilities - b.probabilities)))


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

def trotter_rotations(h: QubitHamiltonian, plan: TrotterPlan) -> list[tuple[int, int, float]]:
    """(x_mask, z_mask, angle) of one Trotter slice, in application order."""
    dt = plan.time / plan.slices
    if plan.order is TrotterOrder.FIRST:
        return [(t.x_mask, t.z_mask, t.coefficient * dt) for t in h.terms]
    forward = [(t.x_mask, t.z_mask, t.coefficient * dt / 2) for t in h.terms]
    return forward + forward[::-1]


def apply_trotterized_evolution(
    psi: Statevector,
    h: QubitHamiltonian,
    plan: TrotterPlan,
    control: int | None = None,
    repetitions: int = 1,
) -> Statevector:
    """Apply (U_Trotter)^repetitions, each U built from ``plan.slices`` slices.

    ``h`` must already be ordered by ``plan.ordering``.
    """
    if control is not None and (h.support >> control) & 1:
        raise OverlapError(f"control qubit {control} lies in the Hamiltonian support")
    rotations = trotter_rotations(h, plan)
    sv.apply_rotation_sequence(psi, rotations * (plan.slices * repetitions), control)
    apply_phase(psi, control, -h.identity_coefficient * plan.time * repetitions)
    return psi


class TrotterEvolution:
    """Controlled powers of the Trotterized propagator for one ordered Hamiltonian."""

    def __init__(self, h: QubitHamiltonian, plan: TrotterPlan) -> None:
        self.hamiltonian = order_terms(h, plan.ordering)
        self.plan = plan

    def apply(self, psi: Statevector, control: int | None, repetitions: int) -> Statevector:
        return apply_trotterized_evolution(psi, self.hamiltonian, self.plan, control, repetitions)


class ExactEvolution:
    """Controlled powers of the exact propagator expm(-iHt) (small L only)."""

    def __init__(self, h: QubitHamiltonian, plan: TrotterFree) -> None:
        if h.n_qubits > EXACT_MAX_QUBITS:
            raise CapacityError(
                f"exact propagator for {h.n_qubits} qubits exceeds {EXACT_MAX_QUBITS}"
            )
        self.n_qubits = h.n_qubits
        self.propagator = expm(-1j * plan.time * to_dense_matrix(h))
        self._powers: dict[int, np.ndarray] = {1: self.propagator}

    def power(self, repetitions: int) -> np.ndarray:
        if repetitions not in self._powers:
            self._powers[repetitions] = np.linalg.matrix_power(self.propagator, repetitions)
        return self._powers[repetitions]

    def apply(self, psi: Statevector, control: int | None, repetitions: int) -> Statevector:
        dim = 1 << self.n_qubits
        blocks = psi.amplitudes.reshape(-1, dim)
        unitary_t = self.power(repetitions).T
        if control is None:
            blocks[...] = blocks @ unitary_t
            return psi
        if control < self.n_qubits:
            raise OverlapError(f"control qubit {control} lies in the system register")
        rows = (np.arange(blocks.shape[0]) >> (control - self.n_qubits)) & 1 == 1
        blocks[rows] = blocks[rows] @ unitary_t
        return psi


def make_evolution(h: QubitHamiltonian, plan: TrotterPlan | TrotterFree) -> TrotterEvolution | ExactEvolution:
    if isinstance(plan, TrotterFree):
        return ExactEvolution(h, plan)
    return TrotterEvolution(h, plan)


# ---------------------------------------------------------------------------
# Input states
# ---------------------------------------------------------------------------

def hartree_fock_occupations(n_orbitals: int, n_alpha: int, n_beta: int) -> int:
    """Lowest n_alpha α and n_beta β spin orbitals occupied (blocked layout)."""
    return ((1 << n_alpha) - 1) | (((1 << n_beta) - 1) << n_orbitals)


def prepare_input_state(
    h: QubitHamiltonian,
    kind: InputState | str,
    basis: SectorBasis,
    spectrum: SpectrumResult | None = None,
    capacity: int | None = None,
) -> Statevector:
    """Hartree-Fock determinant or injected full-CI ground state on the system qubits."""
    kind = InputState(kind)
    descriptor = basis.descriptor
    if descriptor.n_qubits != h.n_qubits:
        raise CapacityError(f"basis has {descriptor.n_qubits} qubits, Hamiltonian {h.n_qubits}")
    if kind is InputState.HARTREE_FOCK:
        occupations = hartree_fock_occupations(
            descriptor.n_orbitals, descriptor.n_alpha, descriptor.n_beta
        )
        index = determinant_to_qubit_index(occupations, descriptor)
        return Statevector.basis_state(h.n_qubits, index, capacity)

    if spectrum is None:
        raise DegeneracyError("full-CI input needs the oracle spectrum")
    if spectrum.eigenvalues.size > 1:
        gap = spectrum.eigenvalues[1] - spectrum.eigenvalues[0]
        if gap < DEGENERACY_GAP:
            raise DegeneracyError(f"ground state is degenerate (gap {gap:.3e})")
    psi = Statevector.zeros(h.n_qubits, capacity)
    psi.amplitudes[0] = 0.0
    psi.amplitudes[basis.indices] = spectrum.ground_state
    return psi


def sector_weights(spectrum: SpectrumResult, basis: SectorBasis, psi: Statevector) -> np.ndarray:
    """|c_k|^2 of the input state in the oracle eigenbasis."""
    coefficients = spectrum.eigenvectors.conj().T @ psi.amplitudes[basis.indices]
    return np.abs(coefficients) ** 2


# ---------------------------------------------------------------------------
# QPE drivers
# ---------------------------------------------------------------------------

def _check_capacity(h: QubitHamiltonian, cfg: QpeConfig) -> None:
    total = h.n_qubits + cfg.n_ancilla
    if total > MAX_QUBITS:
        raise CapacityError(f"{h.n_qubits} system + {cfg.n_ancilla} ancilla qubits exceed {MAX_QUBITS}")


def _readout(psi: Statevector, n_system: int, n_ancilla: int) -> PhaseDistribution:
    ancillas = list(range(n_system, n_system + n_ancilla))
    inverse_qft(psi, ancillas)
    probabilities = marginal_distribution(psi, ancillas)
    return PhaseDistribution(n_ancilla, probabilities)


def run_qpe_naive(h: QubitHamiltonian, cfg: QpeConfig, initial: Statevector) -> PhaseDistribution:
    """Textbook circuit: all L + N qubits allocated up front."""
    _check_capacity(h, cfg)
    n_system, n_ancilla = h.n_qubits, cfg.n_ancilla
    evolution = make_evolution(h, cfg.plan)

    with Timer("qpe_naive", system=n_system, ancilla=n_ancilla):
        psi = Statevector.zeros(n_system + n_ancilla)
        psi.amplitudes[: 1 << n_system] = initial.amplitudes
        for qubit in range(n_system, n_system + n_ancilla):
            apply_hadamard(psi, qubit)
        for k in range(1, n_ancilla + 1):
            evolution.apply(psi, n_system + k - 1, 1 << (n_ancilla - k))
        distribution = _readout(psi, n_system, n_ancilla)
    return distribution


def run_qpe_sequential(h: QubitHamiltonian, cfg: QpeConfig, initial: Statevector) -> PhaseDistribution:
    """Ancillas added one by one; controlled-U^(2^(N-k)) runs on L + k qubits only."""
    _check_capacity(h, cfg)
    n_system, n_ancilla = h.n_qubits, cfg.n_ancilla
    evolution = make_evolution(h, cfg.plan)

    with Timer("qpe_sequential", system=n_system, ancilla=n_ancilla):
        psi = Statevector.zeros(n_system, capacity=n_system + n_ancilla)
        psi.amplitudes[:] = initial.amplitudes
        for k in range(1, n_ancilla + 1):
            extend_with_zero_qubit(psi)
            control = n_system + k - 1
            apply_hadamard(psi, control)
            evolution.apply(psi, control, 1 << (n_ancilla - k))
        distribution = _readout(psi, n_system, n_ancilla)
    return distribution


@lru_cache(maxsize=16)
def _grid(n_ancilla: int) -> np.ndarray:
    return np.arange(1 << n_ancilla) / (1 << n_ancilla)


def qpe_kernel(phases: np.ndarray, n_ancilla: int) -> np.ndarray:
    """|(1/K) Σ_m e^{i2πm(φ - x/K)}|^2 for each phase (rows) and bin x (columns)."""
    n_bins = 1 << n_ancilla
    delta = np.asarray(phases, dtype=float)[:, None] - _grid(n_ancilla)[None, :]
    denominator = n_bins * np.sin(np.pi * delta)
    on_grid = np.abs(denominator) < 1e-12 * n_bins
    ratio = np.divide(np.sin(np.pi * n_bins * delta), denominator, out=np.ones_like(delta), where=~on_grid)
    return ratio ** 2


def trotter_free_distribution(
    spectrum: SpectrumResult, weights: np.ndarray, cfg: QpeConfig
) -> PhaseDistribution:
    """Closed-form QPE outcome for exact evolution, no statevector needed."""
    weights = np.asarray(weights, dtype=float)
    relevant = weights > 1e-16
    phases = energy_to_phase(spectrum.eigenvalues[relevant], cfg.time)
    probabilities = weights[relevant] @ qpe_kernel(np.atleast_1d(phases), cfg.n_ancilla)
    probabilities = probabilities / weights[relevant].sum()
    return PhaseDistribution(cfg.n_ancilla, probabilities)
