"""Exact full-CI reference: sector basis, sector matrix and diagonalization."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb

import numpy as np

from hamiltonian.encoding import (
    QubitHamiltonian,
    delete_bits,
    parity_decode_occupations,
    parity_encode_occupations,
    pauli_phases,
    tapered_qubits,
)
from utils.debug import log_debug, log_info
from utils.errors import HermiticityError, SectorError
from utils.validators import validate_hermitian


class Encoding(str, Enum):
    JORDAN_WIGNER = "jw"
    PARITY = "parity"
    TAPERED = "jw_tapered"


@dataclass(frozen=True)
class EncodingDescriptor:
    """How determinants of the (n_alpha, n_beta) sector map to qubit basis states."""

    kind: Encoding
    n_orbitals: int
    n_alpha: int
    n_beta: int

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_orbitals

    @property
    def n_qubits(self) -> int:
        if self.kind is Encoding.TAPERED:
            return self.n_spin_orbitals - 2
        return self.n_spin_orbitals


@dataclass(frozen=True)
class SectorBasis:
    """Sector determinants, sorted by their encoded qubit-basis index."""

    descriptor: EncodingDescriptor
    occupations: np.ndarray
    indices: np.ndarray

    @property
    def size(self) -> int:
        return int(self.indices.size)

    @property
    def n_qubits(self) -> int:
        return self.descriptor.n_qubits

    def position(self, qubit_index: int) -> int:
        """Row of the basis state with the given encoded index."""
        pos = int(np.searchsorted(self.indices, qubit_index))
        if pos >= self.size or self.indices[pos] != qubit_index:
            raise SectorError(f"qubit basis state {qubit_index} is outside the sector")
        return pos


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]


# ---------------------------------------------------------------------------
# Determinant <-> qubit index
# ---------------------------------------------------------------------------

def determinant_to_qubit_index(occupations: int, descriptor: EncodingDescriptor) -> int:
    """Encoded computational-basis index of an occupation bitstring (bit p = spin orbital p).

    Jordan-Wigner uses the bitstring verbatim, which fixes the determinant phase
    as +1 for creation operators applied in ascending order.
    """
    l = descriptor.n_orbitals
    n_alpha = (occupations & ((1 << l) - 1)).bit_count()
    n_beta = (occupations >> l).bit_count()
    if (n_alpha, n_beta) != (descriptor.n_alpha, descriptor.n_beta) or occupations >> (2 * l):
        raise SectorError(
            f"occupation {occupations:0{2 * l}b} has ({n_alpha}, {n_beta}) electrons, "
            f"sector is ({descriptor.n_alpha}, {descriptor.n_beta})"
        )
    if descriptor.kind is Encoding.JORDAN_WIGNER:
        return occupations
    encoded = parity_encode_occupations(occupations, 2 * l)
    if descriptor.kind is Encoding.PARITY:
        return encoded
    return delete_bits(encoded, list(tapered_qubits(l)))


def qubit_index_to_determinant(index: int, descriptor: EncodingDescriptor) -> int:
    """Inverse of :func:`determinant_to_qubit_index`."""
    l = descriptor.n_orbitals
    if descriptor.kind is Encoding.JORDAN_WIGNER:
        occupations = index
    else:
        encoded = index
        if descriptor.kind is Encoding.TAPERED:
            alpha_qubit, total_qubit = tapered_qubits(l)
            for qubit, bit in (
                (alpha_qubit, descriptor.n_alpha % 2),
                (total_qubit, (descriptor.n_alpha + descriptor.n_beta) % 2),
            ):
                low = encoded & ((1 << qubit) - 1)
                encoded = low | (bit << qubit) | ((encoded >> qubit) << (qubit + 1))
        occupations = parity_decode_occupations(encoded, 2 * l)
    # validates the sector
    determinant_to_qubit_index(occupations, descriptor)
    return occupations


# ---------------------------------------------------------------------------
# Sector basis and matrix
# ---------------------------------------------------------------------------

def _spin_strings(n_orbitals: int, n_electrons: int) -> list[int]:
    return [sum(1 << p for p in occ) for occ in combinations(range(n_orbitals), n_electrons)]


def build_sector_basis(descriptor: EncodingDescriptor) -> SectorBasis:
    l = descriptor.n_orbitals
    occupations = [
        alpha | (beta << l)
        for alpha in _spin_strings(l, descriptor.n_alpha)
        for beta in _spin_strings(l, descriptor.n_beta)
    ]
    encoded = [determinant_to_qubit_index(occ, descriptor) for occ in occupations]
    order = np.argsort(encoded, kind="stable")
    basis = SectorBasis(
        descriptor=descriptor,
        occupations=np.asarray(occupations, dtype=np.int64)[order],
        indices=np.asarray(encoded, dtype=np.int64)[order],
    )
    expected = comb(l, descriptor.n_alpha) * comb(l, descriptor.n_beta)
    assert basis.size == expected
    return basis


def build_sector_matrix(h: QubitHamiltonian, basis: SectorBasis) -> np.ndarray:
    """matrix[i][j] = <basis_i|H|basis_j>; out-of-sector images are dropped."""
    if h.n_qubits != basis.n_qubits:
        raise SectorError(f"Hamiltonian has {h.n_qubits} qubits, basis expects {basis.n_qubits}")
    real = all(term.y_count % 2 == 0 for term in h.terms)
    matrix = np.zeros((basis.size, basis.size), dtype=float if real else complex)
    matrix[np.diag_indices(basis.size)] = h.identity_coefficient

    columns = np.arange(basis.size)
    states = basis.indices
    for term in h.terms:
        targets = states ^ term.x_mask
        rows = np.searchsorted(states, targets)
        rows[rows == basis.size] = 0
        inside = states[rows] == targets
        values = term.coefficient * pauli_phases(states[inside], term.x_mask, term.z_mask)
        matrix[rows[inside], columns[inside]] += values.real if real else values
    return matrix


def diagonalize(matrix: np.ndarray) -> SpectrumResult:
    """Full eigendecomposition, ascending; each eigenvector's first nonzero entry made real positive."""
    if not validate_hermitian(matrix):
        raise HermiticityError("sector matrix is not Hermitian")
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    for k in range(eigenvectors.shape[1]):
        column = eigenvectors[:, k]
        lead = column[np.argmax(np.abs(column) > 1e-10)]
        eigenvectors[:, k] = column * (np.conj(lead) / abs(lead))
    if np.isrealobj(matrix):
        eigenvectors = eigenvectors.real
    log_debug("Diagonalized sector matrix", dim=matrix.shape[0], e0=f"{eigenvalues[0]:.12f}")
    return SpectrumResult(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def sector_spectrum(h: QubitHamiltonian, descriptor: EncodingDescriptor) -> tuple[SectorBasis, SpectrumResult]:
    """Convenience wrapper: basis, matrix and spectrum in one call."""
    basis = build_sector_basis(descriptor)
    spectrum = diagonalize(build_sector_matrix(h, basis))
    log_info(
        "Sector spectrum",
        encoding=descriptor.kind.value,
        dim=basis.size,
        ground_energy=f"{spectrum.ground_energy:.10f}",
    )
    return basis, spectrum
