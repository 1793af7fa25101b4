"""Input validation helpers for TrotterQPE."""

from __future__ import annotations

from typing import Iterable

import numpy as np


def validate_orthogonal(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    """Return True if *matrix* is square and ``max|VᵀV - I| < tol``."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    deviation = matrix.T @ matrix - np.eye(matrix.shape[0])
    return bool(np.max(np.abs(deviation), initial=0.0) < tol)


def validate_hermitian(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    """Return True if *matrix* is square and equals its conjugate transpose."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) < tol)


def validate_qubit_indices(qubits: Iterable[int], n_qubits: int) -> bool:
    """Return True if every index is in range and none repeats."""
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        return False
    return all(0 <= int(q) < n_qubits for q in qubits)


def validate_electron_counts(n_alpha: int, n_beta: int, n_orbitals: int) -> bool:
    """Return True if both spin counts fit into *n_orbitals* spatial orbitals."""
    return 0 <= n_alpha <= n_orbitals and 0 <= n_beta <= n_orbitals


def validate_probabilities(probabilities: np.ndarray, tol: float = 1e-9) -> bool:
    """Return True if *probabilities* are non-negative (to 1e-14) and sum to one."""
    probabilities = np.asarray(probabilities)
    if probabilities.size == 0 or np.min(probabilities) < -1e-14:
        return False
    return bool(abs(float(np.sum(probabilities)) - 1.0) < tol)
