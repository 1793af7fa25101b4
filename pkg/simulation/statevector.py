"""Dense statevector with the in-place kernels needed for phase estimation.

Qubit q is bit q of the amplitude index (qubit 0 least significant). Kernels
work on a ``[2] * n`` tensor view of the amplitude buffer, where qubit q is
axis ``n - 1 - q``; a controlled kernel runs the same code on the slice with
the control bit set, so no amplitude copies are made for the control.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from utils.errors import (
    CapacityError,
    IdentityRotationError,
    OverlapError,
    QubitIndexError,
)
from utils.validators import validate_qubit_indices

MAX_QUBITS = 30
NORM_TOL = 1e-10
_SQRT1_2 = 1.0 / np.sqrt(2.0)


class PauliMasks(Protocol):
    x_mask: int
    z_mask: int


class Statevector:
    """2^n complex amplitudes held in a buffer that may have room for more qubits.

    ``extend_with_zero_qubit`` only widens the active prefix of the buffer when
    capacity allows, so the sequential QPE driver allocates once.
    """

    def __init__(self, buffer: np.ndarray, n_qubits: int) -> None:
        if buffer.dtype != np.complex128 or buffer.ndim != 1:
            raise TypeError("statevector buffer must be a 1-d complex128 array")
        if buffer.size < (1 << n_qubits):
            raise CapacityError(f"buffer of {buffer.size} amplitudes cannot hold {n_qubits} qubits")
        self._buffer = buffer
        self.n_qubits = n_qubits

    @classmethod
    def zeros(cls, n_qubits: int, capacity: int | None = None) -> "Statevector":
        """|0...0> on *n_qubits*, with buffer room for *capacity* qubits."""
        capacity = n_qubits if capacity is None else max(capacity, n_qubits)
        if capacity > MAX_QUBITS:
            raise CapacityError(f"{capacity} qubits exceed the {MAX_QUBITS}-qubit limit")
        buffer = np.zeros(1 << capacity, dtype=np.complex128)
        buffer[0] = 1.0
        return cls(buffer, n_qubits)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int, capacity: int | None = None) -> "Statevector":
        psi = cls.zeros(n_qubits, capacity)
        psi._buffer[0] = 0.0
        psi._buffer[index] = 1.0
        return psi

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray, capacity: int | None = None) -> "Statevector":
        amplitudes = np.asarray(amplitudes, dtype=np.complex128).ravel()
        n_qubits = amplitudes.size.bit_length() - 1
        if amplitudes.size != 1 << n_qubits:
            raise QubitIndexError(f"{amplitudes.size} amplitudes is not a power of two")
        psi = cls.zeros(n_qubits, capacity)
        psi._buffer[: amplitudes.size] = amplitudes
        return psi

    @property
    def amplitudes(self) -> np.ndarray:
        return self._buffer[: 1 << self.n_qubits]

    @property
    def capacity(self) -> int:
        return self._buffer.size.bit_length() - 1

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self) -> int:
        return 1 << self.n_qubits


# ---------------------------------------------------------------------------
# Tensor helpers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _parity_signs(n_bits: int) -> np.ndarray:
    """(-1)^popcount(i) for i < 2^n_bits, shaped [2] * n_bits."""
    signs = 1.0 - 2.0 * (np.bitwise_count(np.arange(1 << n_bits)) & 1)
    signs = signs.reshape((2,) * n_bits)
    signs.setflags(write=False)
    return signs


def _sign_tensor(z_mask: int, n_qubits: int) -> np.ndarray | float:
    """(-1)^popcount(i & z) broadcastable against the [2] * n tensor."""
    k = z_mask.bit_count()
    if k == 0:
        return 1.0
    shape = [2 if (z_mask >> (n_qubits - 1 - axis)) & 1 else 1 for axis in range(n_qubits)]
    return _parity_signs(k).reshape(shape)


def _bit_slice(tensor: np.ndarray, qubit: int, value: int) -> np.ndarray:
    """View with the given qubit fixed to *value*; the axis is kept with size 1."""
    index = [slice(None)] * tensor.ndim
    index[tensor.ndim - 1 - qubit] = slice(value, value + 1)
    return tensor[tuple(index)]


def _check_masks(psi: Statevector, x_mask: int, z_mask: int) -> None:
    if (x_mask | z_mask) >> psi.n_qubits:
        raise QubitIndexError(f"Pauli masks exceed {psi.n_qubits} qubits")


def _check_qubit(psi: Statevector, qubit: int) -> None:
    if not validate_qubit_indices([qubit], psi.n_qubits):
        raise QubitIndexError(f"qubit {qubit} outside 0..{psi.n_qubits - 1}")


def _rotate(tensor: np.ndarray, x_mask: int, z_mask: int, theta: float) -> None:
    """tensor <- exp(-i·theta·P) tensor, in place (tensor may be a strided view).

    With sigma(j) = (-1)^popcount(j & z), P|j> = i^ny·sigma(j)|j ^ x>, hence
    (P psi)[j] = (-i)^ny·sigma(j)·psi[j ^ x].
    """
    n = tensor.ndim
    cos, sin = np.cos(theta), np.sin(theta)
    if x_mask == 0:
        tensor *= cos - 1j * sin * _sign_tensor(z_mask, n)
        return

    pivot = x_mask.bit_length() - 1
    n_y = (x_mask & z_mask).bit_count()
    kappa = (-1j) ** (n_y % 4)
    lo = _bit_slice(tensor, pivot, 0)
    hi = _bit_slice(tensor, pivot, 1)
    flips = tuple(n - 1 - q for q in range(pivot) if (x_mask >> q) & 1)
    partner = np.flip(hi, axis=flips) if flips else hi
    sigma = _sign_tensor(z_mask & ~(1 << pivot), n)

    mix = -1j * sin * kappa
    lo_old = lo.copy()
    lo *= cos
    lo += (mix * sigma) * partner
    partner *= cos
    partner += (mix * (-1) ** n_y * sigma) * lo_old


# ---------------------------------------------------------------------------
# Gate kernels
# ---------------------------------------------------------------------------

def apply_pauli_rotation(psi: Statevector, term: PauliMasks, theta: float) -> Statevector:
    """psi <- exp(-i·theta·P)·psi."""
    if term.x_mask == 0 and term.z_mask == 0:
        raise IdentityRotationError("identity rotations are global phases; use apply_phase")
    _check_masks(psi, term.x_mask, term.z_mask)
    _rotate(psi.tensor(), term.x_mask, term.z_mask, theta)
    return psi


def apply_controlled_pauli_rotation(
    psi: Statevector, control: int, term: PauliMasks, theta: float
) -> Statevector:
    """exp(-i·theta·P) on the control-1 subspace; the control-0 half is untouched."""
    if term.x_mask == 0 and term.z_mask == 0:
        raise IdentityRotationError("identity rotations are global phases; use apply_phase")
    _check_masks(psi, term.x_mask, term.z_mask)
    _check_qubit(psi, control)
    if ((term.x_mask | term.z_mask) >> control) & 1:
        raise OverlapError(f"control qubit {control} lies in the Pauli support")
    _rotate(_bit_slice(psi.tensor(), control, 1), term.x_mask, term.z_mask, theta)
    return psi


def apply_rotation_sequence(
    psi: Statevector,
    rotations: Sequence[tuple[int, int, float]],
    control: int | None = None,
) -> Statevector:
    """Apply exp(-i·theta·P) for each (x_mask, z_mask, theta) in order, optionally controlled.

    Masks and control are checked once; the loop then runs the bare kernel.
    """
    if control is None:
        target = psi.tensor()
    else:
        _check_qubit(psi, control)
        target = _bit_slice(psi.tensor(), control, 1)
    for x_mask, z_mask, _ in set((x, z, 0.0) for x, z, _ in rotations):
        if x_mask == 0 and z_mask == 0:
            raise IdentityRotationError("identity rotations are global phases; use apply_phase")
        _check_masks(psi, x_mask, z_mask)
        if control is not None and ((x_mask | z_mask) >> control) & 1:
            raise OverlapError(f"control qubit {control} lies in the Pauli support")
    for x_mask, z_mask, theta in rotations:
        _rotate(target, x_mask, z_mask, theta)
    return psi


def apply_phase(psi: Statevector, control: int | None, phi: float) -> Statevector:
    """Multiply by e^{i·phi}, restricted to the control-1 subspace when a control is given."""
    factor = np.exp(1j * phi)
    if control is None:
        psi.amplitudes[:] *= factor
    else:
        _check_qubit(psi, control)
        _bit_slice(psi.tensor(), control, 1)[...] *= factor
    return psi


def apply_hadamard(psi: Statevector, q: int) -> Statevector:
    _check_qubit(psi, q)
    tensor = psi.tensor()
    lo = _bit_slice(tensor, q, 0)
    hi = _bit_slice(tensor, q, 1)
    lo_old = lo.copy()
    lo += hi
    lo *= _SQRT1_2
    hi *= -1.0
    hi += lo_old
    hi *= _SQRT1_2
    return psi


def extend_with_zero_qubit(psi: Statevector) -> Statevector:
    """Append a new most-significant qubit in |0>: the amplitude array doubles, upper half zero."""
    size = 1 << psi.n_qubits
    if psi.capacity > psi.n_qubits:
        psi._buffer[size : 2 * size] = 0.0
    else:
        if psi.n_qubits + 1 > MAX_QUBITS:
            raise CapacityError(f"{psi.n_qubits + 1} qubits exceed the {MAX_QUBITS}-qubit limit")
        buffer = np.zeros(2 * size, dtype=np.complex128)
        buffer[:size] = psi.amplitudes
        psi._buffer = buffer
    psi.n_qubits += 1
    return psi


def inverse_qft(psi: Statevector, qubits: Sequence[int]) -> Statevector:
    """Inverse QFT on the register whose first listed qubit is the most significant bit."""
    qubits = [int(q) for q in qubits]
    if not validate_qubit_indices(qubits, psi.n_qubits):
        raise QubitIndexError(f"invalid or duplicate qubits {qubits}")
    n = psi.n_qubits
    register = np.moveaxis(psi.tensor(), [n - 1 - q for q in qubits], list(range(len(qubits))))
    flat = register.reshape(1 << len(qubits), -1)
    register[...] = np.fft.fft(flat, axis=0, norm="ortho").reshape(register.shape)
    return psi


def marginal_distribution(psi: Statevector, qubits: Sequence[int]) -> np.ndarray:
    """P(x) over the listed qubits, first listed = most significant bit of x."""
    qubits = [int(q) for q in qubits]
    if not validate_qubit_indices(qubits, psi.n_qubits):
        raise QubitIndexError(f"invalid or duplicate qubits {qubits}")
    n = psi.n_qubits
    probabilities = (np.abs(psi.amplitudes) ** 2).reshape((2,) * n)
    keep = [n - 1 - q for q in qubits]
    traced = tuple(axis for axis in range(n) if axis not in keep)
    reduced = probabilities.sum(axis=traced) if traced else probabilities
    remaining = sorted(keep)
    reduced = np.transpose(reduced, [remaining.index(axis) for axis in keep])
    return reduced.reshape(-1)


def sample_counts(probabilities: np.ndarray, shots: int, seed: int | None = None) -> np.ndarray:
    """Shot counts per outcome drawn from an exact distribution."""
    rng = np.random.default_rng(seed)
    probabilities = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return rng.multinomial(shots, probabilities / probabilities.sum())


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def apply_pauli(amplitudes: np.ndarray, x_mask: int, z_mask: int) -> np.ndarray:
    """Return P·amplitudes as a new array."""
    indices = np.arange(amplitudes.size)
    signs = 1 - 2 * (np.bitwise_count(indices & z_mask) & 1).astype(np.int8)
    out = np.empty_like(amplitudes)
    out[indices ^ x_mask] = (1j ** ((x_mask & z_mask).bit_count() % 4)) * signs * amplitudes
    return out


def expectation_value(psi: Statevector, hamiltonian) -> float:
    """<psi|H|psi> for a QubitHamiltonian acting on the lowest qubits of psi."""
    amplitudes = psi.amplitudes
    value = hamiltonian.identity_coefficient * np.vdot(amplitudes, amplitudes)
    for term in hamiltonian.terms:
        value += term.coefficient * np.vdot(amplitudes, apply_pauli(amplitudes, term.x_mask, term.z_mask))
    return float(value.real)
