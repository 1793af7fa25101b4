"""Fermion-to-qubit mapping: Jordan-Wigner, parity tapering and term ordering.

Pauli strings are stored as integer bitmasks. Qubit q carries the letter
(x, z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z, and a term is the plain tensor
product of its letters. Products of masks pick up a power of i, tracked by
:func:`pauli_product`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from hamiltonian.integrals import SpinOrbitalIntegrals
from utils.debug import log_debug, log_info
from utils.errors import CapacityError, HermiticityError, SymmetryError
from utils.helpers import format_coefficient, parse_pauli_string, pauli_string

PRUNE_THRESHOLD = 1e-12
MAX_SPIN_ORBITALS = 32
DENSE_MAX_QUBITS = 14

_LETTER_RANK = {(1, 0): 1, (1, 1): 2, (0, 1): 3}  # X < Y < Z


@dataclass(frozen=True)
class PauliTerm:
    x_mask: int
    z_mask: int
    coefficient: float

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    def lexicographic_key(self) -> tuple[tuple[int, int], ...]:
        """Sort key comparing (qubit, letter) pairs, not the padded letter string.

        Pairs run over non-identity qubits in ascending order with X<Y<Z, and a
        proper prefix sorts first, so X_0 precedes Y_1 and Z_0 precedes Z_0 X_1.
        """
        key = []
        support = self.support
        q = 0
        while support >> q:
            if (support >> q) & 1:
                key.append((q, _LETTER_RANK[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]))
            q += 1
        return tuple(key)

    def label(self, n_qubits: int) -> str:
        return pauli_string(self.x_mask, self.z_mask, n_qubits)


@dataclass(frozen=True)
class QubitHamiltonian:
    """H = identity_coefficient·I + Σ_j w_j P_j (identity kept out of ``terms``)."""

    n_qubits: int
    terms: tuple[PauliTerm, ...]
    identity_coefficient: float

    @property
    def n_terms(self) -> int:
        """J of the qubit Hamiltonian, identity included."""
        return len(self.terms) + 1

    @property
    def support(self) -> int:
        mask = 0
        for term in self.terms:
            mask |= term.support
        return mask


class OrderingStrategy(str, Enum):
    MAGNITUDE = "magnitude"
    LEXICOGRAPHIC = "lexicographic"


# ---------------------------------------------------------------------------
# Pauli algebra
# ---------------------------------------------------------------------------

def pauli_product(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, complex]:
    """Return (x, z, phase) with P(x1,z1)·P(x2,z2) = phase·P(x, z)."""
    x, z = x1 ^ x2, z1 ^ z2
    power = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x & z).bit_count()
    ) % 4
    return x, z, 1j ** power


def pauli_phases(indices: np.ndarray, x_mask: int, z_mask: int) -> np.ndarray:
    """Phase of P|i> = phase(i)·|i ^ x>, vectorized over basis indices."""
    signs = 1 - 2 * (np.bitwise_count(indices & z_mask) & 1).astype(np.int8)
    return (1j ** ((x_mask & z_mask).bit_count() % 4)) * signs


PauliSum = dict[tuple[int, int], complex]


def _multiply(a: list[tuple[int, int, complex]], b: list[tuple[int, int, complex]]) -> list[tuple[int, int, complex]]:
    out = []
    for (x1, z1, c1), (x2, z2, c2) in product(a, b):
        x, z, phase = pauli_product(x1, z1, x2, z2)
        out.append((x, z, c1 * c2 * phase))
    return out


def _ladder(p: int, dagger: bool) -> list[tuple[int, int, complex]]:
    """a_p (or a_p†) = (X_p ± iY_p)/2 ⊗ Z_{p-1}…Z_0."""
    x = 1 << p
    z_low = x - 1
    sign = -1 if dagger else 1
    return [(x, z_low, 0.5), (x, z_low | x, 0.5j * sign)]


# ---------------------------------------------------------------------------
# Canonicalization
# ---------------------------------------------------------------------------

def _canonical(
    n_qubits: int,
    accumulated: PauliSum,
    identity: complex = 0.0,
    threshold: float = PRUNE_THRESHOLD,
) -> QubitHamiltonian:
    identity += accumulated.pop((0, 0), 0.0)
    terms = []
    for (x, z), value in accumulated.items():
        if abs(value.imag) > 1e-10:
            raise HermiticityError(
                f"term {pauli_string(x, z, n_qubits)} has imaginary coefficient {value}"
            )
        if abs(value.real) >= threshold:
            terms.append(PauliTerm(x, z, float(value.real)))
    if abs(complex(identity).imag) > 1e-10:
        raise HermiticityError(f"identity coefficient {identity} is not real")
    terms.sort(key=PauliTerm.lexicographic_key)
    return QubitHamiltonian(n_qubits, tuple(terms), float(complex(identity).real))


# ---------------------------------------------------------------------------
# Jordan-Wigner
# ---------------------------------------------------------------------------

def jordan_wigner(s: SpinOrbitalIntegrals) -> QubitHamiltonian:
    """Map the second-quantized Hamiltonian onto qubits (one qubit per spin orbital)."""
    n = s.n_spin_orbitals
    if n > MAX_SPIN_ORBITALS:
        raise CapacityError(f"{n} spin orbitals exceed the {MAX_SPIN_ORBITALS}-qubit limit")

    create = [_ladder(p, dagger=True) for p in range(n)]
    annihilate = [_ladder(p, dagger=False) for p in range(n)]
    accumulated: PauliSum = defaultdict(complex)

    for p, q in zip(*np.nonzero(np.abs(s.h_so) > 0)):
        for x, z, c in _multiply(create[p], annihilate[q]):
            accumulated[(x, z)] += s.h_so[p, q] * c

    pair_create: dict[tuple[int, int], list] = {}
    pair_annihilate: dict[tuple[int, int], list] = {}
    for p, q, r, t in zip(*np.nonzero(np.abs(s.g_so) > 0)):
        if p == q or r == t:
            continue
        if (p, q) not in pair_create:
            pair_create[(p, q)] = _multiply(create[p], create[q])
        # a_p† a_q† a_s a_r with (r, s) = (r, t)
        if (t, r) not in pair_annihilate:
            pair_annihilate[(t, r)] = _multiply(annihilate[t], annihilate[r])
        weight = 0.5 * s.g_so[p, q, r, t]
        for x, z, c in _multiply(pair_create[(p, q)], pair_annihilate[(t, r)]):
            accumulated[(x, z)] += weight * c

    hamiltonian = _canonical(n, dict(accumulated), identity=s.core_energy)
    log_info("Jordan-Wigner mapping done", qubits=n, terms=hamiltonian.n_terms)
    return hamiltonian


# ---------------------------------------------------------------------------
# Parity encoding and tapering
# ---------------------------------------------------------------------------

def _prefix_xor(mask: int, n_bits: int) -> int:
    shift = 1
    while shift < n_bits:
        mask ^= mask << shift
        shift <<= 1
    return mask & ((1 << n_bits) - 1)


def _suffix_xor(mask: int, n_bits: int) -> int:
    shift = 1
    while shift < n_bits:
        mask ^= mask >> shift
        shift <<= 1
    return mask


def parity_encode_occupations(occupations: int, n_bits: int) -> int:
    """Qubit j of the result stores the parity of occupations 0..j."""
    return _prefix_xor(occupations, n_bits)


def parity_decode_occupations(encoded: int, n_bits: int) -> int:
    return (encoded ^ (encoded << 1)) & ((1 << n_bits) - 1)


def _conjugate_term(x: int, z: int, n: int, inverse: bool) -> tuple[int, int, int]:
    if inverse:
        new_x = parity_decode_occupations(x, n)
        new_z = _suffix_xor(z, n)
    else:
        new_x = _prefix_xor(x, n)
        new_z = z ^ (z >> 1)
    shift = ((x & z).bit_count() - (new_x & new_z).bit_count()) % 4
    if shift % 2:
        raise HermiticityError("parity conjugation produced a non-Hermitian string")
    return new_x, new_z, 1 if shift == 0 else -1


def parity_transform(h: QubitHamiltonian, inverse: bool = False) -> QubitHamiltonian:
    """Conjugate a Jordan-Wigner Hamiltonian into the parity encoding (or back)."""
    n = h.n_qubits
    accumulated: PauliSum = defaultdict(complex)
    for term in h.terms:
        x, z, sign = _conjugate_term(term.x_mask, term.z_mask, n, inverse)
        accumulated[(x, z)] += sign * term.coefficient
    return _canonical(n, dict(accumulated), identity=h.identity_coefficient)


def delete_bits(mask: int, positions: list[int]) -> int:
    """Remove the given bit positions, shifting higher bits down."""
    for pos in sorted(positions, reverse=True):
        low = mask & ((1 << pos) - 1)
        mask = low | ((mask >> (pos + 1)) << pos)
    return mask


def tapered_qubits(n_orbitals: int) -> tuple[int, int]:
    """Qubits holding the α-parity and the total parity in the blocked layout."""
    return n_orbitals - 1, 2 * n_orbitals - 1


def taper_two_qubits(
    h: QubitHamiltonian,
    n_alpha: int,
    n_beta: int,
    layout: str = "blocked",
    already_parity: bool = False,
) -> QubitHamiltonian:
    """Parity-encode a blocked JW Hamiltonian and drop its two parity qubits."""
    if layout != "blocked":
        raise SymmetryError(f"unsupported spin-orbital layout {layout!r}")
    if h.n_qubits % 2:
        raise SymmetryError("tapering needs an even number of spin-orbital qubits")
    parity = h if already_parity else parity_transform(h)
    alpha_qubit, total_qubit = tapered_qubits(h.n_qubits // 2)
    values = {
        alpha_qubit: -1 if n_alpha % 2 else 1,
        total_qubit: -1 if (n_alpha + n_beta) % 2 else 1,
    }

    accumulated: PauliSum = defaultdict(complex)
    for term in parity.terms:
        coefficient = term.coefficient
        for qubit, value in values.items():
            if (term.x_mask >> qubit) & 1:
                raise SymmetryError(
                    f"term {term.label(h.n_qubits)} acts with X/Y on tapered qubit {qubit}"
                )
            if (term.z_mask >> qubit) & 1:
                coefficient *= value
        key = (delete_bits(term.x_mask, list(values)), delete_bits(term.z_mask, list(values)))
        accumulated[key] += coefficient

    tapered = _canonical(h.n_qubits - 2, dict(accumulated), identity=parity.identity_coefficient)
    log_debug("Tapered two qubits", qubits=tapered.n_qubits, terms=tapered.n_terms)
    return tapered


# ---------------------------------------------------------------------------
# Ordering
# ---------------------------------------------------------------------------

def order_terms(h: QubitHamiltonian, strategy: OrderingStrategy | str) -> QubitHamiltonian:
    """Permute ``terms`` for the Trotter product; the first term is applied first."""
    strategy = OrderingStrategy(strategy)
    if strategy is OrderingStrategy.MAGNITUDE:
        terms = sorted(h.terms, key=lambda t: (-abs(t.coefficient), t.lexicographic_key()))
    else:
        terms = sorted(h.terms, key=PauliTerm.lexicographic_key)
    return QubitHamiltonian(h.n_qubits, tuple(terms), h.identity_coefficient)


# ---------------------------------------------------------------------------
# Dense matrix and text dump
# ---------------------------------------------------------------------------

def to_dense_matrix(h: QubitHamiltonian) -> np.ndarray:
    """Dense 2^n × 2^n matrix (small n only)."""
    if h.n_qubits > DENSE_MAX_QUBITS:
        raise CapacityError(f"dense matrix of {h.n_qubits} qubits is too large")
    dim = 1 << h.n_qubits
    indices = np.arange(dim)
    matrix = h.identity_coefficient * np.eye(dim, dtype=complex)
    for term in h.terms:
        matrix[indices ^ term.x_mask, indices] += term.coefficient * pauli_phases(
            indices, term.x_mask, term.z_mask
        )
    return matrix


def format_hamiltonian(h: QubitHamiltonian) -> str:
    """One term per line, ``±w.wwwwwwwwwwww  PAULI``, identity line first."""
    lines = [f"{format_coefficient(h.identity_coefficient)}  {'I' * h.n_qubits}"]
    lines += [f"{format_coefficient(t.coefficient)}  {t.label(h.n_qubits)}" for t in h.terms]
    return "\n".join(lines) + "\n"


def parse_hamiltonian(text: str) -> QubitHamiltonian:
    """Read back the output of :func:`format_hamiltonian` (order preserved)."""
    identity = 0.0
    terms = []
    n_qubits = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        value, label = line.split()
        n_qubits = len(label)
        x, z = parse_pauli_string(label)
        if x == z == 0:
            identity += float(value)
        else:
            terms.append(PauliTerm(x, z, float(value)))
    return QubitHamiltonian(n_qubits, tuple(terms), identity)
