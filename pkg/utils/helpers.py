"""Formatting helpers for TrotterQPE."""

from __future__ import annotations

from typing import Any, Mapping

PAULI_LETTERS = "IXZY"


def format_phase(phase: float) -> str:
    """Format a phase in [0, 1) with 12 significant digits."""
    return f"{phase:.12g}"


def format_coefficient(value: float) -> str:
    """Format a Pauli coefficient as ``±w.wwwwwwwwwwww``."""
    return f"{value:+.12f}"


def format_slices(slices: int | None) -> str:
    """Trotter slice count, ``inf`` for Trotter-free runs."""
    return "inf" if slices is None else str(slices)


def format_settings(settings: Mapping[str, Any]) -> str:
    """Render run settings as a single ``key=value;key=value`` string."""
    return ";".join(f"{key}={settings[key]}" for key in settings)


def pauli_letter(x_bit: int, z_bit: int) -> str:
    """Letter for one qubit: (0,0)→I, (1,0)→X, (1,1)→Y, (0,1)→Z."""
    return PAULI_LETTERS[x_bit | (z_bit << 1)]


def pauli_string(x_mask: int, z_mask: int, n_qubits: int) -> str:
    """Letter string of a Pauli term, qubit 0 first."""
    return "".join(
        pauli_letter((x_mask >> q) & 1, (z_mask >> q) & 1) for q in range(n_qubits)
    )


def parse_pauli_string(text: str) -> tuple[int, int]:
    """Inverse of :func:`pauli_string`: return ``(x_mask, z_mask)``."""
    x_mask = z_mask = 0
    for q, letter in enumerate(text.strip().upper()):
        code = PAULI_LETTERS.index(letter)
        x_mask |= (code & 1) << q
        z_mask |= ((code >> 1) & 1) << q
    return x_mask, z_mask
