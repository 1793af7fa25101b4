"""FCIDUMP ingestion, spin-orbital expansion and orbital rotations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from utils.debug import log_debug, log_info
from utils.errors import (
    CapacityError,
    ConsistencyError,
    OrbitalIndexError,
    ParseError,
    RotationError,
)
from utils.validators import validate_electron_counts, validate_orthogonal

MAX_ORBITALS = 16
CONSISTENCY_TOL = 1e-10

_HEADER_END = re.compile(r"(&END|/)\s*$", re.IGNORECASE | re.MULTILINE)
_HEADER_KEY = r"\b{}\s*=\s*(-?\d+)"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpatialIntegrals:
    """Integrals over l spatial orbitals; ``g`` in chemist notation (pq|rs)."""

    n_orbitals: int
    n_electrons: int
    h: np.ndarray
    g: np.ndarray
    core_energy: float
    ms2: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _frozen(self.h))
        object.__setattr__(self, "g", _frozen(self.g))

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2


@dataclass(frozen=True)
class SpinOrbitalIntegrals:
    """Spin-orbital integrals in blocked order (α block, then β block).

    ``g_so[p, q, r, s]`` is the physicist integral <pq|rs>; the 1/2 prefactor
    of the two-body term is applied by the fermion-to-qubit mapping.
    """

    n_spin_orbitals: int
    n_alpha: int
    n_beta: int
    h_so: np.ndarray
    g_so: np.ndarray
    core_energy: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "h_so", _frozen(self.h_so))
        object.__setattr__(self, "g_so", _frozen(self.g_so))

    @property
    def n_orbitals(self) -> int:
        return self.n_spin_orbitals // 2


@dataclass(frozen=True)
class OrbitalRotation:
    """Orthogonal l×l matrix; column p holds new orbital p in the old basis."""

    v: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", _frozen(self.v))

    def inverse(self) -> "OrbitalRotation":
        return OrbitalRotation(self.v.T)


# ---------------------------------------------------------------------------
# FCIDUMP
# ---------------------------------------------------------------------------

def _header_value(header: str, key: str, default: int | None = None) -> int:
    match = re.search(_HEADER_KEY.format(key), header, re.IGNORECASE)
    if match is None:
        if default is None:
            raise ParseError(f"FCIDUMP header is missing {key}")
        return default
    return int(match.group(1))


class _Assigner:
    """Writes symmetry-equivalent entries and rejects inconsistent duplicates."""

    def __init__(self, array: np.ndarray) -> None:
        self.array = array
        self.assigned = np.zeros(array.shape, dtype=bool)

    def set(self, index: tuple[int, ...], value: float, line_no: int) -> None:
        if self.assigned[index]:
            if abs(self.array[index] - value) > CONSISTENCY_TOL:
                raise ConsistencyError(
                    f"line {line_no}: entry {tuple(i + 1 for i in index)} = {value} "
                    f"conflicts with {self.array[index]}"
                )
            return
        self.array[index] = value
        self.assigned[index] = True


def _eightfold(i: int, j: int, k: int, l: int) -> set[tuple[int, int, int, int]]:
    return {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }


def parse_fcidump(text: bytes | str) -> SpatialIntegrals:
    """Parse FCIDUMP text into fully symmetrized :class:`SpatialIntegrals`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    end = _HEADER_END.search(text)
    if end is None or "&FCI" not in text[:end.start()].upper():
        raise ParseError("FCIDUMP namelist header (&FCI ... &END) not found")
    header = text[:end.start()]
    body = text[end.end():]

    n_orbitals = _header_value(header, "NORB")
    n_electrons = _header_value(header, "NELEC")
    ms2 = _header_value(header, "MS2", default=0)
    if n_orbitals <= 0 or n_electrons < 0:
        raise ParseError(f"invalid header values NORB={n_orbitals}, NELEC={n_electrons}")
    if n_orbitals > MAX_ORBITALS:
        raise CapacityError(f"NORB={n_orbitals} exceeds the supported {MAX_ORBITALS} orbitals")

    h = np.zeros((n_orbitals, n_orbitals))
    g = np.zeros((n_orbitals,) * 4)
    h_entries = _Assigner(h)
    g_entries = _Assigner(g)
    core_energy: float | None = None

    header_lines = header.count("\n") + 1
    for offset, line in enumerate(body.splitlines()):
        fields = line.split()
        if not fields:
            continue
        line_no = header_lines + offset
        if len(fields) != 5:
            raise ParseError(f"line {line_no}: expected 'value i j k l', got {line.strip()!r}")
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError as e:
            raise ParseError(f"line {line_no}: {e}") from e

        for index in (i, j, k, l):
            if not 0 <= index <= n_orbitals:
                raise OrbitalIndexError(
                    f"line {line_no}: index {index} outside 0..{n_orbitals}"
                )

        if i == j == k == l == 0:
            if core_energy is not None and abs(core_energy - value) > CONSISTENCY_TOL:
                raise ConsistencyError(f"line {line_no}: core energy redefined")
            core_energy = value
        elif k == l == 0:
            if j == 0:
                log_debug("Skipping orbital energy line", line=line_no)
                continue
            h_entries.set((i - 1, j - 1), value, line_no)
            h_entries.set((j - 1, i - 1), value, line_no)
        elif 0 in (i, j, k, l):
            raise ParseError(f"line {line_no}: mixed zero and nonzero indices")
        else:
            for index in _eightfold(i - 1, j - 1, k - 1, l - 1):
                g_entries.set(index, value, line_no)

    integrals = SpatialIntegrals(
        n_orbitals=n_orbitals,
        n_electrons=n_electrons,
        h=h,
        g=g,
        core_energy=0.0 if core_energy is None else core_energy,
        ms2=ms2,
    )
    log_debug("FCIDUMP parsed", norb=n_orbitals, nelec=n_electrons, ms2=ms2)
    return integrals


def read_fcidump(path: str | Path) -> SpatialIntegrals:
    """Read and parse an FCIDUMP file, attaching the path to parse failures."""
    path = Path(path)
    try:
        return parse_fcidump(path.read_bytes())
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from e


def write_fcidump(s: SpatialIntegrals, tol: float = 1e-14) -> str:
    """Emit FCIDUMP text with one line per unique 8-fold representative."""
    l = s.n_orbitals
    lines = [
        f" &FCI NORB={l},NELEC={s.n_electrons},MS2={s.ms2},",
        "  ORBSYM=" + "1," * l,
        "  ISYM=1,",
        " &END",
    ]
    for i in range(l):
        for j in range(i + 1):
            for k in range(l):
                for m in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + m:
                        continue
                    value = s.g[i, j, k, m]
                    if abs(value) > tol:
                        lines.append(f"{value:.16e} {i + 1} {j + 1} {k + 1} {m + 1}")
    for i in range(l):
        for j in range(i + 1):
            if abs(s.h[i, j]) > tol:
                lines.append(f"{s.h[i, j]:.16e} {i + 1} {j + 1} 0 0")
    lines.append(f"{s.core_energy:.16e} 0 0 0 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Spin orbitals
# ---------------------------------------------------------------------------

def _spin_blocks(spatial: np.ndarray, pair_axes: tuple[tuple[int, int], tuple[int, int]]) -> np.ndarray:
    """Place *spatial* into the four spin blocks where each axis pair shares spin."""
    l = spatial.shape[0]
    out = np.zeros((2 * l,) * 4)
    (a0, a1), (b0, b1) = pair_axes
    for sigma in (0, 1):
        for tau in (0, 1):
            index = [None] * 4
            index[a0] = index[a1] = slice(sigma * l, (sigma + 1) * l)
            index[b0] = index[b1] = slice(tau * l, (tau + 1) * l)
            out[tuple(index)] = spatial
    return out


def chemist_spin_tensor(s: SpatialIntegrals) -> np.ndarray:
    """Spin-orbital (pq|rs) = (PQ|RS)·δ(σp,σq)·δ(σr,σs)."""
    return _spin_blocks(s.g, ((0, 1), (2, 3)))


def to_spin_orbitals(
    s: SpatialIntegrals,
    n_alpha: int,
    n_beta: int,
    via_chemist: bool = False,
) -> SpinOrbitalIntegrals:
    """Expand to blocked spin orbitals with physicist two-electron integrals.

    With ``via_chemist`` the spin-orbital chemist tensor is assembled first and
    converted afterwards; both paths give the same tensor.
    """
    if not validate_electron_counts(n_alpha, n_beta, s.n_orbitals):
        raise CapacityError(
            f"{n_alpha} alpha + {n_beta} beta electrons do not fit {s.n_orbitals} orbitals"
        )
    if n_alpha + n_beta != s.n_electrons:
        raise ConsistencyError(
            f"n_alpha + n_beta = {n_alpha + n_beta} but NELEC = {s.n_electrons}"
        )

    h_so = np.kron(np.eye(2), s.h)
    if via_chemist:
        g_so = chemist_spin_tensor(s).transpose(0, 2, 1, 3)
    else:
        # <pq|rs> = (pr|qs): spins shared by axis pairs (0, 2) and (1, 3)
        g_so = _spin_blocks(s.g.transpose(0, 2, 1, 3), ((0, 2), (1, 3)))

    return SpinOrbitalIntegrals(
        n_spin_orbitals=2 * s.n_orbitals,
        n_alpha=n_alpha,
        n_beta=n_beta,
        h_so=h_so,
        g_so=g_so,
        core_energy=s.core_energy,
    )


# ---------------------------------------------------------------------------
# Orbital rotations
# ---------------------------------------------------------------------------

def rotate_integrals(s: SpatialIntegrals, v: OrbitalRotation | np.ndarray) -> SpatialIntegrals:
    """Transform integrals into the orbitals given by the columns of V."""
    matrix = v.v if isinstance(v, OrbitalRotation) else np.asarray(v, dtype=float)
    if matrix.shape != (s.n_orbitals, s.n_orbitals):
        raise RotationError(
            f"rotation shape {matrix.shape} does not match {s.n_orbitals} orbitals"
        )
    if not validate_orthogonal(matrix):
        raise RotationError("orbital rotation is not orthogonal")

    h = matrix.T @ s.h @ matrix
    g = np.einsum("abcd,ap,bq,cr,ds->pqrs", s.g, matrix, matrix, matrix, matrix, optimize=True)
    return SpatialIntegrals(
        n_orbitals=s.n_orbitals,
        n_electrons=s.n_electrons,
        h=h,
        g=g,
        core_energy=s.core_energy,
        ms2=s.ms2,
    )


def noninteracting_dimer(monomer: SpatialIntegrals) -> SpatialIntegrals:
    """Two copies of *monomer* at infinite separation.

    Orbitals are interleaved (A0, B0, A1, B1, ...), so the localized occupied
    orbitals of both fragments come first. Intermonomer integrals vanish.
    """
    l = monomer.n_orbitals
    if 2 * l > MAX_ORBITALS:
        raise CapacityError(f"dimer of {l}-orbital monomer exceeds {MAX_ORBITALS} orbitals")
    h = np.zeros((2 * l, 2 * l))
    g = np.zeros((2 * l,) * 4)
    for fragment in (0, 1):
        idx = np.arange(l) * 2 + fragment
        h[np.ix_(idx, idx)] = monomer.h
        g[np.ix_(idx, idx, idx, idx)] = monomer.g
    log_info("Built non-interacting dimer", orbitals=2 * l, electrons=2 * monomer.n_electrons)
    return SpatialIntegrals(
        n_orbitals=2 * l,
        n_electrons=2 * monomer.n_electrons,
        h=h,
        g=g,
        core_energy=2 * monomer.core_energy,
        ms2=2 * monomer.ms2,
    )


def delocalizing_rotation(n_orbitals: int) -> OrbitalRotation:
    """Pairwise (A ± B)/√2 mixing of an interleaved dimer's orbitals."""
    if n_orbitals % 2:
        raise RotationError("delocalizing rotation needs an even orbital count")
    block = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    return OrbitalRotation(np.kron(np.eye(n_orbitals // 2), block))
