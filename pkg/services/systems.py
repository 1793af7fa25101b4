"""FCIDUMP → qubit Hamiltonian → oracle spectrum pipeline."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from hamiltonian.encoding import (
    QubitHamiltonian,
    jordan_wigner,
    parity_transform,
    taper_two_qubits,
)
from hamiltonian.integrals import (
    SpatialIntegrals,
    delocalizing_rotation,
    noninteracting_dimer,
    read_fcidump,
    rotate_integrals,
    to_spin_orbitals,
)
from hamiltonian.oracle import (
    Encoding,
    EncodingDescriptor,
    SectorBasis,
    SpectrumResult,
    sector_spectrum,
)
from simulation.qpe import InputState, prepare_input_state
from simulation.statevector import Statevector
from utils.debug import Timer, log_info


@dataclass(frozen=True)
class EncodedSystem:
    """One molecule (or model) ready for QPE: qubit Hamiltonian plus exact reference."""

    name: str
    integrals: SpatialIntegrals
    hamiltonian: QubitHamiltonian
    descriptor: EncodingDescriptor
    basis: SectorBasis
    spectrum: SpectrumResult

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @property
    def ground_energy(self) -> float:
        return self.spectrum.ground_energy

    def input_state(self, kind: InputState | str, capacity: int | None = None) -> Statevector:
        return prepare_input_state(self.hamiltonian, kind, self.basis, self.spectrum, capacity)

    @property
    def fingerprint(self) -> str:
        """Short digest of the integrals and encoding; stored peak files are keyed on it."""
        return integrals_fingerprint(self.integrals, self.descriptor.kind)


def integrals_fingerprint(integrals: SpatialIntegrals, encoding: Encoding | str) -> str:
    digest = hashlib.sha256()
    digest.update(f"{Encoding(encoding).value};{integrals.n_orbitals};{integrals.n_electrons};{integrals.ms2}".encode())
    # rounding keeps the digest stable across an FCIDUMP write/read cycle
    for array in (integrals.h, integrals.g, np.array([integrals.core_energy])):
        digest.update((np.round(array, 10) + 0.0).tobytes())
    return digest.hexdigest()[:16]


def encode_integrals(integrals: SpatialIntegrals, encoding: Encoding | str) -> tuple[QubitHamiltonian, EncodingDescriptor]:
    encoding = Encoding(encoding)
    spin = to_spin_orbitals(integrals, integrals.n_alpha, integrals.n_beta)
    hamiltonian = jordan_wigner(spin)
    if encoding is Encoding.TAPERED:
        hamiltonian = taper_two_qubits(hamiltonian, integrals.n_alpha, integrals.n_beta)
    elif encoding is Encoding.PARITY:
        hamiltonian = parity_transform(hamiltonian)
    descriptor = EncodingDescriptor(encoding, integrals.n_orbitals, integrals.n_alpha, integrals.n_beta)
    return hamiltonian, descriptor


def build_system(integrals: SpatialIntegrals, encoding: Encoding | str, name: str = "system") -> EncodedSystem:
    with Timer("build_system", system=name, encoding=str(encoding)):
        hamiltonian, descriptor = encode_integrals(integrals, encoding)
        basis, spectrum = sector_spectrum(hamiltonian, descriptor)
    log_info(
        "System ready",
        name=name,
        qubits=hamiltonian.n_qubits,
        terms=hamiltonian.n_terms,
        sector=basis.size,
        e0=f"{spectrum.ground_energy:.10f}",
    )
    return EncodedSystem(name, integrals, hamiltonian, descriptor, basis, spectrum)


def load_system(path: str | Path, encoding: Encoding | str, name: str | None = None) -> EncodedSystem:
    path = Path(path)
    return build_system(read_fcidump(path), encoding, name or path.stem)


def derive_dimer_systems(monomer: EncodedSystem) -> dict[str, EncodedSystem]:
    """Infinite-separation dimer of *monomer* in delocalized and localized orbitals."""
    localized = noninteracting_dimer(monomer.integrals)
    delocalized = rotate_integrals(localized, delocalizing_rotation(localized.n_orbitals))
    encoding = monomer.descriptor.kind
    return {
        "dimer_cmo": build_system(delocalized, encoding, "dimer_cmo"),
        "dimer_lmo": build_system(localized, encoding, "dimer_lmo"),
    }


# ---------------------------------------------------------------------------
# Reference fixtures
# ---------------------------------------------------------------------------

REFERENCE_FILE = "reference_energies.csv"


@dataclass(frozen=True)
class MolecularFixture:
    name: str
    path: Path
    hf_energy: float
    fci_energy: float


def write_reference_energies(fixtures: dict[str, MolecularFixture], out_dir: str | Path) -> Path:
    """Store the external HF / full-CI energies next to the FCIDUMP files."""
    path = Path(out_dir) / REFERENCE_FILE
    rows = [
        {"name": f.name, "fcidump": f.path.name, "hf_energy": f.hf_energy, "fci_energy": f.fci_energy}
        for f in fixtures.values()
    ]
    pd.DataFrame(rows).to_csv(path, index=False, float_format="%.12f")
    return path


def read_reference_fixtures(fixture_dir: str | Path) -> dict[str, MolecularFixture]:
    """Committed fixtures by name; empty when the reference table is absent."""
    fixture_dir = Path(fixture_dir)
    path = fixture_dir / REFERENCE_FILE
    if not path.is_file():
        return {}
    table = pd.read_csv(path)
    return {
        row.name: MolecularFixture(row.name, fixture_dir / row.fcidump, float(row.hf_energy), float(row.fci_energy))
        for row in table.itertuples(index=False)
    }
