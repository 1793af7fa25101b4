"""Hydrogen-cluster fixtures built with PySCF: square H4 and the far-separated H8 cuboid."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, lo, scf
from pyscf.tools import fcidump

from services.systems import MolecularFixture, write_reference_energies
from utils.debug import Timer, log_info

BOND_ANGSTROM = 1.0583
SEPARATION_ANGSTROM = 100.0
BASIS = "sto-3g"


def square_h4(z: float = 0.0) -> list[tuple[str, tuple[float, float, float]]]:
    r = BOND_ANGSTROM
    return [("H", (x, y, z)) for x, y in ((0.0, 0.0), (r, 0.0), (r, r), (0.0, r))]


def build_molecule(atoms: list) -> gto.Mole:
    return gto.M(atom=atoms, basis=BASIS, unit="Angstrom", spin=0, charge=0, verbose=0)


def run_rhf(mol: gto.Mole) -> scf.hf.RHF:
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {mol.natm}-atom cluster")
    return mf


def boys_orbitals(mf: scf.hf.RHF) -> np.ndarray:
    """Boys-localized occupied then virtual orbitals (spaces localized separately)."""
    occupied = mf.mo_occ > 0
    mo_occ = lo.Boys(mf.mol, mf.mo_coeff[:, occupied]).kernel()
    mo_vir = lo.Boys(mf.mol, mf.mo_coeff[:, ~occupied]).kernel()
    return np.hstack([mo_occ, mo_vir])


def active_integrals(mf: scf.hf.RHF, mo: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.full(mf.mol, mo), mo.shape[1])
    return h1, eri, float(mf.energy_nuc())


def external_fci_energy(h1: np.ndarray, eri: np.ndarray, n_electrons: int, ecore: float) -> float:
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-12
    energy, _ = solver.kernel(h1, eri, h1.shape[0], n_electrons, ecore=ecore)
    return float(energy)


def write_fixture(name: str, mf: scf.hf.RHF, mo: np.ndarray, out_dir: Path) -> MolecularFixture:
    h1, eri, ecore = active_integrals(mf, mo)
    n_electrons = mf.mol.nelectron
    path = out_dir / f"{name}.fcidump"
    fcidump.from_integrals(str(path), h1, eri, h1.shape[0], n_electrons, nuc=ecore, ms=0, tol=1e-14)
    fixture = MolecularFixture(
        name=name,
        path=path,
        hf_energy=float(mf.e_tot),
        fci_energy=external_fci_energy(h1, eri, n_electrons, ecore),
    )
    log_info("Fixture written", name=name, path=str(path), e_fci=f"{fixture.fci_energy:.10f}")
    return fixture


def build_hydrogen_fixtures(out_dir: str | Path) -> dict[str, MolecularFixture]:
    """Write h4.fcidump, h8_cmo.fcidump and h8_lmo.fcidump into *out_dir*."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with Timer("hydrogen_fixtures"):
        monomer = run_rhf(build_molecule(square_h4()))
        dimer = run_rhf(build_molecule(square_h4() + square_h4(SEPARATION_ANGSTROM)))
        fixtures = {
            "h4": write_fixture("h4", monomer, monomer.mo_coeff, out_dir),
            "h8_cmo": write_fixture("h8_cmo", dimer, dimer.mo_coeff, out_dir),
            "h8_lmo": write_fixture("h8_lmo", dimer, boys_orbitals(dimer), out_dir),
        }
    write_reference_energies(fixtures, out_dir)
    return fixtures
