"""Shared pytest fixtures for the TrotterQPE suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from hamiltonian.integrals import (
    SpatialIntegrals,
    delocalizing_rotation,
    noninteracting_dimer,
    read_fcidump,
    rotate_integrals,
)
from services.systems import EncodedSystem, build_system, read_reference_fixtures

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"
HYDROGEN = ("h4", "h8_cmo", "h8_lmo")


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run slow dimer-grid tests")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ---------------------------------------------------------------------------
# Model systems
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def one_orbital() -> SpatialIntegrals:
    return read_fcidump(DATA_DIR / "one_orbital.fcidump")


@pytest.fixture(scope="session")
def hubbard_pair() -> SpatialIntegrals:
    return read_fcidump(DATA_DIR / "hubbard_pair.fcidump")


@pytest.fixture(scope="session")
def hubbard_chain4() -> SpatialIntegrals:
    return read_fcidump(DATA_DIR / "hubbard_chain4.fcidump")


@pytest.fixture(scope="session")
def model_dimer_lmo(hubbard_pair) -> SpatialIntegrals:
    """Two Hubbard pairs at infinite separation, fragment-localized orbitals."""
    return noninteracting_dimer(hubbard_pair)


@pytest.fixture(scope="session")
def model_dimer_cmo(model_dimer_lmo) -> SpatialIntegrals:
    """Same dimer with orbitals delocalized over both fragments."""
    return rotate_integrals(model_dimer_lmo, delocalizing_rotation(model_dimer_lmo.n_orbitals))


@pytest.fixture(scope="session")
def pair_system(hubbard_pair) -> EncodedSystem:
    return build_system(hubbard_pair, "jw", name="monomer")


@pytest.fixture(scope="session")
def chain_system(hubbard_chain4) -> EncodedSystem:
    return build_system(hubbard_chain4, "jw", name="chain4")


@pytest.fixture(scope="session")
def dimer_lmo_system(model_dimer_lmo) -> EncodedSystem:
    return build_system(model_dimer_lmo, "jw", name="dimer_lmo")


@pytest.fixture(scope="session")
def dimer_cmo_system(model_dimer_cmo) -> EncodedSystem:
    return build_system(model_dimer_cmo, "jw", name="dimer_cmo")


# ---------------------------------------------------------------------------
# Molecular fixtures (PySCF)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def hydrogen_fixtures(tmp_path_factory):
    """Committed H4/H8 fixtures when present, otherwise generated with PySCF."""
    committed = read_reference_fixtures(FIXTURE_DIR)
    if all(name in committed for name in HYDROGEN):
        return committed
    pytest.importorskip("pyscf", reason="no committed hydrogen fixtures and PySCF is not installed")
    from services.molecules import build_hydrogen_fixtures

    return build_hydrogen_fixtures(tmp_path_factory.mktemp("hydrogen"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def make_state(rng):
    """Factory for normalized random complex amplitude vectors."""

    def make(n_qubits: int) -> np.ndarray:
        amplitudes = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
        return amplitudes / np.linalg.norm(amplitudes)

    return make
