"""Tests for FCIDUMP parsing, spin-orbital expansion and orbital rotations."""

import numpy as np
import pytest
from scipy.stats import ortho_group

from hamiltonian.integrals import (
    OrbitalRotation,
    SpatialIntegrals,
    delocalizing_rotation,
    noninteracting_dimer,
    parse_fcidump,
    read_fcidump,
    rotate_integrals,
    to_spin_orbitals,
    write_fcidump,
)
from utils.errors import (
    CapacityError,
    ConsistencyError,
    OrbitalIndexError,
    ParseError,
    RotationError,
)

HEADER = " &FCI NORB={norb},NELEC={nelec},MS2=0,\n  ORBSYM=1,\n  ISYM=1,\n &END\n"


def fcidump_text(lines, norb=1, nelec=2):
    return HEADER.format(norb=norb, nelec=nelec) + "\n".join(lines) + "\n"


def random_integrals(n_orbitals: int, seed: int) -> SpatialIntegrals:
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n_orbitals, n_orbitals))
    g = rng.normal(size=(n_orbitals,) * 4)
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    return SpatialIntegrals(n_orbitals, n_orbitals, (h + h.T) / 2, g / 8, 0.3)


# ---------------------------------------------------------------------------
# parse_fcidump
# ---------------------------------------------------------------------------

def test_parse_direct_field_mapping():
    s = parse_fcidump(fcidump_text(["0.5 1 1 1 1", "-1.0 1 1 0 0", "0.7 0 0 0 0"]).encode())
    assert s.n_orbitals == 1
    assert s.n_electrons == 2
    assert s.g[0, 0, 0, 0] == 0.5
    assert s.h[0, 0] == -1.0
    assert s.core_energy == 0.7


def test_parse_expands_eightfold_symmetry():
    s = parse_fcidump(fcidump_text(["0.25 1 2 1 1"], norb=2))
    for index in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
        assert s.g[index] == 0.25
    assert s.g[0, 0, 0, 0] == 0.0


def test_parse_accepts_fortran_exponents_and_slash_terminator():
    text = " &FCI NORB=1,NELEC=2,MS2=0\n /\n 0.5D+00 1 1 1 1\n"
    assert parse_fcidump(text).g[0, 0, 0, 0] == 0.5


def test_parse_rejects_missing_header():
    with pytest.raises(ParseError):
        parse_fcidump("0.5 1 1 1 1\n")


def test_parse_rejects_missing_norb():
    with pytest.raises(ParseError):
        parse_fcidump(" &FCI NELEC=2,\n &END\n0.5 1 1 1 1\n")


def test_parse_rejects_short_line():
    with pytest.raises(ParseError):
        parse_fcidump(fcidump_text(["0.5 1 1 1"]))


def test_parse_rejects_index_out_of_range():
    with pytest.raises(OrbitalIndexError):
        parse_fcidump(fcidump_text(["0.5 2 1 1 1"]))
    with pytest.raises(IndexError):
        parse_fcidump(fcidump_text(["0.5 1 1 0 0", "0.1 3 1 0 0"], norb=2))


def test_parse_rejects_inconsistent_duplicates():
    with pytest.raises(ConsistencyError):
        parse_fcidump(fcidump_text(["0.25 1 2 1 1", "0.30 2 1 1 1"], norb=2))


def test_parse_tolerates_consistent_duplicates():
    s = parse_fcidump(fcidump_text(["0.25 1 2 1 1", "0.25 1 1 2 1"], norb=2))
    assert s.g[1, 0, 0, 0] == 0.25


def test_parse_rejects_too_many_orbitals():
    with pytest.raises(CapacityError):
        parse_fcidump(fcidump_text([], norb=17))


def test_fixtures_satisfy_symmetry_invariants(one_orbital, hubbard_pair, hubbard_chain4):
    for s in (one_orbital, hubbard_pair, hubbard_chain4):
        np.testing.assert_allclose(s.h, s.h.T, atol=1e-12)
        for axes in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
            np.testing.assert_allclose(s.g, s.g.transpose(axes), atol=1e-12)


def test_hubbard_pair_fixture_values(hubbard_pair):
    assert hubbard_pair.h[0, 1] == hubbard_pair.h[1, 0] == -0.5
    assert hubbard_pair.g[0, 0, 0, 0] == hubbard_pair.g[1, 1, 1, 1] == 1.0
    assert hubbard_pair.g[0, 0, 1, 1] == 0.0
    assert hubbard_pair.core_energy == -2.0


def test_write_fcidump_round_trip(hubbard_chain4):
    again = parse_fcidump(write_fcidump(hubbard_chain4))
    np.testing.assert_allclose(again.h, hubbard_chain4.h, atol=1e-15)
    np.testing.assert_allclose(again.g, hubbard_chain4.g, atol=1e-15)
    assert again.core_energy == hubbard_chain4.core_energy


def test_read_fcidump_reports_path(tmp_path):
    path = tmp_path / "broken.fcidump"
    path.write_text("nothing here\n")
    with pytest.raises(ParseError, match="broken.fcidump"):
        read_fcidump(path)


# ---------------------------------------------------------------------------
# to_spin_orbitals
# ---------------------------------------------------------------------------

def test_spin_orbital_one_body_is_block_diagonal(one_orbital):
    so = to_spin_orbitals(one_orbital, 1, 1)
    np.testing.assert_array_equal(so.h_so, np.diag([-1.25, -1.25]))


def test_spin_orbital_two_body_spin_bookkeeping(one_orbital):
    so = to_spin_orbitals(one_orbital, 1, 1)
    assert so.g_so[0, 1, 0, 1] == 0.65
    assert so.g_so[0, 0, 0, 0] == 0.65
    assert so.g_so[0, 1, 1, 0] == 0.0


def test_spin_selection_rules(hubbard_chain4):
    so = to_spin_orbitals(hubbard_chain4, 2, 2)
    l = hubbard_chain4.n_orbitals
    spin = np.arange(2 * l) // l
    p, q, r, s = np.nonzero(so.g_so)
    assert np.all(spin[p] == spin[r])
    assert np.all(spin[q] == spin[s])
    assert np.all(so.h_so[:l, l:] == 0)


def test_chemist_and_physicist_assembly_agree():
    s = random_integrals(3, seed=4)
    direct = to_spin_orbitals(s, 2, 1)
    via_chemist = to_spin_orbitals(s, 2, 1, via_chemist=True)
    np.testing.assert_array_equal(direct.g_so, via_chemist.g_so)


def test_spin_orbitals_capacity_and_consistency(hubbard_pair):
    with pytest.raises(CapacityError):
        to_spin_orbitals(hubbard_pair, 3, 0)
    with pytest.raises(ConsistencyError):
        to_spin_orbitals(hubbard_pair, 1, 0)


# ---------------------------------------------------------------------------
# rotate_integrals
# ---------------------------------------------------------------------------

def test_identity_rotation_is_exact(hubbard_chain4):
    rotated = rotate_integrals(hubbard_chain4, OrbitalRotation(np.eye(4)))
    np.testing.assert_allclose(rotated.h, hubbard_chain4.h, atol=1e-15, rtol=0)
    np.testing.assert_allclose(rotated.g, hubbard_chain4.g, atol=1e-15, rtol=0)
    assert rotated.core_energy == hubbard_chain4.core_energy


def test_swap_rotation_permutes_one_body(hubbard_chain4):
    v = np.eye(4)[:, [1, 0, 2, 3]]
    rotated = rotate_integrals(hubbard_chain4, v)
    expected = hubbard_chain4.h[np.ix_([1, 0, 2, 3], [1, 0, 2, 3])]
    np.testing.assert_allclose(rotated.h, expected, atol=1e-15)


def test_rotation_round_trip():
    s = random_integrals(4, seed=11)
    v = OrbitalRotation(ortho_group.rvs(4, random_state=3))
    back = rotate_integrals(rotate_integrals(s, v), v.inverse())
    np.testing.assert_allclose(back.h, s.h, atol=1e-10)
    np.testing.assert_allclose(back.g, s.g, atol=1e-10)


def test_rotation_rejects_bad_matrices(hubbard_pair):
    with pytest.raises(RotationError):
        rotate_integrals(hubbard_pair, np.array([[1.0, 0.1], [0.0, 1.0]]))
    with pytest.raises(RotationError):
        rotate_integrals(hubbard_pair, np.eye(3))


# ---------------------------------------------------------------------------
# Dimer construction
# ---------------------------------------------------------------------------

def test_noninteracting_dimer_layout(hubbard_pair, model_dimer_lmo):
    assert model_dimer_lmo.n_orbitals == 4
    assert model_dimer_lmo.n_electrons == 4
    assert model_dimer_lmo.core_energy == 2 * hubbard_pair.core_energy
    # fragment A holds orbitals 0, 2 and fragment B holds 1, 3
    np.testing.assert_array_equal(model_dimer_lmo.h[np.ix_([0, 2], [0, 2])], hubbard_pair.h)
    assert model_dimer_lmo.h[0, 1] == 0.0
    assert model_dimer_lmo.g[0, 0, 1, 1] == 0.0


def test_delocalizing_rotation_is_orthogonal():
    v = delocalizing_rotation(8).v
    np.testing.assert_allclose(v.T @ v, np.eye(8), atol=1e-15)
    with pytest.raises(RotationError):
        delocalizing_rotation(3)


def test_delocalized_dimer_mixes_fragments(model_dimer_cmo):
    # each delocalized orbital has density on both fragments, so intra-orbital repulsion halves
    np.testing.assert_allclose(model_dimer_cmo.g[0, 0, 0, 0], 0.5, atol=1e-14)
