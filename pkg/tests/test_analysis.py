"""Tests for peak fitting, secondary peaks and the size-consistency table."""

import math

import numpy as np
import pytest

from hamiltonian.oracle import SpectrumResult
from services import analysis
from services.analysis import (
    TROTTER_FREE,
    PeakFit,
    RunEnergy,
    detect_secondary_peaks,
    fit_gaussian_peak,
    phase_to_energy,
    size_consistency_table,
)
from simulation.qpe import (
    PhaseDistribution,
    QpeConfig,
    TrotterFree,
    energy_to_phase,
    sector_weights,
    trotter_free_distribution,
)
from utils.errors import FitError, NoPeakError, PairingError


def gaussian_distribution(n_ancilla: int, center_bins: float, width_bins: float) -> PhaseDistribution:
    n_bins = 1 << n_ancilla
    offsets = (np.arange(n_bins) - center_bins + n_bins / 2) % n_bins - n_bins / 2
    values = np.exp(-(offsets**2) / (2 * width_bins**2))
    return PhaseDistribution(n_ancilla, values / values.sum())


def distribution_from(n_ancilla: int, entries: dict[int, float]) -> PhaseDistribution:
    probabilities = np.zeros(1 << n_ancilla)
    for index, value in entries.items():
        probabilities[index] = value
    return PhaseDistribution(n_ancilla, probabilities)


# ---------------------------------------------------------------------------
# Gaussian fit
# ---------------------------------------------------------------------------

def test_on_grid_delta_uses_centroid():
    fit = fit_gaussian_peak(distribution_from(5, {5: 1.0}))
    assert fit.mu == pytest.approx(5 / 32, abs=1e-12)
    assert fit.sigma == pytest.approx(1e-3 / 32)
    assert fit.window == (2, 8)


def test_two_bin_peak_centroid():
    fit = fit_gaussian_peak(distribution_from(4, {6: 0.75, 7: 0.25}))
    assert fit.mu == pytest.approx(6.25 / 16, abs=1e-12)


@pytest.mark.parametrize("center", [10.37, 30.5, 0.6, 63.8])
def test_synthetic_gaussian_is_recovered(center):
    fit = fit_gaussian_peak(gaussian_distribution(6, center, 1.2))
    assert fit.mu == pytest.approx(center / 64, abs=1e-6)
    assert fit.sigma == pytest.approx(1.2 / 64, abs=1e-6)
    assert fit.converged


def test_fit_is_translation_covariant():
    d = gaussian_distribution(6, 2.3, 1.5)
    base = fit_gaussian_peak(d).mu
    for shift in (5, 40, 62):
        rolled = PhaseDistribution(6, np.roll(d.probabilities, shift))
        expected = (base + shift / 64) % 1.0
        assert fit_gaussian_peak(rolled).mu == pytest.approx(expected, abs=1e-9)


def test_flat_distribution_has_no_peak():
    with pytest.raises(NoPeakError):
        fit_gaussian_peak(PhaseDistribution(4, np.full(16, 1 / 16)))


def test_window_wider_than_grid():
    with pytest.raises(NoPeakError):
        fit_gaussian_peak(distribution_from(2, {1: 1.0}))


def test_failed_fit_carries_fallback(monkeypatch):
    def diverge(*args, **kwargs):
        raise RuntimeError("Optimal parameters not found")

    monkeypatch.setattr(analysis, "curve_fit", diverge)
    with pytest.raises(FitError) as info:
        fit_gaussian_peak(gaussian_distribution(6, 20.4, 1.2))
    fallback = info.value.fallback
    assert not fallback.converged
    assert fallback.mu == pytest.approx(20 / 64)


def test_phase_to_energy():
    assert phase_to_energy(0.25, 1.0) == pytest.approx(-math.pi / 2)
    assert phase_to_energy(0.0, 2.0) == 0.0
    assert energy_to_phase(phase_to_energy(0.371, 0.8), 0.8) == pytest.approx(0.371)


# ---------------------------------------------------------------------------
# Secondary peaks
# ---------------------------------------------------------------------------

def primary(window, mu=0.0):
    return PeakFit(mu=mu, sigma=0.01, amplitude=0.5, window=window, rss=0.0)


def test_secondary_peaks_outside_window():
    d = distribution_from(
        6, {9: 0.2, 10: 0.5, 11: 0.2, 13: 0.005, 39: 0.02, 40: 0.05, 41: 0.02, 50: 0.005}
    )
    peaks = detect_secondary_peaks(d, primary((7, 13), mu=10 / 64))
    assert peaks == [(40 / 64, 0.05)]


def test_secondary_peaks_sorted_and_plateau_counted_once():
    d = distribution_from(5, {0: 0.6, 10: 0.1, 11: 0.1, 20: 0.2})
    peaks = detect_secondary_peaks(d, primary((29, 3)))
    assert peaks == [(20 / 32, 0.2), (10 / 32, 0.1)]


def test_window_wraps_around_zero():
    d = distribution_from(5, {0: 0.7, 31: 0.1, 30: 0.05, 16: 0.15})
    peaks = detect_secondary_peaks(d, primary((29, 3)))
    assert peaks == [(0.5, 0.15)]


# ---------------------------------------------------------------------------
# Size consistency
# ---------------------------------------------------------------------------

def runs(monomer, dimer):
    out = []
    for setting, energy in monomer.items():
        out.append(RunEnergy("monomer", *setting, energy))
    for setting, energy in dimer.items():
        out.append(RunEnergy("dimer", *setting, energy))
    return out


def test_ratio_table_normalized_by_trotter_free():
    monomer = {("magnitude", "2", "10"): -1.1, TROTTER_FREE: -1.2, ("magnitude", "2", "1"): -1.0}
    dimer = {("magnitude", "2", "10"): -2.19, TROTTER_FREE: -2.4, ("magnitude", "2", "1"): -2.0}
    table = size_consistency_table(runs(monomer, dimer))
    assert [record.M for record in table] == ["1", "10", "inf"]
    assert table[0].ratio == pytest.approx(2.0)
    assert table[0].normalized_ratio == pytest.approx(1.0)
    assert table[1].normalized_ratio == pytest.approx(2.19 / 1.1 / 2.0)
    reference = table[-1]
    assert (reference.ordering, reference.trotter_order) == ("none", "none")
    assert reference.normalized_ratio == pytest.approx(1.0)


def test_every_row_is_normalized_by_the_trotter_free_pair():
    monomer = {TROTTER_FREE: -1.25}
    dimer = {TROTTER_FREE: -2.45}
    for ordering in ("magnitude", "lexicographic"):
        for order in ("1", "2"):
            for m, shift in (("1", 0.08), ("5", 0.02)):
                monomer[(ordering, order, m)] = -1.25 + shift
                dimer[(ordering, order, m)] = -2.45 + 3 * shift
    table = size_consistency_table(runs(monomer, dimer))
    assert len(table) == 9
    reference = 2.45 / 1.25
    for record in table:
        assert record.ratio == pytest.approx(record.E_dimer / record.E_monomer)
        assert record.normalized_ratio == pytest.approx(record.ratio / reference)
    assert table[-1].M == "inf"


def test_ratio_table_without_reference_is_nan():
    table = size_consistency_table(runs({("lexicographic", "1", "5"): -1.0}, {("lexicographic", "1", "5"): -2.1}))
    assert table[0].ratio == pytest.approx(2.1)
    assert math.isnan(table[0].normalized_ratio)


def test_ratio_table_rejects_unpaired_runs():
    with pytest.raises(PairingError):
        size_consistency_table(runs({("magnitude", "1", "1"): -1.0}, {("magnitude", "1", "2"): -2.0}))
    with pytest.raises(PairingError):
        size_consistency_table([RunEnergy("trimer", "magnitude", "1", "1", -3.0)])


def test_exact_model_dimer_ratio_is_two(pair_system, dimer_cmo_system):
    table = size_consistency_table(
        [
            RunEnergy("monomer", *TROTTER_FREE, pair_system.ground_energy),
            RunEnergy("dimer", *TROTTER_FREE, dimer_cmo_system.ground_energy),
        ]
    )
    assert table[0].ratio == pytest.approx(2.0, abs=1e-10)


# ---------------------------------------------------------------------------
# Trotter-free distributions
# ---------------------------------------------------------------------------

def on_grid_spectrum(bins, n_ancilla):
    energies = np.sort([phase_to_energy(b / (1 << n_ancilla), 1.0) for b in bins])
    return SpectrumResult(energies, np.eye(len(bins)))


def test_eigenstate_input_has_no_secondary_peaks():
    spectrum = on_grid_spectrum([12, 40], 6)
    d = trotter_free_distribution(spectrum, np.array([1.0, 0.0]), QpeConfig(6, plan=TrotterFree()))
    assert detect_secondary_peaks(d, fit_gaussian_peak(d)) == []


def test_two_state_superposition_gives_two_peaks():
    spectrum = on_grid_spectrum([12, 40], 6)
    d = trotter_free_distribution(spectrum, np.array([0.5, 0.5]), QpeConfig(6, plan=TrotterFree()))
    fit = fit_gaussian_peak(d)
    peaks = detect_secondary_peaks(d, fit)
    assert len(peaks) == 1
    assert {round(fit.mu * 64), round(peaks[0][0] * 64)} == {12, 40}


def test_trotter_free_fit_recovers_ground_energy(pair_system):
    n_ancilla = 10
    weights = sector_weights(pair_system.spectrum, pair_system.basis, pair_system.input_state("fci"))
    d = trotter_free_distribution(pair_system.spectrum, weights, QpeConfig(n_ancilla, plan=TrotterFree()))
    fit = fit_gaussian_peak(d)
    exact = energy_to_phase(pair_system.ground_energy, 1.0)
    assert abs(fit.mu - exact) < 1 / (1 << n_ancilla)
    energy = phase_to_energy(fit.mu, 1.0)
    assert energy == pytest.approx(pair_system.ground_energy, abs=2 * math.pi / (1 << n_ancilla) + 1e-3)
