"""Peak fitting, phase/energy conversion and size-consistency ratios for TrotterQPE."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from simulation.qpe import PhaseDistribution
from utils.debug import log_debug, log_warning
from utils.errors import FitError, NoPeakError, PairingError

WINDOW_HALFWIDTH = 3
SECONDARY_THRESHOLD = 0.01
FIT_TOLERANCE = 1e-12
FIT_MAX_ITERATIONS = 200
TROTTER_FREE = ("none", "none", "inf")


@dataclass(frozen=True)
class PeakFit:
    mu: float
    sigma: float
    amplitude: float
    window: tuple[int, int]
    rss: float
    converged: bool = True

    def as_row(self) -> dict:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "amplitude": self.amplitude,
            "rss": self.rss,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
        }


@dataclass(frozen=True)
class RunEnergy:
    """Fitted energy of one QPE run, keyed by system and Trotter setting."""

    system: str
    ordering: str
    trotter_order: str
    slices: str
    energy: float

    @property
    def setting(self) -> tuple[str, str, str]:
        return self.ordering, self.trotter_order, self.slices


@dataclass(frozen=True)
class RatioRecord:
    ordering: str
    trotter_order: str
    M: str
    E_monomer: float
    E_dimer: float
    ratio: float
    normalized_ratio: float


# ---------------------------------------------------------------------------
# Phase <-> energy
# ---------------------------------------------------------------------------

def phase_to_energy(mu: float, t: float) -> float:
    """E = -2*pi*mu / t, valid on the branch -2*pi < E*t <= 0."""
    return -2 * math.pi * mu / t


# ---------------------------------------------------------------------------
# Gaussian fit
# ---------------------------------------------------------------------------

def _gaussian(u: np.ndarray, amplitude: float, center: float, width: float) -> np.ndarray:
    return amplitude * np.exp(-((u - center) ** 2) / (2 * width**2))


def _window_bins(peak: int, halfwidth: int, n_bins: int) -> np.ndarray:
    return (peak + np.arange(-halfwidth, halfwidth + 1)) % n_bins


def _as_fit(peak: int, n_bins: int, params, offsets, values, halfwidth, converged=True) -> PeakFit:
    amplitude, center, width = (float(p) for p in params)
    residual = values - _gaussian(offsets, amplitude, center, width)
    return PeakFit(
        mu=((peak + center) / n_bins) % 1.0,
        sigma=abs(width) / n_bins,
        amplitude=amplitude,
        window=((peak - halfwidth) % n_bins, (peak + halfwidth) % n_bins),
        rss=float(residual @ residual),
        converged=converged,
    )


def fit_gaussian_peak(d: PhaseDistribution, window_halfwidth: int = WINDOW_HALFWIDTH) -> PeakFit:
    """Least-squares Gaussian around the most probable bin.

    The fit runs in bin offsets relative to the maximum, so windows crossing
    phase 1 need no special handling and the result shifts with the data.
    """
    probabilities = d.probabilities
    n_bins = d.n_bins
    if 2 * window_halfwidth + 1 > n_bins:
        raise NoPeakError(f"window of {2 * window_halfwidth + 1} bins exceeds {n_bins} bins")
    if np.ptp(probabilities) < 1e-15:
        raise NoPeakError("distribution is flat")

    peak = int(np.argmax(probabilities))
    offsets = np.arange(-window_halfwidth, window_halfwidth + 1, dtype=float)
    values = probabilities[_window_bins(peak, window_halfwidth, n_bins)]
    guess = (float(values[window_halfwidth]), 0.0, 1.0)

    if np.count_nonzero(values > 1e-12) < 3:
        # too few points for three parameters: weighted centroid and spread
        center = float(values @ offsets / values.sum())
        spread = math.sqrt(float(values @ (offsets - center) ** 2 / values.sum()))
        fit = _as_fit(peak, n_bins, (guess[0], center, max(spread, 1e-3)), offsets, values, window_halfwidth)
        log_debug("Peak fit by centroid", mu=f"{fit.mu:.12f}", bins=int(np.count_nonzero(values > 1e-12)))
        return fit

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            params, _ = curve_fit(
                _gaussian,
                offsets,
                values,
                p0=guess,
                method="lm",
                xtol=FIT_TOLERANCE,
                ftol=FIT_TOLERANCE,
                maxfev=FIT_MAX_ITERATIONS * (len(guess) + 1),
            )
    except RuntimeError as exc:
        fallback = _as_fit(peak, n_bins, guess, offsets, values, window_halfwidth, converged=False)
        log_warning("Gaussian fit did not converge", mu=f"{fallback.mu:.12f}", error=str(exc))
        raise FitError("Gaussian fit did not converge", fallback=fallback) from exc

    if not np.all(np.isfinite(params)) or abs(params[1]) > window_halfwidth:
        fallback = _as_fit(peak, n_bins, guess, offsets, values, window_halfwidth, converged=False)
        raise FitError(f"Gaussian fit left the window: {params}", fallback=fallback)

    fit = _as_fit(peak, n_bins, params, offsets, values, window_halfwidth)
    log_debug("Peak fit", mu=f"{fit.mu:.12f}", sigma=f"{fit.sigma:.3e}", rss=f"{fit.rss:.3e}")
    return fit


def _in_window(index: int, window: tuple[int, int], n_bins: int) -> bool:
    first, last = window
    return (index - first) % n_bins <= (last - first) % n_bins


def detect_secondary_peaks(
    d: PhaseDistribution, primary: PeakFit, threshold: float = SECONDARY_THRESHOLD
) -> list[tuple[float, float]]:
    """Circular local maxima outside the primary window, highest first."""
    p = d.probabilities
    left, right = np.roll(p, 1), np.roll(p, -1)
    candidates = np.flatnonzero((p > left) & (p >= right) & (p >= threshold))
    peaks = [
        (float(i) / d.n_bins, float(p[i]))
        for i in candidates
        if not _in_window(int(i), primary.window, d.n_bins)
    ]
    return sorted(peaks, key=lambda peak: -peak[1])


# ---------------------------------------------------------------------------
# Size consistency
# ---------------------------------------------------------------------------

def size_consistency_table(runs: Iterable[RunEnergy]) -> list[RatioRecord]:
    """Pair monomer and dimer runs by setting; normalize by the Trotter-free pair."""
    energies: dict[str, dict[tuple[str, str, str], float]] = {"monomer": {}, "dimer": {}}
    for run in runs:
        if run.system not in energies:
            raise PairingError(f"unknown system {run.system!r}")
        energies[run.system][run.setting] = run.energy

    monomer, dimer = energies["monomer"], energies["dimer"]
    unpaired = set(monomer) ^ set(dimer)
    if unpaired:
        raise PairingError(f"runs without a companion: {sorted(unpaired)}")

    reference = None
    if TROTTER_FREE in monomer:
        reference = dimer[TROTTER_FREE] / monomer[TROTTER_FREE]

    records = []
    for setting in sorted(monomer, key=_setting_sort_key):
        ratio = dimer[setting] / monomer[setting]
        records.append(
            RatioRecord(
                ordering=setting[0],
                trotter_order=setting[1],
                M=setting[2],
                E_monomer=monomer[setting],
                E_dimer=dimer[setting],
                ratio=ratio,
                normalized_ratio=ratio / reference if reference is not None else math.nan,
            )
        )
    return records


def _setting_sort_key(setting: tuple[str, str, str]) -> tuple:
    ordering, order, slices = setting
    return (setting == TROTTER_FREE, ordering, order, math.inf if slices == "inf" else int(slices))
