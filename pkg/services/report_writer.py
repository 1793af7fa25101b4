"""CSV reports for TrotterQPE runs using pandas.

Every file starts with one ``# key=value;key=value`` comment line holding the
full run settings, followed by a plain CSV table.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
import pandas as pd

from hamiltonian.oracle import SpectrumResult
from services.analysis import PeakFit, RatioRecord
from simulation.qpe import PhaseDistribution
from utils.debug import log_debug
from utils.helpers import format_phase, format_settings

RATIO_COLUMNS = ["ordering", "trotter_order", "M", "E_monomer", "E_dimer", "ratio", "normalized_ratio"]
PEAK_COLUMNS = ["mu", "sigma", "amplitude", "rss", "window_lo", "window_hi"]
BENCH_COLUMNS = ["N", "naive_seconds", "sequential_seconds", "speedup"]


def run_stem(system: str, input_state: str, ordering: str, trotter_order: str, slices: str) -> str:
    """File stem encoding every setting of one grid point."""
    if slices == "inf":
        return f"{system}_{input_state}_trotterfree"
    return f"{system}_{input_state}_{ordering}_o{trotter_order}_M{slices}"


class ReportWriter:
    """Write the CSV products of one experiment into *output_dir*.

    *settings* is the flat configuration mapping; per-file settings are merged
    on top of it for the header line.
    """

    def __init__(self, output_dir: str | Path, settings: Mapping[str, Any]) -> None:
        self.output_dir = Path(output_dir)
        self.settings = dict(settings)

    # ------------------------------------------------------------------
    # Frames
    # ------------------------------------------------------------------

    @staticmethod
    def _build_spectrum(spectrum: SpectrumResult) -> pd.DataFrame:
        return pd.DataFrame({"index": np.arange(spectrum.eigenvalues.size), "energy": spectrum.eigenvalues})

    @staticmethod
    def _build_distribution(d: PhaseDistribution, counts: np.ndarray | None) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "bin": np.arange(d.n_bins),
                "phase": [format_phase(p) for p in d.phases],
                "probability": d.probabilities,
            }
        )
        if counts is not None:
            frame["counts"] = counts
        return frame

    @staticmethod
    def _build_peak(fit: PeakFit, energy: float, secondary: list[tuple[float, float]]) -> pd.DataFrame:
        row = fit.as_row()
        row["energy"] = energy
        row["converged"] = fit.converged
        row["secondary_peaks"] = ";".join(f"{phase:.12g}:{p:.6g}" for phase, p in secondary)
        return pd.DataFrame([row], columns=PEAK_COLUMNS + ["energy", "converged", "secondary_peaks"])

    @staticmethod
    def _build_ratio(records: Iterable[RatioRecord]) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in records], columns=RATIO_COLUMNS)

    # ------------------------------------------------------------------
    # Files
    # ------------------------------------------------------------------

    def write(self, frame: pd.DataFrame, filename: str, **extra: Any) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / filename
        header = format_settings({**self.settings, **extra})
        with path.open("w", encoding="utf-8", newline="") as handle:
            handle.write(f"# {header}\n")
            frame.to_csv(handle, index=False, lineterminator="\n")
        log_debug("CSV written", path=str(path), rows=len(frame))
        return path

    def write_spectrum(self, system: str, spectrum: SpectrumResult) -> Path:
        return self.write(self._build_spectrum(spectrum), f"spectrum_{system}.csv", system=system)

    def write_distribution(
        self, stem: str, d: PhaseDistribution, counts: np.ndarray | None = None, **extra: Any
    ) -> Path:
        return self.write(self._build_distribution(d, counts), f"distribution_{stem}.csv", **extra)

    def write_peak(
        self, stem: str, fit: PeakFit, energy: float, secondary: list[tuple[float, float]], **extra: Any
    ) -> Path:
        return self.write(self._build_peak(fit, energy, secondary), f"peak_{stem}.csv", **extra)

    def write_ratio(self, basis: str, records: Iterable[RatioRecord]) -> Path:
        return self.write(self._build_ratio(records), f"ratio_{basis}.csv", dimer_basis=basis)

    def write_bench(self, rows: list[dict[str, float]]) -> Path:
        return self.write(pd.DataFrame(rows, columns=BENCH_COLUMNS), "bench.csv")


# ---------------------------------------------------------------------------
# Reading back
# ---------------------------------------------------------------------------

def read_report(path: str | Path, **kwargs: Any) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", **kwargs)


def read_settings(path: str | Path) -> dict[str, str]:
    """Parse the ``# key=value;...`` header line of a report."""
    with Path(path).open(encoding="utf-8") as handle:
        first = handle.readline()
    if not first.startswith("#"):
        return {}
    pairs = (item.split("=", 1) for item in first[1:].strip().split(";") if "=" in item)
    return {key: value for key, value in pairs}
