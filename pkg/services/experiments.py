"""Experiment grid runner: spectrum, QPE grid, size-consistency ratios and benchmark."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hamiltonian.encoding import PauliTerm, QubitHamiltonian
from services.analysis import (
    PeakFit,
    RunEnergy,
    detect_secondary_peaks,
    fit_gaussian_peak,
    phase_to_energy,
    size_consistency_table,
)
from services.report_writer import ReportWriter, read_report, read_settings, run_stem
from services.systems import EncodedSystem, derive_dimer_systems, load_system
from simulation.qpe import (
    PhaseDistribution,
    QpeConfig,
    TrotterFree,
    TrotterPlan,
    check_eigenphase_branch,
    run_qpe_naive,
    run_qpe_sequential,
    sector_weights,
    trotter_free_distribution,
)
from simulation.statevector import Statevector, sample_counts
from utils.config import ExperimentConfig
from utils.debug import Timer, log_error, log_function_call, log_info, log_warning
from utils.errors import FitError, PairingError, TrotterQpeError

# settings that must match before a stored peak file is reused
_REUSE_KEYS = ("fixture", "encoding", "t", "input_state", "n_ancilla", "seed", "shots")
# eigenstates below this input weight are ignored by the phase-wrap warning
BRANCH_WEIGHT = 1e-8


@dataclass(frozen=True)
class GridPoint:
    system: str
    plan: TrotterPlan | TrotterFree
    n_ancilla: int

    @property
    def setting(self) -> tuple[str, str, str]:
        """(ordering, trotter_order, M) as written to the ratio table."""
        if isinstance(self.plan, TrotterFree):
            return "none", "none", "inf"
        return self.plan.ordering.value, str(self.plan.order.value), str(self.plan.slices)


@dataclass(frozen=True)
class GridResult:
    point: GridPoint
    distribution: PhaseDistribution
    fit: PeakFit
    energy: float
    secondary: list[tuple[float, float]]
    counts: np.ndarray | None = None


def build_grid(config: ExperimentConfig, system: str) -> list[GridPoint]:
    n_ancilla = config.ancillas_for(system)
    points = [
        GridPoint(system, TrotterPlan(order, slices, config.t, ordering), n_ancilla)
        for ordering in config.orderings
        for order in config.orders
        for slices in config.slices
    ]
    if config.include_trotter_free:
        points.append(GridPoint(system, TrotterFree(config.t), n_ancilla))
    return points


def run_grid_point(system: EncodedSystem, point: GridPoint, config: ExperimentConfig) -> GridResult:
    """One QPE run plus its peak analysis; the sequential simulator is used for Trotter plans."""
    check_eigenphase_branch(system.ground_energy, config.t)
    cfg = QpeConfig(point.n_ancilla, config.input_state, point.plan)

    trotter_free = isinstance(point.plan, TrotterFree)
    capacity = None if trotter_free else system.n_qubits + point.n_ancilla
    initial = system.input_state(config.input_state, capacity=capacity)
    weights = sector_weights(system.spectrum, system.basis, initial)
    populated = system.spectrum.eigenvalues[weights > BRANCH_WEIGHT]
    if populated.size and populated.max() * config.t > 0:
        log_warning(
            "Populated eigenphases alias past phase 0",
            system=point.system,
            e_max=f"{populated.max():.6f}",
            weight=f"{weights[system.spectrum.eigenvalues * config.t > 0].sum():.3g}",
        )

    if trotter_free:
        distribution = trotter_free_distribution(system.spectrum, weights, cfg)
    else:
        distribution = run_qpe_sequential(system.hamiltonian, cfg, initial)

    try:
        fit = fit_gaussian_peak(distribution)
    except FitError as e:
        log_warning("Using initial-guess peak", system=point.system, setting=point.setting)
        fit = e.fallback

    counts = None
    if config.shots > 0:
        counts = sample_counts(distribution.probabilities, config.shots, config.seed)
    return GridResult(
        point=point,
        distribution=distribution,
        fit=fit,
        energy=phase_to_energy(fit.mu, config.t),
        secondary=detect_secondary_peaks(distribution, fit),
        counts=counts,
    )


# systems of the running grid, installed once per worker process
_WORKER_SYSTEMS: dict[str, EncodedSystem] = {}


def _install_systems(systems: dict[str, EncodedSystem]) -> None:
    _WORKER_SYSTEMS.clear()
    _WORKER_SYSTEMS.update(systems)


def _run_point_job(job: tuple[GridPoint, ExperimentConfig]) -> GridResult | str:
    point, config = job
    try:
        return run_grid_point(_WORKER_SYSTEMS[point.system], point, config)
    except TrotterQpeError as e:
        return f"{type(e).__name__}: {e}"


def run_grid(
    systems: dict[str, EncodedSystem], points: list[GridPoint], config: ExperimentConfig
) -> list[GridResult]:
    """Run every point; failures are logged per point and the grid continues."""
    jobs = [(p, config) for p in points]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_install_systems, initargs=(systems,)
        ) as pool:
            outcomes = list(pool.map(_run_point_job, jobs))
    else:
        _install_systems(systems)
        outcomes = [_run_point_job(job) for job in jobs]

    results = []
    for point, outcome in zip(points, outcomes):
        if isinstance(outcome, str):
            log_error("Grid point failed", system=point.system, setting=point.setting, error=outcome)
            continue
        results.append(outcome)
    return results


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _writer(config: ExperimentConfig) -> ReportWriter:
    return ReportWriter(config.output_dir, config.settings())


def _point_stem(point: GridPoint, config: ExperimentConfig) -> str:
    return run_stem(point.system, config.input_state.value, *point.setting)


def _point_settings(point: GridPoint, system: EncodedSystem) -> dict[str, str | int]:
    ordering, order, slices = point.setting
    return {
        "system": point.system,
        "fixture": system.fingerprint,
        "ordering": ordering,
        "trotter_order": order,
        "M": slices,
        "n_ancilla": point.n_ancilla,
    }


def _write_result(
    writer: ReportWriter, result: GridResult, system: EncodedSystem, config: ExperimentConfig
) -> list[Path]:
    stem = _point_stem(result.point, config)
    extra = _point_settings(result.point, system)
    return [
        writer.write_distribution(stem, result.distribution, result.counts, **extra),
        writer.write_peak(stem, result.fit, result.energy, result.secondary, **extra),
    ]


def _load_systems(config: ExperimentConfig) -> dict[str, EncodedSystem]:
    systems = {}
    for label, path in config.fcidumps().items():
        try:
            systems[label] = load_system(path, config.encoding, name=label)
        except TrotterQpeError as e:
            log_error("Cannot load system", system=label, path=str(path), error=str(e))
            raise
    if config.derive_dimers:
        systems.update(derive_dimer_systems(systems["monomer"]))
    return systems


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@log_function_call
def cmd_spectrum(config: ExperimentConfig) -> list[Path]:
    """Write ``index,energy`` for every configured fixture."""
    writer = _writer(config)
    return [writer.write_spectrum(label, s.spectrum) for label, s in _load_systems(config).items()]


@log_function_call
def cmd_qpe(config: ExperimentConfig) -> list[Path]:
    """Distribution and peak files for every system and grid point."""
    systems = _load_systems(config)
    points = [p for label in systems for p in build_grid(config, label)]
    writer = _writer(config)
    paths: list[Path] = []
    with Timer("qpe_grid"):
        for result in run_grid(systems, points, config):
            paths += _write_result(writer, result, systems[result.point.system], config)
    log_info("QPE grid finished", points=len(points), files=len(paths))
    return paths


def _cached_energy(point: GridPoint, system: EncodedSystem, config: ExperimentConfig) -> float | None:
    path = Path(config.output_dir) / f"peak_{_point_stem(point, config)}.csv"
    if not path.is_file():
        return None
    stored = read_settings(path)
    current = {**config.settings(), **_point_settings(point, system)}
    if any(stored.get(key) != str(current[key]) for key in _REUSE_KEYS):
        return None
    return float(read_report(path)["energy"].iloc[0])


def _energies(systems: dict[str, EncodedSystem], config: ExperimentConfig) -> dict[tuple, float]:
    """Fitted energy per (system, setting), reusing stored peak files when settings match."""
    energies: dict[tuple, float] = {}
    pending: list[GridPoint] = []
    for label in systems:
        for point in build_grid(config, label):
            cached = _cached_energy(point, systems[label], config)
            if cached is None:
                pending.append(point)
            else:
                energies[(label, point.setting)] = cached

    cached = len(energies)
    writer = _writer(config)
    for result in run_grid(systems, pending, config):
        _write_result(writer, result, systems[result.point.system], config)
        energies[(result.point.system, result.point.setting)] = result.energy
    log_info("Energies collected", cached=cached, computed=len(energies) - cached)
    return energies


@log_function_call
def cmd_ratio(config: ExperimentConfig) -> list[Path]:
    """One ``ratio_<basis>.csv`` per configured dimer basis."""
    if config.monomer_fcidump is None:
        raise PairingError("ratio tables need a monomer fixture")
    systems = _load_systems(config)
    energies = _energies(systems, config)
    writer = _writer(config)

    paths = []
    for dimer in ("dimer_cmo", "dimer_lmo"):
        if dimer not in systems:
            continue
        runs = [
            RunEnergy("monomer" if label == "monomer" else "dimer", *setting, energy)
            for (label, setting), energy in energies.items()
            if label in ("monomer", dimer)
        ]
        records = size_consistency_table(runs)
        paths.append(writer.write_ratio(dimer.removeprefix("dimer_"), records))
    return paths


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------

def random_pauli_hamiltonian(n_qubits: int, n_terms: int, seed: int) -> QubitHamiltonian:
    """Seeded Hamiltonian of random non-identity Pauli strings with |w| <= 0.5."""
    rng = np.random.default_rng(seed)
    terms: dict[tuple[int, int], float] = {}
    while len(terms) < n_terms:
        x, z = (int(v) for v in rng.integers(0, 1 << n_qubits, size=2))
        if x | z:
            terms[(x, z)] = float(rng.uniform(-0.5, 0.5))
    return QubitHamiltonian(
        n_qubits,
        tuple(PauliTerm(x, z, w) for (x, z), w in sorted(terms.items())),
        0.0,
    )


def bench_row(h: QubitHamiltonian, n_ancilla: int) -> dict[str, float]:
    cfg = QpeConfig(n_ancilla, plan=TrotterPlan(slices=1))
    initial = Statevector.zeros(h.n_qubits)
    with Timer(f"naive_N{n_ancilla}") as naive:
        run_qpe_naive(h, cfg, initial)
    with Timer(f"sequential_N{n_ancilla}") as sequential:
        run_qpe_sequential(h, cfg, initial)
    return {
        "N": n_ancilla,
        "naive_seconds": naive.elapsed_seconds,
        "sequential_seconds": sequential.elapsed_seconds,
        "speedup": naive.elapsed_seconds / sequential.elapsed_seconds,
    }


@log_function_call
def cmd_bench(config: ExperimentConfig) -> Path:
    """Naive vs sequential wall time on a fixed random system, one run at a time."""
    h = random_pauli_hamiltonian(config.bench_qubits, 4, config.seed)
    rows = [bench_row(h, n) for n in config.bench_ancillas]
    for row in rows:
        log_info("Benchmark", N=row["N"], speedup=f"{row['speedup']:.2f}")
    return _writer(config).write_bench(rows)
