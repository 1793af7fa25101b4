"""Experiment configuration for TrotterQPE.

Configuration is a plain ``key=value`` file read with python-dotenv's
``dotenv_values``; nothing is read from or written to the process environment.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values

from hamiltonian.encoding import OrderingStrategy
from hamiltonian.oracle import Encoding
from simulation.qpe import InputState, TrotterOrder
from utils.debug import log_debug, log_info
from utils.errors import ConfigError

_PATH_KEYS = ("monomer_fcidump", "dimer_fcidump_cmo", "dimer_fcidump_lmo")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class ExperimentConfig:
    monomer_fcidump: Path | None = None
    dimer_fcidump_cmo: Path | None = None
    dimer_fcidump_lmo: Path | None = None
    derive_dimers: bool = False
    encoding: Encoding = Encoding.JORDAN_WIGNER
    t: float = 1.0
    n_ancilla: int = 10
    dimer_n_ancilla: int = 8
    input_state: InputState = InputState.FULL_CI
    orderings: tuple[OrderingStrategy, ...] = (OrderingStrategy.MAGNITUDE, OrderingStrategy.LEXICOGRAPHIC)
    orders: tuple[TrotterOrder, ...] = (TrotterOrder.FIRST, TrotterOrder.SECOND)
    slices: tuple[int, ...] = (1, 2, 5, 10)
    include_trotter_free: bool = True
    output_dir: Path = Path("results")
    seed: int = 0
    shots: int = 0
    workers: int = 1
    bench_ancillas: tuple[int, ...] = (4, 6, 8)
    bench_qubits: int = 10
    debug: bool = False

    @property
    def grid_size(self) -> int:
        return len(self.orderings) * len(self.orders) * len(self.slices)

    def fcidumps(self) -> dict[str, Path]:
        """Configured fixtures by system label, in processing order."""
        labels = {"monomer_fcidump": "monomer", "dimer_fcidump_cmo": "dimer_cmo", "dimer_fcidump_lmo": "dimer_lmo"}
        return {labels[key]: getattr(self, key) for key in _PATH_KEYS if getattr(self, key) is not None}

    def ancillas_for(self, system: str) -> int:
        return self.n_ancilla if system == "monomer" else self.dimer_n_ancilla

    def settings(self) -> dict[str, Any]:
        """Flat, ordered view used in output header comments."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(getattr(v, "value", v)) for v in value)
            out[f.name] = getattr(value, "value", value)
        return out


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _parse_bool(key: str, raw: str) -> bool:
    text = raw.strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _split(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _convert(key: str, raw: str, base_dir: Path) -> Any:
    try:
        if key in _PATH_KEYS and not raw.strip():
            return None
        if key in _PATH_KEYS or key == "output_dir":
            path = Path(raw).expanduser()
            return path if path.is_absolute() else base_dir / path
        if key == "encoding":
            return Encoding(raw.strip())
        if key == "input_state":
            return InputState(raw.strip())
        if key == "orderings":
            return tuple(OrderingStrategy(item) for item in _split(raw))
        if key == "orders":
            return tuple(TrotterOrder(int(item)) for item in _split(raw))
        if key in ("slices", "bench_ancillas"):
            return tuple(int(item) for item in _split(raw))
        if key == "t":
            return float(raw)
        if key in ("n_ancilla", "dimer_n_ancilla", "seed", "shots", "workers", "bench_qubits"):
            return int(raw)
        if key in ("include_trotter_free", "derive_dimers", "debug"):
            return _parse_bool(key, raw)
    except ValueError as e:
        raise ConfigError(f"{key}: invalid value {raw!r} ({e})") from e
    raise ConfigError(f"unknown configuration key {key!r}")


def apply_overrides(
    config: ExperimentConfig, values: Mapping[str, str | None], base_dir: Path | None = None
) -> ExperimentConfig:
    """Return a copy of *config* with raw string *values* converted and applied."""
    base_dir = Path.cwd() if base_dir is None else base_dir
    changes = {}
    for key, raw in values.items():
        key = key.strip()
        if raw is None:
            raise ConfigError(f"{key}: missing value")
        changes[key] = _convert(key, raw, base_dir)
    return replace(config, **changes)


def parse_override(text: str) -> tuple[str, str]:
    """Split a ``key=value`` command-line override."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not key=value")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def load_config(path: str | Path | None = None, overrides: Mapping[str, str] | None = None) -> ExperimentConfig:
    """Read the key=value file at *path* (if any), apply *overrides*, validate."""
    config = ExperimentConfig()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"configuration file {path} not found")
        config = apply_overrides(config, dotenv_values(path), path.parent)
        log_debug("Config file loaded", path=str(path))
    if overrides:
        config = apply_overrides(config, overrides)
    validate_config(config)
    log_info("Configuration ready", grid=config.grid_size, encoding=config.encoding.value, t=config.t)
    return config


def validate_config(config: ExperimentConfig) -> None:
    for label, path in config.fcidumps().items():
        if not path.is_file():
            raise ConfigError(f"{label} FCIDUMP {path} is not readable")
    explicit_dimers = config.dimer_fcidump_cmo is not None or config.dimer_fcidump_lmo is not None
    if config.derive_dimers and (config.monomer_fcidump is None or explicit_dimers):
        raise ConfigError("derive_dimers needs a monomer fixture and no dimer fixtures")
    if config.grid_size == 0:
        raise ConfigError("the Trotter grid is empty")
    if any(m < 1 for m in config.slices):
        raise ConfigError("slice counts must be positive")
    if config.t <= 0:
        raise ConfigError("evolution time t must be positive")
    if min(config.n_ancilla, config.dimer_n_ancilla) < 1 or any(n < 1 for n in config.bench_ancillas):
        raise ConfigError("ancilla counts must be positive")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.encoding is Encoding.PARITY:
        raise ConfigError("experiments run with jw or jw_tapered encodings")
