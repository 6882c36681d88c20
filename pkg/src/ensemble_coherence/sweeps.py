"""Entanglement sweeps that produce the tabulated conversion curves.

Every sweep walks a uniform grid of entanglement values in ``[0, 1]``, turns
each value into a Schmidt state and emits one :class:`SweepRecord` per point.
Points are independent, so they are farmed out to a process pool; rows are
always returned in grid order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from .coherence import basis_free_coherence
from .entangle import DEFAULT_SEED, Povm, alpha_for_entanglement, dual_map, entanglement
from .infotheory import accessible_information, holevo
from .qubit import DomainError, MeasurementBasis
from .sympovm import SweepRecord, gamma_optimized_coherence

EXPERIMENTS = ("b92", "sym", "asymptotic", "verify")
FORMATS = ("csv", "json")
ASYMPTOTIC_MIN_N = 64


@dataclass
class SweepConfig:
    experiment: str
    n: int | None = None
    e_grid: int = 201
    basis_tol: float = 1e-10
    gamma_tol: float = 1e-10
    output_path: str | None = None
    format: str = "csv"
    seed: int = DEFAULT_SEED
    threads: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}")
        if self.format not in FORMATS:
            raise DomainError(f"unknown format {self.format!r}")
        if self.e_grid < 2:
            raise DomainError("e_grid must be at least 2")
        if not (self.basis_tol > 0 and self.gamma_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.experiment == "b92":
            self.n = 2
        elif self.experiment == "sym":
            if self.n is None or self.n < 2:
                raise DomainError("sym needs n >= 2")
        elif self.experiment == "asymptotic":
            if self.n is None:
                self.n = 256
            if self.n < ASYMPTOTIC_MIN_N:
                raise DomainError(f"asymptotic needs n >= {ASYMPTOTIC_MIN_N}")
        if self.threads is not None and self.threads < 1:
            raise DomainError("threads must be >= 1")

    @property
    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1

    def energies(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.e_grid)


def b92_record(e: float, basis_tol: float = 1e-10) -> SweepRecord:
    """One B92 row: Alice measures in the Hadamard basis."""
    state = alpha_for_entanglement(e)
    ens = dual_map(state, Povm.projective(MeasurementBasis.hadamard()))
    coh = basis_free_coherence(ens, basis_tol=basis_tol)
    chi = holevo(ens)
    iacc = accessible_information(ens).value
    return SweepRecord(
        state.alpha,
        entanglement(state),
        2,
        coh.value,
        math.pi / 2,
        coh.optimal_basis.theta,
        chi,
        iacc,
        max(0.0, chi - iacc),
    )


def sym_record(e: float, n: int, basis_tol: float = 1e-10, gamma_tol: float = 1e-10, seed: int = DEFAULT_SEED):
    return gamma_optimized_coherence(n, alpha_for_entanglement(e), basis_tol, gamma_tol, seed)


def _map(fn, values, workers: int) -> list:
    if workers <= 1 or len(values) <= 1:
        return [fn(v) for v in values]
    with ProcessPoolExecutor(max_workers=min(workers, len(values))) as pool:
        return list(pool.map(fn, values))


def run_records(cfg: SweepConfig, energies=None, check: bool = True) -> list[SweepRecord]:
    """Compute the rows of a b92/sym/asymptotic sweep (no file output).

    Raises:
        SandwichViolation: a row breaks ``lower_bound <= coherence <= holevo``
            (only when ``check`` is set).
    """
    energies = cfg.energies() if energies is None else np.asarray(energies, dtype=float)
    if cfg.experiment == "b92":
        fn = partial(b92_record, basis_tol=cfg.basis_tol)
    elif cfg.experiment in ("sym", "asymptotic"):
        fn = partial(sym_record, n=cfg.n, basis_tol=cfg.basis_tol, gamma_tol=cfg.gamma_tol, seed=cfg.seed)
    else:
        raise DomainError(f"{cfg.experiment} is not a sweep")
    rows = _map(fn, [float(e) for e in energies], cfg.workers)
    if check:
        for row in rows:
            row.check_sandwich()
    return rows


def metadata(cfg: SweepConfig, rows: list[SweepRecord]) -> dict:
    meta = {
        "experiment": cfg.experiment,
        "n": cfg.n,
        "seed": cfg.seed,
        "grid": cfg.e_grid,
        "basis_tol": cfg.basis_tol,
        "gamma_tol": cfg.gamma_tol,
    }
    if cfg.experiment == "asymptotic" and rows:
        meta["max_residual"] = max(abs(r.entanglement - r.coherence - r.accessible_info) for r in rows)
    meta.update(cfg.meta)
    return meta


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".15g")


def format_csv(meta: dict, rows: list[SweepRecord]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={_fmt(value) if isinstance(value, float) else value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SweepRecord.columns())
    for row in rows:
        writer.writerow([_fmt(v) for v in row.as_tuple()])
    return buf.getvalue()


def format_json(meta: dict, rows: list[SweepRecord]) -> str:
    return json.dumps({"meta": meta, "rows": [asdict(r) for r in rows]}, indent=2) + "\n"


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse a sweep CSV back into ``(meta, rows)``; numbers come back as floats/ints."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif line:
            body.append(line)
    rows = []
    for rec in csv.DictReader(body):
        rows.append({k: int(v) if k == "n" else float(v) for k, v in rec.items()})
    return meta, rows


def run_sweep(cfg: SweepConfig) -> str:
    """Run a sweep and write it to ``cfg.output_path`` (stdout text is returned either way)."""
    rows = run_records(cfg)
    meta = metadata(cfg, rows)
    text = format_csv(meta, rows) if cfg.format == "csv" else format_json(meta, rows)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def run_b92_sweep(cfg: SweepConfig) -> str:
    if cfg.experiment != "b92":
        raise DomainError("config is not a b92 sweep")
    return run_sweep(cfg)


def run_sym_sweep(cfg: SweepConfig) -> str:
    if cfg.experiment != "sym":
        raise DomainError("config is not a sym sweep")
    return run_sweep(cfg)


def run_asymptotic(cfg: SweepConfig) -> str:
    if cfg.experiment != "asymptotic":
        raise DomainError("config is not an asymptotic sweep")
    return run_sweep(cfg)
