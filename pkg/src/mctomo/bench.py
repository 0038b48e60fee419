"""Experiment sweeps: grids over qubits, budgets, and protocols, with CSV output.

Every trial is independently reproducible: its RNG seed is a stable hash of
(sweep seed, n, budget, trial), so any row can be recomputed in isolation.
For protocol "both" the two protocols share the drawn state of each trial
and use protocol-specific measurement streams, giving a paired comparison.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np

from .linalg import fidelity
from .measure import NoiseModel
from .serialize import load_document, state_from_json
from .states import ghz_state, haar_random_state
from .tomography import fivebasis_reconstruct, reconstruct_with_rotation
from .validation import check_state_vector, num_qubits

CSV_SCHEMA_COMMENT = "# mctomo bench csv v1"
CSV_COLUMNS = ["protocol", "n", "N_total", "trial", "seed",
               "fidelity", "infidelity", "wall_time_ms", "error"]
EXACT_TOKEN = "exact"

PROTOCOLS = ("mcqst", "fivebasis")


@dataclass
class ExperimentConfig:
    """Grid definition for a sweep; see README for the JSON schema."""

    protocol: str = "mcqst"
    n_range: Sequence[int] = (2,)
    shots_range: Sequence[Optional[int]] = (None,)
    trials: int = 1
    seed: int = 0
    noise: Optional[NoiseModel] = None
    state_source: str = "haar"
    state_file: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.protocol not in PROTOCOLS + ("both",):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.state_source not in ("haar", "ghz", "file"):
            raise ValueError(f"unknown state source {self.state_source!r}")
        if self.state_source == "file" and not self.state_file:
            raise ValueError("state_source 'file' requires state_file")
        if self.noise is not None and self.protocol != "mcqst":
            raise ValueError("readout noise is only wired into the mcqst protocol")
        for n in self.n_range:
            settings = max(2 * n + 1, 5 if self.protocol in ("fivebasis", "both") else 0)
            for shots in self.shots_range:
                if shots is not None and shots < settings:
                    raise ValueError(f"budget {shots} below settings count for n={n}")

    def protocols(self) -> List[str]:
        return list(PROTOCOLS) if self.protocol == "both" else [self.protocol]

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentConfig":
        noise = doc.get("noise")
        if isinstance(noise, dict):
            noise = NoiseModel(float(noise["readout_flip_prob"]))
        elif noise is not None:
            noise = NoiseModel(float(noise))
        shots_range = [None if s in (None, EXACT_TOKEN) else int(s)
                       for s in doc.get("shots_range", [None])]
        return cls(
            protocol=doc.get("protocol", "mcqst"),
            n_range=[int(n) for n in doc.get("n_range", [2])],
            shots_range=shots_range,
            trials=int(doc.get("trials", 1)),
            seed=int(doc.get("seed", 0)),
            noise=noise,
            state_source=doc.get("state_source", "haar"),
            state_file=doc.get("state_file"),
            workers=int(doc.get("workers", 1)),
        )

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "n_range": list(self.n_range),
            "shots_range": [EXACT_TOKEN if s is None else s for s in self.shots_range],
            "trials": self.trials,
            "seed": self.seed,
            "noise": None if self.noise is None else
                     {"readout_flip_prob": self.noise.readout_flip_prob},
            "state_source": self.state_source,
            "state_file": self.state_file,
            "workers": self.workers,
        }


@dataclass
class BenchRow:
    """One trial's outcome; ``error`` is empty on success."""

    protocol: str
    n: int
    n_total: Optional[int]
    trial: int
    seed: int
    fidelity: Optional[float]
    infidelity: Optional[float]
    wall_time_ms: float
    error: str = ""


def trial_seed(sweep_seed: int, n: int, n_total: Optional[int], trial: int) -> int:
    """Stable 64-bit seed for one grid cell; independent of execution order."""
    token = f"{sweep_seed}:{n}:{EXACT_TOKEN if n_total is None else n_total}:{trial}"
    digest = hashlib.blake2b(token.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _stream_seed(base_seed: int, label: str) -> int:
    digest = hashlib.blake2b(f"{base_seed}:{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _draw_state(cfg: ExperimentConfig, n: int, base_seed: int) -> np.ndarray:
    if cfg.state_source == "haar":
        return haar_random_state(n, np.random.default_rng(_stream_seed(base_seed, "state")))
    if cfg.state_source == "ghz":
        return ghz_state(n)
    psi = check_state_vector(state_from_json(load_document(cfg.state_file)))
    if num_qubits(psi.shape[0]) != n:
        raise ValueError(f"state file holds {num_qubits(psi.shape[0])} qubits, grid wants {n}")
    return psi


def run_single(cfg: ExperimentConfig, protocol: str, n: int,
               n_total: Optional[int], trial: int) -> BenchRow:
    """Run one (protocol, n, budget, trial) cell and return its row."""
    seed = trial_seed(cfg.seed, n, n_total, trial)
    start = time.perf_counter()
    try:
        psi = _draw_state(cfg, n, seed)
        rng = np.random.default_rng(_stream_seed(seed, protocol))
        if protocol == "mcqst":
            result = reconstruct_with_rotation(psi, shots=n_total, noise=cfg.noise, rng=rng)
        else:
            result = fivebasis_reconstruct(psi, shots=n_total, rng=rng)
        fid = fidelity(result.estimate, psi)
        row = BenchRow(protocol, n, n_total, trial, seed, fid, 1.0 - fid, 0.0)
    except Exception as exc:  # per-trial failures become rows, not aborts
        row = BenchRow(protocol, n, n_total, trial, seed, None, None, 0.0,
                       error=f"{type(exc).__name__}: {exc}")
    row.wall_time_ms = (time.perf_counter() - start) * 1e3
    return row


def _grid(cfg: ExperimentConfig):
    def shots_key(s):
        return -1 if s is None else s
    for protocol in sorted(cfg.protocols()):
        for n in sorted(cfg.n_range):
            for n_total in sorted(cfg.shots_range, key=shots_key):
                for trial in range(cfg.trials):
                    yield protocol, n, n_total, trial


def run_experiment(cfg: ExperimentConfig) -> Iterator[BenchRow]:
    """Yield rows for the full grid in canonical order.

    Canonical order is (protocol, n, N_total, trial) regardless of worker
    count; with workers > 1 the cells run in a process pool.
    """
    cells = list(_grid(cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            yield from pool.map(_run_cell, [(cfg, *cell) for cell in cells],
                                chunksize=max(1, len(cells) // (cfg.workers * 4) or 1))
    else:
        for cell in cells:
            yield run_single(cfg, *cell)


def _run_cell(packed) -> BenchRow:
    cfg, protocol, n, n_total, trial = packed
    return run_single(cfg, protocol, n, n_total, trial)


@dataclass
class MedianRow:
    """Per-grid-cell aggregate; error rows are excluded and counted."""

    protocol: str
    n: int
    n_total: Optional[int]
    median_infidelity: Optional[float]
    trials: int
    errors: int = 0


def aggregate_median(rows: Iterable[BenchRow]) -> List[MedianRow]:
    """Median infidelity per (protocol, n, N_total); even counts average the central pair."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.protocol, row.n, row.n_total), []).append(row)
    out = []
    for (protocol, n, n_total) in sorted(groups, key=lambda k: (k[0], k[1], -1 if k[2] is None else k[2])):
        cell = groups[(protocol, n, n_total)]
        ok = [r.infidelity for r in cell if not r.error]
        median = float(np.median(ok)) if ok else None
        out.append(MedianRow(protocol, n, n_total, median, len(ok), len(cell) - len(ok)))
    return out


def _format_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Iterable[BenchRow], fh) -> None:
    """Write the fixed, versioned CSV schema to a text file handle."""
    fh.write(CSV_SCHEMA_COMMENT + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.protocol, r.n, EXACT_TOKEN if r.n_total is None else r.n_total,
            r.trial, r.seed, _format_field(r.fidelity), _format_field(r.infidelity),
            _format_field(r.wall_time_ms), r.error,
        ])


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh) -> List[BenchRow]:
    """Parse a bench CSV back into rows (round-trips write_csv exactly)."""
    lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        rows.append(BenchRow(
            protocol=rec[0],
            n=int(rec[1]),
            n_total=None if rec[2] == EXACT_TOKEN else int(rec[2]),
            trial=int(rec[3]),
            seed=int(rec[4]),
            fidelity=float(rec[5]) if rec[5] else None,
            infidelity=float(rec[6]) if rec[6] else None,
            wall_time_ms=float(rec[7]),
            error=rec[8],
        ))
    return rows


def rows_to_json(rows: Iterable[BenchRow]) -> str:
    payload = [{
        "protocol": r.protocol, "n": r.n,
        "N_total": EXACT_TOKEN if r.n_total is None else r.n_total,
        "trial": r.trial, "seed": r.seed, "fidelity": r.fidelity,
        "infidelity": r.infidelity, "wall_time_ms": r.wall_time_ms, "error": r.error,
    } for r in rows]
    return json.dumps(payload, indent=2) + "\n"
