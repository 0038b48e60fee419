"""End-to-end pure-state reconstruction pipelines.

Two protocols are implemented. The matrix-completion protocol estimates the
diagonal from a computational-basis measurement and every Hamming-distance-1
coherence from the per-qubit X/Y pair bases, completes the rank-1 matrix,
and takes the principal eigenvector; 2n+1 settings total. The five-setting
baseline sorts amplitudes with a permutation, measures two staggered
consecutive-pair bases in X and Y flavors in the sorted frame, chains the
coherences into the first row, and assembles the state from amplitudes and
phases directly.

All pipelines run in one of three modes: simulate finite shots from a known
state (optionally through a readout-noise channel), replay previously
recorded ShotRecords, or use exact outcome probabilities (the infinite-shot
oracle mode used heavily by tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import measure
from .completion import PartialMatrix, SparseFailure, complete_rank1
from .linalg import fix_global_phase, principal_eigenvector
from .measure import (
    COMPUTATIONAL_KEY,
    MeasurementSetting,
    NoiseModel,
    ShotRecord,
    allocate_shots,
    apply_readout_noise,
    build_settings,
    exact_probabilities,
    sample_counts,
)
from .states import hadamard_layer, permutation_unitary
from .validation import (
    EXACT_PIVOT_FLOOR,
    PIVOT_FLOOR_SHOT_FACTOR,
    READOUT_FLOOR_FACTOR,
    check_state_vector,
    num_qubits,
)


@dataclass
class ReconstructionResult:
    """A reconstructed pure state and how it was obtained.

    ``raw_matrix`` is the completed, normalized matrix before the
    eigendecomposition; it is Hermitian with unit trace but, for finite
    shots, not necessarily positive semidefinite.
    """

    estimate: np.ndarray
    raw_matrix: np.ndarray
    settings_used: int
    shots_used: int
    rotated: bool = False
    degenerate_eig: bool = False
    sparse_failure_recovered: bool = False

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.estimate.shape[0])


def default_pivot_floor(n: int, total_shots: Optional[int],
                        noise: Optional[NoiseModel] = None) -> float:
    """Diagonal magnitude below which a pivot is treated as vanishing.

    With finite shots the floor sits at a few expected counts per setting.
    A readout channel leaks roughly 1-(1-p)^n of the population off each
    outcome, so under noise the floor must also cover that leakage scale or
    structurally-zero diagonals masquerade as usable pivots.
    """
    if total_shots is None:
        floor = EXACT_PIVOT_FLOOR
    else:
        floor = PIVOT_FLOOR_SHOT_FACTOR * (2 * n + 1) / total_shots
    if noise is not None and noise.readout_flip_prob > 0.0:
        leak = 1.0 - (1.0 - noise.readout_flip_prob) ** n
        floor = max(floor, READOUT_FLOOR_FACTOR * leak)
    return floor


def estimate_diagonal(record: ShotRecord) -> np.ndarray:
    """Diagonal estimates from the computational-basis record.

    counts_i / shots equals the (2n+1) N_i / N form when the setting
    received the even budget share N/(2n+1); the vector sums to 1.
    """
    if record.setting != COMPUTATIONAL_KEY:
        raise ValueError(f"expected the computational record, got {record.setting!r}")
    return record.probabilities()


def offdiagonal_from_probs(px: np.ndarray, py: np.ndarray,
                           pairs: Sequence[Tuple[int, int]]) -> Dict[Tuple[int, int], complex]:
    """Coherences rho[j, k] from the X- and Y-basis outcome probabilities.

    For each pair, with outcome j holding the "+" vector and outcome k the
    "-" vector of its basis:

        rho[j, k] = ((px[j] - px[k]) + 1j * (py[k] - py[j])) / 2
    """
    out: Dict[Tuple[int, int], complex] = {}
    for j, k in pairs:
        out[(j, k)] = complex((px[j] - px[k]) + 1j * (py[k] - py[j])) / 2.0
    return out


def estimate_offdiagonal(record_x: ShotRecord, record_y: ShotRecord,
                         pairs: Sequence[Tuple[int, int]]) -> Dict[Tuple[int, int], complex]:
    """Coherence estimates for one qubit from its two Pauli-axis records."""
    return offdiagonal_from_probs(record_x.probabilities(), record_y.probabilities(), pairs)


def assemble_partial_matrix(diag: np.ndarray,
                            offdiag: Dict[Tuple[int, int], complex]) -> PartialMatrix:
    """Measured entries as a PartialMatrix: diagonal plus conjugate pairs."""
    d = diag.shape[0]
    entries = np.zeros((d, d), dtype=complex)
    known = np.zeros((d, d), dtype=bool)
    np.fill_diagonal(entries, diag)
    np.fill_diagonal(known, True)
    for (j, k), value in offdiag.items():
        entries[j, k] = value
        entries[k, j] = np.conjugate(value)
        known[j, k] = known[k, j] = True
    return PartialMatrix(entries, known)


def _simulate_setting(psi: np.ndarray, setting: MeasurementSetting,
                      shots: Optional[int], noise: Optional[NoiseModel],
                      rng, kernel: Optional[np.ndarray]):
    """One setting's empirical probabilities: exact, or sampled (+ readout noise)."""
    p = exact_probabilities(psi, setting)
    if shots is None:
        if kernel is not None:
            p = measure.apply_readout_to_probs(p, kernel)
        return p, None
    record = sample_counts(p, shots, rng, setting=setting.key)
    if noise is not None and noise.readout_flip_prob > 0.0:
        record = apply_readout_noise(record, noise, rng)
    return record.probabilities(), record


def simulate_records(psi, total_shots: int, noise: Optional[NoiseModel] = None,
                     rng=None) -> list[ShotRecord]:
    """Measure all 2n+1 settings of a known state and return the raw records."""
    psi = check_state_vector(psi)
    n = num_qubits(psi.shape[0])
    settings = build_settings(n)
    alloc = allocate_shots(total_shots, len(settings))
    rng = np.random.default_rng(rng)
    records = []
    for setting, shots in zip(settings, alloc):
        _, record = _simulate_setting(psi, setting, shots, noise, rng, None)
        records.append(record)
    return records


def _probs_from_records(records: Sequence[ShotRecord], n: int):
    by_key = {r.setting: r for r in records}
    probs = []
    shots_used = 0
    for setting in build_settings(n):
        if setting.key not in by_key:
            raise ValueError(f"missing record for setting {setting.key!r}")
        record = by_key[setting.key]
        probs.append(record.probabilities())
        shots_used += record.shots
    return probs, shots_used


def _reconstruct_from_probs(probs: Sequence[np.ndarray], n: int, shots_used: int,
                            pivot_floor: float, recover: bool) -> ReconstructionResult:
    settings = build_settings(n)
    diag = np.asarray(probs[0], dtype=float)
    offdiag: Dict[Tuple[int, int], complex] = {}
    for qubit in range(1, n + 1):
        px = probs[2 * qubit - 1]
        py = probs[2 * qubit]
        offdiag.update(offdiagonal_from_probs(px, py, settings[2 * qubit - 1].pairs))

    pm = assemble_partial_matrix(diag, offdiag)
    result = complete_rank1(pm, diag, pivot_floor=pivot_floor, recover=recover)
    matrix = result.matrix / np.trace(result.matrix).real
    estimate, degenerate = principal_eigenvector(matrix)
    return ReconstructionResult(
        estimate=estimate,
        raw_matrix=matrix,
        settings_used=len(settings),
        shots_used=shots_used,
        degenerate_eig=degenerate,
        sparse_failure_recovered=result.recovered,
    )


def mcqst_reconstruct(state=None, *, records: Optional[Sequence[ShotRecord]] = None,
                      shots: Optional[int] = None, noise: Optional[NoiseModel] = None,
                      rng=None, pivot_floor: Optional[float] = None,
                      recover_sparse: bool = False) -> ReconstructionResult:
    """Reconstruct a pure state from the 2n+1 local settings.

    Exactly one of ``state`` (simulate, or exact probabilities when
    ``shots`` is None) and ``records`` (replay) must be given. ``shots`` is
    the total budget split equally over settings, remainder to the
    computational one. A SparseFailure from the completion propagates
    unless ``recover_sparse`` is set; the rotation wrapper is the intended
    way to handle it.
    """
    if (state is None) == (records is None):
        raise ValueError("provide exactly one of state= or records=")

    if records is not None:
        n = num_qubits(records[0].counts.shape[0])
        probs, shots_used = _probs_from_records(records, n)
        floor = pivot_floor if pivot_floor is not None else default_pivot_floor(
            n, shots_used, noise)
        return _reconstruct_from_probs(probs, n, shots_used, floor, recover_sparse)

    psi = check_state_vector(state)
    n = num_qubits(psi.shape[0])
    settings = build_settings(n)
    kernel = None
    if shots is None and noise is not None and noise.readout_flip_prob > 0.0:
        kernel = measure.readout_kernel(n, noise.readout_flip_prob)
    alloc = allocate_shots(shots, len(settings)) if shots is not None else [None] * len(settings)
    rng = np.random.default_rng(rng)
    probs = []
    shots_used = 0
    for setting, setting_shots in zip(settings, alloc):
        p, record = _simulate_setting(psi, setting, setting_shots, noise, rng, kernel)
        probs.append(p)
        if record is not None:
            shots_used += record.shots
    floor = pivot_floor if pivot_floor is not None else default_pivot_floor(n, shots, noise)
    return _reconstruct_from_probs(probs, n, shots_used, floor, recover_sparse)


def reconstruct_with_rotation(state, *, shots: Optional[int] = None,
                              noise: Optional[NoiseModel] = None, rng=None,
                              pivot_floor: Optional[float] = None) -> ReconstructionResult:
    """Matrix-completion reconstruction with the sparse-state rotation path.

    A first-pass computational measurement screens for vanishing diagonal
    entries. If none fall below the pivot floor the screening record is
    reused as the computational record of a plain reconstruction. Otherwise
    the state is conjugated by the n-fold Hadamard layer, reconstructed in
    the rotated frame with sparse recovery enabled, and rotated back.
    """
    psi = check_state_vector(state)
    n = num_qubits(psi.shape[0])
    settings = build_settings(n)
    floor = pivot_floor if pivot_floor is not None else default_pivot_floor(n, shots, noise)
    rng = np.random.default_rng(rng)

    kernel = None
    if shots is None and noise is not None and noise.readout_flip_prob > 0.0:
        kernel = measure.readout_kernel(n, noise.readout_flip_prob)
    alloc = allocate_shots(shots, len(settings)) if shots is not None else [None] * len(settings)
    screen_probs, screen_record = _simulate_setting(psi, settings[0], alloc[0], noise, rng, kernel)
    screen_shots = 0 if screen_record is None else screen_record.shots

    if float(np.min(screen_probs)) >= floor:
        # Dense diagonal: continue the plain run, reusing the screening pass.
        # No SparseFailure is possible here since every pivot clears the floor.
        probs = [screen_probs]
        shots_used = screen_shots
        for setting, setting_shots in zip(settings[1:], alloc[1:]):
            p, record = _simulate_setting(psi, setting, setting_shots, noise, rng, kernel)
            probs.append(p)
            if record is not None:
                shots_used += record.shots
        return _reconstruct_from_probs(probs, n, shots_used, floor, recover=False)

    remaining = None if shots is None else shots - screen_shots
    if remaining is not None and remaining < len(settings):
        raise SparseFailure(
            "screening consumed the budget; nothing left for the rotated run",
            vanished=tuple(np.nonzero(screen_probs < floor)[0]),
        )
    v = hadamard_layer(n)
    rotated_psi = v @ psi
    rotated_psi = rotated_psi / np.linalg.norm(rotated_psi)
    inner = mcqst_reconstruct(rotated_psi, shots=remaining, noise=noise, rng=rng,
                              pivot_floor=floor, recover_sparse=True)
    estimate = fix_global_phase(v.conj().T @ inner.estimate)
    raw = v.conj().T @ inner.raw_matrix @ v
    return ReconstructionResult(
        estimate=estimate / np.linalg.norm(estimate),
        raw_matrix=raw,
        settings_used=inner.settings_used + 1,
        shots_used=inner.shots_used + screen_shots,
        rotated=True,
        degenerate_eig=inner.degenerate_eig,
        sparse_failure_recovered=inner.sparse_failure_recovered,
    )


@dataclass
class PurityReport:
    """Outcome of the purity certificate |rho_jk|^2 == rho_jj * rho_kk."""

    is_pure: bool
    max_deviation: float
    worst_pair: Optional[Tuple[int, int]]
    pairs_checked: int


def default_purity_tol(shots_per_setting: int) -> float:
    """Deviation tolerance matching the standard-error scale of the products."""
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be >= 1")
    return 5.0 / math.sqrt(shots_per_setting)


def purity_certify(m, tol: float) -> PurityReport:
    """Check the pure-state criterion on all available off-diagonal entries.

    Accepts a PartialMatrix (only measured pairs are tested) or a full
    matrix (all pairs). Passes iff the worst |rho_jk|^2 - rho_jj*rho_kk
    deviation is within ``tol``.
    """
    if isinstance(m, PartialMatrix):
        entries, known = m.entries, m.known & m.known.T
    else:
        entries = np.asarray(m, dtype=complex)
        known = np.ones(entries.shape, dtype=bool)
    d = entries.shape[0]
    diag = entries.diagonal().real
    worst = 0.0
    worst_pair = None
    checked = 0
    for j in range(d):
        for k in range(j + 1, d):
            if not known[j, k]:
                continue
            deviation = float(abs(abs(entries[j, k]) ** 2 - abs(diag[j]) * abs(diag[k])))
            checked += 1
            if deviation > worst:
                worst = deviation
                worst_pair = (j, k)
    return PurityReport(bool(worst <= tol), worst, worst_pair, checked)


def _pairings(d: int) -> Tuple[Tuple[Tuple[int, int], ...], Tuple[Tuple[int, int], ...]]:
    even = tuple((i, i + 1) for i in range(0, d - 1, 2))
    odd = tuple((i, i + 1) for i in range(1, d - 1, 2))
    return even, odd


def fivebasis_reconstruct(state, *, shots: Optional[int] = None, rng=None,
                          pivot_floor: Optional[float] = None) -> ReconstructionResult:
    """Five-setting baseline: sorted amplitudes plus two staggered pair bases.

    The computational measurement fixes the amplitude magnitudes and the
    sorting permutation. In the sorted frame, consecutive-index pairs
    (0,1),(2,3),... and (1,2),(3,4),... are measured in X and Y flavors,
    the chain rho[0, i] is propagated through vanishing 2x2 determinants,
    the full matrix is filled from the first row and column in one step,
    and the state is assembled from magnitudes and chained phases.
    """
    psi = check_state_vector(state)
    n = num_qubits(psi.shape[0])
    d = psi.shape[0]
    rng = np.random.default_rng(rng)
    alloc = allocate_shots(shots, 5) if shots is not None else [None] * 5
    floor = pivot_floor if pivot_floor is not None else default_pivot_floor(n, shots)

    comp = measure.computational_setting(n)
    weights, record = _simulate_setting(psi, comp, alloc[0], None, rng, None)
    shots_used = 0 if record is None else record.shots

    u_p = permutation_unitary(weights)
    psi_p = u_p @ psi
    diag_p = u_p.real @ weights
    if diag_p[0] < floor:
        raise ValueError("largest amplitude estimate vanishes; degenerate input")

    even, odd = _pairings(d)
    superdiag = np.zeros(d - 1, dtype=complex) if d > 1 else np.zeros(0, dtype=complex)
    for pairs, alloc_slice in ((even, alloc[1:3]), (odd, alloc[3:5])):
        probs = []
        for axis, setting_shots in zip((measure.AXIS_X, measure.AXIS_Y), alloc_slice):
            basis = MeasurementSetting(f"pair{axis}", None, axis,
                                       measure.pair_basis(d, pairs, axis), tuple(pairs))
            p, rec = _simulate_setting(psi_p, basis, setting_shots, None, rng, None)
            probs.append(p)
            if rec is not None:
                shots_used += rec.shots
        for (j, k), value in offdiagonal_from_probs(probs[0], probs[1], pairs).items():
            superdiag[j] = value

    # Chain the first row: rho[0, i+1] = rho[0, i] * rho[i, i+1] / rho[i, i].
    row0 = np.zeros(d, dtype=complex)
    row0[0] = diag_p[0]
    if d > 1:
        row0[1] = superdiag[0]
    for i in range(1, d - 1):
        if diag_p[i] < floor:
            break  # sorted order: everything past here is statistically zero
        row0[i + 1] = row0[i] * superdiag[i] / diag_p[i]

    matrix_p = np.outer(row0.conj(), row0) / diag_p[0]
    np.fill_diagonal(matrix_p, diag_p)
    matrix_p = (matrix_p + matrix_p.conj().T) / 2.0
    matrix_p = matrix_p / np.trace(matrix_p).real

    phases = np.ones(d, dtype=complex)
    nonzero = np.abs(row0) > 0.0
    phases[nonzero] = np.conjugate(row0[nonzero]) / np.abs(row0[nonzero])
    psi_hat_p = np.sqrt(np.clip(diag_p, 0.0, None)) * phases
    psi_hat_p = psi_hat_p / np.linalg.norm(psi_hat_p)

    estimate = fix_global_phase(u_p.conj().T @ psi_hat_p)
    raw = u_p.conj().T @ matrix_p @ u_p
    return ReconstructionResult(
        estimate=estimate,
        raw_matrix=raw,
        settings_used=5,
        shots_used=shots_used,
    )
