"""Local measurement settings, exact outcome probabilities, and shot sampling.

An n-qubit reconstruction uses 2n+1 settings: the computational basis plus,
for every qubit i (1-based, addressing bit i-1 of the index) and each axis
x in {1: X, 2: Y}, the basis of pair vectors

    (|j> + |k>)/sqrt(2),  (|j> - |k>)/sqrt(2)        axis 1
    (|j> + i|k>)/sqrt(2), (|j> - i|k>)/sqrt(2)       axis 2

over the d/2 disjoint index pairs (j, k = j + 2**(i-1)) with bit i-1 of j
clear. Outcomes are labelled so that the "+" vector of a pair sits at index
j and the "-" vector at index k; a histogram over outcomes is then directly
a histogram over bitstrings, which is what a hardware readout produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .validation import check_probability_vector, check_state_vector, num_qubits

COMPUTATIONAL_KEY = "z"

AXIS_X = 1
AXIS_Y = 2
_AXIS_NAMES = {AXIS_X: "x", AXIS_Y: "y"}


def setting_key(qubit: Optional[int] = None, axis: Optional[int] = None) -> str:
    """Stable string id of a setting: "z", or e.g. "x2"/"y1" for Pauli settings."""
    if qubit is None:
        return COMPUTATIONAL_KEY
    return f"{_AXIS_NAMES[axis]}{qubit}"


@dataclass(frozen=True)
class MeasurementSetting:
    """One measurement basis: d orthonormal vectors plus its pair structure.

    ``vectors[m]`` is the basis vector for outcome m. ``pairs`` lists the
    (j, k) index pairs the basis couples (None for the computational basis).
    """

    key: str
    qubit: Optional[int]
    axis: Optional[int]
    vectors: np.ndarray
    pairs: Optional[Tuple[Tuple[int, int], ...]]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


# Average readout error reported for the reference superconducting device.
DEFAULT_READOUT_FLIP = 2.653e-2


@dataclass(frozen=True)
class NoiseModel:
    """Classical readout noise: each outcome bit flips independently."""

    readout_flip_prob: float = DEFAULT_READOUT_FLIP

    def __post_init__(self):
        if not 0.0 <= self.readout_flip_prob < 0.5:
            raise ValueError(f"readout flip probability {self.readout_flip_prob!r} not in [0, 0.5)")


@dataclass
class ShotRecord:
    """Outcome counts of one setting: a length-d histogram and the shot total."""

    setting: str
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 1 or np.any(self.counts < 0):
            raise ValueError("counts must be a 1-D nonnegative histogram")
        if int(self.counts.sum()) != self.shots:
            raise ValueError(f"counts sum {int(self.counts.sum())} != shots {self.shots}")

    def probabilities(self) -> np.ndarray:
        if self.shots == 0:
            raise ValueError("record has zero shots")
        return self.counts / self.shots


def pauli_pairs(n: int, qubit: int) -> Tuple[Tuple[int, int], ...]:
    """Index pairs (j, j + 2**(qubit-1)) over all j with bit qubit-1 clear."""
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit {qubit} out of range 1..{n}")
    d = 1 << n
    step = 1 << (qubit - 1)
    return tuple((j, j + step) for j in range(d) if not j & step)


def pair_basis(d: int, pairs: Sequence[Tuple[int, int]], axis: int) -> np.ndarray:
    """Orthonormal basis of pair vectors over ``pairs``, one vector per outcome.

    Indices not covered by any pair keep their computational vector, so the
    result is always a complete basis.
    """
    factor = 1.0 if axis == AXIS_X else 1.0j
    vectors = np.eye(d, dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    for j, k in pairs:
        vectors[j] = 0.0
        vectors[k] = 0.0
        vectors[j, j] = s
        vectors[j, k] = factor * s
        vectors[k, j] = s
        vectors[k, k] = -factor * s
    return vectors


def computational_setting(n: int) -> MeasurementSetting:
    d = 1 << n
    return MeasurementSetting(COMPUTATIONAL_KEY, None, None, np.eye(d, dtype=complex), None)


def pauli_setting(n: int, qubit: int, axis: int) -> MeasurementSetting:
    if axis not in (AXIS_X, AXIS_Y):
        raise ValueError(f"axis must be {AXIS_X} (X) or {AXIS_Y} (Y), got {axis}")
    pairs = pauli_pairs(n, qubit)
    vectors = pair_basis(1 << n, pairs, axis)
    return MeasurementSetting(setting_key(qubit, axis), qubit, axis, vectors, pairs)


def build_settings(n: int) -> list[MeasurementSetting]:
    """The 2n+1 settings: computational first, then (x_i, y_i) for i = 1..n."""
    if n < 1:
        raise ValueError("need at least one qubit")
    settings = [computational_setting(n)]
    for qubit in range(1, n + 1):
        settings.append(pauli_setting(n, qubit, AXIS_X))
        settings.append(pauli_setting(n, qubit, AXIS_Y))
    return settings


def exact_probabilities(psi, setting: MeasurementSetting) -> np.ndarray:
    """Born-rule outcome probabilities p_m = |<basis_m|psi>|^2."""
    psi = check_state_vector(psi)
    if psi.shape[0] != setting.dim:
        raise ValueError(f"state dim {psi.shape[0]} != setting dim {setting.dim}")
    amps = setting.vectors.conj() @ psi
    p = np.abs(amps) ** 2
    return p / p.sum()


def allocate_shots(total: int, n_settings: int) -> list[int]:
    """Split a shot budget equally; the remainder goes to the first setting."""
    if total < n_settings:
        raise ValueError(f"budget {total} below one shot per setting ({n_settings})")
    base = total // n_settings
    alloc = [base] * n_settings
    alloc[0] += total - base * n_settings
    return alloc


def sample_counts(p, shots: int, rng, *, setting: str = COMPUTATIONAL_KEY) -> ShotRecord:
    """Multinomial draw of ``shots`` outcomes from probability vector ``p``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = check_probability_vector(p)
    rng = np.random.default_rng(rng)
    counts = rng.multinomial(shots, p)
    return ShotRecord(setting, counts, shots)


def readout_kernel(n: int, flip_prob: float) -> np.ndarray:
    """Row-stochastic d x d matrix: kernel[i, j] = P(read j | true outcome i)."""
    d = 1 << n
    idx = np.arange(d)
    hamming = np.zeros((d, d), dtype=np.int64)
    diff = idx[:, None] ^ idx[None, :]
    for bit in range(n):
        hamming += (diff >> bit) & 1
    return flip_prob ** hamming * (1.0 - flip_prob) ** (n - hamming)


def apply_readout_noise(record: ShotRecord, noise: NoiseModel, rng) -> ShotRecord:
    """Flip each bit of every recorded outcome independently; shots preserved."""
    p = noise.readout_flip_prob
    if p == 0.0:
        return ShotRecord(record.setting, record.counts.copy(), record.shots)
    rng = np.random.default_rng(rng)
    d = record.counts.shape[0]
    kernel = readout_kernel(num_qubits(d), p)
    counts = np.zeros(d, dtype=np.int64)
    for i in range(d):
        c = int(record.counts[i])
        if c:
            counts += rng.multinomial(c, kernel[i])
    return ShotRecord(record.setting, counts, record.shots)


def apply_readout_to_probs(p: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Push exact outcome probabilities through the readout channel."""
    return np.asarray(p, dtype=float) @ kernel
