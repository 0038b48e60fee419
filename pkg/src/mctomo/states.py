"""Test states and structured unitaries: Haar-random, GHZ, permutations, Hadamard layers."""

from __future__ import annotations

import numpy as np

from .linalg import kron

# Normalized single-qubit Hadamard; the 1/sqrt(2) scaling makes it a valid gate.
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def haar_random_state(n: int, rng=None) -> np.ndarray:
    """Draw an n-qubit pure state from the Haar measure.

    Uses d i.i.d. standard complex Gaussians followed by normalization,
    which is Haar-distributed on the unit sphere.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    rng = np.random.default_rng(rng)
    d = 1 << n
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def basis_state(n: int, index: int) -> np.ndarray:
    """Computational basis state |index> on n qubits."""
    d = 1 << n
    if not 0 <= index < d:
        raise ValueError(f"index {index} out of range for {n} qubits")
    psi = np.zeros(d, dtype=complex)
    psi[index] = 1.0
    return psi


def ghz_state(n: int) -> np.ndarray:
    """(|0...0> + |1...1>)/sqrt(2) on n >= 2 qubits."""
    if n < 2:
        raise ValueError("GHZ state needs at least two qubits")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return psi


def permutation_unitary(weights) -> np.ndarray:
    """Permutation matrix sending the index of the k-th largest weight to |k>.

    Ties are broken stably by lower original index. Applying the result to a
    state whose |amplitude|^2 are ``weights`` sorts the amplitudes into
    descending order of magnitude.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1:
        raise ValueError("weights must be a 1-D vector")
    d = weights.shape[0]
    order = np.argsort(-weights, kind="stable")
    u = np.zeros((d, d), dtype=complex)
    u[np.arange(d), order] = 1.0
    return u


def hadamard_layer(n: int) -> np.ndarray:
    """n-fold Kronecker power of the normalized Hadamard; self-inverse."""
    if n < 1:
        raise ValueError("need at least one qubit")
    out = HADAMARD
    for _ in range(n - 1):
        out = kron(out, HADAMARD)
    return out
