"""Dense complex linear algebra for qubit-sized problems."""

from __future__ import annotations

import numpy as np

from .validation import EIG_NOISE_FLOOR, EIGEN_DEGENERACY_GAP, PSD_CLIP


def kron(a, b, *rest) -> np.ndarray:
    """Kronecker product of two or more matrices; dimensions multiply."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for m in rest:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def outer(psi) -> np.ndarray:
    """Rank-1 density matrix psi psi† of a state vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def fix_global_phase(psi: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real and nonnegative.

    The phase convention that keeps reconstructed states reproducible; the
    physics is invariant under it.
    """
    psi = np.asarray(psi, dtype=complex)
    idx = int(np.argmax(np.abs(psi)))
    pivot = psi[idx]
    if abs(pivot) == 0.0:
        return psi.copy()
    return psi * (pivot.conjugate() / abs(pivot))


def principal_eigenvector(m, *, gap_atol: float = EIGEN_DEGENERACY_GAP):
    """Unit eigenvector of the largest eigenvalue of a Hermitian matrix.

    Returns (vector, degenerate) where degenerate is True when the gap
    between the two largest eigenvalues is below ``gap_atol`` (the returned
    vector is then one arbitrary member of the top eigenspace).
    """
    m = np.asarray(m, dtype=complex)
    vals, vecs = np.linalg.eigh(m)
    top = vecs[:, -1]
    degenerate = bool(m.shape[0] > 1 and (vals[-1] - vals[-2]) < gap_atol)
    top = fix_global_phase(top)
    return top / np.linalg.norm(top), degenerate


def _psd_sqrt(m: np.ndarray, *, clip: float) -> np.ndarray:
    """Matrix square root of a Hermitian PSD matrix via eigendecomposition."""
    vals, vecs = np.linalg.eigh(m)
    if vals[0] < -clip:
        raise ValueError(f"matrix has negative eigenvalue {vals[0]!r} beyond {-clip}")
    # float-noise eigenvalues would otherwise blow up to sqrt scale
    vals[vals < EIG_NOISE_FLOOR] = 0.0
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(a, b, *, clip: float = PSD_CLIP) -> float:
    """Fidelity between two states, each a vector or a density matrix.

    Pure-pure inputs use |<a|b>|^2; one density matrix uses <psi|rho|psi>;
    two density matrices use (tr sqrt(sqrt(b) a sqrt(b)))^2. Density inputs
    must be Hermitian and PSD up to ``clip`` (tiny negative eigenvalues are
    repaired; larger ones raise).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim == 1 and b.ndim == 1:
        if a.shape != b.shape:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        return float(min(abs(np.vdot(a, b)) ** 2, 1.0))
    if a.ndim == 1:
        return fidelity(b, a, clip=clip)
    if b.ndim == 1:
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        val = np.vdot(b, a @ b).real
        return float(min(max(val, 0.0), 1.0))
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    sb = _psd_sqrt(b, clip=clip)
    inner = sb @ a @ sb
    inner = (inner + inner.conj().T) / 2.0
    root = _psd_sqrt(inner, clip=clip)
    val = np.trace(root).real ** 2
    return float(min(max(val, 0.0), 1.0))
