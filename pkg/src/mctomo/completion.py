"""Rank-1 matrix completion from a partially known Hermitian matrix.

A rank-1 matrix is recoverable from known entries exactly when the bipartite
row-column graph (one edge per known entry) connects all 2d nodes; every
missing entry then follows from vanishing 2x2 determinants. The standard
measurement mask here knows the diagonal plus every coherence between
indices at Hamming distance 1, which connects the graph like a hypercube.

Entries whose fill would divide by a statistically vanishing diagonal raise
``SparseFailure`` in strict mode. In recovery mode they are filled with the
only magnitude a pure state allows, sqrt(diag_j * diag_k), at phase zero;
zero is used when either endpoint diagonal itself vanishes, since
|m_jk| <= sqrt(diag_j * diag_k) forces the entry there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .validation import HERMITIAN_ATOL, num_qubits


class SparseFailure(Exception):
    """A fill had no viable pivot: the listed diagonals are below the floor."""

    def __init__(self, message: str, entry: Optional[Tuple[int, int]] = None,
                 vanished: Tuple[int, ...] = ()):
        super().__init__(message)
        self.entry = entry
        self.vanished = tuple(vanished)


@dataclass
class PartialMatrix:
    """A d x d complex matrix plus the boolean mask of known entries."""

    entries: np.ndarray
    known: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.known = np.asarray(self.known, dtype=bool)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError(f"entries must be square, got shape {self.entries.shape}")
        if self.known.shape != self.entries.shape:
            raise ValueError("known mask shape differs from entries shape")
        both = self.known & self.known.T
        if not np.allclose(self.entries[both], self.entries.conj().T[both],
                           atol=100 * HERMITIAN_ATOL, rtol=1e-9):
            raise ValueError("known entries are not Hermitian-consistent")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def num_known(self) -> int:
        return int(self.known.sum())


def mcqst_mask(n: int) -> np.ndarray:
    """Known-entry mask of the standard protocol: diagonal plus Hamming-1 pairs."""
    d = 1 << n
    idx = np.arange(d)
    diff = idx[:, None] ^ idx[None, :]
    hamming = np.zeros((d, d), dtype=np.int64)
    for bit in range(n):
        hamming += (diff >> bit) & 1
    return hamming <= 1


class FeasibilityStatus(Enum):
    COMPLETE = "complete"
    UNDERDETERMINED = "underdetermined"
    CYCLE_WITHOUT_TREE = "cycle-without-tree"


@dataclass
class FeasibilityReport:
    """Connectivity verdict on the row-column graph of known entries.

    ``redundancy`` counts independent cycles: edges beyond a spanning
    structure. With noisy data they provide consistency checks, not failure.
    """

    status: FeasibilityStatus
    unreached_rows: Tuple[int, ...] = ()
    unreached_cols: Tuple[int, ...] = ()
    redundancy: int = 0

    @property
    def ok(self) -> bool:
        return self.status is FeasibilityStatus.COMPLETE


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def feasibility_check(pm: PartialMatrix) -> FeasibilityReport:
    """Decide whether the known entries determine the full rank-1 matrix.

    Row node j and column node k are joined for every known entry (j, k);
    completion is possible iff all 2d nodes end up in one component.
    """
    d = pm.dim
    uf = _UnionFind(2 * d)
    edges = 0
    for j, k in zip(*np.nonzero(pm.known)):
        uf.union(int(j), d + int(k))
        edges += 1

    roots = [uf.find(v) for v in range(2 * d)]
    components = len(set(roots))
    cycles = edges - (2 * d - components)

    if components == 1:
        return FeasibilityReport(FeasibilityStatus.COMPLETE, redundancy=cycles)

    # Report nodes outside the largest component (ties: lowest row index).
    sizes: dict[int, int] = {}
    for r in roots:
        sizes[r] = sizes.get(r, 0) + 1
    main = max(sizes, key=lambda r: (sizes[r], -roots.index(r)))
    unreached_rows = tuple(j for j in range(d) if roots[j] != main)
    unreached_cols = tuple(k for k in range(d) if roots[d + k] != main)
    # Enough entries for a spanning structure but wasted on loops is the
    # cycle failure mode; fewer entries is a plain shortage.
    status = (FeasibilityStatus.CYCLE_WITHOUT_TREE if edges >= 2 * d - 1
              else FeasibilityStatus.UNDERDETERMINED)
    return FeasibilityReport(status, unreached_rows, unreached_cols, cycles)


@dataclass
class CompletionResult:
    """Completed matrix plus the pairs that needed sparse recovery, if any."""

    matrix: np.ndarray
    recovered_pairs: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def recovered(self) -> bool:
        return len(self.recovered_pairs) > 0


def _hamming_levels(n: int):
    """Unordered index pairs grouped by Hamming distance 2..n."""
    d = 1 << n
    levels: list[list[Tuple[int, int]]] = [[] for _ in range(n + 1)]
    for j in range(d):
        for k in range(j + 1, d):
            m = (j ^ k).bit_count()
            if m >= 2:
                levels[m].append((j, k))
    return levels


def _fill_pair(m, diag, j, k, floor, recover, recovered):
    """Fill entry (j, k) by zero 2x2 determinants through its viable pivots.

    Every set bit b of j^k offers a one-step fill m[j,r] * m[r,k] / diag[r]
    with r = k^b; on exact data all of them coincide, on noisy data they are
    redundant estimates, so the fill averages them weighted by diag[r]
    (divisor size tracks the inverse noise amplification of each path).
    """
    bits = j ^ k
    fills = []
    weights = []
    b = bits
    while b:
        low = b & -b
        r = k ^ low
        if diag[r] >= floor and diag[r] > 0.0:
            fills.append(m[j, r] * m[r, k] / diag[r])
            weights.append(diag[r])
        b ^= low
    if fills:
        value = complex(np.average(fills, weights=weights))
    elif min(diag[j], diag[k]) < floor or min(diag[j], diag[k]) == 0.0:
        # |m_jk| <= sqrt(diag_j diag_k) pins the entry to zero
        value = 0.0
    elif recover:
        value = np.sqrt(diag[j] * diag[k])
        recovered.append((j, k))
    else:
        raise SparseFailure(
            f"no viable pivot for entry ({j}, {k}): pivot diagonals below floor {floor:g}",
            entry=(j, k),
            vanished=tuple(k ^ (1 << t) for t in range(bits.bit_length()) if bits >> t & 1),
        )
    m[j, k] = value
    m[k, j] = np.conjugate(value)


def _mirror_single_orientation(m: np.ndarray, known: np.ndarray) -> None:
    """Set conj values at positions whose transpose is known but they are not."""
    only = known & ~known.T
    m[only.T] = np.conjugate(m.T[only.T])


def _complete_hypercube(pm, diag, floor, recover):
    n = num_qubits(pm.dim)
    m = pm.entries.copy()
    np.fill_diagonal(m, diag)
    _mirror_single_orientation(m, pm.known)
    recovered: list[Tuple[int, int]] = []
    for level in _hamming_levels(n):
        for j, k in level:
            if pm.known[j, k] or pm.known[k, j]:
                continue
            _fill_pair(m, diag, j, k, floor, recover, recovered)
    return m, recovered


def _complete_by_graph(pm, diag, floor, recover):
    """General-mask fill: recover amplitudes by BFS over known coherences.

    Propagation only routes through indices whose amplitude clears the
    floor, since each step divides by the source amplitude. Unknown
    diagonal entries are legal here; they are filled by propagation like
    any other entry.
    """
    d = pm.dim
    diag_known = pm.known.diagonal()
    amp = np.zeros(d, dtype=complex)
    have = np.zeros(d, dtype=bool)
    neighbors: list[list[int]] = [[] for _ in range(d)]
    for j, k in zip(*np.nonzero(pm.known)):
        if j != k:
            neighbors[int(j)].append(int(k))
            neighbors[int(k)].append(int(j))

    recovered: list[Tuple[int, int]] = []
    root = int(np.argmax(np.where(diag_known, diag, -1.0)))
    amp[root] = np.sqrt(diag[root])
    have[root] = True
    queue = [root]
    while queue:
        a = queue.pop(0)
        mag2 = abs(amp[a]) ** 2
        if mag2 < floor or mag2 == 0.0:
            continue
        for b in neighbors[a]:
            if have[b]:
                continue
            value = pm.entries[a, b] if pm.known[a, b] else np.conjugate(pm.entries[b, a])
            amp[b] = np.conjugate(value / amp[a])
            have[b] = True
            queue.append(b)

    for b in range(d):
        if have[b]:
            continue
        if not diag_known[b]:
            raise SparseFailure(
                f"index {b} unreachable and its diagonal is unknown",
                entry=(root, b),
                vanished=tuple(i for i in range(d) if diag_known[i] and diag[i] < floor),
            )
        if diag[b] < floor:
            amp[b] = np.sqrt(diag[b])
        elif recover:
            amp[b] = np.sqrt(diag[b])
            recovered.append((root, b))
        else:
            raise SparseFailure(
                f"index {b} unreachable through diagonals above floor {floor:g}",
                entry=(root, b),
                vanished=tuple(i for i in range(d) if diag_known[i] and diag[i] < floor),
            )

    m = np.outer(amp, amp.conj())
    m[pm.known] = pm.entries[pm.known]
    _mirror_single_orientation(m, pm.known)
    for i in range(d):
        if diag_known[i]:
            m[i, i] = diag[i]
    return m, recovered


def complete_rank1(pm: PartialMatrix, diag, *, pivot_floor: float,
                   recover: bool = False) -> CompletionResult:
    """Fill all unknown entries of a rank-1 Hermitian matrix.

    ``diag`` supplies the nonnegative diagonal magnitudes used for pivot
    decisions (entries at unknown diagonal positions are ignored). Known
    entries are preserved verbatim; the result is Hermitized by averaging
    with its own adjoint. Power-of-two masks containing the full standard
    measurement mask use the hypercube fill schedule (entries processed by
    increasing Hamming distance, redundant pivot paths averaged with
    divisor-proportional weights); other feasible masks fall back to
    spanning-tree propagation.
    """
    diag = np.asarray(diag, dtype=float)
    if diag.shape != (pm.dim,):
        raise ValueError(f"diag must have length {pm.dim}")
    if np.any(diag < 0):
        raise ValueError("diag must be nonnegative")
    known_diag = diag[pm.known.diagonal()]
    if known_diag.size == 0 or known_diag.max() < pivot_floor:
        raise SparseFailure(
            "every known diagonal entry is below the pivot floor; nothing to anchor on",
            vanished=tuple(range(pm.dim)),
        )

    d = pm.dim
    hypercube = d >= 2 and d & (d - 1) == 0 and pm.known.diagonal().all() \
        and (pm.known | ~mcqst_mask(num_qubits(d))).all()
    if hypercube:
        m, recovered = _complete_hypercube(pm, diag, pivot_floor, recover)
    else:
        report = feasibility_check(pm)
        if not report.ok:
            raise ValueError(
                f"mask is not completable ({report.status.value}): "
                f"rows {report.unreached_rows} / cols {report.unreached_cols} unreached"
            )
        m, recovered = _complete_by_graph(pm, diag, pivot_floor, recover)

    m = (m + m.conj().T) / 2.0
    return CompletionResult(m, tuple(recovered))
