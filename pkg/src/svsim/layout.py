"""Qubit relabeling: put chatty qubits on rank-local bits.

Gates on physical bits >= n-k pay for communication. Storing logical qubit
q at a different physical bit changes its stride without changing the
circuit's meaning, so a static relabeling chosen from the circuit's gate
histogram can push the busiest qubits below the rank boundary.

A QubitPermutation carries both directions: phys_to_logical[j] names the
logical qubit stored at physical bit j, logical_to_phys is its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Circuit, StateVector
from .errors import ValidationError


@dataclass(frozen=True)
class QubitPermutation:
    phys_to_logical: tuple[int, ...]
    logical_to_phys: tuple[int, ...]

    def __post_init__(self):
        p2l, l2p = self.phys_to_logical, self.logical_to_phys
        n = len(p2l)
        ok = (
            len(l2p) == n
            and sorted(p2l) == list(range(n))
            and all(l2p[p2l[j]] == j for j in range(n))
        )
        if not ok:
            raise ValidationError("phys_to_logical and logical_to_phys must be "
                                  "mutually inverse permutations")

    @property
    def n(self) -> int:
        return len(self.phys_to_logical)

    @classmethod
    def from_phys(cls, phys_to_logical) -> "QubitPermutation":
        p2l = tuple(int(q) for q in phys_to_logical)
        l2p = [0] * len(p2l)
        for j, q in enumerate(p2l):
            if not (0 <= q < len(p2l)):
                raise ValidationError(f"entry {q} out of range")
            l2p[q] = j
        return cls(p2l, tuple(l2p))

    def inverse(self) -> "QubitPermutation":
        return QubitPermutation(self.logical_to_phys, self.phys_to_logical)


def identity_perm(n: int) -> QubitPermutation:
    if n < 1:
        raise ValidationError(f"need at least one qubit, got n={n}")
    ident = tuple(range(n))
    return QubitPermutation(ident, ident)


def permuted_stride(perm: QubitPermutation, q: int) -> int:
    """Stride of logical qubit q under the layout: 2**logical_to_phys[q]."""
    if not (0 <= q < perm.n):
        raise ValidationError(f"qubit {q} out of range for n={perm.n}")
    return 1 << perm.logical_to_phys[q]


def permute_state(s: StateVector, perm: QubitPermutation) -> StateVector:
    """Rearrange amplitudes into the layout's storage order.

    The amplitude at physical index p is the original amplitude at the
    logical index built by routing bit j of p to bit phys_to_logical[j].
    """
    if perm.n != s.n:
        raise ValidationError(f"permutation is over {perm.n} qubits, state has {s.n}")
    idx = np.arange(len(s), dtype=np.intp)
    src = np.zeros_like(idx)
    for j, q in enumerate(perm.phys_to_logical):
        src |= ((idx >> j) & 1) << q
    return StateVector(s.n, s.amps[src], validate=False)


def gate_histogram(circuit: Circuit) -> list[int]:
    """Gate incidences per logical qubit; a controlled op counts once for
    its target and once for its control."""
    counts = [0] * circuit.n
    for op in circuit.ops:
        counts[op.target] += 1
        if op.control is not None:
            counts[op.control] += 1
    return counts


def optimize_layout(counts, k: int) -> QubitPermutation:
    """Choose the layout that minimizes communicated gate incidences.

    The k least-used qubits go to physical bits n-k .. n-1 (the
    communicating ones), everything else to bits 0 .. n-k-1; each group is
    placed in ascending qubit order. Count ties are broken toward keeping
    the naturally-communicating high qubits where they are, so a flat
    histogram yields the identity.
    """
    counts = [int(c) for c in counts]
    n = len(counts)
    if n < 1:
        raise ValidationError("need counts for at least one qubit")
    if not (0 <= k <= n - 1):
        raise ValidationError(f"k must lie in [0, n-1], got {k}")
    if any(c < 0 for c in counts):
        raise ValidationError("gate counts cannot be negative")
    by_activity = sorted(range(n), key=lambda q: (counts[q], -q))
    comm = sorted(by_activity[:k])
    local = sorted(by_activity[k:])
    return QubitPermutation.from_phys(tuple(local + comm))
