"""Dense matrix reference path.

Builds full 2**n x 2**n gate embeddings and applies them by explicit
matrix-vector products. Exponentially expensive on purpose: this module is
the independent oracle that the stride kernel and the distributed engine are
checked against, so it shares no update code with them.

Row products are evaluated one row at a time with a fixed ascending-column
accumulation, which makes the row-partitioned product bit-identical to the
plain one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BYTES_PER_AMPLITUDE, Circuit, Gate2x2, StateVector, make_state
from .errors import CapacityError, ValidationError

# 2**12 squared complex128 entries is 256 MiB; anything bigger is not a
# sensible dense allocation.
MAX_DENSE_QUBITS = 12

_UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class DenseUnitary:
    """Explicit 2**n x 2**n unitary matrix."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        dim = 1 << self.n
        if e.shape != (dim, dim):
            raise ValidationError(f"expected {dim}x{dim} entries, got {e.shape}")


@dataclass(frozen=True)
class MatvecCostReport:
    """Memory bill for a row-partitioned dense product on p = 2**kappa ranks.

    Every rank stores its strip of the matrix plus a full replicated copy of
    the input vector; replicated_vector_bytes is the aggregate over ranks.
    """

    n: int
    kappa: int
    p: int
    rows_per_rank: int
    per_rank_matrix_bytes: int
    replicated_vector_bytes: int
    bytes_per_entry: int = BYTES_PER_AMPLITUDE


def _check_unitary(u: DenseUnitary) -> DenseUnitary:
    # Full check is quadratic in the dimension; above 6 qubits settle for
    # column norms on a fixed sample.
    dim = 1 << u.n
    if u.n <= 6:
        err = np.max(np.abs(u.entries.conj().T @ u.entries - np.eye(dim)))
        if err > _UNITARY_TOL:
            raise ValidationError(f"embedding is not unitary (max error {err:.3e})")
    else:
        for col in (0, 1, dim // 2, dim - 1):
            cn = float(np.vdot(u.entries[:, col], u.entries[:, col]).real)
            if abs(cn - 1.0) > _UNITARY_TOL:
                raise ValidationError(f"column {col} norm {cn!r} is not 1")
    return u


def _check_dense_n(n: int) -> None:
    if not (1 <= n <= MAX_DENSE_QUBITS):
        raise CapacityError(
            f"dense embedding limited to {MAX_DENSE_QUBITS} qubits, got n={n}"
        )


def embed_single(g: Gate2x2, i: int, n: int) -> DenseUnitary:
    """Embed a single-qubit gate on qubit i into the full n-qubit matrix.

    With qubit 0 in the least significant bit the embedding is
    kron(I_{2**(n-1-i)}, kron(g, I_{2**i})).
    """
    _check_dense_n(n)
    if not (0 <= i < n):
        raise ValidationError(f"qubit {i} out of range for n={n}")
    lower = np.eye(1 << i, dtype=np.complex128)
    upper = np.eye(1 << (n - 1 - i), dtype=np.complex128)
    entries = np.kron(upper, np.kron(g.matrix, lower))
    return _check_unitary(DenseUnitary(n, entries))


def embed_controlled(g: Gate2x2, c: int, t: int, n: int) -> DenseUnitary:
    """Embed a controlled gate: g acts on qubit t where bit c is set."""
    _check_dense_n(n)
    for name, idx in (("control", c), ("target", t)):
        if not (0 <= idx < n):
            raise ValidationError(f"{name} qubit {idx} out of range for n={n}")
    if c == t:
        raise ValidationError("control and target must differ")
    dim = 1 << n
    entries = np.eye(dim, dtype=np.complex128)
    j = np.arange(dim)
    base = j[((j >> t) & 1 == 0) & ((j >> c) & 1 == 1)]
    mate = base | (1 << t)
    entries[base, base] = g.q11
    entries[base, mate] = g.q12
    entries[mate, base] = g.q21
    entries[mate, mate] = g.q22
    return _check_unitary(DenseUnitary(n, entries))


def _as_entries(u) -> np.ndarray:
    return u.entries if isinstance(u, DenseUnitary) else np.asarray(u, np.complex128)


def matvec(u, s: StateVector) -> StateVector:
    """out = U @ s, evaluated row by row.

    Each output amplitude is an independent np.dot over one matrix row, so
    any row partitioning of the same matrix reproduces these bits exactly.
    """
    entries = _as_entries(u)
    amps = s.amps
    if entries.shape != (amps.shape[0], amps.shape[0]):
        raise ValidationError(
            f"matrix shape {entries.shape} does not match state length {amps.shape[0]}"
        )
    out = np.empty_like(amps)
    for r in range(amps.shape[0]):
        out[r] = np.dot(entries[r], amps)
    return StateVector(s.n, out, validate=False)


def matvec_cost(n: int, kappa: int, bytes_per_entry: int = BYTES_PER_AMPLITUDE) -> MatvecCostReport:
    """Arithmetic-only cost report for a row-partitioned dense product."""
    if not (0 <= kappa <= n):
        raise ValidationError(f"kappa must lie in [0, {n}], got {kappa}")
    p = 1 << kappa
    rows = 1 << (n - kappa)
    return MatvecCostReport(
        n=n,
        kappa=kappa,
        p=p,
        rows_per_rank=rows,
        per_rank_matrix_bytes=rows * (1 << n) * bytes_per_entry,
        replicated_vector_bytes=p * (1 << n) * bytes_per_entry,
        bytes_per_entry=bytes_per_entry,
    )


def matvec_partitioned(u, s: StateVector, kappa: int) -> tuple[StateVector, MatvecCostReport]:
    """Row-partitioned U @ s over 2**kappa ranks, plus its memory bill.

    Rank r computes rows [r * rows_per_rank, (r+1) * rows_per_rank) from its
    matrix strip and a replicated copy of s. Bit-identical to matvec().
    """
    entries = _as_entries(u)
    report = matvec_cost(s.n, kappa)
    if entries.shape != (len(s), len(s)):
        raise ValidationError(
            f"matrix shape {entries.shape} does not match state length {len(s)}"
        )
    out = np.empty_like(s.amps)
    for rank in range(report.p):
        lo = rank * report.rows_per_rank
        strip = entries[lo : lo + report.rows_per_rank]
        replica = s.amps  # every rank reads the whole input vector
        for r in range(strip.shape[0]):
            out[lo + r] = np.dot(strip[r], replica)
    return StateVector(s.n, out, validate=False), report


def oracle_run(circuit: Circuit) -> StateVector:
    """Run a circuit from |0...0> through dense embeddings only."""
    _check_dense_n(circuit.n)
    s = make_state(circuit.n)
    for op in circuit.ops:
        if op.kind == "single":
            u = embed_single(op.gate, op.target, circuit.n)
        else:
            u = embed_controlled(op.gate, op.control, op.target, circuit.n)
        s = matvec(u, s)
    return s
