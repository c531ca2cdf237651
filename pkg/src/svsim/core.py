"""Core state-vector types and the standard gate library.

Conventions used throughout the package:

* An n-qubit state is a dense vector of 2**n complex128 amplitudes.
* Qubit i corresponds to the index bit of significance 2**i, so the basis
  index of |q_{n-1} ... q_1 q_0> is sum(q_i << i). Qubit 0 is the least
  significant bit. All stride arithmetic in the kernel and the partitioning
  logic relies on this.
* Amplitudes are double precision pairs, 16 bytes each. Memory accounting
  elsewhere defaults to that figure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ParseError, ValidationError

# Default ceiling for dense allocation: 2**30 amplitudes is 16 GiB, which is
# the sensible limit for a single in-process vector. Callers may lower it.
MAX_QUBITS = 30

BYTES_PER_AMPLITUDE = 16

NORM_TOL = 1e-10


class StateVector:
    """Dense n-qubit state. Owns a contiguous complex128 array of 2**n amps."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray, validate: bool = True):
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if validate:
            if not isinstance(n, (int, np.integer)) or n < 1:
                raise ValidationError(f"qubit count must be a positive int, got {n!r}")
            if amps.ndim != 1 or amps.shape[0] != (1 << n):
                raise ValidationError(
                    f"amplitude array must have length 2**{n} = {1 << n}, "
                    f"got shape {amps.shape}"
                )
            if not np.all(np.isfinite(amps.view(np.float64))):
                raise ValidationError("amplitudes must be finite")
            nrm = float(np.vdot(amps, amps).real)
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValidationError(f"state is not normalized: |amps|^2 = {nrm!r}")
        self.n = int(n)
        self.amps = amps

    def copy(self) -> "StateVector":
        out = StateVector.__new__(StateVector)
        out.n = self.n
        out.amps = self.amps.copy()
        return out

    def __len__(self) -> int:
        return self.amps.shape[0]

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


@dataclass(frozen=True)
class Gate2x2:
    """Single-qubit gate, stored as four complex entries.

    [[q11, q12],
     [q21, q22]]

    Construction does not check unitarity; is_unitary() does, and circuit
    validation rejects non-unitary gates before they reach a simulation.
    """

    q11: complex
    q12: complex
    q21: complex
    q22: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.q11, self.q12], [self.q21, self.q22]], dtype=np.complex128
        )

    @classmethod
    def from_matrix(cls, m) -> "Gate2x2":
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValidationError(f"gate matrix must be 2x2, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))


@dataclass(frozen=True)
class GateOp:
    """One circuit operation: a single-qubit gate, optionally controlled.

    kind is "single" or "controlled"; control is set exactly for the latter.
    """

    kind: str
    gate: Gate2x2
    target: int
    control: int | None = None

    def __post_init__(self):
        if self.kind not in ("single", "controlled"):
            raise ValidationError(f"unknown op kind {self.kind!r}")
        if (self.control is not None) != (self.kind == "controlled"):
            raise ValidationError("control must be given exactly for controlled ops")
        if self.control is not None and self.control == self.target:
            raise ValidationError("control and target must differ")


@dataclass(frozen=True)
class Circuit:
    """A qubit count plus an ordered list of operations on those qubits."""

    n: int
    ops: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"circuit needs at least one qubit, got n={self.n}")
        object.__setattr__(self, "ops", tuple(self.ops))
        for pos, op in enumerate(self.ops):
            for idx in (op.target, op.control):
                if idx is not None and not (0 <= idx < self.n):
                    raise ValidationError(
                        f"op {pos}: qubit index {idx} out of range for n={self.n}"
                    )


_SQ2 = 1.0 / np.sqrt(2.0)

_STANDARD = {
    "I": Gate2x2(1, 0, 0, 1),
    "X": Gate2x2(0, 1, 1, 0),
    "Y": Gate2x2(0, -1j, 1j, 0),
    "Z": Gate2x2(1, 0, 0, -1),
    "H": Gate2x2(_SQ2, _SQ2, _SQ2, -_SQ2),
}


def make_state(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Return |0...0> on n qubits: amplitude 1 at index 0, zero elsewhere."""
    if not isinstance(n, (int, np.integer)) or n < 1 or n > max_qubits:
        raise CapacityError(f"qubit count {n!r} outside [1, {max_qubits}]")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n), amps, validate=False)


def standard_gate(name: str) -> Gate2x2:
    """Look up one of I, X, Y, Z, H (case-insensitive)."""
    try:
        return _STANDARD[name.upper()]
    except (KeyError, AttributeError):
        raise ParseError(f"unknown gate name {name!r}") from None


def is_unitary(g: Gate2x2, tol: float = 1e-10) -> bool:
    """True when conj(g).T @ g is the identity to within tol, entrywise."""
    m = g.matrix
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(2))) <= tol)


def norm2(s) -> float:
    """Sum of squared amplitude magnitudes. Accepts a StateVector or array."""
    amps = s.amps if isinstance(s, StateVector) else np.asarray(s, dtype=np.complex128)
    return float(np.vdot(amps, amps).real)


def tensor_states(qubits) -> StateVector:
    """Build a product state from per-qubit (a0, a1) pairs.

    qubits[i] supplies the amplitudes of qubit i, the bit of significance
    2**i, so the joint amplitude at index b is prod_i qubits[i][bit_i(b)].
    Each pair must be normalized.
    """
    pairs = [np.asarray(q, dtype=np.complex128).reshape(-1) for q in qubits]
    if not pairs:
        raise ValidationError("need at least one qubit")
    if len(pairs) > MAX_QUBITS:
        raise CapacityError(f"{len(pairs)} qubits exceeds cap {MAX_QUBITS}")
    for i, p in enumerate(pairs):
        if p.shape != (2,):
            raise ValidationError(f"qubit {i}: expected 2 amplitudes, got {p.shape}")
        if abs(float(np.vdot(p, p).real) - 1.0) > NORM_TOL:
            raise ValidationError(f"qubit {i}: amplitude pair is not normalized")
    amps = pairs[-1]
    for p in reversed(pairs[:-1]):
        # kron(a, b) varies b fastest, so fold from the most significant qubit
        # down to keep qubit 0 in the least significant bit.
        amps = np.kron(amps, p)
    return StateVector(len(pairs), amps, validate=False)
