"""Stride pair-update kernel.

A single-qubit gate on qubit i touches amplitude pairs (j, j + 2**i) for
every index j whose bit i is clear. The bases walk in blocks: an outer loop
over blocks of size 2**(i+1), an inner loop over the 2**i bases inside each
block. ExecStrategy picks which of those loops (if any) is divided among
worker threads; every mode touches the same disjoint pairs with the same
arithmetic, so all four produce bit-identical states.

Two interchangeable backends implement the sweep: a compiled Cython core
(built with OpenMP when available) and a numpy fallback. The compiled one is
selected at import when present; pass backend="python"/"compiled" to force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Gate2x2, StateVector
from ..errors import ValidationError
from . import _stride_py

try:
    from . import _stride_cy
except ImportError:  # extension not built; the numpy path covers everything
    _stride_cy = None

BACKEND = "compiled" if _stride_cy is not None else "python"

_MODES = {
    "sequential": 0,
    "parallel_outer": 1,
    "parallel_inner": 2,
    "parallel_collapsed": 3,
}


@dataclass(frozen=True)
class ExecStrategy:
    """How to sweep the pair bases: which loop to parallelize, and how wide.

    worker_count == 1 always degrades to the plain sequential sweep.
    """

    mode: str = "sequential"
    worker_count: int = 1

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValidationError(
                f"mode must be one of {sorted(_MODES)}, got {self.mode!r}"
            )
        if not isinstance(self.worker_count, int) or self.worker_count < 1:
            raise ValidationError(f"worker_count must be >= 1, got {self.worker_count!r}")


SEQUENTIAL = ExecStrategy()


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _stride_cy is not None else ("python",)


def _resolve(backend: str | None):
    if backend is None:
        backend = BACKEND
    if backend == "python":
        return _stride_py
    if backend == "compiled":
        if _stride_cy is None:
            raise ValidationError("compiled kernel is not available in this build")
        return _stride_cy
    raise ValidationError(f"unknown kernel backend {backend!r}")


def update_pair(a0: complex, a1: complex, g: Gate2x2) -> tuple[complex, complex]:
    """One gate application on a single amplitude pair."""
    return (g.q11 * a0 + g.q12 * a1, g.q21 * a0 + g.q22 * a1)


def _amps(s) -> np.ndarray:
    amps = s.amps if isinstance(s, StateVector) else s
    if not isinstance(amps, np.ndarray) or amps.dtype != np.complex128:
        raise ValidationError("kernel operates on complex128 arrays")
    if not amps.flags.c_contiguous:
        raise ValidationError("kernel needs a contiguous amplitude array")
    size = amps.shape[0]
    if size < 2 or size & (size - 1):
        raise ValidationError(f"amplitude count must be a power of two >= 2, got {size}")
    return amps


def _check_bit(i: int, size: int, what: str = "qubit") -> None:
    if not isinstance(i, (int, np.integer)) or i < 0 or (2 << i) > size:
        raise ValidationError(f"{what} {i!r} out of range for {size} amplitudes")


def _dispatch(strat: ExecStrategy) -> tuple[int, int]:
    # A single worker always means the sequential sweep, whatever the mode.
    if strat.worker_count == 1:
        return 0, 1
    return _MODES[strat.mode], strat.worker_count


def apply_single(s, g: Gate2x2, i: int, strat: ExecStrategy = SEQUENTIAL,
                 backend: str | None = None):
    """Apply g to qubit i of s, in place. s may be a StateVector or an array."""
    amps = _amps(s)
    _check_bit(i, amps.shape[0])
    mode, workers = _dispatch(strat)
    _resolve(backend).apply_single(
        amps, complex(g.q11), complex(g.q12), complex(g.q21), complex(g.q22),
        int(i), mode, workers,
    )
    return s


def apply_controlled(s, g: Gate2x2, c: int, t: int, strat: ExecStrategy = SEQUENTIAL,
                     backend: str | None = None):
    """Apply g to qubit t wherever bit c is set, in place."""
    amps = _amps(s)
    _check_bit(t, amps.shape[0], "target")
    if not isinstance(c, (int, np.integer)) or c < 0 or (1 << c) >= amps.shape[0]:
        raise ValidationError(f"control {c!r} out of range for {amps.shape[0]} amplitudes")
    if c == t:
        raise ValidationError("control and target must differ")
    mode, workers = _dispatch(strat)
    _resolve(backend).apply_controlled(
        amps, complex(g.q11), complex(g.q12), complex(g.q21), complex(g.q22),
        int(c), int(t), mode, workers,
    )
    return s
