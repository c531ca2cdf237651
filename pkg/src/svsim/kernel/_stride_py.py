"""Numpy fallback for the stride kernel.

Same contract as the compiled module: in-place pair updates on a contiguous
complex128 array, mode codes 0 sequential / 1 outer / 2 inner / 3 collapsed.
The pair sweep is expressed as vectorized updates over slices of the flat
pair-base range; the parallel modes hand disjoint slices to worker threads
(numpy releases the GIL inside the elementwise ops, and every pair is
written by exactly one worker).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def _bases(start: int, stop: int, target: int) -> np.ndarray:
    """Pair bases for flat pair indices [start, stop): bit `target` clear."""
    idx = np.arange(start, stop, dtype=np.intp)
    low = (1 << target) - 1
    return ((idx >> target) << (target + 1)) | (idx & low)


def _split(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    """Divide [start, stop) into at most `parts` contiguous pieces."""
    total = stop - start
    parts = min(parts, total) or 1
    step, extra = divmod(total, parts)
    out, lo = [], start
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def _update_range(amps, q11, q12, q21, q22, target, start, stop, control=None):
    if start >= stop:
        return
    b0 = _bases(start, stop, target)
    if control is not None:
        b0 = b0[(b0 >> control) & 1 == 1]
        if b0.size == 0:
            return
    b1 = b0 + (1 << target)
    lo = amps[b0]
    hi = amps[b1]
    amps[b0] = q11 * lo + q12 * hi
    amps[b1] = q21 * lo + q22 * hi


def _run(amps, q11, q12, q21, q22, target, mode, workers, control):
    npairs = amps.shape[0] >> 1
    if mode == 0 or workers == 1:
        _update_range(amps, q11, q12, q21, q22, target, 0, npairs, control)
        return

    if mode == 1:
        # Outer: divide the block range; block b covers pair indices
        # [b << target, (b + 1) << target), so block ranges stay contiguous.
        nblocks = amps.shape[0] >> (target + 1)
        pieces = [
            (blo << target, bhi << target) for blo, bhi in _split(0, nblocks, workers)
        ]
    elif mode == 3:
        # Collapsed: divide the flat pair range directly.
        pieces = _split(0, npairs, workers)
    else:
        # Inner: one block at a time, dividing the bases inside it.
        nblocks = amps.shape[0] >> (target + 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for b in range(nblocks):
                blo = b << target
                futs = [
                    pool.submit(_update_range, amps, q11, q12, q21, q22,
                                target, lo, hi, control)
                    for lo, hi in _split(blo, blo + (1 << target), workers)
                ]
                for f in futs:
                    f.result()
        return

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [
            pool.submit(_update_range, amps, q11, q12, q21, q22, target, lo, hi, control)
            for lo, hi in pieces
        ]
        for f in futs:
            f.result()


def apply_single(amps, q11, q12, q21, q22, target, mode, workers):
    _run(amps, q11, q12, q21, q22, target, mode, workers, None)


def apply_controlled(amps, q11, q12, q21, q22, control, target, mode, workers):
    _run(amps, q11, q12, q21, q22, target, mode, workers, control)
