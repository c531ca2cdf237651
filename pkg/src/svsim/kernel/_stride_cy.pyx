# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled stride kernel.

Same contract as _stride_py: in-place pair updates on a contiguous
complex128 array, mode codes 0 sequential / 1 outer / 2 inner / 3 collapsed.
The parallel modes use OpenMP through prange; with a single worker or a
build without OpenMP they degrade to the sequential sweep's arithmetic, and
every mode visits the same disjoint pairs, so results are bit-identical.
"""

from cython.parallel import prange

ctypedef double complex dc


cdef inline void _pair(dc* a, Py_ssize_t b0, Py_ssize_t stride,
                       dc q11, dc q12, dc q21, dc q22) noexcept nogil:
    cdef dc lo = a[b0]
    cdef dc hi = a[b0 + stride]
    a[b0] = q11 * lo + q12 * hi
    a[b0 + stride] = q21 * lo + q22 * hi


def apply_single(dc[::1] a, dc q11, dc q12, dc q21, dc q22,
                 int target, int mode, int workers):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << target
    cdef Py_ssize_t nblocks = size >> (target + 1)
    cdef Py_ssize_t npairs = size >> 1
    cdef Py_ssize_t j, l, b, q, base
    cdef dc* p = &a[0]

    if mode == 0 or workers == 1:
        with nogil:
            for b in range(nblocks):
                j = b << (target + 1)
                for l in range(j, j + stride):
                    _pair(p, l, stride, q11, q12, q21, q22)
    elif mode == 1:
        for b in prange(nblocks, nogil=True, num_threads=workers, schedule="static"):
            base = b << (target + 1)
            for l in range(base, base + stride):
                _pair(p, l, stride, q11, q12, q21, q22)
    elif mode == 2:
        # One parallel region per block: faithful to parallelizing the inner
        # loop, and predictably slow for small blocks.
        for b in range(nblocks):
            j = b << (target + 1)
            for l in prange(stride, nogil=True, num_threads=workers, schedule="static"):
                _pair(p, j + l, stride, q11, q12, q21, q22)
    else:
        for q in prange(npairs, nogil=True, num_threads=workers, schedule="static"):
            base = ((q >> target) << (target + 1)) | (q & (stride - 1))
            _pair(p, base, stride, q11, q12, q21, q22)


def apply_controlled(dc[::1] a, dc q11, dc q12, dc q21, dc q22,
                     int control, int target, int mode, int workers):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << target
    cdef Py_ssize_t nblocks = size >> (target + 1)
    cdef Py_ssize_t npairs = size >> 1
    cdef Py_ssize_t j, l, b, q, base
    cdef Py_ssize_t cbit = control
    cdef dc* p = &a[0]

    if mode == 0 or workers == 1:
        with nogil:
            for b in range(nblocks):
                j = b << (target + 1)
                for l in range(j, j + stride):
                    if (l >> cbit) & 1:
                        _pair(p, l, stride, q11, q12, q21, q22)
    elif mode == 1:
        for b in prange(nblocks, nogil=True, num_threads=workers, schedule="static"):
            base = b << (target + 1)
            for l in range(base, base + stride):
                if (l >> cbit) & 1:
                    _pair(p, l, stride, q11, q12, q21, q22)
    elif mode == 2:
        for b in range(nblocks):
            j = b << (target + 1)
            for l in prange(stride, nogil=True, num_threads=workers, schedule="static"):
                if ((j + l) >> cbit) & 1:
                    _pair(p, j + l, stride, q11, q12, q21, q22)
    else:
        for q in prange(npairs, nogil=True, num_threads=workers, schedule="static"):
            base = ((q >> target) << (target + 1)) | (q & (stride - 1))
            if (base >> cbit) & 1:
                _pair(p, base, stride, q11, q12, q21, q22)
