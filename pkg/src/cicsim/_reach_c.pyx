# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled reachability kernel.

Same contract as cicsim._reach_py.closure_masks.  Uses fixed uint64
bitsets for graphs of up to 64 nodes (the common case for fuzz-scale
traces) and defers to the pure-Python big-int path beyond that.
"""

from libc.stdint cimport uint64_t


def closure_masks(adj):
    cdef Py_ssize_t m = len(adj)
    if m == 0:
        return []
    if m > 64:
        from cicsim._reach_py import closure_masks as py_closure
        return py_closure(adj)

    cdef uint64_t a[64]
    cdef uint64_t r[64]
    cdef Py_ssize_t i, j
    cdef uint64_t acc, rest
    cdef bint changed

    for i in range(m):
        a[i] = <uint64_t> adj[i]
        r[i] = a[i] | (<uint64_t> 1 << i)

    changed = True
    while changed:
        changed = False
        for i in range(m):
            acc = r[i]
            rest = a[i]
            while rest:
                j = _ctz(rest)
                acc |= r[j]
                rest &= rest - 1
            if acc != r[i]:
                r[i] = acc
                changed = True
    return [int(r[i]) for i in range(m)]


cdef inline int _ctz(uint64_t x):
    cdef int n = 0
    while not (x & 1):
        x >>= 1
        n += 1
    return n
