# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled refinement round; same contract as ``_refine_py.refine_round``.

All weights must fit in int64 with every per-row class sum below 2**62; the
caller checks this before dispatching here.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef struct Entry:
    int64_t code
    int64_t w


cdef struct Slot:
    uint64_t h
    int64_t blk
    int64_t idx


cdef int cmp_entry(const void *a, const void *b) noexcept nogil:
    cdef int64_t x = (<Entry *> a).code
    cdef int64_t y = (<Entry *> b).code
    return (x > y) - (x < y)


cdef int cmp_slot(const void *a, const void *b) noexcept nogil:
    cdef const Slot *p = <const Slot *> a
    cdef const Slot *q = <const Slot *> b
    if p.blk != q.blk:
        return (p.blk > q.blk) - (p.blk < q.blk)
    if p.h != q.h:
        return (p.h > q.h) - (p.h < q.h)
    return (p.idx > q.idx) - (p.idx < q.idx)


cdef inline uint64_t mix(uint64_t h, uint64_t v) noexcept nogil:
    h ^= v + <uint64_t> 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)
    h *= <uint64_t> 0xBF58476D1CE4E5B9ULL
    return h ^ (h >> 31)


cdef bint same_sig(int64_t s, int64_t t, int64_t *sig_ptr, Entry *sig) noexcept nogil:
    cdef int64_t a0 = sig_ptr[s], a1 = sig_ptr[s + 1]
    cdef int64_t b0 = sig_ptr[t], b1 = sig_ptr[t + 1]
    cdef int64_t k
    if a1 - a0 != b1 - b0:
        return False
    for k in range(a1 - a0):
        if sig[a0 + k].code != sig[b0 + k].code or sig[a0 + k].w != sig[b0 + k].w:
            return False
    return True


def refine_round(row_ptr, keys, targets, weights, is_bool_key, blocks, Py_ssize_t nblocks):
    cdef const int64_t[::1] rp = np.ascontiguousarray(row_ptr, dtype=np.int64)
    cdef const int64_t[::1] ky = np.ascontiguousarray(keys, dtype=np.int64)
    cdef const int64_t[::1] tg = np.ascontiguousarray(targets, dtype=np.int64)
    cdef const int64_t[::1] wt = np.ascontiguousarray(weights, dtype=np.int64)
    cdef const cnp.uint8_t[::1] bk = np.ascontiguousarray(is_bool_key, dtype=np.uint8)
    cdef const int64_t[::1] bl = np.ascontiguousarray(blocks, dtype=np.int64)
    cdef Py_ssize_t n = bl.shape[0]
    cdef Py_ssize_t nnz = ky.shape[0]

    out_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr

    cdef Entry *sig = <Entry *> malloc((nnz + 1) * sizeof(Entry))
    cdef int64_t *sig_ptr = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef Slot *slots = <Slot *> malloc((n + 1) * sizeof(Slot))
    cdef int64_t *group = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef int64_t *rep = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef int64_t *renum = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    if not sig or not sig_ptr or not slots or not group or not rep or not renum:
        free(sig); free(sig_ptr); free(slots); free(group); free(rep); free(renum)
        raise MemoryError()

    cdef Py_ssize_t s, e, k, start, w, r, i, j, nrep
    cdef int64_t code, ngroups, nout
    cdef uint64_t h
    try:
        with nogil:
            # per-state signatures: sort entries by code, merge equal codes
            w = 0
            for s in range(n):
                sig_ptr[s] = w
                start = w
                for e in range(rp[s], rp[s + 1]):
                    sig[w].code = ky[e] * nblocks + bl[tg[e]]
                    sig[w].w = wt[e]
                    w += 1
                if w - start > 1:
                    qsort(&sig[start], w - start, sizeof(Entry), cmp_entry)
                r = start
                for k in range(start, w):
                    if r > start and sig[r - 1].code == sig[k].code:
                        sig[r - 1].w += sig[k].w
                    else:
                        sig[r] = sig[k]
                        r += 1
                w = r
                h = mix(<uint64_t> 1469598103934665603ULL, <uint64_t> bl[s])
                for k in range(start, w):
                    if bk[sig[k].code // nblocks] and sig[k].w > 1:
                        sig[k].w = 1
                    h = mix(h, <uint64_t> sig[k].code)
                    h = mix(h, <uint64_t> sig[k].w)
                slots[s].h = h
                slots[s].blk = bl[s]
                slots[s].idx = s
            sig_ptr[n] = w

            qsort(slots, n, sizeof(Slot), cmp_slot)

            # equal (block, hash) runs; exact comparison resolves collisions
            ngroups = 0
            i = 0
            while i < n:
                j = i
                while j < n and slots[j].blk == slots[i].blk and slots[j].h == slots[i].h:
                    j += 1
                nrep = 0
                for k in range(i, j):
                    s = slots[k].idx
                    group[s] = -1
                    for r in range(nrep):
                        if same_sig(s, rep[i + r], sig_ptr, sig):
                            group[s] = group[rep[i + r]]
                            break
                    if group[s] < 0:
                        group[s] = ngroups
                        ngroups += 1
                        rep[i + nrep] = s
                        nrep += 1
                i = j

            # renumber by first occurrence in state order
            for k in range(ngroups):
                renum[k] = -1
            nout = 0
            for s in range(n):
                if renum[group[s]] < 0:
                    renum[group[s]] = nout
                    nout += 1
                out[s] = renum[group[s]]
    finally:
        free(sig); free(sig_ptr); free(slots); free(group); free(rep); free(renum)
    return out_arr, int(nout)
