# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sweep kernel.

Bit-identical twin of _gibbs_py.sweep: same SplitMix64 stream, same
floating-point expression shape (the build disables FP contraction), same
scan order. Any change here must be mirrored there.
"""

import numpy as np

cimport numpy as cnp


cdef inline cnp.uint64_t _next_u64(cnp.uint64_t *state) noexcept nogil:
    cdef cnp.uint64_t z
    state[0] = state[0] + <cnp.uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <cnp.uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <cnp.uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return z


def sweep(cnp.int32_t[::1] token_words, cnp.int64_t[::1] doc_offsets,
          cnp.int32_t[::1] z, cnp.int32_t[:, ::1] n_dk, cnp.int32_t[:, ::1] n_kw,
          cnp.int32_t[::1] n_k, double alpha, double beta, rng_state):
    """One full resample pass; mutates z and counts, returns new RNG state."""
    cdef Py_ssize_t D = doc_offsets.shape[0] - 1
    cdef Py_ssize_t K = n_k.shape[0]
    cdef Py_ssize_t V = n_kw.shape[1]
    cdef double vbeta = V * beta
    cdef cnp.uint64_t s = <cnp.uint64_t>rng_state
    cdef double[::1] cum = np.empty(K, dtype=np.float64)
    cdef Py_ssize_t d, t, j
    cdef cnp.int32_t w, k
    cdef double total, u

    with nogil:
        for d in range(D):
            for t in range(doc_offsets[d], doc_offsets[d + 1]):
                w = token_words[t]
                k = z[t]
                n_dk[d, k] -= 1
                n_kw[k, w] -= 1
                n_k[k] -= 1
                total = 0.0
                for j in range(K):
                    total += (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + vbeta)
                    cum[j] = total
                u = ((_next_u64(&s) >> 11) * (2.0 ** -53)) * total
                k = 0
                while k < K - 1 and cum[k] <= u:
                    k += 1
                n_dk[d, k] += 1
                n_kw[k, w] += 1
                n_k[k] += 1
                z[t] = k

    return int(s)
