# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: trial simulation and protocol search.

Semantics are defined by the pure numpy module (_kernels_py); this extension
exists for speed only and must produce bitwise-identical results. Floating
point operations therefore run in exactly the same order as there, and the
build disables fused multiply-add contraction so expression shapes stay
rounding-identical across compilers.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()

BACKEND_NAME = "compiled"

cdef extern from "math.h":
    double frexp(double value, int* exp) nogil

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t tandembit_mulhilo64(uint64_t a, uint64_t b, uint64_t *hi) {
        unsigned __int128 p = (unsigned __int128)a * (unsigned __int128)b;
        *hi = (uint64_t)(p >> 64);
        return (uint64_t)p;
    }
    """
    uint64_t tandembit_mulhilo64(uint64_t a, uint64_t b, uint64_t* hi) nogil

cdef uint64_t _M0 = 0xD2E7470EE14C6C93u
cdef uint64_t _M1 = 0xCA5A826395121157u
cdef uint64_t _W0 = 0x9E3779B97F4A7C15u
cdef uint64_t _W1 = 0xBB67AE8584CAA73Bu
cdef double _U01 = 2.0 ** -53


cdef inline void _philox4_block(uint64_t counter, uint64_t k0, uint64_t k1,
                                uint64_t* out) nogil:
    cdef uint64_t x0 = counter, x1 = 0, x2 = 0, x3 = 0
    cdef uint64_t hi0 = 0, hi1 = 0, lo0, lo1
    cdef int r
    for r in range(10):
        lo0 = tandembit_mulhilo64(_M0, x0, &hi0)
        lo1 = tandembit_mulhilo64(_M1, x2, &hi1)
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = k0 + _W0
        k1 = k1 + _W1
    out[0] = x0
    out[1] = x1
    out[2] = x2
    out[3] = x3


cdef inline void _fill_uniforms(uint64_t seed, uint64_t trial, int count,
                                double* u) nogil:
    cdef uint64_t words[4]
    cdef uint64_t block = 1
    cdef int i = 0, w
    while i < count:
        _philox4_block(block, seed, trial, words)
        for w in range(4):
            if i < count:
                u[i] = <double>(words[w] >> 11) * _U01
                i += 1
        block += 1


cdef inline int _sample_symbol(const double* thresh, int m_minus_1, double u) nogil:
    # Matches numpy searchsorted side='right': advance while u >= threshold,
    # which also steps over zero-width intervals of impossible symbols.
    cdef int j = 0
    while j < m_minus_1 and u >= thresh[j]:
        j += 1
    return j


cdef inline void _decode_one(const int64_t* z, int n, int m, int mz, int h,
                             const int8_t* x_bits, const double* p_rows,
                             const double* q_rows, const int32_t* n_states,
                             const uint8_t* agree, const int8_t* g,
                             const int64_t* off_g, const int32_t* trans,
                             const int64_t* off_trans, double* buf_a,
                             double* buf_b, int* out_dead, int64_t* out_ex,
                             double* out_sig) nogil:
    cdef double* alpha = buf_a
    cdef double* beta = buf_b
    cdef double* swap
    cdef const double* prow
    cdef int s_in, s_out, k, s, y, fe
    cdef int64_t base
    cdef double tmp, mx, acc, tot
    cdef double sig = 0.5
    cdef int64_t ex = 1
    cdef int dead = 0
    alpha[0] = 1.0
    for k in range(n):
        s_in = n_states[k]
        s_out = n_states[k + 1]
        if agree[k]:
            for s in range(s_in):
                alpha[s] = alpha[s] * q_rows[g[off_g[k] + s] * mz + z[k]]
        else:
            for s in range(s_out):
                beta[s] = 0.0
            prow = p_rows + x_bits[h * n + k] * m
            base = off_trans[k]
            for s in range(s_in):
                tmp = alpha[s] * q_rows[g[off_g[k] + s] * mz + z[k]]
                for y in range(m):
                    beta[trans[base + s * m + y]] += tmp * prow[y]
            swap = alpha
            alpha = beta
            beta = swap
        mx = 0.0
        for s in range(s_out):
            if alpha[s] > mx:
                mx = alpha[s]
        if mx == 0.0:
            dead = 1
            break
        for s in range(s_out):
            alpha[s] = alpha[s] / mx
        tmp = frexp(mx, &fe)
        sig = sig * tmp
        ex = ex + fe
        sig = frexp(sig, &fe)
        ex = ex + fe
    out_dead[0] = dead
    if dead:
        out_ex[0] = 0
        out_sig[0] = 0.0
        return
    acc = 0.0
    for s in range(n_states[n]):
        acc = acc + alpha[s]
    tot = acc * sig
    out_sig[0] = frexp(tot, &fe)
    out_ex[0] = ex + fe


def simulate_range(seed, trial_start, trial_count, theta,
                   cnp.ndarray x_bits_arr, cnp.ndarray p_rows_arr,
                   cnp.ndarray q_rows_arr, cnp.ndarray p_thresh_arr,
                   cnp.ndarray q_thresh_arr, cnp.ndarray n_states_arr,
                   cnp.ndarray agree_arr, cnp.ndarray g_arr,
                   cnp.ndarray off_g_arr, cnp.ndarray trans_arr,
                   cnp.ndarray off_trans_arr):
    """MAP decisions for trials [trial_start, trial_start + trial_count)."""
    cdef const int8_t[:, ::1] x_bits = np.ascontiguousarray(x_bits_arr, dtype=np.int8)
    cdef const double[:, ::1] p_rows = np.ascontiguousarray(p_rows_arr, dtype=np.float64)
    cdef const double[:, ::1] q_rows = np.ascontiguousarray(q_rows_arr, dtype=np.float64)
    cdef const double[:, ::1] p_thresh = np.ascontiguousarray(p_thresh_arr, dtype=np.float64)
    cdef const double[:, ::1] q_thresh = np.ascontiguousarray(q_thresh_arr, dtype=np.float64)
    cdef const int32_t[::1] n_states = np.ascontiguousarray(n_states_arr, dtype=np.int32)
    cdef const uint8_t[::1] agree = np.ascontiguousarray(agree_arr, dtype=np.uint8)
    cdef const int8_t[::1] g = np.ascontiguousarray(g_arr, dtype=np.int8)
    cdef const int64_t[::1] off_g = np.ascontiguousarray(off_g_arr, dtype=np.int64)
    # A strategy whose depths are all agreement depths has no transition
    # entries; keep the buffer non-empty so a pointer to it stays valid.
    if trans_arr.size == 0:
        trans_arr = np.zeros(1, dtype=np.int32)
    cdef const int32_t[::1] trans = np.ascontiguousarray(trans_arr, dtype=np.int32)
    cdef const int64_t[::1] off_trans = np.ascontiguousarray(off_trans_arr, dtype=np.int64)

    cdef uint64_t seed_c = <uint64_t> seed
    cdef uint64_t start_c = <uint64_t> trial_start
    cdef int64_t count_c = <int64_t> trial_count
    cdef int theta_c = <int> theta
    cdef int n = x_bits.shape[1]
    cdef int m = p_rows.shape[1]
    cdef int mz = q_rows.shape[1]
    cdef int max_states = int(np.max(n_states_arr))

    decisions_arr = np.empty(trial_count, dtype=np.uint8)
    cdef uint8_t[::1] decisions = decisions_arr
    u_arr = np.empty(2 * n, dtype=np.float64)
    cdef double[::1] u = u_arr
    y_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] y = y_arr
    w_arr = np.empty(n, dtype=np.int8)
    cdef int8_t[::1] w = w_arr
    z_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] z = z_arr
    buf_a_arr = np.zeros(max_states, dtype=np.float64)
    buf_b_arr = np.zeros(max_states, dtype=np.float64)
    cdef double[::1] buf_a = buf_a_arr
    cdef double[::1] buf_b = buf_b_arr

    cdef int64_t t
    cdef int k, xb, yk, state
    cdef int dead0, dead1, dec
    cdef int64_t ex0, ex1
    cdef double sig0, sig1

    with nogil:
        for t in range(count_c):
            _fill_uniforms(seed_c, start_c + <uint64_t> t, 2 * n, &u[0])
            state = 0
            for k in range(n):
                xb = x_bits[theta_c, k]
                yk = _sample_symbol(&p_thresh[xb, 0], m - 1, u[k])
                y[k] = yk
                w[k] = g[off_g[k] + state]
                if not agree[k]:
                    state = trans[off_trans[k] + state * m + yk]
            for k in range(n):
                z[k] = _sample_symbol(&q_thresh[w[k], 0], mz - 1, u[n + k])
            _decode_one(&z[0], n, m, mz, 0, &x_bits[0, 0], &p_rows[0, 0],
                        &q_rows[0, 0], &n_states[0], &agree[0], &g[0],
                        &off_g[0], &trans[0], &off_trans[0], &buf_a[0],
                        &buf_b[0], &dead0, &ex0, &sig0)
            _decode_one(&z[0], n, m, mz, 1, &x_bits[0, 0], &p_rows[0, 0],
                        &q_rows[0, 0], &n_states[0], &agree[0], &g[0],
                        &off_g[0], &trans[0], &off_trans[0], &buf_a[0],
                        &buf_b[0], &dead1, &ex1, &sig1)
            if dead1:
                dec = 0
            elif dead0:
                dec = 1
            elif ex1 > ex0 or (ex1 == ex0 and sig1 > sig0):
                dec = 1
            else:
                dec = 0
            decisions[t] = <uint8_t> dec
    return decisions_arr


def search_protocols(cnp.ndarray py0_arr, cnp.ndarray py1_arr,
                     cnp.ndarray qzw_arr, cnp.ndarray offs_arr,
                     n, m, relay_bits):
    """Scan every relay map; return (map, pe0, pe1) minimizing pe0 + pe1."""
    cdef const double[::1] py0 = np.ascontiguousarray(py0_arr, dtype=np.float64)
    cdef const double[::1] py1 = np.ascontiguousarray(py1_arr, dtype=np.float64)
    cdef const double[:, ::1] qzw = np.ascontiguousarray(qzw_arr, dtype=np.float64)
    cdef const int64_t[::1] offs = np.ascontiguousarray(offs_arr, dtype=np.int64)
    cdef int n_c = <int> n
    cdef int m_c = <int> m
    cdef int bits = <int> relay_bits
    cdef uint64_t total = (<uint64_t> 1) << bits
    cdef int my = py0.shape[0]
    cdef int mzn = qzw.shape[0]
    cdef int wn = qzw.shape[1]

    idx_arr = np.empty((my, n_c), dtype=np.int64)
    cdef int64_t[:, ::1] idx = idx_arr
    cdef int yi, k, d, p_mk, rem, v
    for yi in range(my):
        rem = yi
        v = 0
        for k in range(n_c):
            p_mk = m_c ** (n_c - 1 - k)
            d = rem // p_mk
            rem -= d * p_mk
            idx[yi, k] = offs[k] + v
            v = v * m_c + d

    a0_arr = np.zeros(wn, dtype=np.float64)
    a1_arr = np.zeros(wn, dtype=np.float64)
    cdef double[::1] a0 = a0_arr
    cdef double[::1] a1 = a1_arr

    cdef uint64_t relay, best_relay = 0
    cdef int wv, zi
    cdef double pe0, pe1, l0, l1, tot_err
    cdef double best_sum = np.inf
    cdef double best_pe0 = 0.0, best_pe1 = 0.0
    cdef int found = 0

    with nogil:
        for relay in range(total):
            for wv in range(wn):
                a0[wv] = 0.0
                a1[wv] = 0.0
            for yi in range(my):
                wv = 0
                for k in range(n_c):
                    wv |= (<int> ((relay >> idx[yi, k]) & 1u)) << (n_c - 1 - k)
                a0[wv] += py0[yi]
                a1[wv] += py1[yi]
            pe0 = 0.0
            pe1 = 0.0
            for zi in range(mzn):
                l0 = 0.0
                l1 = 0.0
                for wv in range(wn):
                    l0 += a0[wv] * qzw[zi, wv]
                    l1 += a1[wv] * qzw[zi, wv]
                if l1 > l0:
                    pe0 += l0
                else:
                    pe1 += l1
            tot_err = pe0 + pe1
            if tot_err < best_sum:
                best_sum = tot_err
                best_relay = relay
                best_pe0 = pe0
                best_pe1 = pe1
                found = 1
    if not found:
        return -1, 0.0, 0.0
    return int(best_relay), best_pe0, best_pe1
