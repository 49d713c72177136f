# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernel; mirrors fallback.py op for op and draw for draw."""

from libc.math cimport cos, sin, sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 MASK63 = 0x7FFFFFFFFFFFFFFFULL

cdef inline u64 _mix(u64 *state) nogil:
    cdef u64 z
    state[0] = state[0] + 0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)

cdef inline double _next_double(u64 *state) nogil:
    return (_mix(state) >> 11) * (1.0 / 9007199254740992.0)

cdef inline int _popcount(u64 v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c

cdef inline void _pauli_inplace(double complex[::1] state, u64 x, u64 z, Py_ssize_t dim) nogil:
    # P = i^{|x&z|} X^x Z^z applied in place
    cdef int k = _popcount(x & z) & 3
    cdef double complex base
    if k == 0:
        base = 1.0
    elif k == 1:
        base = 1j
    elif k == 2:
        base = -1.0
    else:
        base = -1j
    cdef Py_ssize_t b, p
    cdef double complex tmp, pa, pb
    if x == 0:
        for b in range(dim):
            if _popcount(z & <u64>b) & 1:
                state[b] = -base * state[b]
            else:
                state[b] = base * state[b]
        return
    for b in range(dim):
        p = b ^ <Py_ssize_t>x
        if p > b:
            pa = base
            if _popcount(z & <u64>p) & 1:
                pa = -base
            pb = base
            if _popcount(z & <u64>b) & 1:
                pb = -base
            tmp = state[b]
            state[b] = pa * state[p]
            state[p] = pb * tmp

cdef inline void _rot_inplace(double complex[::1] state, u64 x, u64 z, double theta, Py_ssize_t dim) nogil:
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef int k = _popcount(x & z) & 3
    cdef double complex f  # -i sin * i^k
    if k == 0:
        f = -1j * s
    elif k == 1:
        f = s
    elif k == 2:
        f = 1j * s
    else:
        f = -s
    cdef Py_ssize_t b, p
    cdef double complex tmp, fa, fb
    if x == 0:
        for b in range(dim):
            if _popcount(z & <u64>b) & 1:
                state[b] = (c - f) * state[b]
            else:
                state[b] = (c + f) * state[b]
        return
    for b in range(dim):
        p = b ^ <Py_ssize_t>x
        if p > b:
            fa = f
            if _popcount(z & <u64>p) & 1:
                fa = -f
            fb = f
            if _popcount(z & <u64>b) & 1:
                fb = -f
            tmp = state[b]
            state[b] = c * tmp + fa * state[p]
            state[p] = c * state[p] + fb * tmp

cdef inline void _h_inplace(double complex[::1] state, int w, Py_ssize_t dim) nogil:
    cdef Py_ssize_t b, p
    cdef u64 mask = (<u64>1) << w
    cdef double r = 1.0 / sqrt(2.0)
    cdef double complex tmp
    for b in range(dim):
        if not (b & mask):
            p = b | mask
            tmp = state[b]
            state[b] = (tmp + state[p]) * r
            state[p] = (tmp - state[p]) * r

cdef inline void _cx_inplace(double complex[::1] state, int c, int t, Py_ssize_t dim) nogil:
    cdef Py_ssize_t b, p
    cdef u64 cm = (<u64>1) << c
    cdef u64 tm = (<u64>1) << t
    cdef double complex tmp
    for b in range(dim):
        if (b & cm) and not (b & tm):
            p = b | tm
            tmp = state[b]
            state[b] = state[p]
            state[p] = tmp

cdef inline double _prob_one(double complex[::1] state, int w, Py_ssize_t dim) nogil:
    cdef double acc = 0.0
    cdef u64 mask = (<u64>1) << w
    cdef Py_ssize_t b
    for b in range(dim):
        if b & mask:
            acc += state[b].real * state[b].real + state[b].imag * state[b].imag
    return acc

cdef inline void _collapse(double complex[::1] state, int w, int outcome, Py_ssize_t dim) nogil:
    cdef u64 mask = (<u64>1) << w
    cdef double nrm = 0.0
    cdef Py_ssize_t b
    for b in range(dim):
        if ((b & mask) != 0) != (outcome != 0):
            state[b] = 0.0
        else:
            nrm += state[b].real * state[b].real + state[b].imag * state[b].imag
    nrm = 1.0 / sqrt(nrm)
    for b in range(dim):
        state[b] = state[b] * nrm


def run_shot_kernel(
    int n_wires,
    cnp.ndarray[cnp.int32_t, ndim=1] code,
    cnp.ndarray[cnp.int32_t, ndim=1] wa,
    cnp.ndarray[cnp.int32_t, ndim=1] wb,
    cnp.ndarray[cnp.uint64_t, ndim=1] xmask,
    cnp.ndarray[cnp.uint64_t, ndim=1] zmask,
    cnp.ndarray[cnp.float64_t, ndim=1] angle,
    cnp.ndarray[cnp.int32_t, ndim=1] bit,
    cnp.ndarray[cnp.int32_t, ndim=1] value,
    cnp.ndarray[cnp.uint8_t, ndim=1] entangler,
    cnp.ndarray[cnp.int8_t, ndim=1] bits,
    u64 seed,
    double p2,
    double spam,
):
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_wires
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] state_arr = np.zeros(dim, dtype=np.complex128)
    state_arr[0] = 1.0
    cdef double complex[::1] state = state_arr
    cdef u64 rng = seed
    cdef Py_ssize_t i
    cdef int op, outcome, e, pa, pb
    cdef double p1
    cdef u64 ex, ez
    cdef Py_ssize_t n_ops = code.shape[0]
    for i in range(n_ops):
        op = code[i]
        if op == 0:
            _rot_inplace(state, xmask[i], zmask[i], angle[i], dim)
        elif op == 1:
            _h_inplace(state, wa[i], dim)
        elif op == 2:
            _pauli_inplace(state, xmask[i], zmask[i], dim)
        elif op == 3:
            _cx_inplace(state, wa[i], wb[i], dim)
        elif op == 4:
            p1 = _prob_one(state, wa[i], dim)
            outcome = 1 if _next_double(&rng) < p1 else 0
            _collapse(state, wa[i], outcome, dim)
            if spam > 0.0 and _next_double(&rng) < spam:
                outcome ^= 1
            bits[bit[i]] = <cnp.int8_t>outcome
        elif op == 5:
            p1 = _prob_one(state, wa[i], dim)
            if p1 < 1e-12:
                outcome = 0
            elif p1 > 1.0 - 1e-12:
                outcome = 1
            else:
                outcome = 1 if _next_double(&rng) < p1 else 0
            _collapse(state, wa[i], outcome, dim)
            if outcome == 1:
                _pauli_inplace(state, (<u64>1) << wa[i], 0, dim)
        elif op == 6:
            if bits[bit[i]] == value[i]:
                _pauli_inplace(state, xmask[i], zmask[i], dim)
        if entangler[i] and p2 > 0.0 and _next_double(&rng) < p2:
            e = 1 + <int>(_next_double(&rng) * 15.0)
            if e > 15:
                e = 15
            ex = 0
            ez = 0
            pa = e & 3
            pb = e >> 2
            if pa == 1 or pa == 2:
                ex |= (<u64>1) << wa[i]
            if pa == 2 or pa == 3:
                ez |= (<u64>1) << wa[i]
            if pb == 1 or pb == 2:
                ex |= (<u64>1) << wb[i]
            if pb == 2 or pb == 3:
                ez |= (<u64>1) << wb[i]
            _pauli_inplace(state, ex, ez, dim)
    return state_arr
