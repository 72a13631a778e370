# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Must stay numerically interchangeable with _fallback.py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, ceil, cbrt, sqrt

cnp.import_array()

cdef double _BIG = 1e250
cdef double _SMALL = 1e-250


def miller_start(double x, long nmax):
    cdef long top = nmax if nmax > <long>ceil(x) else <long>ceil(x)
    cdef long start = top + 24 + <long>ceil(12.0 * cbrt(x)) + <long>ceil(sqrt(40.0 * top))
    if start % 2:
        start += 1
    return start


def bessel_jn_miller(double x, long nmax):
    """J_0(x) .. J_nmax(x) by downward recurrence normalised with J_0 + 2 sum J_2k = 1."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(nmax + 1, dtype=np.float64)
    cdef double[::1] j = out
    cdef long start, n, k
    cdef double jp1, jn, jm1, norm, sign
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    if x == 0.0:
        j[0] = 1.0
        return out
    sign = 1.0
    if x < 0.0:
        x = -x
        sign = -1.0
    if x < 1e-6:
        # two-term series; exact to round-off and avoids overflow in 2n/x
        jn = 1.0
        for n in range(nmax + 1):
            if n:
                jn *= 0.5 * x / n
            j[n] = jn * (1.0 - 0.25 * x * x / (n + 1))
        if sign < 0.0:
            for k in range(1, nmax + 1, 2):
                j[k] = -j[k]
        return out
    start = miller_start(x, nmax)
    jp1 = 0.0
    jn = 1e-300
    norm = 0.0
    for n in range(start, 0, -1):
        # jn holds J_n, produce J_{n-1}
        jm1 = (2.0 * n / x) * jn - jp1
        if n <= nmax:
            j[n] = jn
        if n % 2 == 0:
            norm += 2.0 * jn
        jp1 = jn
        jn = jm1
        if fabs(jn) > _BIG:
            jn *= _SMALL
            jp1 *= _SMALL
            norm *= _SMALL
            for k in range(n, nmax + 1):
                j[k] *= _SMALL
    j[0] = jn
    norm += jn
    for k in range(nmax + 1):
        j[k] /= norm
    if sign < 0.0:
        for k in range(1, nmax + 1, 2):
            j[k] = -j[k]
    return out


cdef inline void _hop(const double complex[::1] psi, double complex[::1] out,
                      const double[::1] g, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t n, J, M = g.shape[0]
    cdef double complex acc
    cdef double gJ
    for n in range(size):
        acc = 0.0
        for J in range(1, M + 1):
            gJ = g[J - 1]
            if n + J < size:
                acc = acc + gJ * psi[n + J]
            if n - J >= 0:
                acc = acc + gJ * psi[n - J]
        # d psi/dt = -i H psi
        out[n] = -1j * acc


def rk4_hopping(psi0, couplings, double h, long nsteps):
    """Classical 4-stage Runge-Kutta for i dpsi/dt = H psi on an open chain."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] psi_arr = np.array(psi0, dtype=np.complex128, copy=True)
    cdef double[::1] g = np.ascontiguousarray(couplings, dtype=np.float64)
    cdef Py_ssize_t size = psi_arr.shape[0], n
    cdef long step
    cdef double complex[::1] psi = psi_arr
    cdef double complex[::1] k1 = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] k2 = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] k3 = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] k4 = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] tmp = np.empty(size, dtype=np.complex128)
    cdef double half = 0.5 * h, sixth = h / 6.0
    with nogil:
        for step in range(nsteps):
            _hop(psi, k1, g, size)
            for n in range(size):
                tmp[n] = psi[n] + half * k1[n]
            _hop(tmp, k2, g, size)
            for n in range(size):
                tmp[n] = psi[n] + half * k2[n]
            _hop(tmp, k3, g, size)
            for n in range(size):
                tmp[n] = psi[n] + h * k3[n]
            _hop(tmp, k4, g, size)
            for n in range(size):
                psi[n] = psi[n] + sixth * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n])
    return psi_arr


def airy_taylor(x0, y0, dy0, h, int max_terms=80):
    """Continue a solution of y'' = x y from (x0, y0, y0') by a step h.

    All arguments are broadcast float arrays; returns (y, y') at x0 + h.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] X0, Y0, D0, H
    X0, Y0, D0, H = [np.ascontiguousarray(a, dtype=np.float64).ravel()
                     for a in np.broadcast_arrays(x0, y0, dy0, h)]
    shape = np.broadcast(x0, y0, dy0, h).shape
    cdef Py_ssize_t i, size = X0.shape[0]
    cdef int k, quiet
    cdef cnp.ndarray[cnp.float64_t, ndim=1] Y = np.empty(size)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] D = np.empty(size)
    cdef double a_km1, a_k, a_kp1, a_kp2, hk, s, ds, term, dterm, xx, hh
    for i in range(size):
        xx = X0[i]
        hh = H[i]
        # coefficients a_0, a_1, a_2 of the local Taylor series
        a_km1 = Y0[i]
        a_k = D0[i]
        a_kp1 = 0.5 * xx * a_km1
        s = a_km1 + a_k * hh + a_kp1 * hh * hh
        ds = a_k + 2.0 * a_kp1 * hh
        hk = hh * hh
        quiet = 0
        # a_{k+2} = (x0 a_k + a_{k-1}) / ((k+2)(k+1)), starting at k = 1
        for k in range(1, max_terms):
            a_kp2 = (xx * a_k + a_km1) / ((k + 2.0) * (k + 1.0))
            dterm = (k + 2.0) * a_kp2 * hk
            hk = hk * hh
            term = a_kp2 * hk
            s += term
            ds += dterm
            a_km1 = a_k
            a_k = a_kp1
            a_kp1 = a_kp2
            # single coefficients vanish in patterns, so demand three quiet terms in a row
            if fabs(term) + fabs(dterm * hh) <= 1e-18 * (fabs(s) + fabs(ds * hh)):
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
        Y[i] = s
        D[i] = ds
    return Y.reshape(shape), D.reshape(shape)
