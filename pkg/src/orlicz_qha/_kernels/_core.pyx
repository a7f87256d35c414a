# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: one-sided Jacobi singular values and batched
Fock-basis displacement matrices. Mirrors _kernels.fallback exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs, exp

cnp.import_array()

BACKEND = "compiled"


def jacobi_singular_values(a, double tol=1e-12, int max_sweeps=100):
    """Singular values by cyclic one-sided Jacobi orthogonalization."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] work = np.array(
        a, dtype=np.complex128, order="C", copy=True
    )
    cdef Py_ssize_t rows = work.shape[0]
    cdef Py_ssize_t n = work.shape[1]
    cdef Py_ssize_t i, j, k, sweep
    cdef double aa, bb, absg, ref, tau, t, c, s, off
    cdef double complex g, phase, ci, cj
    if n >= 2:
        for sweep in range(max_sweeps):
            off = 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    aa = 0.0
                    bb = 0.0
                    g = 0.0
                    for k in range(rows):
                        ci = work[k, i]
                        cj = work[k, j]
                        aa += ci.real * ci.real + ci.imag * ci.imag
                        bb += cj.real * cj.real + cj.imag * cj.imag
                        g += ci.conjugate() * cj
                    ref = sqrt(aa * bb)
                    absg = fabs(g.real) if g.imag == 0 else sqrt(
                        g.real * g.real + g.imag * g.imag
                    )
                    if ref <= 0 or absg <= tol * ref:
                        continue
                    if absg / ref > off:
                        off = absg / ref
                    phase = g / absg
                    tau = (bb - aa) / (2.0 * absg)
                    if tau == 0.0:
                        t = 1.0
                    elif tau > 0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(rows):
                        ci = work[k, i]
                        cj = work[k, j] * phase.conjugate()
                        work[k, i] = c * ci - s * cj
                        work[k, j] = s * ci + c * cj
            if off <= tol:
                break
    sv = np.linalg.norm(np.asarray(work), axis=0)
    sv.sort()
    return sv[::-1].copy()


def displacement_batch(alphas, Py_ssize_t n):
    """Fock-basis displacement matrices D(alpha) for a batch of alphas."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] al = np.ascontiguousarray(
        alphas, dtype=np.complex128
    ).ravel()
    cdef Py_ssize_t K = al.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.zeros(
        (K, n, n), dtype=np.complex128
    )
    cdef Py_ssize_t q, k, m
    cdef double x, coef_a, coef_b
    cdef double complex a, pref, mirror, e, e_prev, e_next
    for q in range(K):
        a = al[q]
        x = a.real * a.real + a.imag * a.imag
        pref = exp(-0.5 * x)
        for k in range(n):
            if k > 0:
                pref = pref * a / sqrt(<double>k)
            if k == 0:
                mirror = 1.0
            elif x > 0:
                mirror = (-a.conjugate() / a) ** k
            else:
                mirror = 0.0
            e_prev = 0.0
            e = pref
            out[q, k, 0] = e
            out[q, 0, k] = e * mirror
            for m in range(0, n - 1 - k):
                coef_a = (2 * m + 1 + k - x) / sqrt(<double>((m + 1) * (m + 1 + k)))
                coef_b = sqrt(<double>(m * (m + k)) / <double>((m + 1) * (m + 1 + k)))
                e_next = coef_a * e - coef_b * e_prev
                e_prev = e
                e = e_next
                out[q, m + 1 + k, m + 1] = e
                out[q, m + 1, m + 1 + k] = e * mirror
    return out
