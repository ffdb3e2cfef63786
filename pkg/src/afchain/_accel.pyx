# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulation kernels: matrix-product QR recurrences and the
renormalized affine iteration. Semantics mirror ``afchain._accel_fallback``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, exp, sqrt

cnp.import_array()

DEF MAXD = 64

cdef double TINY = 1e-300


def qr_accumulate(cnp.complex128_t[:, :, ::1] mats,
                  cnp.complex128_t[:, ::1] q,
                  double[:, ::1] logs,
                  Py_ssize_t renorm_period):
    cdef Py_ssize_t m = mats.shape[0]
    cdef Py_ssize_t d = q.shape[0]
    cdef Py_ssize_t event = 0
    cdef Py_ssize_t t, i, j, k
    cdef double complex work[MAXD * MAXD]
    cdef double complex c
    cdef double nrm2, nrm
    if d > MAXD:
        raise ValueError("kernel supports dimensions up to %d" % MAXD)

    for t in range(m):
        # q <- mats[t] @ q
        for i in range(d):
            for j in range(d):
                c = 0
                for k in range(d):
                    c = c + mats[t, i, k] * q[k, j]
                work[i * d + j] = c
        for i in range(d):
            for j in range(d):
                q[i, j] = work[i * d + j]

        if (t + 1) % renorm_period == 0 or t == m - 1:
            # modified Gram-Schmidt, columns left to right
            for j in range(d):
                for i in range(j):
                    c = 0
                    for k in range(d):
                        c = c + q[k, i].conjugate() * q[k, j]
                    for k in range(d):
                        q[k, j] = q[k, j] - c * q[k, i]
                nrm2 = 0.0
                for k in range(d):
                    nrm2 += q[k, j].real * q[k, j].real + q[k, j].imag * q[k, j].imag
                nrm = sqrt(nrm2)
                if nrm <= TINY:
                    return event
                logs[event, j] = log(nrm)
                for k in range(d):
                    q[k, j] = q[k, j] / nrm
            event += 1
    return -1


def affine_accumulate(cnp.complex128_t[:, :, ::1] amats,
                      cnp.complex128_t[:, ::1] rvecs,
                      cnp.complex128_t[::1] xhat,
                      double lognorm,
                      double[::1] increments):
    cdef Py_ssize_t m = amats.shape[0]
    cdef Py_ssize_t d = xhat.shape[0]
    cdef Py_ssize_t t, i, k
    cdef double complex w[MAXD]
    cdef double complex c
    cdef double nrm, step, scale
    if d > MAXD:
        raise ValueError("kernel supports dimensions up to %d" % MAXD)

    for t in range(m):
        if lognorm > -690.0:
            scale = exp(-lognorm)
            for i in range(d):
                c = 0
                for k in range(d):
                    c = c + amats[t, i, k] * xhat[k]
                w[i] = c + scale * rvecs[t, i]
            nrm = 0.0
            for i in range(d):
                nrm += w[i].real * w[i].real + w[i].imag * w[i].imag
            nrm = sqrt(nrm)
            step = log(nrm)
        else:
            scale = exp(lognorm)
            for i in range(d):
                c = 0
                for k in range(d):
                    c = c + amats[t, i, k] * xhat[k]
                w[i] = scale * c + rvecs[t, i]
            nrm = 0.0
            for i in range(d):
                nrm += w[i].real * w[i].real + w[i].imag * w[i].imag
            nrm = sqrt(nrm)
            step = log(nrm) - lognorm
        increments[t] = step
        lognorm += step
        for i in range(d):
            xhat[i] = w[i] / nrm
    return lognorm
