# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: collocation propagation of linear Hamiltonian flows."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef int _solve_inplace(double* M, double* R, int size, int nrhs) noexcept nogil:
    """Gaussian elimination with partial pivoting; R is overwritten by M^{-1} R."""
    cdef int col, row, piv, k, c
    cdef double best, tmp, f
    for col in range(size):
        piv = col
        best = fabs(M[col * size + col])
        for row in range(col + 1, size):
            tmp = fabs(M[row * size + col])
            if tmp > best:
                best = tmp
                piv = row
        if best == 0.0:
            return -1
        if piv != col:
            for k in range(size):
                tmp = M[col * size + k]
                M[col * size + k] = M[piv * size + k]
                M[piv * size + k] = tmp
            for c in range(nrhs):
                tmp = R[col * nrhs + c]
                R[col * nrhs + c] = R[piv * nrhs + c]
                R[piv * nrhs + c] = tmp
        for row in range(col + 1, size):
            f = M[row * size + col] / M[col * size + col]
            if f != 0.0:
                for k in range(col, size):
                    M[row * size + k] -= f * M[col * size + k]
                for c in range(nrhs):
                    R[row * nrhs + c] -= f * R[col * nrhs + c]
    for col in range(size - 1, -1, -1):
        for c in range(nrhs):
            tmp = R[col * nrhs + c]
            for k in range(col + 1, size):
                tmp -= M[col * size + k] * R[k * nrhs + c]
            R[col * nrhs + c] = tmp / M[col * size + col]
    return 0


def collocation_propagate(double[:, :, :, ::1] stage_mats, double h,
                          double[:, ::1] a, double[::1] b):
    """Cumulative fundamental matrices for y' = A(t) y.

    stage_mats[k, i] holds A at the i-th collocation time of step k.
    Returns an array of shape (N + 1, d, d) with the identity first.
    """
    cdef Py_ssize_t N = stage_mats.shape[0]
    cdef int s = <int>stage_mats.shape[1]
    cdef int d = <int>stage_mats.shape[2]
    cdef int size = s * d
    cdef Py_ssize_t k
    cdef int i, j, r, c, l, status = 0
    cdef double acc

    out_arr = np.zeros((N + 1, d, d))
    cdef double[:, :, ::1] out = out_arr
    for r in range(d):
        out[0, r, r] = 1.0

    cdef double* M = <double*>malloc(size * size * sizeof(double))
    cdef double* R = <double*>malloc(size * d * sizeof(double))
    cdef double* Phi = <double*>malloc(d * d * sizeof(double))
    if M == NULL or R == NULL or Phi == NULL:
        free(M); free(R); free(Phi)
        raise MemoryError()
    try:
        with nogil:
            for k in range(N):
                for i in range(s):
                    for j in range(s):
                        for r in range(d):
                            for c in range(d):
                                M[(i * d + r) * size + j * d + c] = -h * a[i, j] * stage_mats[k, i, r, c]
                    for r in range(d):
                        M[(i * d + r) * size + i * d + r] += 1.0
                        for c in range(d):
                            R[(i * d + r) * d + c] = stage_mats[k, i, r, c]
                if _solve_inplace(M, R, size, d) != 0:
                    status = -1
                    break
                for r in range(d):
                    for c in range(d):
                        acc = 1.0 if r == c else 0.0
                        for i in range(s):
                            acc += h * b[i] * R[(i * d + r) * d + c]
                        Phi[r * d + c] = acc
                for r in range(d):
                    for c in range(d):
                        acc = 0.0
                        for l in range(d):
                            acc += Phi[r * d + l] * out[k, l, c]
                        out[k + 1, r, c] = acc
    finally:
        free(M); free(R); free(Phi)
    if status != 0:
        raise ZeroDivisionError("singular collocation system")
    return out_arr


def max_symplectic_defect(double[:, :, ::1] path):
    """max_k || Y_k^T J Y_k - J ||_inf over a stack of 2n x 2n matrices."""
    cdef Py_ssize_t N = path.shape[0]
    cdef int d = <int>path.shape[1]
    cdef int n = d // 2
    cdef Py_ssize_t k
    cdef int r, c, l
    cdef double acc, jrc, worst = 0.0, diff
    with nogil:
        for k in range(N):
            for r in range(d):
                for c in range(d):
                    # (Y^T J Y)[r, c] = sum_l Y[l, r] * (J Y)[l, c], (J Y)[l] = -Y[l+n] (l<n), Y[l-n] (l>=n)
                    acc = 0.0
                    for l in range(n):
                        acc += -path[k, l, r] * path[k, l + n, c] + path[k, l + n, r] * path[k, l, c]
                    if r < n and c == r + n:
                        jrc = -1.0
                    elif r >= n and c == r - n:
                        jrc = 1.0
                    else:
                        jrc = 0.0
                    diff = fabs(acc - jrc)
                    if diff > worst:
                        worst = diff
    return worst
