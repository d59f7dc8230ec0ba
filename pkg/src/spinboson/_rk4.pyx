# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled RK4 kernel for sparse-Liouvillian propagation.

Hot loop of the master-equation oracle: fixed-step classical RK4 on
y'(t) = L y with L in CSR form, fused with the per-step re-hermitization of
y viewed as a (d, d) row-major matrix. Matrix-vector products are threaded
over rows (OpenMP) once the matrix is large enough to amortise the fork;
each row sum stays sequential, so results are independent of the thread
count. The pure-Python twin lives in ``_rk4_py.py``; ``_kernels.py`` picks
whichever is importable.
"""

import numpy as np

from cython.parallel import prange

BACKEND_NAME = "cython"

# below this many nonzeros the OpenMP fork costs more than it saves
DEF PARALLEL_NNZ_MIN = 200000


cdef void _csr_matvec_serial(const double complex[::1] data, const int[::1] indices,
                             const int[::1] indptr, const double complex[::1] x,
                             double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, p
    cdef double complex acc
    for i in range(n):
        acc = 0
        for p in range(indptr[i], indptr[i + 1]):
            acc = acc + data[p] * x[indices[p]]
        out[i] = acc


cdef void _csr_matvec_parallel(const double complex[::1] data, const int[::1] indices,
                               const int[::1] indptr, const double complex[::1] x,
                               double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, p
    cdef double complex acc
    for i in prange(n, schedule="static"):
        acc = 0
        for p in range(indptr[i], indptr[i + 1]):
            acc = acc + data[p] * x[indices[p]]
        out[i] = acc


cdef inline void _matvec(bint parallel,
                         const double complex[::1] data, const int[::1] indices,
                         const int[::1] indptr, const double complex[::1] x,
                         double complex[::1] out) noexcept nogil:
    if parallel:
        _csr_matvec_parallel(data, indices, indptr, x, out)
    else:
        _csr_matvec_serial(data, indices, indptr, x, out)


def rk4_propagate(const double complex[::1] data, const int[::1] indices,
                  const int[::1] indptr, double complex[::1] y, double dt,
                  Py_ssize_t n_steps, Py_ssize_t herm_dim):
    """Advance y by n_steps RK4 steps of y' = L y, in place; returns y.

    herm_dim > 0 re-hermitizes y as a (herm_dim, herm_dim) matrix after each
    step.
    """
    cdef Py_ssize_t n = y.shape[0]
    k1_arr = np.empty(n, dtype=np.complex128)
    k2_arr = np.empty(n, dtype=np.complex128)
    k3_arr = np.empty(n, dtype=np.complex128)
    k4_arr = np.empty(n, dtype=np.complex128)
    yt_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] k1 = k1_arr
    cdef double complex[::1] k2 = k2_arr
    cdef double complex[::1] k3 = k3_arr
    cdef double complex[::1] k4 = k4_arr
    cdef double complex[::1] yt = yt_arr
    cdef bint parallel = data.shape[0] >= PARALLEL_NNZ_MIN
    # the RK4 update coefficients are real, so the stage combinations act
    # identically on the interleaved real/imaginary doubles (and vectorise)
    cdef double* yd = <double*> &y[0]
    cdef double* k1d = <double*> &k1[0]
    cdef double* k2d = <double*> &k2[0]
    cdef double* k3d = <double*> &k3[0]
    cdef double* k4d = <double*> &k4[0]
    cdef double* ytd = <double*> &yt[0]
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t n2 = 2 * n
    cdef Py_ssize_t step, i, j
    cdef double complex avg
    with nogil:
        for step in range(n_steps):
            _matvec(parallel, data, indices, indptr, y, k1)
            for i in range(n2):
                ytd[i] = yd[i] + half * k1d[i]
            _matvec(parallel, data, indices, indptr, yt, k2)
            for i in range(n2):
                ytd[i] = yd[i] + half * k2d[i]
            _matvec(parallel, data, indices, indptr, yt, k3)
            for i in range(n2):
                ytd[i] = yd[i] + dt * k3d[i]
            _matvec(parallel, data, indices, indptr, yt, k4)
            for i in range(n2):
                yd[i] = yd[i] + sixth * (k1d[i] + 2.0 * (k2d[i] + k3d[i]) + k4d[i])
            if herm_dim > 0:
                for i in range(herm_dim):
                    for j in range(i, herm_dim):
                        avg = 0.5 * (y[i * herm_dim + j] + y[j * herm_dim + i].conjugate())
                        y[i * herm_dim + j] = avg
                        y[j * herm_dim + i] = avg.conjugate()
    return np.asarray(y)
