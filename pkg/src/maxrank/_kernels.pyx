# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels.

Mirrors _kernels_py with the same floating-point expression structure so
both implementations produce bitwise-identical Bellman sweeps.
"""

from libc.math cimport INFINITY
from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc, qsort

HAVE_COMPILED = True


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*> a)[0]
    cdef double y = (<const double*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def link_sweep(const int64_t[::1] offsets, const int64_t[::1] targets,
               const double[::1] pi, double[::1] out):
    """out[j] = sum over links x->j of pi[x]/D_x; returns dangling mass."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t i
    cdef int64_t lo, hi, k
    cdef double c, dangling = 0.0
    with nogil:
        for i in range(n):
            out[i] = 0.0
        for i in range(n):
            lo = offsets[i]
            hi = offsets[i + 1]
            if hi == lo:
                dangling += pi[i]
            else:
                c = pi[i] / (hi - lo)
                for k in range(lo, hi):
                    out[targets[k]] += c
    return dangling


cdef void _page(const int64_t* tg, const double* v, int64_t D, double cbase,
                double gamma, double alpha, double tterm,
                double* scratch, double* val_out, int64_t* ds_out) noexcept nogil:
    cdef int64_t d, k, dbest
    cdef double w0, wbest, w, s
    if D == 0:
        # dangling page: the only action keeps nothing and pays no penalty
        val_out[0] = cbase + tterm
        ds_out[0] = 0
        return
    for k in range(D):
        scratch[k] = v[tg[k]]
    qsort(scratch, D, sizeof(double), _cmp_double)
    w0 = cbase + gamma + tterm
    wbest = INFINITY
    dbest = 0
    s = 0.0
    for d in range(1, D + 1):
        s += scratch[d - 1]
        w = (cbase + gamma * (D - d) / D) + (alpha / d) * s
        if w < wbest:
            wbest = w
            dbest = d
    if w0 <= wbest:
        val_out[0] = w0
        ds_out[0] = 0
    else:
        val_out[0] = wbest
        ds_out[0] = dbest


cdef int64_t _max_degree(const int64_t[::1] offsets, Py_ssize_t start,
                         Py_ssize_t end) noexcept nogil:
    cdef int64_t maxdeg = 0, d
    cdef Py_ssize_t i
    for i in range(start, end):
        d = offsets[i + 1] - offsets[i]
        if d > maxdeg:
            maxdeg = d
    return maxdeg


def bellman_sweep_jacobi_range(const int64_t[::1] offsets,
                               const int64_t[::1] targets,
                               const double[::1] v, const double[::1] cbase,
                               double gamma, double alpha, double tterm,
                               double[::1] out, int64_t[::1] dstar,
                               Py_ssize_t start, Py_ssize_t end):
    """Jacobi sweep restricted to pages [start, end); for threaded callers."""
    cdef Py_ssize_t i
    cdef int64_t maxdeg
    cdef double* scratch
    with nogil:
        maxdeg = _max_degree(offsets, start, end)
        scratch = <double*> malloc((maxdeg if maxdeg > 0 else 1) * sizeof(double))
        if scratch != NULL:
            for i in range(start, end):
                _page(&targets[0] + offsets[i] if targets.shape[0] else NULL,
                      &v[0], offsets[i + 1] - offsets[i], cbase[i], gamma,
                      alpha, tterm, scratch, &out[i], &dstar[i])
            free(scratch)
    if scratch == NULL:
        raise MemoryError


def bellman_sweep_jacobi(const int64_t[::1] offsets, const int64_t[::1] targets,
                         const double[::1] v, const double[::1] cbase,
                         double gamma, double alpha, double tterm,
                         double[::1] out, int64_t[::1] dstar):
    """Full Jacobi sweep: out, dstar filled from the frozen iterate v."""
    bellman_sweep_jacobi_range(offsets, targets, v, cbase, gamma, alpha,
                               tterm, out, dstar, 0, offsets.shape[0] - 1)


def bellman_sweep_gs(const int64_t[::1] offsets, const int64_t[::1] targets,
                     double[::1] v, const double[::1] cbase,
                     double gamma, double alpha, double tterm,
                     int64_t[::1] dstar):
    """Gauss-Seidel sweep: v updated in place in page order."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t i
    cdef int64_t maxdeg
    cdef double* scratch
    with nogil:
        maxdeg = _max_degree(offsets, 0, n)
        scratch = <double*> malloc((maxdeg if maxdeg > 0 else 1) * sizeof(double))
        if scratch != NULL:
            for i in range(n):
                _page(&targets[0] + offsets[i] if targets.shape[0] else NULL,
                      &v[0], offsets[i + 1] - offsets[i], cbase[i], gamma,
                      alpha, tterm, scratch, &v[i], &dstar[i])
            free(scratch)
    if scratch == NULL:
        raise MemoryError
