# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the NumPy kernels in ``_numpy.py``.

Same contracts, same Neumann closures; plain C loops instead of array
expressions.  Keep the two implementations in lockstep.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"


def thomas_solve(lower, diag, upper, rhs):
    cdef double[::1] lo = np.ascontiguousarray(lower, dtype=np.float64)
    cdef double[::1] di = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] up = np.ascontiguousarray(upper, dtype=np.float64)
    cdef double[::1] q = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = di.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] dscratch = np.empty(n, dtype=np.float64)
    cdef double[::1] yscratch = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double m
    dscratch[0] = di[0]
    yscratch[0] = q[0]
    for i in range(1, n):
        m = lo[i] / dscratch[i - 1]
        dscratch[i] = di[i] - m * up[i - 1]
        yscratch[i] = q[i] - m * yscratch[i - 1]
    x[n - 1] = yscratch[n - 1] / dscratch[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (yscratch[i] - up[i] * x[i + 1]) / dscratch[i]
    return out


def laplacian_1d(u, double dx):
    cdef double[::1] v = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double inv = 1.0 / (dx * dx)
    cdef Py_ssize_t i
    for i in range(1, n - 1):
        o[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv
    o[0] = 2.0 * (v[1] - v[0]) * inv
    o[n - 1] = 2.0 * (v[n - 2] - v[n - 1]) * inv
    return out


def laplacian_2d(u, double dx, double dy):
    cdef double[:, ::1] v = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double invx = 1.0 / (dx * dx), invy = 1.0 / (dy * dy)
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(ny):
        for j in range(nx):
            if 0 < j < nx - 1:
                acc = (v[i, j - 1] - 2.0 * v[i, j] + v[i, j + 1]) * invx
            elif j == 0:
                acc = 2.0 * (v[i, 1] - v[i, 0]) * invx
            else:
                acc = 2.0 * (v[i, nx - 2] - v[i, nx - 1]) * invx
            if 0 < i < ny - 1:
                acc += (v[i - 1, j] - 2.0 * v[i, j] + v[i + 1, j]) * invy
            elif i == 0:
                acc += 2.0 * (v[1, j] - v[0, j]) * invy
            else:
                acc += 2.0 * (v[ny - 2, j] - v[ny - 1, j]) * invy
            o[i, j] = acc
    return out


cdef inline void _upwind_row(
    const double* c, const double* h, double b, double dx,
    Py_ssize_t n, Py_ssize_t stride, double* out, bint accumulate,
) noexcept nogil:
    """Upwind flux divergence along one line of a field (stride-addressed)."""
    cdef Py_ssize_t i
    cdef double v, fl, fr
    cdef double inv = 1.0 / dx
    # fl/fr are the fluxes through the left and right faces of node i.
    fl = 0.0
    for i in range(n):
        if i < n - 1:
            v = b * (h[(i + 1) * stride] - h[i * stride]) * inv
            if v > 0.0:
                fr = v * c[i * stride]
            else:
                fr = v * c[(i + 1) * stride]
        else:
            fr = 0.0
        if i == 0:
            if accumulate:
                out[0] += -fr * 2.0 * inv
            else:
                out[0] = -fr * 2.0 * inv
        elif i == n - 1:
            if accumulate:
                out[i * stride] += fl * 2.0 * inv
            else:
                out[i * stride] = fl * 2.0 * inv
        else:
            if accumulate:
                out[i * stride] += -(fr - fl) * inv
            else:
                out[i * stride] = -(fr - fl) * inv
        fl = fr


def upwind_divergence_1d(c, h, double b, double dx):
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    _upwind_row(&cv[0], &hv[0], b, dx, n, 1, &o[0], False)
    return out


def upwind_divergence_2d(c, h, double b, double dx, double dy):
    cdef double[:, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef Py_ssize_t ny = cv.shape[0], nx = cv.shape[1]
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    for i in range(ny):
        _upwind_row(&cv[i, 0], &hv[i, 0], b, dx, nx, 1, &o[i, 0], False)
    for j in range(nx):
        _upwind_row(&cv[0, j], &hv[0, j], b, dy, ny, nx, &o[0, j], True)
    return out


def weighted_laplacian_1d(z, face_w, double dx):
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[::1] fw = np.ascontiguousarray(face_w, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double inv = 1.0 / (dx * dx)
    cdef Py_ssize_t i
    cdef double fl, fr
    fl = 0.0
    for i in range(n):
        fr = fw[i] * (zv[i + 1] - zv[i]) if i < n - 1 else 0.0
        if i == 0:
            o[0] = 2.0 * fr * inv
        elif i == n - 1:
            o[i] = -2.0 * fl * inv
        else:
            o[i] = (fr - fl) * inv
        fl = fr
    return out


def weighted_laplacian_2d(z, face_wx, face_wy, double dx, double dy):
    cdef double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[:, ::1] fwx = np.ascontiguousarray(face_wx, dtype=np.float64)
    cdef double[:, ::1] fwy = np.ascontiguousarray(face_wy, dtype=np.float64)
    cdef Py_ssize_t ny = zv.shape[0], nx = zv.shape[1]
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double invx = 1.0 / (dx * dx), invy = 1.0 / (dy * dy)
    cdef Py_ssize_t i, j
    cdef double fl, fr
    for i in range(ny):
        fl = 0.0
        for j in range(nx):
            fr = fwx[i, j] * (zv[i, j + 1] - zv[i, j]) if j < nx - 1 else 0.0
            if j == 0:
                o[i, 0] = 2.0 * fr * invx
            elif j == nx - 1:
                o[i, j] = -2.0 * fl * invx
            else:
                o[i, j] = (fr - fl) * invx
            fl = fr
    for j in range(nx):
        fl = 0.0
        for i in range(ny):
            fr = fwy[i, j] * (zv[i + 1, j] - zv[i, j]) if i < ny - 1 else 0.0
            if i == 0:
                o[0, j] += 2.0 * fr * invy
            elif i == ny - 1:
                o[i, j] += -2.0 * fl * invy
            else:
                o[i, j] += (fr - fl) * invy
            fl = fr
    return out
