# cython: language_level=3
"""Compiled twin of _kernel_py: same API, typed loops for the hot product.

The truncated product is the kernel everything else reduces to; it runs as
a fused C loop over the multiplication table instead of one fancy-indexed
numpy expression per table row.  compose/invert/monge follow the numpy
backend line for line (same operations in the same order), so the two
backends agree bit for bit and the parity tests can demand exact equality.
"""

import numpy as np

cimport cython
cimport numpy as cnp

from . import _layout

cnp.import_array()

BACKEND = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
cdef void _mul_into(double[:, ::1] out, double[:, ::1] a, double[:, ::1] b,
                    const int[::1] ko, const int[::1] ka,
                    const int[::1] kb) noexcept nogil:
    cdef Py_ssize_t nt = ko.shape[0]
    cdef Py_ssize_t npts = out.shape[1]
    cdef Py_ssize_t t, p
    cdef Py_ssize_t o, x, y
    for t in range(nt):
        o = ko[t]
        x = ka[t]
        y = kb[t]
        for p in range(npts):
            out[o, p] += a[x, p] * b[y, p]


def mul(a, b, int order):
    """Truncated product of two jet batches."""
    cdef cnp.ndarray[double, ndim=2] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] bb = np.ascontiguousarray(b, dtype=np.float64)
    ko, ka, kb = _layout.mul_table(order)
    cdef cnp.ndarray[double, ndim=2] out = np.zeros_like(aa)
    _mul_into(out, aa, bb, ko, ka, kb)
    return out


@cython.boundscheck(False)
@cython.wraparound(False)
cdef void _axpy_rows(double[:, ::1] out, double[::1] coef,
                     double[:, ::1] term) noexcept nogil:
    # out[r, p] += coef[p] * term[r, p], the broadcasted accumulation step
    cdef Py_ssize_t R = out.shape[0]
    cdef Py_ssize_t P = out.shape[1]
    cdef Py_ssize_t r, p
    for r in range(R):
        for p in range(P):
            out[r, p] += coef[p] * term[r, p]


def compose(f, u, v, int order):
    """f(u, v) truncated; u and v must have zero constant term."""
    cdef cnp.ndarray[double, ndim=2] ff = np.ascontiguousarray(f, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] vv = np.ascontiguousarray(v, dtype=np.float64)
    ko, ka, kb = _layout.mul_table(order)
    pos = _layout.position(order)
    cdef cnp.ndarray[double, ndim=2] out = np.zeros_like(ff)
    out[0] = ff[0]
    cdef cnp.ndarray[double, ndim=2] upow = np.empty_like(ff)
    cdef cnp.ndarray[double, ndim=2] term = np.empty_like(ff)
    cdef cnp.ndarray[double, ndim=2] scratch = np.empty_like(ff)
    cdef int i, j
    for i in range(order + 1):
        if i == 1:
            upow[...] = uu
        elif i > 1:
            scratch[...] = 0.0
            _mul_into(scratch, upow, uu, ko, ka, kb)
            upow, scratch = scratch, upow
        if i > 0:
            term[...] = upow
        for j in range(order + 1 - i):
            if j == 1:
                if i:
                    scratch[...] = 0.0
                    _mul_into(scratch, term, vv, ko, ka, kb)
                    term, scratch = scratch, term
                else:
                    term[...] = vv
            elif j > 1:
                scratch[...] = 0.0
                _mul_into(scratch, term, vv, ko, ka, kb)
                term, scratch = scratch, term
            if i == 0 and j == 0:
                continue
            _axpy_rows(out, ff[pos[(i, j)]], term)
    return out


@cython.boundscheck(False)
@cython.wraparound(False)
cdef void _invert_step(double[:, ::1] g1, double[:, ::1] g2,
                       double[:, ::1] h1, double[:, ::1] h2,
                       double[::1] a, double[::1] b,
                       double[::1] c, double[::1] d,
                       double[::1] det,
                       Py_ssize_t k10, Py_ssize_t k01) noexcept nogil:
    # g1 = (d (id1 - h1) - b (id2 - h2)) / det and the g2 analogue, where
    # id1/id2 are the coordinate jets (1 only in the linear slot)
    cdef Py_ssize_t R = g1.shape[0]
    cdef Py_ssize_t P = g1.shape[1]
    cdef Py_ssize_t r, p
    cdef double r1, r2
    for r in range(R):
        for p in range(P):
            r1 = -h1[r, p]
            r2 = -h2[r, p]
            if r == k10:
                r1 += 1.0
            if r == k01:
                r2 += 1.0
            g1[r, p] = (d[p] * r1 - b[p] * r2) / det[p]
            g2[r, p] = (a[p] * r2 - c[p] * r1) / det[p]


def invert(x, y, int order):
    """Inverse of the planar map jet (x(s,t), y(s,t)).

    Requires zero constant terms and an invertible linear part; fixed-point
    iteration g <- M(id - N(g)) gains one correct order per pass.
    """
    pos = _layout.position(order)
    cdef Py_ssize_t k10 = pos[(1, 0)]
    cdef Py_ssize_t k01 = pos[(0, 1)]
    cdef cnp.ndarray[double, ndim=2] xx = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] yy = np.ascontiguousarray(y, dtype=np.float64)
    a, b = xx[k10].copy(), xx[k01].copy()
    c, d = yy[k10].copy(), yy[k01].copy()
    det = a * d - b * c
    n1 = xx.copy()
    n2 = yy.copy()
    for k in (0, k10, k01):
        n1[k] = 0.0
        n2[k] = 0.0
    cdef cnp.ndarray[double, ndim=2] g1 = np.zeros_like(xx)
    cdef cnp.ndarray[double, ndim=2] g2 = np.zeros_like(xx)
    with np.errstate(divide="ignore", invalid="ignore"):
        g1[k10] = d / det
        g1[k01] = -b / det
        g2[k10] = -c / det
        g2[k01] = a / det
    for _ in range(max(order - 1, 0)):
        h1 = compose(n1, g1, g2, order)
        h2 = compose(n2, g1, g2, order)
        _invert_step(g1, g2, h1, h2, a, b, c, d, det, k10, k01)
    return g1, g2


def monge(X, Y, Z, int order):
    """Monge reduction of batched position jets.

    Given jets of a parametrised surface at P base points, build the
    orthonormal frame (e1, e2, n) with n = t1 x t2 normalised, express the
    displacement in tangent/normal coordinates and regraph: f(x, y) is the
    height over the tangent plane with f(0)=df(0)=0.

    Returns (f, base, e1, e2, nrm, dm, bad): dm is the 2x2 linear map from
    parameter increments to tangent coordinates, bad flags rank-deficient
    points (their columns are garbage and must not be used).
    """
    pos = _layout.position(order)
    k10, k01 = pos[(1, 0)], pos[(0, 1)]
    base = np.stack([X[0], Y[0], Z[0]])
    t1 = np.stack([X[k10], Y[k10], Z[k10]])
    t2 = np.stack([X[k01], Y[k01], Z[k01]])
    nrm = np.cross(t1, t2, axis=0)
    nn = np.linalg.norm(nrm, axis=0)
    s1 = np.linalg.norm(t1, axis=0)
    s2 = np.linalg.norm(t2, axis=0)
    bad = nn <= 1e-12 * s1 * s2
    safe = np.where(bad, 1.0, nn)
    nrm = nrm / safe
    e1 = t1 / np.where(s1 == 0, 1.0, s1)
    e2 = np.cross(nrm, e1, axis=0)
    X0, Y0, Z0 = X.copy(), Y.copy(), Z.copy()
    X0[0] = 0.0
    Y0[0] = 0.0
    Z0[0] = 0.0
    xj = e1[0] * X0 + e1[1] * Y0 + e1[2] * Z0
    yj = e2[0] * X0 + e2[1] * Y0 + e2[2] * Z0
    hj = nrm[0] * X0 + nrm[1] * Y0 + nrm[2] * Z0
    # bad columns produce garbage (possibly inf/nan) by contract; keep the
    # batch path silent and let callers honour the flag
    with np.errstate(divide="ignore", invalid="ignore"):
        g1, g2 = invert(xj, yj, order)
        f = compose(hj, g1, g2, order)
    f[0] = 0.0
    f[k10] = 0.0
    f[k01] = 0.0
    dm = np.stack([
        np.stack([xj[k10], xj[k01]]),
        np.stack([yj[k10], yj[k01]]),
    ])
    return f, base, e1, e2, nrm, dm, bad
