"""Numpy fallback backend for the batched jet kernel.

All functions operate on coefficient arrays of shape (M, P): M triangular
coefficients (see _layout) for P independent points.  Semantics match the
compiled backend in _kernel_cy exactly; tests assert agreement.
"""

import numpy as np

from . import _layout

BACKEND = "python"


def mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """Truncated product of two jet batches."""
    ko, ka, kb = _layout.mul_table(order)
    out = np.zeros_like(a)
    for o, x, y in zip(ko, ka, kb):
        out[o] += a[x] * b[y]
    return out


def compose(f: np.ndarray, u: np.ndarray, v: np.ndarray, order: int) -> np.ndarray:
    """f(u, v) truncated; u and v must have zero constant term."""
    pos = _layout.position(order)
    out = np.zeros_like(f)
    out[0] = f[0]
    upow = None
    for i in range(order + 1):
        if i == 1:
            upow = u
        elif i > 1:
            upow = mul(upow, u, order)
        term = upow
        for j in range(order + 1 - i):
            if j == 1:
                term = mul(term, v, order) if i else v
            elif j > 1:
                term = mul(term, v, order)
            if i == 0 and j == 0:
                continue
            out += f[pos[(i, j)]] * term
    return out


def invert(x: np.ndarray, y: np.ndarray, order: int):
    """Inverse of the planar map jet (x(s,t), y(s,t)).

    Requires zero constant terms and an invertible linear part; fixed-point
    iteration g <- M(id - N(g)) gains one correct order per pass.
    """
    pos = _layout.position(order)
    k10, k01 = pos[(1, 0)], pos[(0, 1)]
    a, b = x[k10], x[k01]
    c, d = y[k10], y[k01]
    det = a * d - b * c
    n1 = x.copy()
    n2 = y.copy()
    for k in (0, k10, k01):
        n1[k] = 0.0
        n2[k] = 0.0
    g1 = np.zeros_like(x)
    g2 = np.zeros_like(x)
    g1[k10] = d / det
    g1[k01] = -b / det
    g2[k10] = -c / det
    g2[k01] = a / det
    for _ in range(max(order - 1, 0)):
        h1 = compose(n1, g1, g2, order)
        h2 = compose(n2, g1, g2, order)
        r1 = -h1
        r2 = -h2
        r1[k10] += 1.0
        r2[k01] += 1.0
        g1 = (d * r1 - b * r2) / det
        g2 = (a * r2 - c * r1) / det
    return g1, g2


def monge(X: np.ndarray, Y: np.ndarray, Z: np.ndarray, order: int):
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
