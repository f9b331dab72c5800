"""Linear-adapted frame normalizations for node index formulas.

The closed-form index expressions assume specific tangent coordinates:
asymptotic axes with f11 = 1 at hyperbolic points, circular Q with no cubic
terms at elliptic nodes.  These routines apply the required linear (and, for
ellipnodes, projective) substitutions on jets and record the change of frame.
Outputs are linear-adapted, not orthonormal; every formula consuming them is
covariant under exactly these changes.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .forms import NonGenericError, fundamental_quantities, real_zero_lines, split_cubic
from .jets import Jet2, MapJet2, jet_compose, jet_mul
from .surface import MongeJet

__all__ = ["normalize_hyperbonode_frame", "normalize_ellipnode_frame"]


def _substitute(mj: MongeJet, m: np.ndarray) -> MongeJet:
    """Apply tangent substitution (x, y) = m @ (x', y') to the height jet."""
    f2 = jet_compose(mj.f, MapJet2.linear(mj.f.order, m))
    minv = np.linalg.inv(m)
    frame = mj.lin @ m
    return replace(
        mj,
        f=f2,
        lin=frame,
        dm=minv @ mj.dm,
        e1=frame[0, 0] * mj.e1 + frame[1, 0] * mj.e2,
        e2=frame[0, 1] * mj.e1 + frame[1, 1] * mj.e2,
    )


def _scale_height(mj: MongeJet, s: float) -> MongeJet:
    return replace(mj, f=s * mj.f)


def normalize_hyperbonode_frame(mj: MongeJet) -> MongeJet:
    """Send the asymptotic directions to the coordinate axes, scale f11 to 1.

    The output satisfies f20 = f02 = 0 exactly and f11 = 1; the two
    asymptotic directions (sorted by angle) become the x- and y-axis.  Index
    formulas downstream are invariant under the residual freedom (axis swap,
    axis rescaling).
    """
    f20, f11, f02 = mj.f.f(2, 0), mj.f.f(1, 1), mj.f.f(0, 2)
    h0 = f20 * f02 - f11 * f11
    scale = max(abs(f20), abs(f11), abs(f02)) ** 2
    if h0 >= -1e-9 * scale:
        raise NonGenericError("hyperbonode normalization requires a hyperbolic point")
    pf = fundamental_quantities(mj.f)
    lines = real_zero_lines(pf.Q)
    if len(lines) != 2:
        raise NonGenericError("could not separate the asymptotic directions")
    t1, t2 = lines[0][0], lines[1][0]
    m = np.array(
        [[math.cos(t1), math.cos(t2)], [math.sin(t1), math.sin(t2)]]
    )
    out = _substitute(mj, m)
    f11n = out.f.f(1, 1)
    if f11n == 0.0:
        raise NonGenericError("degenerate asymptotic frame")
    out = _scale_height(out, 1.0 / f11n)
    out.f.set_coeff(2, 0, 0.0)
    out.f.set_coeff(0, 2, 0.0)
    return out


def normalize_ellipnode_frame(mj: MongeJet, tol=1e-7) -> MongeJet:
    """Bring Q to (alpha/2)(x^2 + y^2) and absorb the cubic part.

    Requires an elliptic node: after the splitting C = QL + Wminus, the
    residual Wminus must be negligible.  The cubic is then cancelled by the
    projective chart change [x:y:z:w] -> [x:y:z:w + L], which on graphs acts
    as f -> (1 + L) f(x/(1+L), y/(1+L)).  Its derivative at the origin is the
    identity, so the frame data is untouched; order-4 coefficients pick up
    the -Q L^2 correction.  (A plain regraph z -> z/(1+L) also kills the
    cubic but is not projective and corrupts the quartic data the index
    formula reads.)
    """
    if mj.f.order < 4:
        raise ValueError("ellipnode normalization needs an order-4 jet")
    f20, f11, f02 = mj.f.f(2, 0), mj.f.f(1, 1), mj.f.f(0, 2)
    h0 = f20 * f02 - f11 * f11
    scale = max(abs(f20), abs(f11), abs(f02)) ** 2
    if h0 <= 1e-9 * scale:
        raise NonGenericError("ellipnode normalization requires an elliptic point")
    q = np.array([[f20, f11], [f11, f02]])
    evals, evecs = np.linalg.eigh(q)
    if np.linalg.det(evecs) < 0:
        evecs = evecs[:, ::-1]
        evals = evals[::-1]
    sgn = 1.0 if evals[0] > 0 else -1.0
    alpha = sgn * math.sqrt(evals[0] * evals[1])
    m = evecs @ np.diag(np.sqrt(alpha / evals))
    out = _substitute(mj, m)

    pf = fundamental_quantities(out.f)
    l, wm = split_cubic(pf.Q, pf.C)
    cscale = max(pf.C.max_abs(), abs(alpha))
    if wm.max_abs() > tol * cscale:
        raise NonGenericError(
            f"not an ellipnode: cubic residual {wm.max_abs():.3e} above tolerance"
        )
    n = out.f.order
    lx, ly = l.a
    ljet = Jet2.from_terms(n, {(1, 0): lx, (0, 1): ly})
    inv = Jet2.from_terms(n, {(0, 0): 1.0})
    power = Jet2.from_terms(n, {(0, 0): 1.0})
    for k in range(1, n + 1):
        power = jet_mul(power, ljet)
        inv = inv + ((-1.0) ** k) * power
    xr = jet_mul(Jet2.from_terms(n, {(1, 0): 1.0}), inv)
    yr = jet_mul(Jet2.from_terms(n, {(0, 1): 1.0}), inv)
    one_plus = Jet2.from_terms(n, {(0, 0): 1.0, (1, 0): lx, (0, 1): ly})
    f2 = jet_mul(jet_compose(out.f, MapJet2(xr, yr)), one_plus)
    # snap what the substitution made exact: circular Q, no cubic
    f2.set_coeff(2, 0, alpha / 2.0)
    f2.set_coeff(1, 1, 0.0)
    f2.set_coeff(0, 2, alpha / 2.0)
    for i, j in ((3, 0), (2, 1), (1, 2), (0, 3)):
        f2.set_coeff(i, j, 0.0)
    return replace(out, f=f2)
