"""Binary forms on the tangent plane and the fundamental cubic form.

Conventions (fixed throughout): for a height jet f with f(0)=df(0)=0,

    Q  = f20/2 dx^2 + f11 dxdy + f02/2 dy^2
    C  = f30/6 dx^3 + f21/2 dx^2dy + f12/2 dxdy^2 + f03/6 dy^3
    H0 = f20 f02 - f11^2
    dH = (f30 f02 + f20 f12 - 2 f11 f21) dx + (f21 f02 + f20 f03 - 2 f11 f12) dy
    W  = 4 H0 C - Q dH

W is kept in exactly this representative (never renormalised); it is 4*H0
times the Q-traceless part of C away from parabolic points and equals -Q dH
on the parabolic curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import Jet2, jet_mul

__all__ = [
    "BinaryForm",
    "PointForms",
    "fundamental_quantities",
    "lambda_op",
    "split_cubic",
    "real_zero_lines",
    "resultant_qc",
    "fcf_coefficient_jets",
    "NonGenericError",
]


class NonGenericError(ValueError):
    """A genericity assumption fails beyond tolerance (no silent fallback)."""


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form sum a[k] dx^(d-k) dy^k of degree d in (dx, dy)."""

    degree: int
    a: tuple

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise ValueError("binary forms of degree 1..3 only")
        if len(self.a) != self.degree + 1:
            raise ValueError("coefficient count does not match degree")
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))

    def eval(self, dx: float, dy: float) -> float:
        acc = 0.0
        d = self.degree
        for k, ak in enumerate(self.a):
            acc += ak * dx ** (d - k) * dy**k
        return acc

    def scaled(self, s: float) -> "BinaryForm":
        return BinaryForm(self.degree, tuple(s * v for v in self.a))

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return BinaryForm(self.degree, tuple(x + y for x, y in zip(self.a, other.a)))

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        return self + other.scaled(-1.0)

    def max_abs(self) -> float:
        return max(abs(v) for v in self.a)

    def is_zero(self, tol: float) -> bool:
        return self.max_abs() <= tol

    def pullback(self, lin: np.ndarray) -> "BinaryForm":
        """Substitute (dx, dy) -> lin @ (dx', dy') (covariant coefficient change)."""
        lin = np.asarray(lin, dtype=float)
        d = self.degree
        out = [0.0] * (d + 1)
        # expand a[k] (a11 dx + a12 dy)^(d-k) (a21 dx + a22 dy)^k
        for k, ak in enumerate(self.a):
            if ak == 0.0:
                continue
            p1 = _pow_linear(lin[0, 0], lin[0, 1], d - k)
            p2 = _pow_linear(lin[1, 0], lin[1, 1], k)
            for i, ci in enumerate(p1):
                for j, cj in enumerate(p2):
                    out[i + j] += ak * ci * cj
        return BinaryForm(d, tuple(out))


def _pow_linear(u: float, v: float, n: int):
    """Coefficients of (u dx + v dy)^n in dy-degree order."""
    return [math.comb(n, k) * u ** (n - k) * v**k for k in range(n + 1)]


def product_qc(q: BinaryForm, l: BinaryForm) -> BinaryForm:
    """Product of a quadratic and a linear form (degree 3 result)."""
    if q.degree != 2 or l.degree != 1:
        raise ValueError("expected degree 2 * degree 1")
    q0, q1, q2 = q.a
    l0, l1 = l.a
    return BinaryForm(3, (q0 * l0, q0 * l1 + q1 * l0, q1 * l1 + q2 * l0, q2 * l1))


@dataclass(frozen=True)
class PointForms:
    """Pointwise tangent-plane data of a height jet."""

    Q: BinaryForm
    C: BinaryForm
    dH: BinaryForm
    H0: float
    W: BinaryForm


def fundamental_quantities(jet: Jet2) -> PointForms:
    """Q, C, H0, dH and W = 4 H0 C - Q dH from second/third derivatives.

    Only the coefficients with 2 <= i + j <= 3 are read, so the jet may carry
    arbitrary constant and linear terms (chart presentations included).
    """
    if jet.order < 3:
        raise ValueError("order >= 3 jet required")
    f20, f11, f02 = jet.f(2, 0), jet.f(1, 1), jet.f(0, 2)
    f30, f21, f12, f03 = jet.f(3, 0), jet.f(2, 1), jet.f(1, 2), jet.f(0, 3)
    q = BinaryForm(2, (f20 / 2.0, f11, f02 / 2.0))
    c = BinaryForm(3, (f30 / 6.0, f21 / 2.0, f12 / 2.0, f03 / 6.0))
    h0 = f20 * f02 - f11 * f11
    hx = f30 * f02 + f20 * f12 - 2.0 * f11 * f21
    hy = f21 * f02 + f20 * f03 - 2.0 * f11 * f12
    dh = BinaryForm(1, (hx, hy))
    w = c.scaled(4.0 * h0) - product_qc(q, dh)
    return PointForms(Q=q, C=c, dH=dh, H0=h0, W=w)


def lambda_op(q: BinaryForm, p: BinaryForm) -> BinaryForm | float:
    """Second-order operator of Q applied to a quadratic or cubic form.

    For Q = a dx^2 + 2b dxdy + c dy^2 this is c d^2/dx^2 - 2b d^2/dxdy
    + a d^2/dy^2 acting on forms in (dx, dy).  Normalisation check:
    lambda_op(Q, Q) = 4(ac - b^2) = H0.
    """
    if q.degree != 2:
        raise ValueError("first argument must be quadratic")
    a, b2, c = q.a  # b2 stores 2b
    b = b2 / 2.0
    if p.degree == 2:
        p0, p1, p2 = p.a
        return 2.0 * c * p0 - 2.0 * b * p1 + 2.0 * a * p2
    if p.degree == 3:
        p0, p1, p2, p3 = p.a
        lx = 6.0 * c * p0 - 4.0 * b * p1 + 2.0 * a * p2
        ly = 2.0 * c * p1 - 4.0 * b * p2 + 6.0 * a * p3
        return BinaryForm(1, (lx, ly))
    raise ValueError("second argument must have degree 2 or 3")


def split_cubic(q: BinaryForm, c: BinaryForm, tol: float = 1e-9):
    """Decompose C = Q L + Wminus with lambda_op(Q, Wminus) = 0.

    Valid only away from the parabolic locus: raises NonGenericError when
    the discriminant H_Q = lambda_op(Q, Q) is below tol relative to |Q|^2.
    """
    hq = lambda_op(q, q)
    scale = q.max_abs() ** 2
    if abs(hq) <= tol * max(scale, 1e-300):
        raise NonGenericError("splitting undefined at a parabolic point")
    lc = lambda_op(q, c)
    l = lc.scaled(1.0 / (2.0 * hq))
    wm = c - product_qc(q, l)
    return l, wm


def real_zero_lines(p: BinaryForm, merge_tol: float = 3e-6):
    """Real zero directions of a binary form as (angle in [0, pi), multiplicity).

    Closed-form root extraction (quadratic formula / trigonometric and
    Cardano branches selected by the discriminant sign) followed by one
    Newton polish per simple root.  merge_tol is the angular resolution:
    roots closer than this merge into a multiple root, and a complex pair
    splitting finer than it counts as a real double root.  A numerically
    zero form returns [] (caller treats it as the node flag).
    """
    scale = p.max_abs()
    if scale == 0.0:
        return []
    a = [v / scale for v in p.a]
    d = p.degree
    roots = _projective_roots(a, d, merge_tol)
    out = []
    for theta, mult in roots:
        theta = _polish_angle(a, d, theta, mult)
        out.append((theta % math.pi, mult))
    out.sort()
    return out


def _projective_roots(a, d, merge_tol):
    """Roots of a normalised binary form on RP^1 with multiplicities."""
    # dehomogenise with t = dy/dx: poly(t) = sum a[k] t^k; vanishing leading
    # coefficients are roots at t = infinity, i.e. the direction (0, 1).
    poly = list(a)  # poly[k] multiplies t^k
    inf_mult = 0
    while poly and abs(poly[-1]) <= 1e-13:
        poly.pop()
        inf_mult += 1
    angles = []
    if inf_mult:
        angles.append((math.pi / 2.0, inf_mult))
    deg = len(poly) - 1
    if deg == 1:
        angles.append(((math.atan(-poly[0] / poly[1])) % math.pi, 1))
    elif deg == 2:
        angles.extend(_quadratic_roots(poly, merge_tol))
    elif deg == 3:
        angles.extend(_cubic_roots(poly, merge_tol))
    angles.sort()
    final = []
    for th, m in angles:
        if final and _angle_dist(th, final[-1][0]) <= merge_tol:
            final[-1] = (final[-1][0], final[-1][1] + m)
        else:
            final.append((th, m))
    # angular wrap: first and last may straddle 0 ~ pi
    if len(final) > 1 and _angle_dist(final[0][0], final[-1][0]) <= merge_tol:
        th, m = final.pop()
        final[0] = (final[0][0], final[0][1] + m)
    return final


def _quadratic_roots(poly, merge_tol):
    c0, c1, c2 = poly
    disc = c1 * c1 - 4.0 * c0 * c2
    scale = max(abs(c0), abs(c1), abs(c2))
    if disc <= -(merge_tol**2) * scale * scale:
        return []
    if disc <= (merge_tol**2) * scale * scale:
        return [((math.atan(-c1 / (2.0 * c2))) % math.pi, 2)]
    r = math.sqrt(disc)
    # numerically stable pair
    qq = -0.5 * (c1 + math.copysign(r, c1))
    t1 = qq / c2
    t2 = c0 / qq if qq != 0.0 else -c1 / c2
    return [((math.atan(t1)) % math.pi, 1), ((math.atan(t2)) % math.pi, 1)]


def _cubic_roots(poly, merge_tol):
    d0, c, b, a = poly  # a t^3 + b t^2 + c t + d0
    disc = (
        18.0 * a * b * c * d0
        - 4.0 * b**3 * d0
        + b**2 * c**2
        - 4.0 * a * c**3
        - 27.0 * a**2 * d0**2
    )
    delta0 = b * b - 3.0 * a * c
    tol2 = merge_tol**2
    if abs(disc) <= tol2:
        # for a double root at gap g from the simple one, delta0 = g^2
        if abs(delta0) <= 10.0 * tol2:
            return [((math.atan(-b / (3.0 * a))) % math.pi, 3)]
        t_double = (9.0 * a * d0 - b * c) / (2.0 * delta0)
        t_simple = (4.0 * a * b * c - 9.0 * a * a * d0 - b**3) / (a * delta0)
        return [
            ((math.atan(t_double)) % math.pi, 2),
            ((math.atan(t_simple)) % math.pi, 1),
        ]
    shift = b / (3.0 * a)
    p = (3.0 * a * c - b * b) / (3.0 * a * a)
    q = (2.0 * b**3 - 9.0 * a * b * c + 27.0 * a * a * d0) / (27.0 * a**3)
    if disc > 0.0:
        # three distinct real roots: trigonometric branch
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg) / 3.0
        ts = [m * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
        return [((math.atan(t)) % math.pi, 1) for t in ts]
    # one real root: Cardano branch
    rad = math.sqrt(q * q / 4.0 + p**3 / 27.0)
    u = math.copysign(abs(-q / 2.0 + rad) ** (1.0 / 3.0), -q / 2.0 + rad)
    v = math.copysign(abs(-q / 2.0 - rad) ** (1.0 / 3.0), -q / 2.0 - rad)
    return [((math.atan(u + v - shift)) % math.pi, 1)]


def _angle_dist(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _polish_angle(a, d, theta, mult):
    """One or two Newton steps on g(theta) = P(cos theta, sin theta)."""
    if mult != 1:
        return theta  # multiple roots: closed-form location is the stable one
    for _ in range(2):
        ct, st = math.cos(theta), math.sin(theta)
        val = 0.0
        dval = 0.0
        for k, ak in enumerate(a):
            i = d - k
            val += ak * ct**i * st**k
            # derivative wrt theta
            term = 0.0
            if i:
                term -= ak * i * ct ** (i - 1) * st ** (k + 1)
            if k:
                term += ak * k * ct ** (i + 1) * st ** (k - 1)
            dval += term
        if dval == 0.0:
            break
        step = val / dval
        if abs(step) > 0.1:
            break
        theta -= step
    return theta


def resultant_qc(q: BinaryForm, c: BinaryForm) -> float:
    """Sylvester resultant of a quadratic and a cubic binary form.

    Vanishes exactly when they share a projective zero direction; on the
    hyperbolic side this is the flecnodal condition (an asymptotic line with
    higher contact).
    """
    q0, q1, q2 = q.a
    c0, c1, c2, c3 = c.a
    m = np.array(
        [
            [q0, q1, q2, 0.0, 0.0],
            [0.0, q0, q1, q2, 0.0],
            [0.0, 0.0, q0, q1, q2],
            [c0, c1, c2, c3, 0.0],
            [0.0, c0, c1, c2, c3],
        ]
    )
    return float(np.linalg.det(m))


def fcf_coefficient_jets(f: Jet2):
    """The four coefficient polynomials of the cubic-form field of a patch.

    For a polynomial patch z = f(x, y) the forms Q, C, dH and hence
    W = 4 H C - Q dH at a nearby point p = (x, y) are polynomials in p when
    expressed in the fixed chart coordinates (no re-framing).  This computes
    those coefficient polynomials exactly with jet arithmetic and returns
    (w0, w1, w2, w3) with W_p = w0(p) dx^3 + w1(p) dx^2dy + w2(p) dxdy^2
    + w3(p) dy^3.

    Inputs of order <= 6 lose no terms as long as the true coefficient
    polynomials have degree <= 6, which holds for every catalog patch.
    """
    n = f.order
    f20 = f.derivative(2, 0).extend(n)
    f11 = f.derivative(1, 1).extend(n)
    f02 = f.derivative(0, 2).extend(n)
    f30 = f.derivative(3, 0).extend(n)
    f21 = f.derivative(2, 1).extend(n)
    f12 = f.derivative(1, 2).extend(n)
    f03 = f.derivative(0, 3).extend(n)
    h = jet_mul(f20, f02) - jet_mul(f11, f11)
    hx = jet_mul(f30, f02) + jet_mul(f20, f12) - 2.0 * jet_mul(f11, f21)
    hy = jet_mul(f21, f02) + jet_mul(f20, f03) - 2.0 * jet_mul(f11, f12)
    # Q coefficients (f20/2, f11, f02/2), C coefficients (f30/6, f21/2, f12/2, f03/6)
    w0 = 4.0 * jet_mul(h, (1.0 / 6.0) * f30) - jet_mul(0.5 * f20, hx)
    w1 = (
        4.0 * jet_mul(h, 0.5 * f21)
        - jet_mul(0.5 * f20, hy)
        - jet_mul(f11, hx)
    )
    w2 = (
        4.0 * jet_mul(h, 0.5 * f12)
        - jet_mul(f11, hy)
        - jet_mul(0.5 * f02, hx)
    )
    w3 = 4.0 * jet_mul(h, (1.0 / 6.0) * f03) - jet_mul(0.5 * f02, hy)
    return w0, w1, w2, w3
