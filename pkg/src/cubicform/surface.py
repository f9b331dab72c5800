"""Surface sources and Monge reduction.

Three kinds of input surface are supported: polynomial graph patches
z = f(x, y) on a rectangle, parametrised tori (doubly 2pi-periodic), and
radial graphs over the unit sphere presented as a cube-sphere atlas of six
square charts.  Every kind can be queried for position jets of order <= 6 at
batches of chart points; eval_monge_jet reduces those to the height function
over the tangent plane in an orthonormal adapted frame, which is the input
convention for all pointwise formulas downstream.

Orientation: closed surfaces use the outward normal (the chart embeddings
below are arranged so t_u x t_v points outward); patches use the upward
normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _layout, kernel
from .jets import Jet2

__all__ = [
    "SurfaceError",
    "SurfaceSpec",
    "MongePatch",
    "ParametricTorus",
    "RadialSphere",
    "MongeJet",
    "MongeBatch",
    "monge_grid",
    "eval_monge_jet",
    "catalog",
    "CATALOG_NAMES",
]


class SurfaceError(ValueError):
    """Degenerate or invalid surface input."""


# ---------------------------------------------------------------------------
# batched jet builders (coefficient arrays of shape (M, n))

def _zeros(order, n):
    return np.zeros((_layout.size(order), n))


def _const(vals, order):
    vals = np.atleast_1d(np.asarray(vals, dtype=float))
    out = _zeros(order, vals.shape[0])
    out[0] = vals
    return out


def _coord(vals, which, order):
    """Jet of u0 + du (which='u') or v0 + dv (which='v')."""
    out = _const(vals, order)
    pos = _layout.position(order)
    out[pos[(1, 0) if which == "u" else (0, 1)]] = 1.0
    return out


def _phase_jet(kind, phase, cu, cv, order):
    """Jet batch of sin/cos(phase + cu*du + cv*dv).

    Uses d^k sin(w)/dw^k = sin(w + k pi/2) (cos is sin shifted by pi/2).
    """
    if kind not in ("sin", "cos"):
        raise ValueError(kind)
    phase = np.atleast_1d(np.asarray(phase, dtype=float))
    out = _zeros(order, phase.shape[0])
    shift = 0.0 if kind == "sin" else math.pi / 2.0
    for (i, j), k in _layout.position(order).items():
        scale = cu**i * cv**j / (math.factorial(i) * math.factorial(j))
        if scale != 0.0:
            out[k] = np.sin(phase + shift + (i + j) * math.pi / 2.0) * scale
    return out


def _series(coeffs, t, order):
    """Horner evaluation sum_k coeffs[k] * t^k for a zero-constant jet t."""
    acc = _const(coeffs[-1] * np.ones(t.shape[1]), order)
    for k in range(len(coeffs) - 2, -1, -1):
        acc = kernel.mul(acc, t, order)
        acc[0] += coeffs[k]
    return acc


def _drop_const(t):
    out = t.copy()
    out[0] = 0.0
    return out


def _inv_sqrt(w, order):
    """Jet batch of w^(-1/2) for w with positive constant term."""
    w0 = w[0]
    if np.any(w0 <= 0):
        raise SurfaceError("inverse square root of non-positive value")
    coeffs = [np.power(w0, -0.5)]
    for k in range(order):
        coeffs.append(coeffs[-1] * (-0.5 - k) / ((k + 1) * w0))
    return _series(coeffs, _drop_const(w), order)


def _exp_jet(w, order):
    """Jet batch of exp(w)."""
    e0 = np.exp(w[0])
    coeffs = [e0]
    for k in range(order):
        coeffs.append(coeffs[-1] / (k + 1))
    return _series(coeffs, _drop_const(w), order)


def _poly_shift(terms, u, v, order):
    """Jet batch of a fixed polynomial re-centred at (u, v) (exact)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = _zeros(order, u.shape[0])
    pos = _layout.position(order)
    for (i, j), c in terms.items():
        if c == 0.0:
            continue
        for k in range(i + 1):
            xk = c * math.comb(i, k) * u ** (i - k)
            for l in range(j + 1):
                if k + l <= order:
                    out[pos[(k, l)]] += xk * math.comb(j, l) * v ** (j - l)
    return out


# ---------------------------------------------------------------------------
# surface kinds

class SurfaceSpec:
    """Base class: a chart atlas with jet-evaluable embeddings."""

    kind = "abstract"
    closed = False

    def charts(self):
        raise NotImplementedError

    def domain(self, chart):
        """(u0, u1, v0, v1) bounds of the chart square."""
        raise NotImplementedError

    def periodic(self, chart):
        return (False, False)

    def raw_jets(self, chart, u, v, order):
        """Position jets (X, Y, Z), each an (M, n) coefficient array."""
        raise NotImplementedError

    def points(self, chart, u, v):
        X, Y, Z = self.raw_jets(chart, np.atleast_1d(u), np.atleast_1d(v), 0)
        return np.stack([X[0], Y[0], Z[0]])

    def param_from_point(self, chart, point):
        """Chart parameters of a surface point (inverse of the embedding)."""
        raise NotImplementedError

    def describe(self):
        return {"kind": self.kind}


class MongePatch(SurfaceSpec):
    """Graph z = f(x, y) of a fixed polynomial over a rectangle."""

    kind = "MongePatch"

    def __init__(self, terms, domain=(-0.5, 0.5, -0.5, 0.5)):
        self.terms = {tuple(k): float(c) for k, c in terms.items() if float(c) != 0.0}
        deg = max((i + j for (i, j) in self.terms), default=0)
        if deg > _layout.MAX_ORDER:
            raise SurfaceError(f"patch degree {deg} exceeds supported order")
        self._domain = tuple(float(b) for b in domain)

    def charts(self):
        return ("xy",)

    def domain(self, chart):
        return self._domain

    def raw_jets(self, chart, u, v, order):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (
            _coord(u, "u", order),
            _coord(v, "v", order),
            _poly_shift(self.terms, u, v, order),
        )

    def height_jet(self, order=4):
        """The defining polynomial as a Jet2 at the origin."""
        jet = Jet2(order)
        for (i, j), c in self.terms.items():
            if i + j <= order:
                jet.set_coeff(i, j, c)
        return jet

    def param_from_point(self, chart, point):
        return (float(point[0]), float(point[1]))

    def describe(self):
        return {
            "kind": self.kind,
            "terms": {f"{i},{j}": c for (i, j), c in sorted(self.terms.items())},
            "domain": list(self._domain),
        }


class ParametricTorus(SurfaceSpec):
    """Torus of revolution with an optional tube-radius modulation.

    position(u, v) = ((R + rho cos v) cos u, (R + rho cos v) sin u, rho sin v)
    rho(u, v) = r * (1 + eps * (cos 3u + 0.5 sin(2u + 2v)))

    eps = 0 is the exact revolution torus.  The modulation mixes u and v so
    that for eps > 0 no mirror symmetry survives: characteristic points are
    isolated and the fixture is generic.
    """

    kind = "ParametricTorus"
    closed = True

    def __init__(self, R=2.0, r=1.0, eps=0.0):
        if not (R > r > 0):
            raise SurfaceError("torus requires R > r > 0")
        if abs(eps) > 0.2:
            raise SurfaceError("torus modulation eps out of range (|eps| <= 0.2)")
        self.R = float(R)
        self.r = float(r)
        self.eps = float(eps)

    def charts(self):
        return ("uv",)

    def domain(self, chart):
        return (0.0, 2.0 * math.pi, 0.0, 2.0 * math.pi)

    def periodic(self, chart):
        return (True, True)

    def raw_jets(self, chart, u, v, order):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        cu = _phase_jet("cos", u, 1.0, 0.0, order)
        su = _phase_jet("sin", u, 1.0, 0.0, order)
        cv = _phase_jet("cos", v, 0.0, 1.0, order)
        sv = _phase_jet("sin", v, 0.0, 1.0, order)
        if self.eps != 0.0:
            c3u = _phase_jet("cos", 3.0 * u, 3.0, 0.0, order)
            s2uv = _phase_jet("sin", 2.0 * u + 2.0 * v, 2.0, 2.0, order)
            rho = (self.r * self.eps) * (c3u + 0.5 * s2uv)
            rho[0] += self.r
        else:
            rho = _const(np.full(u.shape, self.r), order)
        ring = kernel.mul(rho, cv, order)
        ring[0] += self.R
        return (
            kernel.mul(ring, cu, order),
            kernel.mul(ring, su, order),
            kernel.mul(rho, sv, order),
        )

    def param_from_point(self, chart, point):
        u = math.atan2(point[1], point[0]) % (2.0 * math.pi)
        s = math.hypot(point[0], point[1])
        v = math.atan2(point[2], s - self.R) % (2.0 * math.pi)
        return (u, v)

    def describe(self):
        return {"kind": self.kind, "R": self.R, "r": self.r, "eps": self.eps}


# cube-sphere face embeddings: chart -> (u, v) |-> pre-normalisation vector.
# Component order chosen per face so that t_u x t_v points outward.
_FACES = ("+x", "-x", "+y", "-y", "+z", "-z")


def _face_embed(chart, uj, vj, one):
    if chart == "+x":
        return (one, uj, vj)
    if chart == "-x":
        return (-one, vj, uj)
    if chart == "+y":
        return (vj, one, uj)
    if chart == "-y":
        return (uj, -one, vj)
    if chart == "+z":
        return (uj, vj, one)
    if chart == "-z":
        return (vj, uj, -one)
    raise SurfaceError(f"unknown cube-sphere chart {chart!r}")


# fixed generic cubic used by the radial-sphere fixture; no symmetry on
# purpose (symmetric profiles produce non-isolated characteristic points)
_SPHERE_CUBIC = {
    (3, 0, 0): 0.9,
    (2, 1, 0): -0.5,
    (2, 0, 1): 0.7,
    (1, 2, 0): 0.3,
    (1, 1, 1): -0.8,
    (1, 0, 2): 0.2,
    (0, 3, 0): -0.6,
    (0, 2, 1): 0.4,
    (0, 1, 2): -0.3,
    (0, 0, 3): 0.5,
}

# localized groove (elongated valley) for the hyperbolic-island variant.
# Across the groove the curvature flips at strength a / w^2 > 1 while the
# shoulder rebound only reinforces convexity; along the groove the length
# window contributes a / R^2 << 1, so the hyperbolic set is a single oval
# strip over the valley floor.  (A dent or bump flips curvature on an
# annular shoulder instead, and a windowed quadratic saddle sprouts lobes
# through the window-tail Hessian, which is scale-free in the width.)
_ISLAND_CENTER = np.array([0.25, 0.40, 0.88])
_ISLAND_CENTER = _ISLAND_CENTER / np.linalg.norm(_ISLAND_CENTER)
_ISLAND_AUX = np.array([0.7, -0.5, 0.6])
_ISLAND_E1 = _ISLAND_AUX - (_ISLAND_AUX @ _ISLAND_CENTER) * _ISLAND_CENTER
_ISLAND_E1 = _ISLAND_E1 / np.linalg.norm(_ISLAND_E1)
_ISLAND_E2 = np.cross(_ISLAND_CENTER, _ISLAND_E1)
# depth / width^2 = 1.5 sets the curvature flip across the groove; the
# length window (1 - t)^5 with t = |d - c|^2 / R^2 is compactly supported
# (kills the antipodal lobe) and C^4 at the seam, so 4-jets stay smooth
_ISLAND_A = 0.06
_ISLAND_W = 0.2
_ISLAND_R = 0.9
_ISLAND_P = 5


class RadialSphere(SurfaceSpec):
    """Radial graph rho(d) * d over the unit sphere, cube-sphere atlas.

    rho(d) = 1 + eps * cubic(d) [- groove(d) if island], with a fixed generic
    cubic profile.  The island variant carves a localized groove (a Gaussian
    valley across one tangent direction, compactly windowed along the other)
    whose cross-Hessian drives one principal curvature negative over the
    valley floor, giving a single hyperbolic island bounded by one closed
    parabolic curve.
    """

    kind = "RadialSphere"
    closed = True

    def __init__(self, eps=0.03, island=False):
        if not 0.0 <= eps <= 0.1:
            raise SurfaceError("radial sphere requires 0 <= eps <= 0.1")
        self.eps = float(eps)
        self.island = bool(island)

    def charts(self):
        return _FACES

    def domain(self, chart):
        return (-1.0, 1.0, -1.0, 1.0)

    def raw_jets(self, chart, u, v, order):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        uj = _coord(u, "u", order)
        vj = _coord(v, "v", order)
        one = _const(np.ones(u.shape), order)
        ex, ey, ez = _face_embed(chart, uj, vj, one)
        nn = (
            kernel.mul(ex, ex, order)
            + kernel.mul(ey, ey, order)
            + kernel.mul(ez, ez, order)
        )
        inv = _inv_sqrt(nn, order)
        d = [kernel.mul(e, inv, order) for e in (ex, ey, ez)]
        rho = _const(np.ones(u.shape), order)
        if self.eps != 0.0:
            cub = _zeros(order, u.shape[0])
            for (i, j, k), c in _SPHERE_CUBIC.items():
                term = one
                for comp, p in zip(d, (i, j, k)):
                    for _ in range(p):
                        term = kernel.mul(term, comp, order)
                cub += c * term
            rho = rho + self.eps * cub
        if self.island:
            q1 = (
                _ISLAND_E1[0] * d[0] + _ISLAND_E1[1] * d[1] + _ISLAND_E1[2] * d[2]
            )
            # (d - c) . e1 = d . e1 since e1 is orthogonal to the centre;
            # |d - c|^2 = 2 (1 - d.c), and the antipode (where q1 = 0 as
            # well) sits at t > 1, outside the support
            ccos = (
                _ISLAND_CENTER[0] * d[0]
                + _ISLAND_CENTER[1] * d[1]
                + _ISLAND_CENTER[2] * d[2]
            )
            ccos[0] -= 1.0
            g = _exp_jet(
                -kernel.mul(q1, q1, order) / (2.0 * _ISLAND_W**2), order
            )
            b = (2.0 / _ISLAND_R**2) * ccos
            b[0] += 1.0
            outside = b[0] <= 0.0
            bp = b
            for _ in range(_ISLAND_P - 1):
                bp = kernel.mul(bp, b, order)
            bp[:, outside] = 0.0
            rho = rho - _ISLAND_A * kernel.mul(g, bp, order)
        return tuple(kernel.mul(rho, comp, order) for comp in d)

    def param_from_point(self, chart, point):
        d = np.asarray(point, dtype=float)
        d = d / np.linalg.norm(d)
        if chart == "+x":
            return (d[1] / d[0], d[2] / d[0])
        if chart == "-x":
            return (-d[2] / d[0], -d[1] / d[0])
        if chart == "+y":
            return (d[2] / d[1], d[0] / d[1])
        if chart == "-y":
            return (-d[0] / d[1], -d[2] / d[1])
        if chart == "+z":
            return (d[0] / d[2], d[1] / d[2])
        if chart == "-z":
            return (-d[1] / d[2], -d[0] / d[2])
        raise SurfaceError(f"unknown cube-sphere chart {chart!r}")

    def best_chart(self, point):
        """The face chart whose axis is most aligned with the direction."""
        d = np.asarray(point, dtype=float)
        axis = int(np.argmax(np.abs(d)))
        return ("+" if d[axis] > 0 else "-") + "xyz"[axis]

    def describe(self):
        return {"kind": self.kind, "eps": self.eps, "island": self.island}


# ---------------------------------------------------------------------------
# Monge reduction

@dataclass
class MongeJet:
    """Height jet over the tangent plane in an adapted frame.

    f has zero constant and linear parts.  dm maps chart increments to the
    tangent coordinates of f (used to pull tangent-plane directions back to
    the parameter plane).  lin records any linear tangent-frame substitution
    applied after the orthonormal reduction (identity for raw evaluations);
    columns of lin are the current coordinate axes expressed in the original
    orthonormal frame.
    """

    chart: str
    param: tuple
    base: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    n: np.ndarray
    f: Jet2
    dm: np.ndarray
    lin: np.ndarray = field(default_factory=lambda: np.eye(2))

    @property
    def order(self):
        return self.f.order


@dataclass
class MongeBatch:
    """Column-parallel Monge data for a batch of chart points."""

    chart: str
    u: np.ndarray
    v: np.ndarray
    f: np.ndarray          # (M, n) height jet coefficients
    base: np.ndarray       # (3, n)
    e1: np.ndarray
    e2: np.ndarray
    n: np.ndarray
    dm: np.ndarray         # (2, 2, n)
    bad: np.ndarray        # (n,) rank-deficient flags
    order: int

    def jet(self, i) -> MongeJet:
        if self.bad[i]:
            raise SurfaceError("rank-deficient Jacobian (not an immersion)")
        return MongeJet(
            chart=self.chart,
            param=(float(self.u[i]), float(self.v[i])),
            base=self.base[:, i].copy(),
            e1=self.e1[:, i].copy(),
            e2=self.e2[:, i].copy(),
            n=self.n[:, i].copy(),
            f=Jet2(self.order, self.f[:, i]),
            dm=self.dm[:, :, i].copy(),
        )


def monge_grid(spec: SurfaceSpec, chart, u, v, order=4) -> MongeBatch:
    """Monge reduction at a batch of chart points."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    X, Y, Z = spec.raw_jets(chart, u, v, order)
    f, base, e1, e2, nrm, dm, bad = kernel.monge(X, Y, Z, order)
    return MongeBatch(
        chart=chart, u=u, v=v, f=f, base=base, e1=e1, e2=e2, n=nrm,
        dm=dm, bad=bad, order=order,
    )


def eval_monge_jet(spec: SurfaceSpec, param, order=4, chart=None, frame_angle=0.0) -> MongeJet:
    """MongeJet at a single chart point.

    frame_angle rotates the parameter increments before reduction, which
    rotates the initial tangent basis; used to assert frame covariance.
    """
    if chart is None:
        chart = spec.charts()[0]
    u0, v0 = float(param[0]), float(param[1])
    X, Y, Z = spec.raw_jets(chart, np.array([u0]), np.array([v0]), order)
    if frame_angle != 0.0:
        ca, sa = math.cos(frame_angle), math.sin(frame_angle)
        pos = _layout.position(order)
        ru = np.zeros((_layout.size(order), 1))
        rv = np.zeros((_layout.size(order), 1))
        ru[pos[(1, 0)], 0] = ca
        ru[pos[(0, 1)], 0] = -sa
        rv[pos[(1, 0)], 0] = sa
        rv[pos[(0, 1)], 0] = ca
        X = kernel.compose(X, ru, rv, order)
        Y = kernel.compose(Y, ru, rv, order)
        Z = kernel.compose(Z, ru, rv, order)
    f, base, e1, e2, nrm, dm, bad = kernel.monge(X, Y, Z, order)
    if bad[0]:
        raise SurfaceError("rank-deficient Jacobian (not an immersion)")
    return MongeJet(
        chart=chart,
        param=(u0, v0),
        base=base[:, 0],
        e1=e1[:, 0],
        e2=e2[:, 0],
        n=nrm[:, 0],
        f=Jet2(order, f[:, 0]),
        dm=dm[:, :, 0],
    )


# ---------------------------------------------------------------------------
# catalog

def _genericity(cond, margin, message):
    if abs(cond) <= margin:
        raise SurfaceError(f"genericity violation: {message}")


_GENERICITY_MARGIN = 1e-6

CATALOG_NAMES = (
    "platonova",
    "lp_hyperbonode",
    "ot_hyperbonode",
    "pre_hyperbonode",
    "pre_ellipnode",
    "torus",
    "perturbed_torus",
    "radial_sphere",
)

_ALIASES = {"torus_revolution": "torus"}


def catalog(name, params=None) -> SurfaceSpec:
    """Named fixtures: godron/hyperbonode/ellipnode patches and closed surfaces.

    Patch entries are centred at the characteristic point they are named
    after.  Genericity conditions are enforced with margin 1e-6; violations
    raise SurfaceError naming the condition.
    """
    p = dict(params or {})
    name = _ALIASES.get(name, name)

    def take(key, default=None, aliases=()):
        for k in (key, *aliases):
            if k in p:
                return float(p.pop(k))
        if default is None:
            raise SurfaceError(f"catalog {name} requires parameter {key}")
        return float(default)

    if name == "platonova":
        rho = take("rho", 2.0, aliases=("ρ",))
        _genericity(rho - 1.0, _GENERICITY_MARGIN, "platonova requires rho != 1")
        spec = MongePatch(
            {(0, 2): 0.5, (2, 1): -1.0, (4, 0): rho / 2.0},
            domain=(-0.45, 0.45, -0.45, 0.45),
        )
        spec.params = {"rho": rho}
    elif name == "lp_hyperbonode":
        a = take("a", 2.0)
        b = take("b", 1.0)
        sign = take("sign", 1.0)
        if sign not in (1.0, -1.0):
            raise SurfaceError("lp_hyperbonode sign must be +1 or -1")
        _genericity(a * b - 1.0, _GENERICITY_MARGIN, "lp_hyperbonode requires ab != 1")
        _genericity(a * b + 1.0, _GENERICITY_MARGIN, "lp_hyperbonode requires ab != -1")
        spec = MongePatch(
            {(1, 1): 1.0, (3, 1): a / 6.0, (1, 3): b / 6.0,
             (4, 0): 1.0 / 24.0, (0, 4): sign / 24.0},
        )
        spec.params = {"a": a, "b": b, "sign": sign}
    elif name == "ot_hyperbonode":
        I = take("I", 1.0)
        J = take("J", 2.0)
        sign = take("sign", 1.0)
        if sign not in (1.0, -1.0):
            raise SurfaceError("ot_hyperbonode sign must be +1 or -1")
        _genericity(I * J - 1.0, _GENERICITY_MARGIN, "ot_hyperbonode requires IJ != 1")
        _genericity(I * J + 1.0, _GENERICITY_MARGIN, "ot_hyperbonode requires IJ != -1")
        spec = MongePatch(
            {(1, 1): 1.0, (3, 1): 1.0 / 6.0, (1, 3): sign / 6.0,
             (4, 0): I / 24.0, (0, 4): J / 24.0},
        )
        spec.params = {"I": I, "J": J, "sign": sign}
    elif name == "pre_hyperbonode":
        alpha = take("alpha", 1.0, aliases=("α",))
        u_ = take("u", 0.0)
        v_ = take("v", 0.0)
        a = take("a", 0.0)
        b = take("b", 0.0)
        I = take("I", 1.0)
        J = take("J", 1.0)
        _genericity(alpha, _GENERICITY_MARGIN, "pre_hyperbonode requires alpha != 0")
        det = 4.0 * alpha**2 * I * J - (2.0 * alpha * a - 3.0 * u_**2) * (
            2.0 * alpha * b - 3.0 * v_**2
        )
        _genericity(
            det, _GENERICITY_MARGIN,
            "pre_hyperbonode requires 4a^2IJ != (2aa-3u^2)(2ab-3v^2) "
            "(for u=v=0, alpha=1: IJ != ab)",
        )
        spec = MongePatch(
            {(1, 1): alpha, (2, 1): u_ / 2.0, (1, 2): v_ / 2.0,
             (3, 1): a / 6.0, (1, 3): b / 6.0,
             (4, 0): I / 24.0, (0, 4): J / 24.0},
        )
        spec.params = {"alpha": alpha, "u": u_, "v": v_, "a": a, "b": b, "I": I, "J": J}
    elif name == "pre_ellipnode":
        alpha = take("alpha", 1.0, aliases=("α",))
        a = take("a", 0.0)
        b = take("b", 0.0)
        c = take("c", 0.0)
        I = take("I", 1.0)
        J = take("J", 1.0)
        _genericity(alpha, _GENERICITY_MARGIN, "pre_ellipnode requires alpha != 0")
        _genericity(
            (a - 3.0 * b) * (b - 3.0 * a) - (I - 3.0 * c) * (J - 3.0 * c),
            _GENERICITY_MARGIN,
            "pre_ellipnode requires (a-3b)(b-3a) != (I-3c)(J-3c)",
        )
        spec = MongePatch(
            {(2, 0): alpha / 2.0, (0, 2): alpha / 2.0,
             (3, 1): a / 6.0, (1, 3): b / 6.0, (2, 2): c / 4.0,
             (4, 0): I / 24.0, (0, 4): J / 24.0},
        )
        spec.params = {"alpha": alpha, "a": a, "b": b, "c": c, "I": I, "J": J}
    elif name == "torus":
        spec = ParametricTorus(R=take("R", 2.0), r=take("r", 1.0), eps=0.0)
        spec.params = {"R": spec.R, "r": spec.r}
    elif name == "perturbed_torus":
        spec = ParametricTorus(
            R=take("R", 2.0), r=take("r", 1.0),
            eps=take("eps", 0.05, aliases=("ε",)),
        )
        if spec.eps == 0.0:
            raise SurfaceError("perturbed_torus requires eps != 0 (use torus)")
        spec.params = {"R": spec.R, "r": spec.r, "eps": spec.eps}
    elif name == "radial_sphere":
        island = p.pop("island", 0)
        spec = RadialSphere(eps=take("eps", 0.03, aliases=("ε",)), island=bool(int(float(island))))
        spec.params = {"eps": spec.eps, "island": int(spec.island)}
    else:
        raise SurfaceError(f"unknown catalog surface {name!r}")
    if p:
        raise SurfaceError(f"unknown parameters for {name}: {sorted(p)}")
    spec.name = name
    return spec
