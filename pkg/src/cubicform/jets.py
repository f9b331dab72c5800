"""Truncated bivariate Taylor jets and planar map jets.

Jet2 stores monomial coefficients c[i,j] of sum c[i,j] x^i y^j truncated at
a fixed total order (0..6).  Derivatives at the base point are recovered
exactly as f_ij = c[i,j] * i! * j!; no finite differences anywhere.  Products
and compositions truncate to the common order.  The arithmetic is delegated
to the selected kernel backend so a single implementation serves both the
scalar API and the batched grid scans.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np

from . import _layout, kernel

__all__ = ["Jet2", "MapJet2", "jet_mul", "jet_compose", "jet_invert", "taylor_shift"]


class Jet2:
    """Polynomial jet of order <= 6 in two variables."""

    __slots__ = ("order", "c")

    def __init__(self, order: int, coeffs=None):
        if not 0 <= order <= _layout.MAX_ORDER:
            raise ValueError(f"unsupported jet order {order}")
        self.order = order
        m = _layout.size(order)
        if coeffs is None:
            self.c = np.zeros(m)
        else:
            c = np.asarray(coeffs, dtype=float)
            if c.shape != (m,):
                raise ValueError(f"expected {m} coefficients for order {order}")
            self.c = c.copy()

    @classmethod
    def from_terms(cls, order: int, terms: dict) -> "Jet2":
        """Build from {(i, j): monomial coefficient}."""
        jet = cls(order)
        pos = _layout.position(order)
        for ij, val in terms.items():
            if ij not in pos:
                raise ValueError(f"monomial {ij} outside order {order}")
            jet.c[pos[ij]] = val
        return jet

    @classmethod
    def from_derivatives(cls, order: int, derivs: dict) -> "Jet2":
        """Build from {(i, j): partial derivative f_ij at the base point}."""
        return cls.from_terms(
            order,
            {ij: v / (factorial(ij[0]) * factorial(ij[1])) for ij, v in derivs.items()},
        )

    def coeff(self, i: int, j: int) -> float:
        return float(self.c[_layout.position(self.order)[(i, j)]])

    def f(self, i: int, j: int) -> float:
        """Partial derivative d^(i+j) f / dx^i dy^j at the base point."""
        return self.coeff(i, j) * factorial(i) * factorial(j)

    def set_coeff(self, i: int, j: int, value: float) -> None:
        self.c[_layout.position(self.order)[(i, j)]] = value

    def truncate(self, order: int) -> "Jet2":
        if order > self.order:
            raise ValueError("cannot extend a jet by truncation")
        return Jet2(order, self.c[_layout.restrict_table(self.order, order)])

    def extend(self, order: int) -> "Jet2":
        """Pad with zero coefficients up to a higher order."""
        if order < self.order:
            raise ValueError("use truncate to lower the order")
        out = Jet2(order)
        out.c[_layout.restrict_table(order, self.order)] = self.c
        return out

    def derivative(self, dx: int = 0, dy: int = 0) -> "Jet2":
        """Exact partial derivative, order drops by dx + dy."""
        new_order = self.order - dx - dy
        if new_order < 0:
            raise ValueError("derivative exceeds jet order")
        out = Jet2(new_order)
        pos = _layout.position(self.order)
        for (i, j), k in _layout.position(new_order).items():
            src = pos[(i + dx, j + dy)]
            scale = (factorial(i + dx) // factorial(i)) * (factorial(j + dy) // factorial(j))
            out.c[k] = self.c[src] * scale
        return out

    def eval(self, x: float, y: float) -> float:
        """Evaluate the truncated polynomial (vectorises over numpy inputs)."""
        acc = 0.0
        for (i, j), ck in zip(_layout.indices(self.order), self.c):
            if ck != 0.0:
                acc = acc + ck * x**i * y**j
        return acc

    def __add__(self, other: "Jet2") -> "Jet2":
        n = min(self.order, other.order)
        return Jet2(n, self.truncate(n).c + other.truncate(n).c)

    def __sub__(self, other: "Jet2") -> "Jet2":
        n = min(self.order, other.order)
        return Jet2(n, self.truncate(n).c - other.truncate(n).c)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return jet_mul(self, other)
        return Jet2(self.order, self.c * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Jet2":
        return Jet2(self.order, -self.c)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.c)))

    def __repr__(self):
        terms = []
        for (i, j), ck in zip(_layout.indices(self.order), self.c):
            if ck != 0.0:
                terms.append(f"{ck:g}*x^{i}y^{j}")
        body = " + ".join(terms) if terms else "0"
        return f"Jet2[{self.order}]({body})"


class MapJet2:
    """Planar map jet (u(x,y), v(x,y)) with zero constant terms."""

    __slots__ = ("u", "v")

    def __init__(self, u: Jet2, v: Jet2):
        if u.order != v.order:
            raise ValueError("component orders differ")
        if u.c[0] != 0.0 or v.c[0] != 0.0:
            raise ValueError("map jets must have zero constant term")
        self.u = u
        self.v = v

    @property
    def order(self) -> int:
        return self.u.order

    @classmethod
    def linear(cls, order: int, a: np.ndarray) -> "MapJet2":
        """Map jet of the linear substitution (x, y) -> a @ (x, y)."""
        a = np.asarray(a, dtype=float)
        u = Jet2.from_terms(order, {(1, 0): a[0, 0], (0, 1): a[0, 1]})
        v = Jet2.from_terms(order, {(1, 0): a[1, 0], (0, 1): a[1, 1]})
        return cls(u, v)

    def linear_part(self) -> np.ndarray:
        return np.array(
            [
                [self.u.coeff(1, 0), self.u.coeff(0, 1)],
                [self.v.coeff(1, 0), self.v.coeff(0, 1)],
            ]
        )

    def __repr__(self):
        return f"MapJet2(u={self.u!r}, v={self.v!r})"


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    """Truncated product."""
    n = min(a.order, b.order)
    ca = a.truncate(n).c[:, None]
    cb = b.truncate(n).c[:, None]
    return Jet2(n, kernel.mul(ca, cb, n)[:, 0])


def jet_compose(f: Jet2, m: MapJet2) -> Jet2:
    """f o m, truncated to the common order."""
    n = min(f.order, m.order)
    cf = f.truncate(n).c[:, None]
    cu = m.u.truncate(n).c[:, None]
    cv = m.v.truncate(n).c[:, None]
    return Jet2(n, kernel.compose(cf, cu, cv, n)[:, 0])


def compose_map(m: MapJet2, inner: MapJet2) -> MapJet2:
    """m o inner (both maps, zero constant terms)."""
    return MapJet2(jet_compose(m.u, inner), jet_compose(m.v, inner))


def taylor_shift(f: Jet2, x0: float, y0: float) -> Jet2:
    """Re-centre the polynomial at (x0, y0): returns the jet of f(x0+x, y0+y).

    Exact for polynomials of degree <= order; for genuinely truncated jets the
    top-order coefficients of the result are only as good as the truncation.
    """
    out = Jet2(f.order)
    pos = _layout.position(f.order)
    for (i, j), cij in zip(_layout.indices(f.order), f.c):
        if cij == 0.0:
            continue
        for k in range(i + 1):
            xk = cij * comb(i, k) * x0 ** (i - k)
            for l in range(j + 1):
                out.c[pos[(k, l)]] += xk * comb(j, l) * y0 ** (j - l)
    return out


def jet_invert(m: MapJet2) -> MapJet2:
    """Inverse map jet; requires an invertible linear part."""
    lin = m.linear_part()
    det = lin[0, 0] * lin[1, 1] - lin[0, 1] * lin[1, 0]
    scale = max(np.max(np.abs(lin)) ** 2, 1e-300)
    if abs(det) <= 1e-12 * scale:
        raise ValueError("map jet has a singular linear part")
    n = m.order
    g1, g2 = kernel.invert(m.u.c[:, None], m.v.c[:, None], n)
    return MapJet2(Jet2(n, g1[:, 0]), Jet2(n, g2[:, 0]))
