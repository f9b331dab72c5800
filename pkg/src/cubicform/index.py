"""Local indices of the characteristic points.

Two independent routes are provided and never merged: closed-form sign
expressions evaluated on normalized jets, and a numeric winding engine that
tracks all k branches of a multivalued line field around a loop and snaps
the accumulated rotation to the exact rational lattice (1/(2k)) Z.  Their
agreement is asserted by tests, not assumed by code.

All angles live in the chart parameter plane: tangent-plane directions are
pulled back through the inverse of the chart-to-tangent differential, which
is a continuous linear isomorphism and therefore preserves indices.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .forms import NonGenericError, fundamental_quantities, real_zero_lines
from .surface import MongeJet, eval_monge_jet

__all__ = [
    "hyperbonode_index",
    "ellipnode_index",
    "invariants_rho_sigma",
    "godron_tau_index",
    "godron_asymptotic_index",
    "winding_index",
    "boundary_winding_index",
    "tau_sampler",
    "asymptotic_sampler",
    "circle_loop",
    "node_winding_index",
    "ResolutionError",
]


class ResolutionError(RuntimeError):
    """Angle tracking failed to close on the rational lattice."""


# ---------------------------------------------------------------------------
# closed-form indices (normalized-frame inputs)

def _require(cond, message):
    if not cond:
        raise NonGenericError(message)


def hyperbonode_index(mj: MongeJet) -> int:
    """Index of the 1-valued field tau at a hyperbonode, from the 4-jet.

    Requires asymptotic axes (f20 = f02 = 0, f11 != 0); the sign argument is
    4 f11^2 f40 f04 - (2 f11 f31 - 3 f21^2)(2 f11 f13 - 3 f12^2).
    """
    f = mj.f
    _require(f.order >= 4, "order-4 jet required")
    _require(f.f(2, 0) == 0.0 and f.f(0, 2) == 0.0, "asymptotic axes required")
    f11 = f.f(1, 1)
    _require(f11 != 0.0, "hyperbolic point required")
    arg = 4.0 * f11**2 * f.f(4, 0) * f.f(0, 4) - (
        2.0 * f11 * f.f(3, 1) - 3.0 * f.f(2, 1) ** 2
    ) * (2.0 * f11 * f.f(1, 3) - 3.0 * f.f(1, 2) ** 2)
    scale = max(abs(f11), abs(f.f(4, 0)), abs(f.f(0, 4)),
                abs(f.f(3, 1)), abs(f.f(1, 3)), abs(f.f(2, 1)), abs(f.f(1, 2)), 1e-30)
    _require(abs(arg) > 1e-9 * scale**4, "non-generic hyperbonode (zero discriminant)")
    return 1 if arg > 0 else -1


def ellipnode_index(mj: MongeJet) -> Fraction:
    """Index of the 3-valued field tau at an ellipnode, from the 4-jet.

    Requires circular Q and absent cubic; the sign argument is
    (f31 - 3 f13)(f13 - 3 f31) - (f40 - 3 f22)(f04 - 3 f22).
    """
    f = mj.f
    _require(f.order >= 4, "order-4 jet required")
    f20, f11, f02 = f.f(2, 0), f.f(1, 1), f.f(0, 2)
    qs = max(abs(f20), abs(f02), 1e-30)
    _require(abs(f20 - f02) <= 1e-9 * qs and abs(f11) <= 1e-9 * qs, "circular Q required")
    cmax = max(abs(f.f(3, 0)), abs(f.f(2, 1)), abs(f.f(1, 2)), abs(f.f(0, 3)))
    _require(cmax <= 1e-7 * max(qs, 1.0), "cubic terms must be absent")
    f40, f31, f22, f13, f04 = (f.f(4, 0), f.f(3, 1), f.f(2, 2), f.f(1, 3), f.f(0, 4))
    arg = (f31 - 3.0 * f13) * (f13 - 3.0 * f31) - (f40 - 3.0 * f22) * (f04 - 3.0 * f22)
    scale = max(abs(f40), abs(f31), abs(f22), abs(f13), abs(f04), 1e-30)
    _require(abs(arg) > 1e-9 * scale**2, "non-generic ellipnode (zero discriminant)")
    return Fraction(1 if arg > 0 else -1, 3)


def invariants_rho_sigma(mj: MongeJet):
    """Cross-ratio invariant rho and parity sigma of a hyperbonode.

    rho = 1 - (3 f21^2 - 2 f11 f31)(3 f12^2 - 2 f11 f13) / (4 f11^2 f40 f04),
    sigma = sign(f40 f04); the product sign(rho sigma) equals the index.
    """
    f = mj.f
    _require(f.order >= 4, "order-4 jet required")
    _require(f.f(2, 0) == 0.0 and f.f(0, 2) == 0.0, "asymptotic axes required")
    f11 = f.f(1, 1)
    f40, f04 = f.f(4, 0), f.f(0, 4)
    _require(f11 != 0.0, "hyperbolic point required")
    _require(f40 * f04 != 0.0, "rho undefined: f40 f04 = 0")
    rho = 1.0 - (3.0 * f.f(2, 1) ** 2 - 2.0 * f11 * f.f(3, 1)) * (
        3.0 * f.f(1, 2) ** 2 - 2.0 * f11 * f.f(1, 3)
    ) / (4.0 * f11**2 * f40 * f04)
    sigma = 1 if f40 * f04 > 0 else -1
    return rho, sigma


def godron_tau_index(sign: int) -> Fraction:
    """tau index at a godron: -1/3 at positive godrons, +1/3 at negative."""
    if sign not in (1, -1):
        raise ValueError("godron sign must be +1 or -1")
    return Fraction(-sign, 3)


def godron_asymptotic_index(sign: int) -> Fraction:
    """Boundary index of the 2-valued asymptotic field at a godron: sign/2."""
    if sign not in (1, -1):
        raise ValueError("godron sign must be +1 or -1")
    return Fraction(sign, 2)


# ---------------------------------------------------------------------------
# field samplers (angles in the chart plane)

def _pullback_angles(angles, dm):
    """Tangent-plane line angles -> chart-plane line angles via dm^{-1}."""
    inv = np.linalg.inv(dm)
    out = []
    for t in angles:
        w = inv @ np.array([math.cos(t), math.sin(t)])
        out.append(math.atan2(w[1], w[0]) % math.pi)
    return out


def tau_sampler(spec, chart, k, order=4):
    """Sampler of the zero lines of W (k = 1 hyperbolic / 3 elliptic).

    On the hyperbolic side W has exactly one distinct real zero line (its
    multiplicity jumps to 3 on isolated curves), so k = 1 counts distinct
    lines.  On the elliptic side the three lines are distinct, and on the
    parabolic boundary the configuration degenerates to kernel^2 * tangent,
    so k = 3 expands multiplicities.
    """

    def sample(u, v):
        mj = eval_monge_jet(spec, (u, v), order=order, chart=chart)
        pf = fundamental_quantities(mj.f)
        lines = real_zero_lines(pf.W)
        if k == 1:
            angles = [t for t, _ in lines]
        else:
            angles = [t for t, m in lines for _ in range(m)]
        if len(angles) != k:
            raise ResolutionError(
                f"field is not {k}-valued at ({u:.6g}, {v:.6g}): got {len(angles)} lines"
            )
        return sorted(_pullback_angles(angles, mj.dm))

    return sample


def asymptotic_sampler(spec, chart, order=3):
    """Sampler of the 2-valued asymptotic direction field (zero lines of Q)."""

    def sample(u, v):
        mj = eval_monge_jet(spec, (u, v), order=order, chart=chart)
        pf = fundamental_quantities(mj.f)
        lines = real_zero_lines(pf.Q)
        angles = [t for t, m in lines for _ in range(m)]
        if len(angles) != 2:
            raise ResolutionError(
                f"asymptotic field undefined at ({u:.6g}, {v:.6g})"
            )
        return sorted(_pullback_angles(angles, mj.dm))

    return sample


def circle_loop(center, radius):
    """Closed ccw circle in the chart plane as a callable on [0, 1]."""
    cu, cv = center

    def loop(t):
        a = 2.0 * math.pi * t
        return (cu + radius * math.cos(a), cv + radius * math.sin(a))

    return loop


# ---------------------------------------------------------------------------
# angle tracking

def _line_delta(a, b):
    """Minimal signed rotation taking line angle a to line angle b (mod pi)."""
    d = (b - a) % math.pi
    if d > math.pi / 2.0:
        d -= math.pi
    return d


def _match_tuple(current, raw, k):
    """Assign raw angles to tracked branches, minimizing total line motion.

    Returns (deltas, max_abs_delta): deltas[i] continues branch i.
    """
    best = None
    for perm in itertools.permutations(range(k)):
        deltas = [_line_delta(current[i], raw[perm[i]]) for i in range(k)]
        cost = sum(abs(d) for d in deltas)
        if best is None or cost < best[0]:
            best = (cost, deltas)
    return best[1], max(abs(d) for d in best[1])


def _track(samples, k):
    """Track k branches through a list of angle tuples; cumulative angles."""
    cur = [float(a) for a in samples[0]]
    maxstep = 0.0
    for raw in samples[1:]:
        deltas, m = _match_tuple([c % math.pi for c in cur], raw, k)
        maxstep = max(maxstep, m)
        cur = [c + d for c, d in zip(cur, deltas)]
    return cur, maxstep


def _snap_half_turns(total, k, tol=1e-3):
    """Snap an accumulated rotation to m * pi; index = m / (2k)."""
    m = round(total / math.pi)
    if abs(total - m * math.pi) > tol:
        raise ResolutionError(
            f"rotation {total:.6f} not a multiple of pi (residual "
            f"{abs(total - m * math.pi):.2e}); loop too coarse or too close "
            "to another singularity"
        )
    return Fraction(m, 2 * k)


def winding_index(sampler, loop, k, n0=64, cap=1 << 16, snap_tol=1e-3) -> Fraction:
    """Fractional index of a k-valued line field around a closed loop.

    Samples the loop adaptively (doubling until the largest single-step line
    rotation is below pi/(2k)), matches consecutive k-tuples by minimal total
    motion, accumulates the rotation of all k branches over one traversal and
    returns (total rotation)/(2 pi k) as an exact rational.  The total is
    provably a multiple of pi for a correctly tracked closed loop; failure to
    snap raises ResolutionError instead of returning a wrong value.
    """
    cache = {}

    def at(t):
        if t not in cache:
            cache[t] = sampler(*loop(t))
        return cache[t]

    n = n0
    while True:
        samples = [at(i / n) for i in range(n)]
        samples.append(samples[0])
        cur, maxstep = _track(samples, k)
        if maxstep < math.pi / (2.0 * k) / 1.2:
            total = sum(cur) - sum(samples[0])
            return _snap_half_turns(total, k, snap_tol)
        if n >= cap:
            raise ResolutionError(f"loop not resolved at {n} samples")
        n *= 2


def node_winding_index(spec, chart, center, k, radius, order=4) -> Fraction:
    """winding_index on shrinking circles around a node until it snaps."""
    sampler = tau_sampler(spec, chart, k, order=order)
    last = None
    for scale in (1.0, 0.5, 0.25):
        try:
            return winding_index(sampler, circle_loop(center, radius * scale), k)
        except ResolutionError as exc:
            last = exc
    raise last


def boundary_winding_index(
    sampler,
    arc,
    k,
    tangent_a,
    tangent_b,
    tangent_turn,
    snap_tol=1e-3,
) -> Fraction:
    """Fractional index at a boundary singular point of a k-valued field.

    arc: sample points (n, 2) of a path from A to B around the singular
    point through the region, with A and B on the boundary where the field
    is trivialised.  tangent_a/tangent_b: boundary tangent angles at A and B,
    oriented along the boundary of the region (region on the left).
    tangent_turn: total signed rotation of that tangent along the omitted
    boundary piece from B back to A through the singular point.

    Implements the collar closure: the field is tracked A -> B; at both ends
    the branch angles are measured relative to the boundary tangent and the
    closing rotation interpolates the relative configuration at B to the one
    at A while the reference tangent turns by tangent_turn.  The total is
    snapped to the (1/(2k)) Z lattice.
    """
    samples = [sampler(float(p[0]), float(p[1])) for p in arc]
    cur, maxstep = _track(samples, k)
    if maxstep >= math.pi / (2.0 * k):
        raise ResolutionError("boundary arc sampled too coarsely")
    total_arc = sum(cur) - sum(samples[0])

    closure = 0.5 * (
        sum(_antipodal_config(samples[0], tangent_a))
        - sum(_antipodal_config(samples[-1], tangent_b))
    )
    total = total_arc + closure + k * tangent_turn
    return _snap_half_turns(total, k, snap_tol)


def _antipodal_config(angles, tangent, pin_tol=1e-3):
    """Field lines as 2k antipodal direction points relative to the tangent.

    A branch lying on the boundary tangent (within pin_tol) is pinned to
    relative angle exactly 0; without the pin, numerical jitter across the
    cut would cyclically shift the sorted configuration and silently change
    the closure by a lattice step.
    """
    rel = []
    for a in angles:
        r = (a - tangent) % math.pi
        if r < pin_tol or math.pi - r < pin_tol:
            r = 0.0
        rel.append(r)
    return sorted(rel + [r + math.pi for r in rel])
