"""Curve tracing and characteristic-point localization.

Everything here works on chart grids: evaluate Monge jets on a lattice,
derive the pointwise invariants (Hessian determinant H, asymptotic form Q,
cubic part C, the reduced cubic Wminus), then run marching squares plus a
Newton polish for curves and a frozen-basis Newton for the isolated points.

Degeneracies are detected and reported as flags instead of being silently
smoothed over: surfaces whose cubic part is absorbed by the quadric on an
open set, non-isolated families of characteristic points (symmetric
surfaces), and parabolic curves whose kernel direction is tangent to the
curve identically.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import _layout
from .forms import NonGenericError
from .index import (
    asymptotic_sampler,
    boundary_winding_index,
    ellipnode_index,
    hyperbonode_index,
    invariants_rho_sigma,
    godron_asymptotic_index,
    godron_tau_index,
    node_winding_index,
    tau_sampler,
)
from .normalize import normalize_ellipnode_frame, normalize_hyperbonode_frame
from .surface import SurfaceError, eval_monge_jet, monge_grid

__all__ = [
    "CharPoint",
    "Polyline",
    "CurveTrace",
    "classify_point",
    "chart_scan",
    "trace_parabolic",
    "trace_flecnodal",
    "find_nodes",
    "find_godrons",
    "godron_boundary_winding",
]

PARABOLIC_BAND = 1e-6     # |H| <= band * |Q|_inf^2 counts as parabolic
QUADRIC_TOL = 1e-6        # Wminus measure below this counts as absorbed
QUADRIC_FRACTION = 0.10   # fraction of absorbed samples that flags a quadric


@dataclass(eq=False)
class CharPoint:
    """An isolated characteristic point with its local invariants."""

    kind: str                   # "ellipnode" | "hyperbonode" | "godron"
    chart: str
    param: tuple
    base: np.ndarray
    index: Fraction | None = None
    sign: int | None = None     # godrons only
    diagnostics: dict = dc_field(default_factory=dict)
    flags: list = dc_field(default_factory=list)


@dataclass(eq=False)
class Polyline:
    """A traced curve: per-vertex chart tags, parameters and 3-space points."""

    charts: list
    params: np.ndarray          # (n, 2), unwrapped along the walk
    base: np.ndarray            # (n, 3)
    closed: bool
    tangential: bool = False    # sign-definite zero found by the second pass

    def __len__(self):
        return self.params.shape[0]


@dataclass(eq=False)
class CurveTrace:
    kind: str                   # "parabolic" | "flecnodal"
    polylines: list
    tol: float
    flags: list = dc_field(default_factory=list)


# ---------------------------------------------------------------------------
# pointwise invariants on batches

def _field_arrays(mb):
    """Derive H, Q, C, dH, Wminus and scales from a MongeBatch (order >= 3)."""
    pos = _layout.position(mb.order)
    c = mb.f
    c20, c11, c02 = c[pos[(2, 0)]], c[pos[(1, 1)]], c[pos[(0, 2)]]
    c30, c21, c12, c03 = (c[pos[(3, 0)]], c[pos[(2, 1)]],
                          c[pos[(1, 2)]], c[pos[(0, 3)]])
    q = np.stack([c20, c11, c02])
    cc = np.stack([c30, c21, c12, c03])
    h = 4.0 * c20 * c02 - c11**2
    dh = np.stack([
        12.0 * c30 * c02 + 4.0 * c20 * c12 - 4.0 * c11 * c21,
        4.0 * c21 * c02 + 12.0 * c20 * c03 - 4.0 * c11 * c12,
    ])
    # Lambda C = (6 c2 p0 - 2 q1 p1 + 2 q0 p2, 2 q2 p1 - 2 q1 p2 + 6 q0 p3)
    lc1 = 6.0 * c02 * c30 - 2.0 * c11 * c21 + 2.0 * c20 * c12
    lc2 = 2.0 * c02 * c21 - 2.0 * c11 * c12 + 6.0 * c20 * c03
    # Wminus is meaningless at parabolic points (division by H); those
    # columns carry inf/nan and every consumer masks them out
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        l1 = lc1 / (2.0 * h)
        l2 = lc2 / (2.0 * h)
        wm = np.stack([
            cc[0] - q[0] * l1,
            cc[1] - (q[0] * l2 + q[1] * l1),
            cc[2] - (q[1] * l2 + q[2] * l1),
            cc[3] - q[2] * l2,
        ])
    qs = np.max(np.abs(q), axis=0)
    cs = np.max(np.abs(cc), axis=0)
    return {
        "q": q, "c": cc, "h": h, "dh": dh, "wm": wm,
        "qscale": qs, "cscale": cs,
        "grad": np.einsum("jin,jn->in", mb.dm, dh),  # chart gradient of H
    }


def _resultant_batch(q, cc):
    """det of the Sylvester matrix of (Q, C) column-wise; shape (n,)."""
    n = q.shape[1]
    m = np.zeros((n, 5, 5))
    for r in range(3):
        m[:, r, r] = q[0]
        m[:, r, r + 1] = q[1]
        m[:, r, r + 2] = q[2]
    for r in range(2):
        for k in range(4):
            m[:, 3 + r, r + k] = cc[k]
    # exactly singular matrices (cubic a multiple of the quadric) are a
    # legitimate input here; LU emits a spurious divide warning for them
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.linalg.det(m)


def classify_point(mj, tol_parabolic=PARABOLIC_BAND):
    """"elliptic" / "hyperbolic" / "parabolic" from the 2-jet."""
    f = mj.f
    c20, c11, c02 = f.coeff(2, 0), f.coeff(1, 1), f.coeff(0, 2)
    h = 4.0 * c20 * c02 - c11**2
    qs = max(abs(c20), abs(c11), abs(c02))
    if abs(h) <= tol_parabolic * qs**2 or qs == 0.0:
        return "parabolic"
    return "elliptic" if h > 0 else "hyperbolic"


# ---------------------------------------------------------------------------
# chart scanning

def _lattice(spec, chart, n):
    u0, u1, v0, v1 = spec.domain(chart)
    per_u, per_v = spec.periodic(chart)
    us = np.linspace(u0, u1, n, endpoint=False) if per_u else np.linspace(u0, u1, n + 1)
    vs = np.linspace(v0, v1, n, endpoint=False) if per_v else np.linspace(v0, v1, n + 1)
    return us, vs, per_u, per_v


def chart_scan(spec, chart, n, order=3):
    """Monge batch + derived invariant arrays on an n-cell lattice."""
    us, vs, per_u, per_v = _lattice(spec, chart, n)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    mb = monge_grid(spec, chart, uu.ravel(), vv.ravel(), order=order)
    if np.any(mb.bad):
        raise SurfaceError(
            f"rank-deficient Jacobian at {int(np.sum(mb.bad))} lattice points "
            f"of chart {chart!r}"
        )
    fields = _field_arrays(mb)
    shape = uu.shape
    return {
        "spec": spec, "chart": chart, "n": n,
        "us": us, "vs": vs, "per_u": per_u, "per_v": per_v,
        "shape": shape, "mb": mb,
        "H": fields["h"].reshape(shape),
        "fields": fields,
    }


# ---------------------------------------------------------------------------
# marching squares

def _march(vals, per_u, per_v, cell_mask=None):
    """Zero-level segments of a lattice scalar; returns chains of edge keys.

    Edge keys: ("h", i, j) joins (i, j)-(i+1, j); ("v", i, j) joins
    (i, j)-(i, j+1); indices are stored unwrapped-modulo so that periodic
    charts glue, and the walk unwraps coordinates for continuity.
    """
    nu, nv = vals.shape
    scale = np.max(np.abs(vals)) or 1.0
    vals = np.where(vals == 0.0, 1e-300 * scale, vals)
    cu = nu if per_u else nu - 1
    cv = nv if per_v else nv - 1

    def val(i, j):
        return vals[i % nu, j % nv]

    segments = []
    for i in range(cu):
        for j in range(cv):
            if cell_mask is not None and not cell_mask[i, j]:
                continue
            s00 = val(i, j) > 0
            s10 = val(i + 1, j) > 0
            s11 = val(i + 1, j + 1) > 0
            s01 = val(i, j + 1) > 0
            pattern = (s00, s10, s11, s01)
            if len(set(pattern)) == 1:
                continue
            eb = ("h", i, j % nv)
            et = ("h", i, (j + 1) % nv)
            el = ("v", i % nu, j)
            er = ("v", (i + 1) % nu, j)
            if s00 != s10 and s10 == s11 == s01:
                segments.append((eb, el))
            elif s10 != s00 and s00 == s11 == s01:
                segments.append((eb, er))
            elif s11 != s00 and s00 == s10 == s01:
                segments.append((er, et))
            elif s01 != s00 and s00 == s10 == s11:
                segments.append((et, el))
            elif s00 == s10 and s01 == s11:
                segments.append((el, er))
            elif s00 == s01 and s10 == s11:
                segments.append((eb, et))
            else:
                # diagonal ambiguity: resolve with the mean of the corners
                center = val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1)
                if (center > 0) == s00:
                    segments.append((eb, er) if not s10 else (eb, el))
                    segments.append((et, el) if not s01 else (et, er))
                else:
                    segments.append((eb, el) if not s10 else (eb, er))
                    segments.append((er, et) if not s01 else (el, et))

    adj = defaultdict(list)
    for a, b in segments:
        adj[a].append(b)
        adj[b].append(a)

    chains = []
    seen = set()

    def walk(start, first):
        chain = [start, first]
        seen.add(start)
        seen.add(first)
        while True:
            nxt = [k for k in adj[chain[-1]] if k != chain[-2]]
            nxt = [k for k in nxt if k not in seen or (k == chain[0] and len(chain) > 2)]
            if not nxt:
                return chain, False
            if nxt[0] == chain[0]:
                return chain, True
            chain.append(nxt[0])
            seen.add(nxt[0])

    for key in list(adj):
        if key in seen or len(adj[key]) != 1:
            continue
        chain, closed = walk(key, adj[key][0])
        chains.append((chain, closed))
    for key in list(adj):
        if key in seen:
            continue
        chain, closed = walk(key, adj[key][0])
        chains.append((chain, closed))
    return chains, vals


def _edge_point(key, vals, us, vs, per_u, per_v):
    kind, i, j = key
    nu, nv = vals.shape
    du = us[1] - us[0]
    dv = vs[1] - vs[0]
    if kind == "h":
        a = vals[i % nu, j % nv]
        b = vals[(i + 1) % nu, j % nv]
        t = a / (a - b)
        return (us[i % nu] + t * du, vs[j % nv])
    a = vals[i % nu, j % nv]
    b = vals[i % nu, (j + 1) % nv]
    t = a / (a - b)
    return (us[i % nu], vs[j % nv] + t * dv)


def _unwrap_chain(points, spec, chart):
    per_u, per_v = spec.periodic(chart)
    u0, u1, v0, v1 = spec.domain(chart)
    span_u, span_v = u1 - u0, v1 - v0
    out = [points[0]]
    for (u, v) in points[1:]:
        pu, pv = out[-1]
        if per_u:
            u += span_u * round((pu - u) / span_u)
        if per_v:
            v += span_v * round((pv - v) / span_v)
        out.append((u, v))
    return np.array(out)


# ---------------------------------------------------------------------------
# Newton polish

def _eval_fields(spec, chart, pts, order=3):
    pts = np.atleast_2d(pts)
    mb = monge_grid(spec, chart, pts[:, 0], pts[:, 1], order=order)
    if np.any(mb.bad):
        raise SurfaceError("rank-deficient Jacobian during polish")
    out = _field_arrays(mb)
    out["base"] = mb.base
    out["mb"] = mb
    return out

def _polish_h(spec, chart, pts, iters=8):
    """Gauss-Newton projection of points onto {H = 0}; returns pts, residual."""
    pts = np.array(pts, dtype=float)
    for _ in range(iters):
        fl = _eval_fields(spec, chart, pts)
        g = fl["grad"]
        gg = np.sum(g * g, axis=0)
        step = -fl["h"] / np.where(gg == 0.0, 1.0, gg)
        upd = (g * step).T
        lim = np.max(np.abs(upd), axis=1)
        cap = 0.2 * max(1e-12, float(np.max(np.abs(pts))) + 1.0)
        upd[lim > cap] *= (cap / lim[lim > cap])[:, None]
        pts = pts + upd
    fl = _eval_fields(spec, chart, pts)
    rel = np.abs(fl["h"]) / np.maximum(fl["qscale"] ** 2, 1e-300)
    return pts, rel, fl


def trace_parabolic(spec, grid=128, tol=1e-9):
    """Zero set of the Hessian determinant as polylines of polished vertices.

    Transversal crossings come from marching squares; a second pass catches
    sign-definite (tangential) zero curves by descending |H| from lattice
    points sitting inside the near-zero band.
    """
    flags = []
    per_chart = []
    for chart in spec.charts():
        scan = chart_scan(spec, chart, grid)
        H = scan["H"]
        us, vs, per_u, per_v = scan["us"], scan["vs"], scan["per_u"], scan["per_v"]
        chains, vals = _march(H, per_u, per_v)
        qs2 = np.maximum(scan["fields"]["qscale"].reshape(scan["shape"]) ** 2, 1e-300)
        for chain, closed in chains:
            raw = [_edge_point(k, vals, us, vs, per_u, per_v) for k in chain]
            pts = _unwrap_chain(raw, spec, chart)
            pts, rel, fl = _polish_h(spec, chart, pts)
            keep = rel <= max(tol, 1e-12) * 1e3
            if not np.all(keep):
                flags.append(f"dropped {int(np.sum(~keep))} unpolished vertices on {chart}")
                if np.sum(keep) < 2:
                    continue
                pts, rel, fl = _polish_h(spec, chart, pts[keep])
                closed = False
            per_chart.append(Polyline(
                charts=[chart] * len(pts),
                params=pts,
                base=fl["base"].T.copy(),
                closed=bool(closed),
            ))
        # tangential pass: lattice points in the near-zero band that no
        # transversal polyline accounts for (sign-definite zero curves)
        rel = np.abs(H) / qs2
        band = rel <= 1e-3 * float(rel.max())
        if np.any(band):
            iu, iv = np.nonzero(band)
            cand = np.stack([us[iu], vs[iv]], axis=1)
            if len(cand) > 2000:
                cand = cand[:: len(cand) // 2000 + 1]
            taken = [pl.params for pl in per_chart if pl.charts[0] == chart]
            if taken:
                allpts = np.concatenate(taken)
                if len(allpts) > 2000:
                    allpts = allpts[:: len(allpts) // 2000 + 1]
                d = np.min(
                    np.linalg.norm(cand[:, None, :] - allpts[None, :, :], axis=2),
                    axis=1,
                )
            else:
                d = np.full(len(cand), np.inf)
            step = max(us[1] - us[0], vs[1] - vs[0])
            cand = cand[d > 1.2 * step]
            if len(cand):
                got = _tangential_pass(spec, chart, cand, step, tol)
                if got:
                    flags.append(f"tangential parabolic curve on {chart}")
                    per_chart.extend(got)
    polylines = _glue_polylines(spec, per_chart)
    return CurveTrace(kind="parabolic", polylines=polylines, tol=tol, flags=flags)


def _tangential_pass(spec, chart, cand, step, tol, iters=60):
    pts = cand.copy()
    for _ in range(iters):
        fl = _eval_fields(spec, chart, pts)
        g = fl["grad"]
        gg = np.sum(g * g, axis=0)
        upd = (-fl["h"] / np.where(gg == 0.0, 1.0, gg) * g).T
        nrm = np.linalg.norm(upd, axis=1)
        big = nrm > 0.5 * step
        upd[big] *= (0.5 * step / nrm[big])[:, None]
        pts = pts + upd
    fl = _eval_fields(spec, chart, pts)
    rel = np.abs(fl["h"]) / np.maximum(fl["qscale"] ** 2, 1e-300)
    pts = pts[rel <= max(tol, 1e-12) * 1e3]
    if len(pts) < 2:
        return []
    # dedup on a half-step lattice, cluster by adjacency, order by projection
    kept = []
    seen = set()
    for p in pts:
        key = (round(p[0] / (0.5 * step)), round(p[1] / (0.5 * step)))
        if key not in seen:
            seen.add(key)
            kept.append(p)
    pts = np.array(kept)
    clusters = _cluster(pts, 2.0 * step)
    out = []
    for idx in clusters:
        if len(idx) < 3:
            continue
        sub = pts[idx]
        center = sub.mean(axis=0)
        _, _, vt = np.linalg.svd(sub - center)
        order = np.argsort((sub - center) @ vt[0])
        sub = sub[order]
        fl = _eval_fields(spec, chart, sub)
        out.append(Polyline(
            charts=[chart] * len(sub),
            params=sub,
            base=fl["base"].T.copy(),
            closed=False,
            tangential=True,
        ))
    return out


def _cluster(pts, radius):
    n = len(pts)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) <= radius:
                parent[find(i)] = find(j)
    groups = defaultdict(list)
    for i in range(n):
        groups[find(i)].append(i)
    return list(groups.values())


def _seg_spacing(pl):
    if len(pl) < 2:
        return 0.0
    return float(np.median(np.linalg.norm(np.diff(pl.base, axis=0), axis=1)))


def _glue_polylines(spec, polylines, tol_factor=1e-5):
    """Join open polylines whose 3-space endpoints coincide (chart seams).

    Endpoints of one curve broken at a seam land well under a cell apart
    (they differ only by polish drift along the curve), while distinct
    curves stay cells apart, so the match tolerance scales with the local
    vertex spacing and keeps a diagonal-relative floor.
    """
    if len(spec.charts()) == 1 or not polylines:
        return polylines
    allb = np.concatenate([pl.base for pl in polylines])
    diag = float(np.linalg.norm(allb.max(axis=0) - allb.min(axis=0))) or 1.0
    tol = tol_factor * diag
    open_pls = [pl for pl in polylines if not pl.closed]
    closed_pls = [pl for pl in polylines if pl.closed]
    merged = True
    while merged:
        merged = False
        for i in range(len(open_pls)):
            if merged:
                break
            for j in range(i + 1, len(open_pls)):
                a, b = open_pls[i], open_pls[j]
                ends = {
                    (False, False): np.linalg.norm(a.base[-1] - b.base[0]),
                    (False, True): np.linalg.norm(a.base[-1] - b.base[-1]),
                    (True, False): np.linalg.norm(a.base[0] - b.base[0]),
                    (True, True): np.linalg.norm(a.base[0] - b.base[-1]),
                }
                key = min(ends, key=ends.get)
                pair_tol = max(tol, 0.5 * min(_seg_spacing(a), _seg_spacing(b)))
                if ends[key] > pair_tol:
                    continue
                rev_a, rev_b = key
                ca = a.charts[::-1] if rev_a else list(a.charts)
                pa = a.params[::-1] if rev_a else a.params
                ba = a.base[::-1] if rev_a else a.base
                cb = b.charts[::-1] if rev_b else list(b.charts)
                pb = b.params[::-1] if rev_b else b.params
                bb = b.base[::-1] if rev_b else b.base
                open_pls[i] = Polyline(
                    charts=ca + cb[1:],
                    params=np.concatenate([pa, pb[1:]]),
                    base=np.concatenate([ba, bb[1:]]),
                    closed=False,
                    tangential=a.tangential or b.tangential,
                )
                del open_pls[j]
                merged = True
                break
    out = []
    for pl in open_pls:
        self_tol = max(tol, 0.5 * _seg_spacing(pl))
        if len(pl) > 3 and np.linalg.norm(pl.base[0] - pl.base[-1]) <= self_tol:
            pl = Polyline(pl.charts, pl.params, pl.base, True, pl.tangential)
        out.append(pl)
    return closed_pls + out


# ---------------------------------------------------------------------------
# flecnodal curve

def _res_eval(spec, chart, pts):
    fl = _eval_fields(spec, chart, pts)
    res = _resultant_batch(fl["q"], fl["c"])
    cubscale = fl["cscale"] + 1e-3 * np.power(np.maximum(fl["qscale"], 0.0), 1.5)
    scale = np.maximum(fl["qscale"], 1e-300) ** 3 * np.maximum(cubscale, 1e-300) ** 2
    return res, scale, fl


def trace_flecnodal(spec, grid=128, tol=1e-7):
    """Zero set of Res(Q, C) inside the closed hyperbolic domain {H <= 0}."""
    flags = []
    per_chart = []
    for chart in spec.charts():
        scan = chart_scan(spec, chart, grid)
        H = scan["H"]
        fields = scan["fields"]
        shape = scan["shape"]
        res = _resultant_batch(fields["q"], fields["c"]).reshape(shape)
        cubscale = fields["cscale"] + 1e-3 * np.power(fields["qscale"], 1.5)
        rscale = (np.maximum(fields["qscale"], 1e-300) ** 3
                  * np.maximum(cubscale, 1e-300) ** 2).reshape(shape)
        qs2 = np.maximum(fields["qscale"] ** 2, 1e-300).reshape(shape)
        hyper = H < -PARABOLIC_BAND * qs2
        if np.any(hyper):
            frac = float(np.mean(np.abs(res[hyper]) <= 1e-9 * rscale[hyper]))
            if frac > 0.5:
                flags.append(
                    "degenerate: flecnodal condition holds identically on the "
                    "hyperbolic domain"
                )
                continue
        us, vs, per_u, per_v = scan["us"], scan["vs"], scan["per_u"], scan["per_v"]
        nu, nv = shape
        cu = nu if per_u else nu - 1
        cv = nv if per_v else nv - 1
        hband = 1e-3 * np.max(np.abs(H))
        cell_mask = np.zeros((cu, cv), dtype=bool)
        for i in range(cu):
            for j in range(cv):
                hmin = min(H[i % nu, j % nv], H[(i + 1) % nu, j % nv],
                           H[(i + 1) % nu, (j + 1) % nv], H[i % nu, (j + 1) % nv])
                cell_mask[i, j] = hmin <= hband
        chains, vals = _march(res / np.maximum(rscale, 1e-300), per_u, per_v, cell_mask)
        for chain, closed in chains:
            raw = [_edge_point(k, vals, us, vs, per_u, per_v) for k in chain]
            pts = _unwrap_chain(raw, spec, chart)
            pts = _polish_res(spec, chart, pts)
            resv, scale, fl = _res_eval(spec, chart, pts)
            keep = np.abs(resv) <= 1e3 * max(tol, 1e-12) * scale
            qs2v = np.maximum(fl["qscale"] ** 2, 1e-300)
            keep &= fl["h"] <= 1e-3 * np.max(np.abs(H)) + PARABOLIC_BAND * qs2v
            if np.sum(keep) < 2:
                continue
            if not np.all(keep):
                closed = False
            pts = pts[keep]
            _, _, fl = _res_eval(spec, chart, pts)
            per_chart.append(Polyline(
                charts=[chart] * len(pts),
                params=pts,
                base=fl["base"].T.copy(),
                closed=bool(closed),
            ))
    polylines = _glue_polylines(spec, per_chart)
    return CurveTrace(kind="flecnodal", polylines=polylines, tol=tol, flags=flags)


def _polish_res(spec, chart, pts, iters=10):
    pts = np.array(pts, dtype=float)
    h = 1e-6
    for _ in range(iters):
        stencil = np.concatenate([
            pts,
            pts + [h, 0.0], pts - [h, 0.0],
            pts + [0.0, h], pts - [0.0, h],
        ])
        res, scale, _ = _res_eval(spec, chart, stencil)
        n = len(pts)
        f0 = res[:n]
        gx = (res[n:2 * n] - res[2 * n:3 * n]) / (2.0 * h)
        gy = (res[3 * n:4 * n] - res[4 * n:]) / (2.0 * h)
        gg = gx**2 + gy**2
        step = -f0 / np.where(gg == 0.0, 1.0, gg)
        pts = pts + np.stack([gx * step, gy * step], axis=1)
    return pts


# ---------------------------------------------------------------------------
# nodes (Wminus = 0)

def _wm_measure(fields):
    denom = fields["cscale"] + 0.01 * fields["qscale"] ** 2
    return np.max(np.abs(fields["wm"]), axis=0) / np.maximum(denom, 1e-300)


def _nullspace_basis(q):
    """Orthonormal basis (4, 2) of ker Lambda_Q on cubic coefficient space."""
    q0, q1, q2 = (float(x) for x in q)
    m = np.array([
        [6.0 * q2, -2.0 * q1, 2.0 * q0, 0.0],
        [0.0, 2.0 * q2, -2.0 * q1, 6.0 * q0],
    ])
    _, _, vt = np.linalg.svd(m)
    return vt[2:].T


def _local_minima(a, per_u, per_v):
    big = np.pad(a, ((1, 1), (0, 0)), mode="wrap" if per_u else "edge")
    big = np.pad(big, ((0, 0), (1, 1)), mode="wrap" if per_v else "edge")
    core = big[1:-1, 1:-1]
    ok = np.ones_like(a, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            ok &= core <= big[1 + di:big.shape[0] - 1 + di,
                              1 + dj:big.shape[1] - 1 + dj]
    return ok


def find_nodes(spec, grid=64, seed_threshold=0.5, compute_winding=False):
    """Ellipnodes and hyperbonodes: zeros of Wminus away from the parabolic set.

    Returns (points, flags).  Gauss-Newton runs on the full four-coefficient
    Wminus residual, so converged points are genuine zeros and spurious roots
    of a projected system cannot appear.  Seeds come from lattice minima of
    the Wminus measure plus the crossings of traced flecnodal polylines
    (hyperbonodes sit exactly there, and near a small hyperbolic island the
    attraction basin is far narrower than any lattice).  Degenerate
    situations (cubic absorbed by the quadric on an open set, non-isolated
    root families) are reported as flags rather than points.
    """
    flags = []
    points = []
    diag = None
    degen_msg = ("degenerate: non-isolated or symmetric family of "
                 "characteristic points (singular node system)")
    for chart in spec.charts():
        scan = chart_scan(spec, chart, grid)
        fields = scan["fields"]
        shape = scan["shape"]
        H = scan["H"]
        qs2 = np.maximum(fields["qscale"] ** 2, 1e-300).reshape(shape)
        nonparab = np.abs(H) > PARABOLIC_BAND * qs2
        nmeas = _wm_measure(fields).reshape(shape)
        if np.any(nonparab):
            frac = float(np.mean(nmeas[nonparab] < QUADRIC_TOL))
            if frac > QUADRIC_FRACTION:
                return [], [
                    "degenerate: the fundamental cubic form vanishes on an open "
                    "set (quadric-like surface); characteristic points are not "
                    "isolated"
                ]
        base = scan["mb"].base
        if diag is None:
            diag = float(np.linalg.norm(base.max(axis=1) - base.min(axis=1))) or 1.0
        seeds_mask = (nmeas < seed_threshold) & nonparab & _local_minima(
            np.where(nonparab, nmeas, np.inf), scan["per_u"], scan["per_v"])
        iu, iv = np.nonzero(seeds_mask)
        order = np.argsort(nmeas[iu, iv])
        iu, iv = iu[order][:400], iv[order][:400]
        cell = max(scan["us"][1] - scan["us"][0], scan["vs"][1] - scan["vs"][0])
        seeds = [np.array([scan["us"][a], scan["vs"][b]]) for a, b in zip(iu, iv)]
        for p in seeds:
            _run_node_seed(spec, chart, p, cell, points, flags,
                           degen_msg, compute_winding)
    for chart, p, cell in _flecnodal_crossing_seeds(spec, grid):
        _run_node_seed(spec, chart, p, cell, points, flags,
                       degen_msg, compute_winding)
    points = _dedup_points(spec, points, diag)
    return points, flags


def _run_node_seed(spec, chart, p, cell, points, flags, degen_msg,
                   compute_winding):
    root = _newton_node(spec, chart, p, cell)
    if root is None:
        return
    if root == "degenerate":
        if degen_msg not in flags:
            flags.append(degen_msg)
        return
    p, fl, jac = root
    u0, u1, v0, v1 = spec.domain(chart)
    per_u, per_v = spec.periodic(chart)
    if not per_u and not (u0 - 1e-9 <= p[0] <= u1 + 1e-9):
        return
    if not per_v and not (v0 - 1e-9 <= p[1] <= v1 + 1e-9):
        return
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv[0] == 0.0 or sv[1] / sv[0] < 1e-6:
        if degen_msg not in flags:
            flags.append(degen_msg)
        return
    hval = float(fl["h"][0])
    qs = float(fl["qscale"][0])
    if abs(hval) <= PARABOLIC_BAND * qs**2:
        return
    points.append(_make_node(spec, chart, p, fl, hval, compute_winding))


def _seg_closest(a0, a1, b0, b1):
    """Closest points of two 2D segments: (distance, midpoint)."""
    r = a1 - a0
    s = b1 - b0
    best = None
    for t in np.linspace(0.0, 1.0, 9):
        p = a0 + t * r
        w = p - b0
        ss = float(s @ s)
        u = 0.0 if ss == 0.0 else min(1.0, max(0.0, float(w @ s) / ss))
        q = b0 + u * s
        dd = float(np.linalg.norm(p - q))
        if best is None or dd < best[0]:
            best = (dd, 0.5 * (p + q))
    return best


def _close_approaches(segs, tags, tol):
    """Near-contact midpoints between non-neighbouring segments.

    A transversal crossing of two traced branches never survives marching
    as an actual polyline intersection: the crossing cell resolves into a
    pair of kissing arcs.  Close approaches therefore cover both true and
    avoided crossings.
    """
    out = []
    if len(segs) < 2:
        return out
    lo = segs.min(axis=1)
    hi = segs.max(axis=1)
    cellsize = max(2.0 * tol, 1e-12)
    buckets = {}
    for k in range(len(segs)):
        # pad by tol so near-contacts across a cell boundary still share a cell
        for ci in range(int((lo[k, 0] - tol) // cellsize),
                        int((hi[k, 0] + tol) // cellsize) + 1):
            for cj in range(int((lo[k, 1] - tol) // cellsize),
                            int((hi[k, 1] + tol) // cellsize) + 1):
                buckets.setdefault((ci, cj), set()).add(k)
    pairs = set()
    for ks in buckets.values():
        ks = sorted(ks)
        for a in range(len(ks)):
            for b in range(a + 1, len(ks)):
                pairs.add((ks[a], ks[b]))
    for a, b in pairs:
        pa, ia, na = tags[a]
        pb, ib, nb = tags[b]
        if pa == pb:
            gap = min((ia - ib) % na, (ib - ia) % na)
            if gap <= 2:
                continue
        d, mid = _seg_closest(segs[a, 0], segs[a, 1], segs[b, 0], segs[b, 1])
        if d <= tol:
            out.append(mid)
    return out


def _flecnodal_crossing_seeds(spec, grid):
    """Near-contacts of flecnodal polylines, grouped per chart, as seeds."""
    try:
        trace = trace_flecnodal(spec, grid=grid)
    except SurfaceError:
        return
    by_chart = {}
    for pidx, pl in enumerate(trace.polylines):
        n = len(pl)
        nseg = n if pl.closed else n - 1
        for i in range(nseg):
            j = (i + 1) % n
            if pl.charts[i] == pl.charts[j]:
                by_chart.setdefault(pl.charts[i], ([], []))
                by_chart[pl.charts[i]][0].append((pl.params[i], pl.params[j]))
                by_chart[pl.charts[i]][1].append((pidx, i, nseg))
    for chart, (segs, tags) in by_chart.items():
        u0, u1, v0, v1 = spec.domain(chart)
        cell = max(u1 - u0, v1 - v0) / grid
        mids = _close_approaches(np.asarray(segs), tags, tol=0.75 * cell)
        taken = []
        for p in mids:
            if any(np.linalg.norm(p - q) < 0.5 * cell for q in taken):
                continue
            taken.append(p)
            if len(taken) > 400:
                break
            yield chart, np.asarray(p, dtype=float), cell


def _newton_node(spec, chart, p, cell, iters=40):
    p = p.astype(float).copy()
    h = 1e-6 * cell
    for _ in range(iters):
        stencil = np.array([
            p, p + [h, 0.0], p - [h, 0.0], p + [0.0, h], p - [0.0, h],
        ])
        try:
            fl = _eval_fields(spec, chart, stencil)
        except SurfaceError:
            return None
        wm = fl["wm"]
        if not np.all(np.isfinite(wm)):
            return None
        jac = np.stack([
            (wm[:, 1] - wm[:, 2]) / (2.0 * h),
            (wm[:, 3] - wm[:, 4]) / (2.0 * h),
        ], axis=1)
        f0 = wm[:, 0]
        denom = fl["cscale"][0] + 0.01 * fl["qscale"][0] ** 2
        sv = np.linalg.svd(jac, compute_uv=False)
        if (np.max(np.abs(f0)) <= 1e-10 * max(denom, 1e-300)
                and (sv[0] == 0.0 or sv[1] / sv[0] < 1e-7)):
            # on the zero set but the system does not pin the point: a
            # non-isolated family (symmetric surface), not a simple root
            return "degenerate"
        step, *_ = np.linalg.lstsq(jac, -f0, rcond=None)
        nrm = float(np.linalg.norm(step))
        if nrm > cell:
            step *= cell / nrm
        p = p + step
        if (np.max(np.abs(f0)) <= 1e-11 * max(denom, 1e-300)
                and nrm <= 1e-9 * cell):
            fl = _eval_fields(spec, chart, p[None, :])
            return p, fl, jac
    return None


def _make_node(spec, chart, p, fl, hval, compute_winding):
    kind = "hyperbonode" if hval < 0 else "ellipnode"
    pt = CharPoint(
        kind=kind,
        chart=chart,
        param=(float(p[0]), float(p[1])),
        base=fl["base"][:, 0].copy(),
        diagnostics={"H": hval},
    )
    try:
        mj = eval_monge_jet(spec, pt.param, order=4, chart=chart)
        if kind == "hyperbonode":
            nf = normalize_hyperbonode_frame(mj)
            pt.index = Fraction(hyperbonode_index(nf))
            rho, sigma = invariants_rho_sigma(nf)
            pt.diagnostics["rho"] = rho
            pt.diagnostics["sigma"] = sigma
        else:
            nf = normalize_ellipnode_frame(mj)
            pt.index = ellipnode_index(nf)
        if compute_winding:
            k = 1 if kind == "hyperbonode" else 3
            pt.diagnostics["winding"] = node_winding_index(
                spec, chart, pt.param, k, radius=_winding_radius(spec, chart))
    except (NonGenericError, SurfaceError) as exc:
        pt.flags.append(f"index unavailable: {exc}")
    return pt


def _winding_radius(spec, chart):
    u0, u1, v0, v1 = spec.domain(chart)
    return 0.01 * min(u1 - u0, v1 - v0)


def _dedup_points(spec, points, diag):
    if diag is None or not points:
        return points
    out = []
    for pt in points:
        dup = None
        for other in out:
            if np.linalg.norm(pt.base - other.base) <= 1e-6 * diag:
                dup = other
                break
        if dup is None:
            out.append(pt)
            continue
        # prefer the representative that sits most interior in its chart
        if _chart_margin(spec, pt) > _chart_margin(spec, dup):
            out[out.index(dup)] = pt
    return out


def _chart_margin(spec, pt):
    u0, u1, v0, v1 = spec.domain(pt.chart)
    if any(spec.periodic(pt.chart)):
        return 1.0
    u, v = pt.param
    return min(u - u0, u1 - u, v - v0, v1 - v)


# ---------------------------------------------------------------------------
# godrons

def _kernel_dirs(fl):
    """Unit kernel direction of Q per column (tangent coordinates)."""
    q = fl["q"]
    n = q.shape[1]
    s = np.empty((n, 2, 2))
    s[:, 0, 0] = 2.0 * q[0]
    s[:, 0, 1] = q[1]
    s[:, 1, 0] = q[1]
    s[:, 1, 1] = 2.0 * q[2]
    w, v = np.linalg.eigh(s)
    pick = np.argmin(np.abs(w), axis=1)
    return v[np.arange(n), :, pick]


def _godron_g(spec, polyline):
    """g = dH(kernel) at polyline vertices, sign-aligned along the walk in 3D.

    The kernel field is only defined up to sign, so alignment compares the
    3-space representatives of consecutive vertices (charts may differ).
    Returns (g, v3, |dH|) arrays."""
    n = len(polyline)
    g = np.zeros(n)
    v3 = np.zeros((n, 3))
    dhmag = np.zeros(n)
    for chart in dict.fromkeys(polyline.charts):
        idx = [i for i, c in enumerate(polyline.charts) if c == chart]
        fl = _eval_fields(spec, chart, polyline.params[idx])
        vs = _kernel_dirs(fl)
        mb = fl["mb"]
        v3c = vs[:, 0][:, None] * mb.e1.T + vs[:, 1][:, None] * mb.e2.T
        gc = fl["dh"][0] * vs[:, 0] + fl["dh"][1] * vs[:, 1]
        for row, i in enumerate(idx):
            v3[i] = v3c[row]
            g[i] = gc[row]
            dhmag[i] = np.linalg.norm(fl["dh"][:, row])
    for i in range(1, n):
        if float(v3[i] @ v3[i - 1]) < 0.0:
            v3[i] = -v3[i]
            g[i] = -g[i]
    return g, v3, dhmag


def find_godrons(spec, trace, tol=1e-9):
    """Godrons: points of the parabolic curve where the kernel direction is
    tangent to it, located as sign changes of g = dH(kernel) along each
    polyline; each godron carries the +-1 sign read off from whether the
    kernel half-direction into the hyperbolic domain points toward the
    godron on both sides."""
    out = []
    flags = []
    for polyline in trace.polylines:
        if len(polyline) < 4:
            continue
        g, v3, dhmag = _godron_g(spec, polyline)
        gscale = float(np.median(dhmag)) or 1.0
        if float(np.median(np.abs(g))) <= 1e-8 * gscale:
            flags.append(
                "degenerate: kernel direction tangent to the parabolic curve "
                "along a whole component (no isolated godrons)"
            )
            continue
        n = len(polyline)
        nz = [k for k in range(n) if abs(g[k]) > 1e-12 * gscale]
        if len(nz) < 2:
            continue
        pairs = list(zip(nz[:-1], nz[1:]))
        if polyline.closed:
            pairs.append((nz[-1], nz[0]))
        for i, j in pairs:
            if g[i] * g[j] >= 0.0:
                continue
            if j == (i + 1) % n:
                got = _bisect_godron(spec, polyline, i, j, v3[i], g[i])
            else:
                # the sign change brackets vertices where g vanished exactly:
                # the middle such vertex is the godron, already on the curve
                gap = (j - i) % n
                mid = (i + gap // 2) % n
                fl = _eval_fields(
                    spec, polyline.charts[mid], polyline.params[mid][None, :])
                got = (polyline.params[mid].copy(), fl)
            if got is None:
                continue
            pt = _classify_godron(spec, polyline, i, j, got)
            out.append(pt)
    return out, flags


def _g_at(spec, chart, p, v3_ref):
    fl = _eval_fields(spec, chart, p[None, :])
    v = _kernel_dirs(fl)[0]
    mb = fl["mb"]
    v3 = v[0] * mb.e1[:, 0] + v[1] * mb.e2[:, 0]
    if float(v3 @ v3_ref) < 0.0:
        v = -v
        v3 = -v3
    return float(fl["dh"][0, 0] * v[0] + fl["dh"][1, 0] * v[1]), v3, fl


def _bisect_godron(spec, polyline, k, k2, v3_ref, g_left, iters=60):
    chart = polyline.charts[k]
    if polyline.charts[k2] != chart:
        # convert the far endpoint into this chart through 3-space
        try:
            pb = np.array(spec.param_from_point(chart, polyline.base[k2]))
        except (NotImplementedError, ZeroDivisionError):
            return None
    else:
        pb = polyline.params[k2]
    pa = polyline.params[k].copy()
    pb = pb.copy()
    # pull pb onto the periodic image nearest pa (the closing segment of a
    # closed loop otherwise bisects straight across the whole domain)
    per_u, per_v = spec.periodic(chart)
    u0d, u1d, v0d, v1d = spec.domain(chart)
    if per_u:
        span = u1d - u0d
        pb[0] += span * round((pa[0] - pb[0]) / span)
    if per_v:
        span = v1d - v0d
        pb[1] += span * round((pa[1] - pb[1]) / span)
    sl = 1.0 if g_left > 0 else -1.0
    for _ in range(iters):
        mid = 0.5 * (pa + pb)
        mid, _, _ = _polish_h(spec, chart, mid[None, :], iters=3)
        mid = mid[0]
        gm, v3m, _ = _g_at(spec, chart, mid, v3_ref)
        if gm == 0.0 or np.linalg.norm(pb - pa) < 1e-14 * (1.0 + np.linalg.norm(pa)):
            pa = mid
            break
        if (gm > 0) == (sl > 0):
            pa = mid
        else:
            pb = mid
    m, _, fl = _polish_h(spec, chart, (0.5 * (pa + pb))[None, :], iters=4)
    return m[0], fl


def _classify_godron(spec, polyline, k, k2, got, offset=5):
    m, fl = got
    chart = polyline.charts[k]
    base_m = fl["base"][:, 0].copy()
    pt = CharPoint(
        kind="godron",
        chart=chart,
        param=(float(m[0]), float(m[1])),
        base=base_m,
    )
    n = len(polyline)
    if polyline.closed:
        ia = (k - offset) % n
        ib = (k2 + offset) % n
    else:
        ia = max(k - offset, 0)
        ib = min(k2 + offset, n - 1)
    votes = []
    for idx in (ia, ib):
        chart_s = polyline.charts[idx]
        p_s = polyline.params[idx]
        fl_s = _eval_fields(spec, chart_s, p_s[None, :])
        v = _kernel_dirs(fl_s)[0]
        gs = float(fl_s["dh"][0, 0] * v[0] + fl_s["dh"][1, 0] * v[1])
        if gs == 0.0:
            votes.append(None)
            continue
        if gs > 0.0:
            v = -v  # orient into the hyperbolic side: dH(v) < 0
        mb = fl_s["mb"]
        v3 = v[0] * mb.e1[:, 0] + v[1] * mb.e2[:, 0]
        toward = float(v3 @ (base_m - fl_s["base"][:, 0])) > 0.0
        votes.append(toward)
    if None in votes or votes[0] != votes[1]:
        pt.flags.append("non-generic godron: side votes disagree")
        return pt
    pt.sign = 1 if votes[0] else -1
    pt.index = godron_tau_index(pt.sign)
    pt.diagnostics["tau_index"] = godron_tau_index(pt.sign)
    pt.diagnostics["asymptotic_index"] = godron_asymptotic_index(pt.sign)
    return pt


# ---------------------------------------------------------------------------
# boundary winding arcs at godrons

def godron_boundary_winding(spec, polyline, godron, field, radius, samples=256):
    """Numeric boundary index of a field at a godron, from trace geometry.

    field: "tau" (3-valued, tracked on the elliptic side) or "asymptotic"
    (2-valued, hyperbolic side).  The arc is a circle-like path around the
    godron through the chosen side with endpoints on the parabolic curve;
    tangent data comes from the polished polyline.
    """
    if field == "tau":
        k, want_elliptic = 3, True
    elif field == "asymptotic":
        k, want_elliptic = 2, False
    else:
        raise ValueError(field)
    chart = godron.chart
    if any(c != chart for c in polyline.charts):
        raise NonGenericError("godron arc spans several charts; not supported")
    m = np.array(godron.param)
    pts = polyline.params
    dist = np.linalg.norm(pts - m, axis=1)
    j0 = int(np.argmin(dist))
    before, after = _arc_feet(pts, j0, m, radius, polyline.closed)
    if before is None:
        raise NonGenericError("godron too close to the end of its polyline")
    # curve tangent at the godron and the side probe
    d = pts[min(j0 + 1, len(pts) - 1)] - pts[max(j0 - 1, 0)]
    d = d / np.linalg.norm(d)
    nrm = np.array([-d[1], d[0]])
    fl = _eval_fields(spec, chart, (m + 0.35 * radius * nrm)[None, :])
    probe_elliptic = float(fl["h"][0]) > 0.0
    if probe_elliptic != want_elliptic:
        nrm = -nrm
    # boundary orientation T keeps the region on the left: rot90(T) = nrm
    T = np.array([nrm[1], -nrm[0]])
    order_dir = 1 if float(T @ d) > 0 else -1
    if order_dir > 0:
        ib, ia = before, after     # B before m along T, A after
    else:
        ib, ia = after, before
    A = pts[ia]
    B = pts[ib]
    # arc from A to B through the region side
    aA = math.atan2(*(A - m)[::-1])
    aB = math.atan2(*(B - m)[::-1])
    aR = math.atan2(nrm[1], nrm[0])
    ccw = ((aB - aA) % (2.0 * math.pi))
    through = ((aR - aA) % (2.0 * math.pi)) < ccw
    sweep = ccw if through else ccw - 2.0 * math.pi
    rA = np.linalg.norm(A - m)
    rB = np.linalg.norm(B - m)
    ts = np.linspace(0.0, 1.0, samples)
    ang = aA + sweep * ts
    rad = rA + (rB - rA) * ts
    arc = m[None, :] + np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    arc[0] = A
    arc[-1] = B
    tangent_b, tangent_a, turn = _exact_tangents(
        spec, chart, pts, ib, ia, order_dir, polyline.closed, T)
    if field == "tau":
        sampler = tau_sampler(spec, chart, 3)
    else:
        sampler = asymptotic_sampler(spec, chart)
    return boundary_winding_index(sampler, arc, k, tangent_a, tangent_b, turn)


def _exact_tangents(spec, chart, pts, ib, ia, order_dir, closed, T):
    """Oriented boundary tangent angles at B and A and the exact turning
    between them, walking B -> A through the godron.

    The tangent of {H = 0} is rot90 of the chart gradient of H (exact at
    polished vertices), which removes the first-order error of polyline
    segment directions."""
    n = len(pts)
    idx = [ib]
    j = ib
    while j != ia:
        j = (j + order_dir) % n if closed else j + order_dir
        if j < 0 or j >= n or len(idx) > n + 1:
            raise NonGenericError("godron walk left the polyline")
        idx.append(j)
    fl = _eval_fields(spec, chart, pts[idx])
    grad = fl["grad"]
    tdir = np.stack([-grad[1], grad[0]], axis=1)
    tdir /= np.linalg.norm(tdir, axis=1)[:, None]
    if float(tdir[0] @ T) < 0.0:
        tdir[0] = -tdir[0]
    for i in range(1, len(idx)):
        if float(tdir[i] @ tdir[i - 1]) < 0.0:
            tdir[i] = -tdir[i]
    angs = np.arctan2(tdir[:, 1], tdir[:, 0])
    turn = 0.0
    for a, b in zip(angs[:-1], angs[1:]):
        turn += (b - a + math.pi) % (2.0 * math.pi) - math.pi
    return float(angs[0]), float(angs[-1]), float(turn)


def _arc_feet(pts, j0, m, radius, closed):
    n = len(pts)
    before = after = None
    acc = 0.0
    j = j0
    while True:
        j2 = j - 1 if not closed else (j - 1) % n
        if j2 < 0 or (closed and j2 == j0):
            break
        acc += np.linalg.norm(pts[j] - pts[j2])
        j = j2
        if acc >= radius:
            before = j
            break
    acc = 0.0
    j = j0
    while True:
        j2 = j + 1 if not closed else (j + 1) % n
        if j2 >= n or (closed and j2 == j0):
            break
        acc += np.linalg.norm(pts[j2] - pts[j])
        j = j2
        if acc >= radius:
            after = j
            break
    if before is None or after is None:
        return None, None
    return before, after


