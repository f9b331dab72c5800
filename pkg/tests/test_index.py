"""Node and godron indices: closed formulas, winding engine, boundary collars."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicform.forms import NonGenericError
from cubicform.index import (
    ResolutionError,
    asymptotic_sampler,
    boundary_winding_index,
    circle_loop,
    ellipnode_index,
    godron_asymptotic_index,
    godron_tau_index,
    hyperbonode_index,
    invariants_rho_sigma,
    node_winding_index,
    tau_sampler,
    winding_index,
)
from cubicform.jets import Jet2
from cubicform.normalize import normalize_ellipnode_frame, normalize_hyperbonode_frame
from cubicform.surface import MongeJet, catalog, eval_monge_jet


def bare_jet(mj_f: Jet2) -> MongeJet:
    """Wrap a height jet in a trivial frame (formula tests ignore the rest)."""
    return MongeJet(
        chart="xy",
        param=(0.0, 0.0),
        base=np.zeros(3),
        e1=np.array([1.0, 0.0, 0.0]),
        e2=np.array([0.0, 1.0, 0.0]),
        n=np.array([0.0, 0.0, 1.0]),
        f=mj_f,
        dm=np.eye(2),
    )


def hyperbonode_jet(a, b, f40, f04, f21=0.0, f12=0.0):
    """xy + higher terms in asymptotic axes (derivative values given)."""
    return bare_jet(
        Jet2.from_terms(
            4,
            {
                (1, 1): 1.0,
                (2, 1): f21 / 2.0,
                (1, 2): f12 / 2.0,
                (3, 1): a / 6.0,
                (1, 3): b / 6.0,
                (4, 0): f40 / 24.0,
                (0, 4): f04 / 24.0,
            },
        )
    )


# ---------------------------------------------------------------------------
# closed formulas

def test_hyperbonode_index_quartic_vs_mixed_balance():
    # arg = 4 f40 f04 - (2a)(2b) for the pure normal form
    assert hyperbonode_index(hyperbonode_jet(2.0, 1.0, 1.0, 1.0)) == -1
    assert hyperbonode_index(hyperbonode_jet(2.0, 1.0, 1.0, -1.0)) == -1
    assert hyperbonode_index(hyperbonode_jet(0.2, 0.3, 1.0, 1.0)) == 1
    assert hyperbonode_index(hyperbonode_jet(-1.0, 1.0, 1.0, 2.0)) == 1


def test_hyperbonode_index_requires_asymptotic_axes():
    f = Jet2.from_terms(4, {(2, 0): 1.0, (0, 2): -1.0, (4, 0): 1.0})
    with pytest.raises(NonGenericError):
        hyperbonode_index(bare_jet(f))


def test_hyperbonode_index_rejects_zero_discriminant():
    # 4 f40 f04 = 4ab exactly
    with pytest.raises(NonGenericError):
        hyperbonode_index(hyperbonode_jet(1.0, 1.0, 1.0, 1.0))


def test_ellipnode_index_sign_of_quartic_argument():
    def ej(a, b, c, I, J):
        return bare_jet(
            Jet2.from_terms(
                4,
                {
                    (2, 0): 0.5,
                    (0, 2): 0.5,
                    (3, 1): a / 6.0,
                    (1, 3): b / 6.0,
                    (2, 2): c / 4.0,
                    (4, 0): I / 24.0,
                    (0, 4): J / 24.0,
                },
            )
        )

    # arg = (a - 3b)(b - 3a) - (I - 3c)(J - 3c)
    assert ellipnode_index(ej(1.0, -2.0, 0.0, 1.0, 1.0)) == Fraction(-1, 3)
    assert ellipnode_index(ej(1.0, 1.0, 0.0, 3.0, -3.0)) == Fraction(1, 3)
    with pytest.raises(NonGenericError):
        ellipnode_index(ej(0.0, 0.0, 0.0, 0.0, 0.0))
    with pytest.raises(NonGenericError):
        # cubic terms present
        ellipnode_index(
            bare_jet(Jet2.from_terms(4, {(2, 0): 0.5, (0, 2): 0.5, (3, 0): 0.3}))
        )


def test_rho_sigma_product_equals_index():
    mj = hyperbonode_jet(2.0, 1.0, 1.0, 1.0)
    rho, sigma = invariants_rho_sigma(mj)
    assert rho == pytest.approx(1.0 - 2.0 * 1.0 / 1.0)
    assert sigma == 1
    assert hyperbonode_index(mj) == (1 if rho * sigma > 0 else -1)


nz = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@settings(max_examples=120, deadline=None)
@given(nz, nz, nz, nz, nz, nz)
def test_rho_sigma_route_matches_formula_route(a, b, f40, f04, f21, f12):
    mj = hyperbonode_jet(a, b, f40, f04, f21, f12)
    if abs(f40 * f04) < 1e-3:
        return
    arg = 4.0 * f40 * f04 - (2.0 * a - 3.0 * f21**2) * (2.0 * b - 3.0 * f12**2)
    if abs(arg) < 1e-2:
        return
    rho, sigma = invariants_rho_sigma(mj)
    assert hyperbonode_index(mj) == (1 if rho * sigma > 0 else -1)


@settings(max_examples=80, deadline=None)
@given(nz, nz, nz, nz,
       st.floats(min_value=0.3, max_value=3.0),
       st.floats(min_value=0.3, max_value=3.0))
def test_hyperbonode_index_invariant_under_axis_rescaling(a, b, f40, f04, lam, mu):
    arg = 4.0 * f40 * f04 - 4.0 * a * b
    if abs(arg) < 1e-2:
        return
    base = hyperbonode_index(hyperbonode_jet(a, b, f40, f04))
    # x -> lam x, y -> mu y, then height / (lam mu) restores f11 = 1
    s = lam * mu
    scaled = hyperbonode_jet(
        a * lam**3 * mu / s, b * lam * mu**3 / s, f40 * lam**4 / s, f04 * mu**4 / s
    )
    assert hyperbonode_index(scaled) == base


def test_hyperbonode_index_invariant_under_axis_swap():
    for a, b, f40, f04 in [(2.0, 1.0, 1.0, 1.0), (0.1, -0.4, 1.5, 0.7)]:
        assert hyperbonode_index(hyperbonode_jet(a, b, f40, f04)) == hyperbonode_index(
            hyperbonode_jet(b, a, f04, f40)
        )


def test_godron_index_helpers():
    assert godron_tau_index(1) == Fraction(-1, 3)
    assert godron_tau_index(-1) == Fraction(1, 3)
    assert godron_asymptotic_index(1) == Fraction(1, 2)
    assert godron_asymptotic_index(-1) == Fraction(-1, 2)
    with pytest.raises(ValueError):
        godron_tau_index(0)
    with pytest.raises(ValueError):
        godron_asymptotic_index(2)


# ---------------------------------------------------------------------------
# winding engine on synthetic fields

def spun_line_field(m):
    """1-valued line field of index m/2 around the origin."""

    def sample(u, v):
        return [(0.5 * m * math.atan2(v, u)) % math.pi]

    return sample


@pytest.mark.parametrize("m", [-2, -1, 1, 2, 3])
def test_winding_of_synthetic_single_field(m):
    idx = winding_index(spun_line_field(m), circle_loop((0.0, 0.0), 1.0), 1)
    assert idx == Fraction(m, 2)


@pytest.mark.parametrize("m", [-2, -1, 1, 2])
def test_winding_of_synthetic_three_valued_field(m):
    def sample(u, v):
        t = math.atan2(v, u)
        return sorted((m * t / 6.0 + j * math.pi / 3.0) % math.pi for j in range(3))

    idx = winding_index(sample, circle_loop((0.0, 0.0), 1.0), 3)
    assert idx == Fraction(m, 6)


def test_winding_adaptive_refinement_handles_uneven_rotation():
    def sample(u, v):
        t = math.atan2(v, u)
        return [(0.5 * (t + 0.9 * math.sin(3.0 * t))) % math.pi]

    assert winding_index(sample, circle_loop((0.0, 0.0), 1.0), 1) == Fraction(1, 2)


def test_winding_raises_on_unresolvable_jump():
    # a quarter-turn discontinuity never refines below the step cap, so the
    # engine must report failure instead of guessing a lattice value
    def sample(u, v):
        return [0.0 if u > 0 else math.pi / 2.0]

    with pytest.raises(ResolutionError):
        winding_index(sample, circle_loop((0.0, 0.0), 1.0), 1, cap=4096)


# ---------------------------------------------------------------------------
# two routes on catalog patches

@pytest.mark.parametrize(
    "name,params,want",
    [
        ("lp_hyperbonode", {"a": 2.0, "b": 1.0, "sign": 1.0}, -1),
        ("lp_hyperbonode", {"a": 2.0, "b": 1.0, "sign": -1.0}, -1),
        ("lp_hyperbonode", {"a": 0.2, "b": 0.3, "sign": 1.0}, 1),
        ("ot_hyperbonode", {"I": 1.0, "J": 2.0, "sign": 1.0}, 1),
        ("ot_hyperbonode", {"I": 1.0, "J": 0.2, "sign": 1.0}, -1),
        ("pre_hyperbonode", {"a": 2.0, "b": 3.0}, -1),
    ],
)
def test_hyperbonode_formula_and_winding_agree(name, params, want):
    spec = catalog(name, params)
    mj = eval_monge_jet(spec, (0.0, 0.0), order=4)
    formula = hyperbonode_index(normalize_hyperbonode_frame(mj))
    assert formula == want
    assert node_winding_index(spec, "xy", (0.0, 0.0), 1, 0.12) == Fraction(want)


@pytest.mark.parametrize(
    "params,want",
    [
        ({"a": 1.0, "b": -2.0}, Fraction(-1, 3)),
        ({"a": 1.0, "b": 1.0, "I": 3.0, "J": -3.0}, Fraction(1, 3)),
    ],
)
def test_ellipnode_formula_and_winding_agree(params, want):
    spec = catalog("pre_ellipnode", params)
    mj = eval_monge_jet(spec, (0.0, 0.0), order=4)
    assert ellipnode_index(normalize_ellipnode_frame(mj)) == want
    assert node_winding_index(spec, "xy", (0.0, 0.0), 3, 0.12) == want


def test_diagonal_frame_evaluation_normalizes_to_same_index():
    # rotating the evaluation frame by pi/4 changes every raw coefficient but
    # not the normalized-frame index or invariants
    spec = catalog("lp_hyperbonode", {"a": 2.0, "b": 1.0, "sign": 1.0})
    straight = normalize_hyperbonode_frame(eval_monge_jet(spec, (0.0, 0.0), order=4))
    tilted = normalize_hyperbonode_frame(
        eval_monge_jet(spec, (0.0, 0.0), order=4, frame_angle=math.pi / 4.0)
    )
    assert hyperbonode_index(tilted) == hyperbonode_index(straight)
    rho_s, sig_s = invariants_rho_sigma(straight)
    rho_t, sig_t = invariants_rho_sigma(tilted)
    assert rho_t == pytest.approx(rho_s, rel=1e-6)
    assert sig_t == sig_s


def test_tau_sampler_rejects_wrong_branch_count():
    spec = catalog("pre_ellipnode", {"a": 1.0, "b": -2.0})
    sample = tau_sampler(spec, "xy", 1)
    with pytest.raises(ResolutionError):
        sample(0.1, 0.05)  # elliptic point carries three zero lines


# ---------------------------------------------------------------------------
# boundary collars

def disk_tangency_arc(theta0, r, n=400):
    """Arc of radius r inside the unit disk around boundary point theta0.

    Endpoints sit on the unit circle; the walk is ccw around the boundary
    point.  Returns (pts, tangent_a, tangent_b, tangent_turn) for the ccw
    oriented circle (disk on the left).
    """
    c = np.array([math.cos(theta0), math.sin(theta0)])
    s = math.asin(r / 2.0)
    phi = np.linspace(math.pi + s, 2.0 * math.pi - s, n)
    rot = theta0 - math.pi / 2.0
    pts = c[None, :] + r * np.stack([np.cos(phi + rot), np.sin(phi + rot)], axis=1)
    pts[0] /= np.linalg.norm(pts[0])
    pts[-1] /= np.linalg.norm(pts[-1])
    off = 2.0 * s
    ta = theta0 + off + math.pi / 2.0
    tb = theta0 - off + math.pi / 2.0
    return pts, ta, tb, 2.0 * off


def test_constant_field_disk_tangencies_sum_to_euler_characteristic():
    const = lambda u, v: [0.0]
    total = Fraction(0)
    for theta0 in (math.pi / 2.0, -math.pi / 2.0):
        pts, ta, tb, turn = disk_tangency_arc(theta0, 0.2)
        idx = boundary_winding_index(const, pts, 1, ta, tb, turn)
        assert idx == Fraction(1, 2)
        total += idx
    assert total == 1


def godron_arc(rho, r, side, n=600):
    """Circle arc around the origin godron of z = y^2/2 - x^2y + rho x^4/2.

    The parabolic curve is y = (3 rho - 2) x^2; side=+1 walks through the
    hyperbolic region (above, boundary oriented +x), side=-1 through the
    elliptic region (below, boundary oriented -x).  Endpoints are placed
    exactly on the curve.
    """
    k = 3.0 * rho - 2.0
    x = math.sqrt((math.sqrt(1.0 + 4.0 * k**2 * r**2) - 1.0) / (2.0 * k**2))
    pp = np.array([x, k * x**2])
    pm = np.array([-x, k * x**2])
    ang_p = math.atan2(pp[1], pp[0])
    ang_m = math.atan2(pm[1], pm[0]) % (2.0 * math.pi)
    if side > 0:
        ts = np.linspace(ang_p, ang_m, n)
        A, B, sense = pp, pm, 1.0
    else:
        e1 = ang_p % (2.0 * math.pi)
        if e1 < ang_m:
            e1 += 2.0 * math.pi
        ts = np.linspace(ang_m, e1, n)
        A, B, sense = pm, pp, -1.0
    pts = np.stack([r * np.cos(ts), r * np.sin(ts)], axis=1)
    pts[0], pts[-1] = A, B
    ta = math.atan2(sense * 2.0 * k * A[0], sense)
    tb = math.atan2(sense * 2.0 * k * B[0], sense)
    turn = (ta - tb + math.pi) % (2.0 * math.pi) - math.pi
    return pts, ta, tb, turn


@pytest.mark.parametrize("rho,sign", [(2.0, 1), (0.5, -1)])
def test_godron_boundary_windings_match_sign_formulas(rho, sign):
    spec = catalog("platonova", {"rho": rho})
    pts, ta, tb, turn = godron_arc(rho, 0.12, side=-1)
    tau = boundary_winding_index(tau_sampler(spec, "xy", 3), pts, 3, ta, tb, turn)
    assert tau == godron_tau_index(sign)
    pts, ta, tb, turn = godron_arc(rho, 0.12, side=+1)
    asym = boundary_winding_index(
        asymptotic_sampler(spec, "xy"), pts, 2, ta, tb, turn
    )
    assert asym == godron_asymptotic_index(sign)
