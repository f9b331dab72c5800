"""Tangent-plane forms: splitting, lambda operator, zero lines, cubic field."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicform.forms import (
    BinaryForm,
    NonGenericError,
    fcf_coefficient_jets,
    fundamental_quantities,
    lambda_op,
    product_qc,
    real_zero_lines,
    resultant_qc,
    split_cubic,
)
from cubicform.jets import Jet2


def quad_jet(q0, q1, q2, order=4, extra=None):
    """Jet of q0 x^2 + q1 xy + q2 y^2 plus optional higher terms."""
    terms = {(2, 0): q0, (1, 1): q1, (0, 2): q2}
    if extra:
        terms.update(extra)
    return Jet2.from_terms(order, terms)


def test_lambda_normalisation():
    # lambda_op(Q, Q) = 4(ac - b^2) for Q = a x^2 + 2b xy + c y^2
    q = BinaryForm(2, (3.0, 2 * 0.5, -2.0))
    assert lambda_op(q, q) == pytest.approx(4 * (3.0 * -2.0 - 0.25))


def test_lambda_kernels_match_known_spans():
    xy = BinaryForm(2, (0.0, 1.0, 0.0))
    for coeffs in [(1, 0, 0, 0), (0, 0, 0, 1)]:  # x^3, y^3
        out = lambda_op(xy, BinaryForm(3, coeffs))
        assert out.max_abs() == 0.0
    circ = BinaryForm(2, (1.0, 0.0, 1.0))
    for coeffs in [(1, 0, -3, 0), (0, 3, 0, -1)]:  # x^3-3xy^2, 3x^2y-y^3
        out = lambda_op(circ, BinaryForm(3, coeffs))
        assert out.max_abs() == 0.0


def test_split_circular_q_x_cubed():
    # Q = x^2 + y^2, C = x^3: L = (3/4)x, Wminus = (x^3 - 3xy^2)/4
    q = BinaryForm(2, (1.0, 0.0, 1.0))
    c = BinaryForm(3, (1.0, 0.0, 0.0, 0.0))
    l, wm = split_cubic(q, c)
    assert l.a == pytest.approx((0.75, 0.0))
    assert wm.a == pytest.approx((0.25, 0.0, -0.75, 0.0))


def test_split_hyperbolic_q():
    # Q = xy, C = x^3 + x^2 y: L = x, Wminus = x^3
    q = BinaryForm(2, (0.0, 1.0, 0.0))
    c = BinaryForm(3, (1.0, 1.0, 0.0, 0.0))
    l, wm = split_cubic(q, c)
    assert l.a == pytest.approx((1.0, 0.0))
    assert wm.a == pytest.approx((1.0, 0.0, 0.0, 0.0))


def test_split_rejects_parabolic():
    q = BinaryForm(2, (1.0, 0.0, 0.0))
    c = BinaryForm(3, (1.0, 0.0, 0.0, 0.0))
    with pytest.raises(NonGenericError):
        split_cubic(q, c)


bounded = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@settings(max_examples=80, deadline=None)
@given(
    st.tuples(bounded, bounded, bounded),
    st.tuples(bounded, bounded, bounded, bounded),
)
def test_split_reconstructs_and_lands_in_kernel(qc, cc):
    q = BinaryForm(2, qc)
    hq = lambda_op(q, q)
    if abs(hq) < 0.05:
        return
    c = BinaryForm(3, cc)
    l, wm = split_cubic(q, c)
    rebuilt = product_qc(q, l) + wm
    assert np.allclose(rebuilt.a, c.a, atol=1e-10)
    resid = lambda_op(q, wm)
    assert resid.max_abs() <= 1e-9 * max(1.0, c.max_abs())


@settings(max_examples=80, deadline=None)
@given(st.lists(bounded, min_size=7, max_size=7))
def test_lemma_lambda_c_is_half_dh(vals):
    # for any height jet, lambda_op(Q, C) = dH / 2 identically
    f = Jet2(3)
    f.c[3:10] = vals  # fill the quadratic and cubic slots
    pf = fundamental_quantities(f)
    lam = lambda_op(pf.Q, pf.C)
    assert abs(lam.a[0] - 0.5 * pf.dH.a[0]) <= 1e-10
    assert abs(lam.a[1] - 0.5 * pf.dH.a[1]) <= 1e-10


def test_lemma_dh_of_q_plus_ql():
    # f = Q + Q L has dH = 4 H_Q L at the origin
    a, b, c = 1.0, 0.4, -0.7
    l1, l2 = 0.8, -0.3
    q = BinaryForm(2, (a, 2 * b, c))
    ql = product_qc(q, BinaryForm(1, (l1, l2)))
    f = Jet2.from_terms(
        4,
        {
            (2, 0): a,
            (1, 1): 2 * b,
            (0, 2): c,
            (3, 0): ql.a[0],
            (2, 1): ql.a[1],
            (1, 2): ql.a[2],
            (0, 3): ql.a[3],
        },
    )
    pf = fundamental_quantities(f)
    hq = 4 * (a * c - b * b)
    assert pf.dH.a == pytest.approx((4 * hq * l1, 4 * hq * l2))


def test_w_equals_4h_times_wminus():
    # two independent routes to the traceless part must agree
    rng = np.random.default_rng(11)
    for _ in range(25):
        f = Jet2(3, np.r_[np.zeros(3), rng.normal(size=7)])
        pf = fundamental_quantities(f)
        if abs(pf.H0) < 0.05:
            continue
        _, wm = split_cubic(pf.Q, pf.C)
        assert np.allclose(pf.W.a, wm.scaled(4.0 * pf.H0).a, atol=1e-9)
        lam = lambda_op(pf.Q, pf.W)
        assert lam.max_abs() <= 1e-8 * max(1.0, pf.W.max_abs())


def test_zero_lines_elliptic_and_hyperbolic_quadratics():
    assert real_zero_lines(BinaryForm(2, (1.0, 0.0, 1.0))) == []
    lines = real_zero_lines(BinaryForm(2, (0.0, 1.0, 0.0)))
    assert [m for _, m in lines] == [1, 1]
    assert lines[0][0] == pytest.approx(0.0, abs=1e-12)
    assert lines[1][0] == pytest.approx(math.pi / 2, abs=1e-12)
    double = real_zero_lines(BinaryForm(2, (1.0, 2.0, 1.0)))
    assert double == [(pytest.approx(3 * math.pi / 4), 2)]


def test_zero_lines_cubic_three_distinct():
    # dy(dy - dx)(dy + dx) = dy^3 - dx^2 dy
    p = BinaryForm(3, (0.0, -1.0, 0.0, 1.0))
    lines = real_zero_lines(p)
    angles = [t for t, _ in lines]
    assert [m for _, m in lines] == [1, 1, 1]
    assert angles == pytest.approx([0.0, math.pi / 4, 3 * math.pi / 4], abs=1e-10)


def test_zero_lines_cubic_double_plus_simple():
    # (dy - dx)^2 (dy + 2dx) = 2dx^3 - 3dx^2dy + dy^3
    p = BinaryForm(3, (2.0, -3.0, 0.0, 1.0))
    lines = real_zero_lines(p)
    assert [(round(t, 6), m) for t, m in sorted(lines, key=lambda x: -x[1])] == [
        (round(math.pi / 4, 6), 2),
        (round(math.atan(-2.0) % math.pi, 6), 1),
    ]


def test_zero_lines_triple_and_zero_form():
    triple = real_zero_lines(BinaryForm(3, (0.0, 0.0, 0.0, 1.0)))
    assert triple == [(0.0, 3)]
    assert real_zero_lines(BinaryForm(3, (0.0, 0.0, 0.0, 0.0))) == []


def test_zero_lines_single_real_root():
    # dx^3 + dx dy^2 = dx(dx^2 + dy^2): one real line
    p = BinaryForm(3, (1.0, 0.0, 1.0, 0.0))
    lines = real_zero_lines(p)
    assert len(lines) == 1
    assert lines[0] == (pytest.approx(math.pi / 2), 1)


def test_resultant_detects_shared_direction():
    q = BinaryForm(2, (0.0, 1.0, 0.0))  # dx dy
    c_shared = BinaryForm(3, (1.0, 0.0, 0.0, 0.0))  # dx^3, shares dx = 0? no: shares root (0,1)? dx^3(0,1)=0, q(0,1)=0
    assert resultant_qc(q, c_shared) == pytest.approx(0.0, abs=1e-12)
    c_apart = BinaryForm(3, (1.0, 3.0, 3.0, 1.0))  # (dx + dy)^3
    assert abs(resultant_qc(q, c_apart)) > 0.1
    # homogeneity: Res(s Q, C) = s^3 Res(Q, C)
    r1 = resultant_qc(q.scaled(2.0), c_apart)
    assert r1 == pytest.approx(8.0 * resultant_qc(q, c_apart))


def test_fcf_field_of_godron_normal_form():
    # z = y^2/2 - x^2 y + rho x^4/2: the four coefficient polynomials of W
    for rho in (2.0, 0.5, -1.0):
        f = Jet2.from_terms(6, {(0, 2): 0.5, (2, 1): -1.0, (4, 0): rho / 2.0})
        w0, w1, w2, w3 = fcf_coefficient_jets(f)
        rng = np.random.default_rng(5)
        for _ in range(10):
            x, y = rng.uniform(-0.3, 0.3, size=2)
            assert w0.eval(x, y) == pytest.approx(
                (-(4 * rho + 8) * y + (12 * rho**2 - 8 * rho) * x * x) * x, abs=1e-12
            )
            assert w1.eval(x, y) == pytest.approx(6 * (y + rho * x * x), abs=1e-12)
            assert w2.eval(x, y) == pytest.approx(-6 * rho * x, abs=1e-12)
            assert w3.eval(x, y) == pytest.approx(1.0, abs=1e-12)


def test_fcf_field_matches_pointwise_fundamental_quantities():
    # coefficient polynomials evaluated at p agree with the shifted-jet W;
    # degree-4 patches keep every product within order 6, so this is exact
    rng = np.random.default_rng(23)
    f4 = Jet2(4, rng.normal(size=15))
    f4.c[0:3] = 0.0
    f = f4.extend(6)
    ws = fcf_coefficient_jets(f)
    from cubicform.jets import taylor_shift

    for _ in range(8):
        x, y = rng.uniform(-0.2, 0.2, size=2)
        shifted = taylor_shift(f, x, y)
        pf = fundamental_quantities(shifted)
        got = [w.eval(x, y) for w in ws]
        assert np.allclose(got, pf.W.a, rtol=0, atol=1e-10 * max(1.0, pf.W.max_abs()))
