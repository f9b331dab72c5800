"""Jet arithmetic: frozen hand examples, exactness of accessors, algebra laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicform import Jet2, MapJet2, jet_compose, jet_invert, jet_mul
from cubicform.jets import compose_map


def test_product_truncates_xy_plus_cubics():
    # (x + y^2)(y + x^2) at order 3 keeps xy + x^3 + y^3 and drops x^2 y^2
    a = Jet2.from_terms(3, {(1, 0): 1.0, (0, 2): 1.0})
    b = Jet2.from_terms(3, {(0, 1): 1.0, (2, 0): 1.0})
    p = jet_mul(a, b)
    expect = Jet2.from_terms(3, {(1, 1): 1.0, (3, 0): 1.0, (0, 3): 1.0})
    assert np.array_equal(p.c, expect.c)


def test_compose_xy_with_shear_map():
    # xy o (x + y^2, y - x^2) at order 4 = xy - x^3 + y^3 - x^2 y^2
    f = Jet2.from_terms(4, {(1, 1): 1.0})
    m = MapJet2(
        Jet2.from_terms(4, {(1, 0): 1.0, (0, 2): 1.0}),
        Jet2.from_terms(4, {(0, 1): 1.0, (2, 0): -1.0}),
    )
    g = jet_compose(f, m)
    expect = Jet2.from_terms(
        4, {(1, 1): 1.0, (3, 0): -1.0, (0, 3): 1.0, (2, 2): -1.0}
    )
    assert np.allclose(g.c, expect.c, atol=1e-14)


def test_invert_parabolic_shear():
    # (x + y^2, y)^-1 = (x - y^2, y) at order 3
    m = MapJet2(
        Jet2.from_terms(3, {(1, 0): 1.0, (0, 2): 1.0}),
        Jet2.from_terms(3, {(0, 1): 1.0}),
    )
    inv = jet_invert(m)
    assert np.allclose(inv.u.c, Jet2.from_terms(3, {(1, 0): 1.0, (0, 2): -1.0}).c, atol=1e-14)
    assert np.allclose(inv.v.c, Jet2.from_terms(3, {(0, 1): 1.0}).c, atol=1e-14)


def test_derivative_accessors_are_exact():
    # f = 2 x^3 y^2 has f32 = 2 * 3! * 2! = 24, read back with no rounding
    f = Jet2.from_terms(5, {(3, 2): 2.0})
    assert f.f(3, 2) == 24.0
    assert f.f(2, 2) == 0.0
    g = Jet2.from_derivatives(4, {(4, 0): 12.0})
    assert g.coeff(4, 0) == 12.0 / 24.0


def test_derivative_jets():
    f = Jet2.from_terms(4, {(2, 1): 5.0, (0, 4): 1.0})
    fx = f.derivative(1, 0)
    assert fx.order == 3
    assert fx.coeff(1, 1) == 10.0
    fyy = f.derivative(0, 2)
    assert fyy.coeff(0, 2) == 12.0


def test_singular_linear_part_rejected():
    m = MapJet2(
        Jet2.from_terms(3, {(1, 0): 1.0}),
        Jet2.from_terms(3, {(1, 0): 1.0}),
    )
    with pytest.raises(ValueError):
        jet_invert(m)


coeff = st.floats(min_value=-3, max_value=3, allow_nan=False)


def _jet(order, draw_vals):
    jet = Jet2(order)
    jet.c[:] = draw_vals
    return jet


jets4 = st.builds(
    lambda vals: _jet(4, vals),
    st.lists(coeff, min_size=15, max_size=15),
)


@settings(max_examples=60, deadline=None)
@given(jets4, jets4, jets4)
def test_ring_axioms(a, b, c):
    lhs = jet_mul(a, jet_mul(b, c))
    rhs = jet_mul(jet_mul(a, b), c)
    assert np.allclose(lhs.c, rhs.c, atol=1e-9)
    assert np.allclose(jet_mul(a, b).c, jet_mul(b, a).c, atol=1e-12)
    dist = jet_mul(a, b + c)
    assert np.allclose(dist.c, (jet_mul(a, b) + jet_mul(a, c)).c, atol=1e-9)


small = st.floats(min_value=-0.6, max_value=0.6, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(small, min_size=12, max_size=12),
    st.lists(small, min_size=12, max_size=12),
    st.sampled_from([1.0, -1.0, 2.0]),
)
def test_invert_round_trip(uc, vc, dia):
    order = 4
    u = Jet2(order)
    v = Jet2(order)
    # zero constants, controlled linear part
    u.c[1:13] = uc
    v.c[1:13] = vc
    u.set_coeff(1, 0, dia)
    u.set_coeff(0, 1, 0.25)
    v.set_coeff(1, 0, -0.125)
    v.set_coeff(0, 1, 1.0)
    m = MapJet2(u, v)
    inv = jet_invert(m)
    rt = compose_map(m, inv)
    ident_u = Jet2.from_terms(order, {(1, 0): 1.0})
    ident_v = Jet2.from_terms(order, {(0, 1): 1.0})
    assert np.allclose(rt.u.c, ident_u.c, atol=1e-9)
    assert np.allclose(rt.v.c, ident_v.c, atol=1e-9)


def test_compose_matches_pointwise_eval():
    rng = np.random.default_rng(7)
    f = Jet2(4, rng.normal(size=15))
    u = Jet2(4, rng.normal(size=15) * 0.5)
    v = Jet2(4, rng.normal(size=15) * 0.5)
    u.c[0] = 0.0
    v.c[0] = 0.0
    g = jet_compose(f, MapJet2(u, v))
    # composition of polynomials agrees with nested evaluation up to the
    # truncation order: compare on points scaled so the dropped tail is tiny
    for x, y in [(1e-3, 2e-3), (-2e-3, 1e-3)]:
        direct = f.eval(u.eval(x, y), v.eval(x, y))
        assert abs(g.eval(x, y) - direct) <= 1e-12 * max(1.0, abs(direct))


def test_truncate_extend_round_trip():
    rng = np.random.default_rng(3)
    f = Jet2(6, rng.normal(size=28))
    t = f.truncate(3)
    assert t.order == 3
    assert t.coeff(2, 1) == f.coeff(2, 1)
    e = t.extend(6)
    assert e.coeff(2, 1) == f.coeff(2, 1)
    assert e.coeff(4, 1) == 0.0
