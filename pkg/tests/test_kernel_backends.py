"""Backend parity: the compiled kernel must match the numpy one exactly.

Both backends perform the same floating point operations in the same order,
so every comparison here is bitwise, not approximate.
"""

import numpy as np
import pytest

from cubicform import _layout
from cubicform.kernel import backends
from cubicform.surface import catalog

_IMPLS = backends()

pytestmark = pytest.mark.skipif(
    "cython" not in _IMPLS, reason="compiled kernel not built")


def _pair():
    return _IMPLS["python"], _IMPLS.get("cython")


def _jets(rng, order, n, zero_constant=False, zero_linear=False):
    a = rng.normal(size=(_layout.size(order), n))
    pos = _layout.position(order)
    if zero_constant:
        a[0] = 0.0
    if zero_linear:
        a[pos[(1, 0)]] = 0.0
        a[pos[(0, 1)]] = 0.0
    return a


@pytest.mark.parametrize("order", [1, 2, 3, 4, 6])
def test_mul_is_bitwise_identical(order):
    py, cy = _pair()
    rng = np.random.default_rng(order)
    a = _jets(rng, order, 37)
    b = _jets(rng, order, 37)
    assert np.array_equal(py.mul(a, b, order), cy.mul(a, b, order))


@pytest.mark.parametrize("order", [2, 3, 4])
def test_compose_is_bitwise_identical(order):
    py, cy = _pair()
    rng = np.random.default_rng(10 + order)
    f = _jets(rng, order, 23)
    u = _jets(rng, order, 23, zero_constant=True)
    v = _jets(rng, order, 23, zero_constant=True)
    assert np.array_equal(py.compose(f, u, v, order),
                          cy.compose(f, u, v, order))


@pytest.mark.parametrize("order", [2, 3, 4])
def test_invert_is_bitwise_identical(order):
    py, cy = _pair()
    rng = np.random.default_rng(20 + order)
    pos = _layout.position(order)
    x = 0.1 * _jets(rng, order, 19, zero_constant=True)
    y = 0.1 * _jets(rng, order, 19, zero_constant=True)
    x[pos[(1, 0)]] += 2.0  # keep the linear part well conditioned
    y[pos[(0, 1)]] += 2.0
    gp = py.invert(x, y, order)
    gc = cy.invert(x, y, order)
    assert np.array_equal(gp[0], gc[0]) and np.array_equal(gp[1], gc[1])


def test_monge_is_bitwise_identical_on_torus_jets():
    py, cy = _pair()
    spec = catalog("perturbed_torus")
    u = np.linspace(0.0, 6.0, 40)
    v = np.linspace(0.0, 6.0, 40) ** 1.3 % 6.28
    X, Y, Z = spec.raw_jets("uv", u, v, 4)
    rp = py.monge(X, Y, Z, 4)
    rc = cy.monge(X, Y, Z, 4)
    for arr_p, arr_c in zip(rp, rc):
        assert np.array_equal(np.asarray(arr_p), np.asarray(arr_c))


def test_monge_bad_flag_agrees_on_rank_deficient_column():
    py, cy = _pair()
    rng = np.random.default_rng(3)
    X = rng.normal(size=(_layout.size(3), 5))
    Y = rng.normal(size=(_layout.size(3), 5))
    Z = rng.normal(size=(_layout.size(3), 5))
    pos = _layout.position(3)
    for arr in (X, Y, Z):  # column 2: t2 parallel to t1
        arr[pos[(0, 1)], 2] = 3.0 * arr[pos[(1, 0)], 2]
    bp = py.monge(X, Y, Z, 3)[6]
    bc = cy.monge(X, Y, Z, 3)[6]
    assert np.array_equal(bp, bc)
    assert bp[2]


def test_selected_backend_is_exported():
    import cubicform

    assert cubicform.KERNEL_BACKEND in ("python", "cython")
