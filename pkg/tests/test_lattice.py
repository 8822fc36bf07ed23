import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from dsemi.lattice import LatticeConic, LatticeKind, QQuadPoint, classify, joukowski_inverse

reals = st.floats(min_value=-3, max_value=3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(reals, reals)
def test_joukowski_inverse_branch(re, im):
    mp.dps = 40
    x = mpc(re, im)
    z = joukowski_inverse(x)
    assert abs((z + 1 / z) / 2 - x) < mpf(10) ** -30
    assert abs(z) >= 1 - mpf(10) ** -30


@pytest.mark.parametrize("z", ["0.4+0.9j", "2.5", "-1.3-0.6j"])
def test_lattice_point_relations(ctx, z):
    p = QQuadPoint(mp.mpmathify(z), ctx)
    qh = ctx.qh
    assert abs(p.yp + p.ym - (qh + 1 / qh) * p.x) < ctx.tol(5)
    assert abs(p.yp - p.ym - p.dy) < ctx.tol(5)
    assert abs(p.dy**2 - (qh - 1 / qh) ** 2 * (p.x**2 - 1)) < ctx.tol(5)


def test_canonical_conic_is_q_quadratic(ctx):
    cls = classify(LatticeConic.canonical(ctx))
    assert cls.kind in (LatticeKind.Q_QUADRATIC_REAL, LatticeKind.Q_QUADRATIC_UNIT)


def test_conic_vanishes_on_neighbours(ctx):
    conic = LatticeConic.canonical(ctx)
    p = QQuadPoint(mpc("0.7", "0.3"), ctx)
    assert abs(conic.value(p.x, p.yp)) < ctx.tol(5)
    assert abs(conic.value(p.x, p.ym)) < ctx.tol(5)
