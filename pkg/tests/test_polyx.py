import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from dsemi.polyx import dd_poly, fit_on_circle, from_cheb, mean_poly, padd, peval, pmul, pscale, psub, to_cheb
from dsemi.qseries import QContext
from dsemi.lattice import QQuadPoint

coeffs = st.lists(st.integers(-9, 9), min_size=1, max_size=7)
points = st.integers(-4, 4)


@given(coeffs, coeffs, points)
def test_ring_operations_commute_with_evaluation(a, b, x):
    assert peval(padd(a, b), x) == peval(a, x) + peval(b, x)
    assert peval(psub(a, b), x) == peval(a, x) - peval(b, x)
    assert peval(pmul(a, b), x) == peval(a, x) * peval(b, x)
    assert peval(pscale(a, 3), x) == 3 * peval(a, x)


@given(coeffs)
def test_chebyshev_round_trip(c):
    back = from_cheb(to_cheb(c))
    assert max(abs(u - v) for u, v in zip(back, c)) < mpf(10) ** -50


@pytest.mark.parametrize("deg", [0, 1, 3, 6])
def test_fit_on_circle_recovers_polynomial(deg):
    c = [mpf(k + 1) / (k + 2) for k in range(deg + 1)]
    fit = fit_on_circle(lambda x: peval(c, x), deg)
    assert max(abs(u - v) for u, v in zip(fit, c)) < mpf(10) ** -45


@pytest.mark.parametrize("deg", [1, 2, 4, 5])
def test_divided_difference_and_mean_of_polynomials(deg):
    ctx = QContext.create("0.5", 60)
    c = [mpf(3 - k) / (k + 1) for k in range(deg + 1)]
    d, m = dd_poly(c, ctx.qh), mean_poly(c, ctx.qh)
    for z in (mp.mpc("0.3", "1.1"), mp.mpc("-1.7", "0.2")):
        p = QQuadPoint(z, ctx)
        fp, fm = peval(c, p.yp), peval(c, p.ym)
        assert abs(peval(d, p.x) - (fp - fm) / p.dy) < mpf(10) ** -45
        assert abs(peval(m, p.x) - (fp + fm) / 2) < mpf(10) ** -45
