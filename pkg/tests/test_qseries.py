import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from dsemi.qseries import (
    QContext,
    elementary_symmetric,
    hp,
    qbinomial,
    qpoch,
    qpoch_inf_fast,
    qpoch_many,
    theta_q,
    tol,
    w8_7,
    w8_7_bailey_rhs,
    w8_7_natural_arg,
)

unit = st.floats(min_value=-0.9, max_value=0.9, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
base = st.floats(min_value=0.05, max_value=0.9)


@settings(max_examples=25, deadline=None)
@given(a=unit, q=base)
def test_infinite_pochhammer_matches_mpmath(a, q):
    ctx = QContext.create(mpf(q), 40)
    # the infinite product is truncated once the tail factor is below truncation_eps
    ref = mp.qp(a, q)
    assert abs(qpoch(a, ctx) - ref) < ctx.truncation_eps * abs(ref)


@settings(max_examples=25, deadline=None)
@given(a=unit, q=base, n=st.integers(0, 12))
def test_finite_pochhammer_matches_mpmath(a, q, n):
    ctx = QContext.create(mpf(q), 40)
    assert abs(qpoch(a, ctx, n) - mp.qp(a, q, n)) < tol(5, 40)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_negative_index_inverts(ctx, m):
    a = hp("0.3")
    assert abs(qpoch(a, ctx, -m) * qpoch(a * ctx.q ** (-m), ctx, m) - 1) < ctx.tol(5)


@pytest.mark.parametrize("a", ["0.1", "-0.7", "0.5+0.2j", "3.1"])
def test_fast_product_agrees(ctx, a):
    a = hp(a)
    assert abs(qpoch_inf_fast(a, ctx) - qpoch(a, ctx)) < ctx.tol(8) * max(1, abs(qpoch(a, ctx)))


def test_theta_quasi_periodicity(ctx):
    # (qz, 1/z) = -z^{-1} (z, q/z)
    z = hp("0.37+0.81j")
    assert abs(theta_q(ctx.q * z, ctx) + theta_q(z, ctx) / z) < ctx.tol(8)


@pytest.mark.parametrize("n", range(6))
def test_qbinomial_pascal(ctx, n):
    for k in range(1, n + 1):
        lhs = qbinomial(n + 1, k, ctx)
        rhs = qbinomial(n, k - 1, ctx) + ctx.q**k * qbinomial(n, k, ctx)
        assert abs(lhs - rhs) < ctx.tol(8)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6), st.integers(-3, 3))
def test_elementary_symmetric_generating_function(vals, x):
    e = elementary_symmetric([hp(v) for v in vals])
    prod = mp.mpf(1)
    for v in vals:
        prod *= 1 + v * x
    assert abs(sum(c * x**k for k, c in enumerate(e)) - prod) < mpf(10) ** -40


def test_qpoch_many_is_a_product(ctx):
    a = [hp("0.2"), hp("-0.4"), hp("0.6")]
    assert abs(qpoch_many(a, ctx, 7) - qpoch(a[0], ctx, 7) * qpoch(a[1], ctx, 7) * qpoch(a[2], ctx, 7)) < ctx.tol(5)


@pytest.mark.parametrize(
    "params",
    [
        ("0.05", "0.3", "0.4", "0.5", "0.6", "0.7"),
        ("0.2", "0.5", "-0.3", "0.45", "0.55", "0.65"),
    ],
)
def test_bailey_transformation(ctx, params):
    a, b, c, d, e, f = (hp(v) for v in params)
    z = w8_7_natural_arg(a, b, c, d, e, f, ctx)
    assert abs(z) < 1
    direct = w8_7(a, b, c, d, e, f, ctx, z)
    assert abs(direct - w8_7_bailey_rhs(a, b, c, d, e, f, ctx)) < ctx.tol(10) * abs(direct)


def test_terminating_8w7_is_a_polynomial_sum(ctx):
    # with b = q^{-2} the series has exactly three terms
    a, c, d, e, f = (hp(v) for v in ("0.3", "0.2", "0.4", "0.5", "0.6"))
    q = ctx.q
    b = q**-2
    z = hp("0.7")
    num = [a, q * mp.sqrt(a), -q * mp.sqrt(a), b, c, d, e, f]
    den = [q, mp.sqrt(a), -mp.sqrt(a), q * a / b, q * a / c, q * a / d, q * a / e, q * a / f]
    total = 0
    for k in range(3):
        term = z**k
        for u in num:
            term *= qpoch(u, ctx, k)
        for u in den:
            term /= qpoch(u, ctx, k)
        total += term
    assert abs(w8_7(a, b, c, d, e, f, ctx, z) - total) < ctx.tol(8)
