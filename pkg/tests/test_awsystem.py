import pytest
from mpmath import mp

from dsemi.awsystem import (
    AWParams,
    aw_I2,
    aw_I2_of,
    aw_integral_recurrence_residual,
    aw_moments,
    aw_poly,
    aw_poly_w87,
    aw_spectral,
    aw_weight,
    aw_weight_spec,
)
from dsemi.errors import GenericityViolated
from dsemi.qseries import hp
from dsemi.spectral import circle_samples, pearson_residual


@pytest.fixture
def aw(ctx):
    return AWParams(tuple(hp(s) for s in ("0.1", "0.2", "0.3", "0.4")), ctx)


def test_rejects_parameters_outside_the_disc(ctx):
    with pytest.raises(GenericityViolated):
        AWParams((hp("1.2"), hp("0.2"), hp("0.3"), hp("0.4")), ctx)


@pytest.mark.parametrize("j", range(4))
def test_integral_recurrence_in_each_parameter(aw, ctx, j):
    a = list(aw.a)
    shifted = list(a)
    shifted[j] *= ctx.q
    s4 = a[0] * a[1] * a[2] * a[3]
    rhs = aw_I2_of(a, ctx)
    for k in range(4):
        if k != j:
            rhs *= a[j] * a[k] - 1
    assert abs((s4 - 1) * aw_I2_of(shifted, ctx) - rhs) < ctx.tol(8)
    assert abs(aw_integral_recurrence_residual(aw)) < ctx.tol(8)


@pytest.mark.parametrize("n", range(4))
def test_moments_against_quadrature(aw, ctx, n):
    w = aw_weight_spec(aw, 1024)
    a1 = aw.a[0]
    # m_{0,n} = int w (a1 z, a1/z; q)_n
    basis = lambda z: mp.fprod((1 - a1 * z * ctx.q**k) * (1 - a1 / z * ctx.q**k) for k in range(n))  # noqa: E731
    got = w.integrate(basis)
    assert abs(got - aw_moments(aw, n)) < ctx.tol(10) * abs(got)


def test_zeroth_moment_is_pi_I2(aw, ctx):
    assert abs(aw_moments(aw, 0) - mp.pi * aw_I2(aw)) < ctx.tol(5)


@pytest.mark.parametrize("n", [1, 2, 4])
@pytest.mark.parametrize("z", ["0.6+0.8j", "1.7-0.3j"])
def test_polynomial_forms_agree(aw, ctx, n, z):
    z = mp.mpmathify(z)
    a, b = aw_poly(aw, n, z), aw_poly_w87(aw, n, z)
    assert abs(a - b) < ctx.tol(15) * max(1, abs(a))


@pytest.mark.parametrize("n", [0, 1, 3])
def test_closed_form_b_is_real_for_real_parameters(aw, n):
    c = aw_spectral(aw, n)
    assert abs(mp.im(c.b)) == 0 and abs(mp.im(c.a2)) == 0


def test_pearson_on_random_circle_points(aw, ctx):
    from dsemi.awsystem import aw_spectral_data, aw_U, aw_V_poly, aw_W_poly
    from dsemi.spectral import SpectralData

    sd = SpectralData(
        ctx, aw_W_poly(aw), aw_V_poly(aw), lambda z: aw_spectral_data(aw, z)[0], lambda z: aw_spectral_data(aw, z)[1], [aw_U(aw)]
    )
    for z in circle_samples(12, 7):
        assert abs(pearson_residual(lambda u: aw_weight(aw, u), sd, z)) < ctx.tol(15)
