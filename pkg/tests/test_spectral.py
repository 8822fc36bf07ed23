import pytest
from mpmath import mpf

from dsemi.spectral import bilinear_residual, initial_value_residuals, laguerre_freud_check, sample_points, verify_structure


@pytest.fixture(scope="module")
def aw_sys(workspace):
    return workspace.aw_system


@pytest.fixture(scope="module")
def zs(workspace):
    return sample_points(workspace.ctx, 6, 11)


@pytest.mark.parametrize("n", range(6))
def test_bilinear_and_star_determinant(aw_sys, zs, n):
    c = aw_sys.coeffs(n)
    for z in zs:
        r = bilinear_residual(c, z)
        scale = max(abs(c.sd.plus(z) * c.sd.minus(z)), 1)
        assert r["bilinear"] / scale < mpf(10) ** -30
        assert r["det_star"] / scale < mpf(10) ** -30


@pytest.mark.parametrize("n", range(6))
def test_first_order_divided_difference_system(aw_sys, zs, n):
    res = verify_structure(aw_sys.ops, aw_sys.coeffs(n), zs)
    assert set(res) == {"DDO_a", "DDO_b", "DDO_c", "DDO_d"}
    assert max(res.values()) < mpf(10) ** -30


@pytest.mark.parametrize("n", [0, 1, 2])
def test_laguerre_freud_steps(aw_sys, zs, n):
    res = laguerre_freud_check(aw_sys, n, zs[:3])
    assert max(res.values()) < mpf(10) ** -30


def test_initial_values(aw_sys):
    assert max(initial_value_residuals(aw_sys).values()) < mpf(10) ** -30


def test_sample_points_are_seeded(workspace):
    a = sample_points(workspace.ctx, 4, 3)
    b = sample_points(workspace.ctx, 4, 3)
    c = sample_points(workspace.ctx, 4, 4)
    assert a == b and a != c
