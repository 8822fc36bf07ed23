"""Deformation identities on the contour-weight reference grid (shared per session)."""

import pytest
from mpmath import mpf

from dsemi import deform as dfm
from dsemi.lattice import QQuadPoint
from dsemi.spectral import sample_points

TARGET = mpf(10) ** -40


@pytest.fixture(scope="module")
def system(workspace):
    ref = workspace.ref
    xs = [QQuadPoint(z, workspace.ctx).x for z in sample_points(workspace.ctx, 4, 21)]
    return ref, ref.deform(0), xs


@pytest.mark.parametrize("n", [0, 1, 2])
def test_trace_and_bilinear(system, n):
    _, ds, xs = system
    c = ds.coeffs(n)
    assert max(dfm.trace_identity(c, x) for x in xs) < TARGET
    assert max(dfm.bilinear_identity(c, x) for x in xs) < TARGET
    assert max(dfm.star_determinant(c, x) for x in xs) < TARGET


@pytest.mark.parametrize("n", [0, 1])
def test_recurrences_in_n(system, n):
    _, ds, xs = system
    assert max(dfm.recurrence_relations(ds, n, xs, ds.H).values()) < TARGET
    assert max(dfm.bk_components(ds, n, xs, ds.H).values()) < TARGET


@pytest.mark.parametrize("n", [0, 1, 2])
def test_schlesinger_compatibility(system, workspace, n):
    ref, ds, _ = system
    zs = sample_points(workspace.ctx, 2, 22)
    r = max(dfm.schlesinger_residual(ref.spectral(1).coeffs(n), ref.spectral(-1).coeffs(n), ds.coeffs(n), z) for z in zs)
    assert r < TARGET


def test_initial_deformation_coefficients(system):
    _, ds, xs = system
    assert max(dfm.initial_values(ds, xs).values()) < TARGET


def test_degenerate_weight_condition_is_rejected(workspace):
    from types import SimpleNamespace

    ops = SimpleNamespace(state=SimpleNamespace(gamma=[mpf(1)]))
    lat = SimpleNamespace(dv=mpf(2), ctx=workspace.ctx)
    dd = SimpleNamespace(R=[mpf(1), mpf(3)], S=[mpf(0), mpf(0)], lat=lat)
    neg = SimpleNamespace(state=SimpleNamespace(gamma=[mpf(-1)]))
    # gamma_0(v+) = -gamma_0(v-) with S = 0 cancels R exactly
    with pytest.raises(dfm.Degenerate):
        dfm.DeformSystem(ops, neg, dd, lambda n: mpf(1))
    dfm.DeformSystem(ops, ops, dd, lambda n: mpf(1))
