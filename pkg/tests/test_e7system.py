import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from dsemi import e7system as e7
from dsemi.errors import BranchDegenerate, GenericityViolated
from dsemi.qseries import hp
from dsemi.suites import _uncancelled_rho_forward as _uncancelled


def test_genericity_rejects_unit_t(ctx):
    with pytest.raises(GenericityViolated):
        e7.M3Params(tuple(hp(s) for s in ("0.1", "0.2", "0.3", "0.4")), hp("0.35"), hp(1), ctx, 0)


@pytest.mark.parametrize("which", ["alpha = t f", "q = alpha t f"])
@pytest.mark.parametrize("offset", ["0.05", "1e-8", "1e-20", "1e-40"])
def test_removable_poles_match_uncancelled_form(m3params, which, offset):
    p = m3params.at(t=m3params.t * m3params.ctx.qh)
    root = p.alpha / p.t if which == "alpha = t f" else p.q / (p.alpha * p.t)
    f = root + mpf(offset) / p.t
    rho = mpf(-5)
    got = e7.evol_rho_forward(p, f, rho)
    with mp.workdps(200):
        want = _uncancelled(p, f, rho)
    assert abs(got - want) < p.ctx.tol(12) * abs(want)


@pytest.mark.parametrize("which", ["alpha = t f", "q = alpha t f"])
def test_rho_map_is_finite_on_the_pole(m3params, which):
    p = m3params
    root = p.alpha / p.t if which == "alpha = t f" else p.q / (p.alpha * p.t)
    assert e7.removable_pole(p, root) == which
    on = e7.evol_rho_forward(p, root, mpf(-5))
    near = e7.evol_rho_forward(p, root * (1 + mpf(10) ** -30), mpf(-5))
    assert abs(on - near) < mpf(10) ** -25 * abs(on)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=-20, max_value=20).filter(lambda v: abs(v) > 0.05))
def test_seed_family_persists_for_any_initial_rho(rho):
    ctx = e7.QContext.create("0.5", 60)
    p = e7.M3Params(tuple(hp(s) for s in ("0.1", "0.2", "0.3", "0.4")), hp("0.35"), hp("1.3"), ctx, 0)
    guard = e7.seed_guard(p, mpf(rho))
    assert max(guard.values()) < ctx.tol(20)


def test_explicit_moments_solve_the_linear_equation(m3params):
    m = lambda tt: e7.m3_moment_explicit(m3params, t=tt)  # noqa: E731
    assert e7.seed_linear_residual(m3params, m) < m3params.ctx.tol(20)
    assert e7.seed_moment_equivalence(m3params) < m3params.ctx.tol(20)


def test_seed_orbit_keeps_f_and_returns(m3params):
    m = lambda tt: e7.m3_moment_explicit(m3params, t=tt)  # noqa: E731
    s0 = e7.E7State.seed(m3params, e7.seed_rho(m3params, m))
    s = s0
    for _ in range(4):
        s, info = e7.evolve_forward(s)
        assert abs(s.f - e7.seed_f(s.p)) < m3params.ctx.tol(15)
        assert abs(s.rho - e7.seed_rho(s.p, m)) < m3params.ctx.tol(15) * abs(s.rho)
        assert info.square_residual < m3params.ctx.tol(15)
    for _ in range(4):
        s = e7.evolve_backward(s)
    assert s.distance(s0) < m3params.ctx.tol(15)


@pytest.mark.parametrize("form", ["c", "d"])
def test_backward_forms(m3params, form):
    s0 = e7.E7State.seed(m3params, mpf(-3))
    s1, _ = e7.evolve_forward(s0)
    assert e7.evolve_backward(s1, form).distance(s0) < m3params.ctx.tol(15)


def test_backward_rejects_unknown_form(m3params):
    with pytest.raises(ValueError):
        e7.evolve_backward(e7.E7State.seed(m3params, mpf(-3)), "x")


@settings(max_examples=40, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_lambda_branch_round_trip(re, im):
    mp.dps = 60
    ctx = e7.QContext.create("0.5", 60)
    lam = mpc(re, im)
    if abs(lam * lam - 1) < 1e-6:
        return
    l = e7.lambda_to_l(lam, ctx)
    assert abs(l) >= 1 - ctx.tol(10)
    assert abs((l + 1 / l) / 2 - lam) < ctx.tol(20) * max(1, abs(lam))


@pytest.mark.parametrize("lam", [1, -1])
def test_lambda_branch_degenerate(ctx, lam):
    with pytest.raises(BranchDegenerate):
        e7.lambda_to_l(mpc(lam), ctx)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3), st.floats(-6, 6).filter(lambda v: abs(v) > 0.1))
def test_glxfm_inverts(f, rho):
    ctx = e7.QContext.create("0.5", 60)
    p = e7.M3Params(tuple(hp(s) for s in ("0.1", "0.2", "0.3", "0.4")), hp("0.35"), hp("1.3"), ctx, 1)
    lam = e7.glxfm_lambda(p, mpf(f), mpf(rho))
    assert abs(e7.glxfm_rho(p, mpf(f), lam) - rho) < ctx.tol(25) * max(1, abs(rho))


def test_bracket_and_sigma_shift(m3params):
    for s in (mpf(1) / 2, 1, mpf(5) / 2):
        assert e7.bracket_identity(m3params, s) < m3params.ctx.tol(5)
    assert e7.sigma_shift_residual(m3params) < m3params.ctx.tol(5)


def test_reference_state_steps_to_the_next_grid_point(workspace):
    ref = workspace.ref
    s0, s2 = ref.state(0, 1), ref.state(2, 1)
    s1, info = e7.evolve_forward(s0)
    assert info.removable is None
    assert s1.distance(s2) < mpf(10) ** -40
    assert e7.evolve_backward(s2).distance(s0) < mpf(10) ** -40
