"""Named verification suites producing check records."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from mpmath import mp, mpc, mpf

from . import deform as dfm
from . import e7system as e7
from .awsystem import (
    AWParams,
    aw_I2,
    aw_integral_recurrence_residual,
    aw_spectral,
    aw_spectral_data,
    aw_stieltjes,
    aw_U,
    aw_V_poly,
    aw_W_poly,
    aw_weight,
    aw_weight_spec,
)
from .config import RunConfig
from .lattice import QQuadPoint, joukowski_inverse
from .opsys import OPS, compute_moments, ops_from_moments
from .polyx import padd, psub
from .qseries import QContext, hp
from .report import OUT_OF_SCOPE, CheckRecord, effective_tolerance
from .spectral import (
    SpectralData,
    SpectralSystem,
    bilinear_residual,
    circle_samples,
    laguerre_freud_check,
    pearson_residual,
    sample_points,
    verify_structure,
)

AW_N_MAX = 7


def _rel(a, b) -> mpf:
    return abs(a - b) / max(abs(b), mpf(10) ** (-mp.dps))


def _pmax_rel(a, b) -> mpf:
    d = psub(a, b)
    return max(abs(v) for v in d) / max(max(abs(v) for v in b), mpf(10) ** (-mp.dps))


class Workspace:
    """Parameters and lazily built systems shared by the suites of one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ctx = QContext.create(cfg.q, cfg.precision_digits, rng_seed=cfg.rng_seed)
        self.a = tuple(hp(v) for v in cfg.a)
        self.alpha = hp(cfg.alpha)
        self.t = hp(cfg.t)

    @property
    def P(self) -> int:
        return self.cfg.precision_digits

    def validate(self, needs_reference: bool) -> None:
        """Check the genericity preconditions before any suite runs."""
        from .errors import ConfigInvalid, Degenerate

        try:
            self.aw
            self.m3
            if needs_reference:
                for k in range(-2, 3):
                    e7.m3_weight_spec(self.m3.at(t=self.t * self.ctx.qh**k))
        except Degenerate as exc:
            raise ConfigInvalid(f"parameters not generic: {exc}") from None

    def seed(self, offset: int) -> int:
        return self.cfg.rng_seed + offset

    @cached_property
    def aw(self) -> AWParams:
        return AWParams(self.a, self.ctx)

    @cached_property
    def aw_sd(self) -> SpectralData:
        p = self.aw
        return SpectralData(
            self.ctx,
            aw_W_poly(p),
            aw_V_poly(p),
            lambda z: aw_spectral_data(p, z)[0],
            lambda z: aw_spectral_data(p, z)[1],
            [aw_U(p)],
        )

    @cached_property
    def aw_ops(self) -> OPS:
        p = self.aw
        w = aw_weight_spec(p)
        m = compute_moments(w, p.a[0], p.a[1], AW_N_MAX, AW_N_MAX + 1, self.ctx)
        return OPS(w, ops_from_moments(m, AW_N_MAX, self.ctx), lambda x: aw_stieltjes(p, joukowski_inverse(x)))

    @cached_property
    def aw_system(self) -> SpectralSystem:
        return SpectralSystem(self.aw_ops, self.aw_sd)

    @cached_property
    def m3(self) -> e7.M3Params:
        return e7.M3Params(self.a, self.alpha, self.t, self.ctx, 0)

    @cached_property
    def ref(self) -> e7.M3Reference:
        return e7.M3Reference(self.m3, self.cfg.n_max)

    def m00_explicit(self) -> Callable:
        p = self.m3
        return lambda tt: e7.m3_moment_explicit(p, t=tt)


@dataclass
class SuiteRun:
    """Collects the records of one suite."""

    name: str
    ws: Workspace
    records: list = field(default_factory=list)

    def check(self, check_id: str, anchor: str, residual, target, loss: float = 10) -> None:
        """Record a residual against an absolute target (or ("tol", k) meaning 10^(k-P))."""
        if isinstance(target, tuple):
            tol, limited = mpf(10) ** (target[1] - self.ws.P), False
        else:
            tol, limited = effective_tolerance(target, loss, self.ws.P)
        self.records.append(CheckRecord(self.name, check_id, anchor, mpf(abs(residual)), tol, limited))

    def out_of_scope(self, check_id: str, anchor: str) -> None:
        self.records.append(CheckRecord(self.name, check_id, anchor, None, None, status=OUT_OF_SCOPE))


# Askey-Wilson suites


def suite_aw_pearson(run: SuiteRun) -> None:
    ws = run.ws
    p, sd = ws.aw, ws.aw_sd
    zs = circle_samples(100, ws.seed(1))
    r = mpf(0)
    for z in zs:
        pt = QQuadPoint(z, ws.ctx)
        r = max(r, abs(pearson_residual(lambda u: aw_weight(p, u), sd, z)) / abs(sd.plus(pt.z) / sd.minus(pt.z)))
    run.check("pearson_100_points", "spectral_DD_wgt:b", r, 1e-25, 10)
    d = max(sd.decomposition_residual(z) / max(abs(sd.plus(z)), 1) for z in sample_points(ws.ctx, 10, ws.seed(2)))
    run.check("W_V_decomposition", "M=2Sdata", d, 1e-25, 10)


def suite_aw_integral(run: SuiteRun) -> None:
    ws = run.ws
    p = ws.aw
    quad = aw_weight_spec(p, 4096).integrate()
    closed = mp.pi * aw_I2(p)
    run.check("I2_vs_quadrature_4096", "AWintegral", _rel(quad, closed), 1e-30, 10)
    res = aw_integral_recurrence_residual(p)
    run.check("I2_recurrence", "AWintegral", abs(res) / abs(aw_I2(p)), 1e-25, 10)


def suite_aw_recurrence(run: SuiteRun) -> None:
    ws = run.ws
    st = ws.aw_ops.state
    ra = rb = mpf(0)
    for n in range(1, 7):
        c = aw_spectral(ws.aw, n)
        ra = max(ra, _rel(st.a2[n], c.a2))
        rb = max(rb, _rel(st.b[n], c.b))
    run.check("a2_n1_6_hankel", "AW_spec:d", ra, 1e-20, 35)
    run.check("b_n1_6_hankel", "AW_spec:e", rb, 1e-20, 35)
    run.check("b_0_hankel", "AW_spec:e", _rel(st.b[0], aw_spectral(ws.aw, 0).b), 1e-20, 10)


def suite_aw_spectral(run: SuiteRun) -> None:
    ws = run.ws
    sys = ws.aw_system
    zs = sample_points(ws.ctx, 20, ws.seed(3))
    worst = {k: mpf(0) for k in ("bilinear", "det_star", "DDO_a", "DDO_b", "DDO_c", "DDO_d")}
    closed = {"W_n": mpf(0), "Theta_n": mpf(0), "Omega_n+V": mpf(0)}
    for n in range(7):
        c = sys.coeffs(n)
        for z in zs:
            scale = max(abs(ws.aw_sd.plus(z) * ws.aw_sd.minus(z)), 1)
            for k, v in bilinear_residual(c, z).items():
                worst[k] = max(worst[k], v / scale)
        for k, v in verify_structure(ws.aw_ops, c, zs).items():
            worst[k] = max(worst[k], v)
        cf = aw_spectral(ws.aw, n)
        closed["W_n"] = max(closed["W_n"], _pmax_rel(c.Wn, cf.Wn))
        closed["Theta_n"] = max(closed["Theta_n"], _pmax_rel(c.Theta, cf.Theta))
        closed["Omega_n+V"] = max(closed["Omega_n+V"], _pmax_rel(padd(c.Omega, ws.aw_sd.V), cf.Omega_plus_V))
    run.check("bilinear_n0_6", "spectral_bilinear", worst["bilinear"], 1e-20, 35)
    run.check("det_star_n0_6", "spectral_bilinear", worst["det_star"], 1e-20, 35)
    for k in ("DDO_a", "DDO_b", "DDO_c", "DDO_d"):
        run.check(f"{k}_n0_6", k.replace("_", ":"), worst[k], 1e-20, 35)
    run.check("closed_W_n0_6", "AW_spec:a", closed["W_n"], 1e-20, 35)
    run.check("closed_Theta_n0_6", "AW_spec:b", closed["Theta_n"], 1e-20, 35)
    run.check("closed_Omega_n0_6", "AW_spec:c", closed["Omega_n+V"], 1e-20, 35)


# Laguerre-Freud recurrences


_LF_ANCHORS = {
    "recur_a": "spectral_coeff_recur:a",
    "recur_b": "spectral_coeff_recur:b",
    "recur_c": "spectral_coeff_recur:c",
    "AK_a": "AK_comp:a",
    "AK_b": "AK_comp:b",
    "AK_c": "AK_comp:c",
    "AK_d": "AK_comp:d",
}


def suite_laguerre_freud(run: SuiteRun) -> None:
    ws = run.ws
    zs = sample_points(ws.ctx, 5, ws.seed(4))
    for label, sys in (("aw", ws.aw_system), ("m3", ws.ref.spectral(0))):
        worst = {k: mpf(0) for k in _LF_ANCHORS}
        for n in (0, 1):
            for k, v in laguerre_freud_check(sys, n, zs).items():
                if k in worst:
                    worst[k] = max(worst[k], v)
        for k, anchor in _LF_ANCHORS.items():
            run.check(f"{label}_{k}_n0_2", anchor, worst[k], 1e-18, 30)
    p = ws.ref.params(0)
    sps = [e7.spectral_param_from_coeffs(p.at(n=n), ws.ref.spectral(0).coeffs(n)) for n in range(3)]
    run.check("m3_param_recur_a_n0_2", "deform_AW_recur:a", max(e7.recur_a_residual(sps[n], sps[n + 1]) for n in (0, 1)), 1e-18, 30)
    run.check("m3_param_recur_b_n0_2", "deform_AW_recur:b", max(e7.recur_b_residual(sps[n], sps[n + 1]) for n in (0, 1)), 1e-18, 30)


# M = 3 moments


def suite_m3_moments(run: SuiteRun) -> None:
    ws = run.ws
    p = ws.m3
    m = ws.m00_explicit()
    run.check("explicit_3TermMoment", "3TermMoment", e7.three_term_moment_residual(p, m), 1e-20, 10)
    run.check("explicit_int_recur_b", "M=3int_Recur:b", e7.int_recur_b_residual(p.six, e7.explicit_as_integral(p), ws.ctx), 1e-20, 10)
    run.check("explicit_3TermMoment_t077", "3TermMoment", e7.three_term_moment_residual(p, m, t=mpf("0.77")), 1e-20, 10)
    I = lambda six: e7.m3_integral(six, ws.ctx, nodes=1024)  # noqa: E731
    run.check("contour_pair_identity", "M=3int_Recur:a", e7.pair_identity_residual(p.six, 0, 4, I, ws.ctx), 1e-20, 10)


# Deformation structure of the M = 3 system about t

_INIT_ANCHORS = {
    "R0": "deform_coeff_init:a",
    "Gamma0": "deform_coeff_init:b",
    "Xi0": "deform_coeff_init:e",
    "Phi0": "deform_coeff_init:c",
    "Psi0": "deform_coeff_init:d",
}


def suite_deformation(run: SuiteRun) -> None:
    ws = run.ws
    ref = ws.ref
    ds = ref.deform(0)
    sp, sm = ref.spectral(1), ref.spectral(-1)
    zs = sample_points(ws.ctx, 5, ws.seed(5))
    xs = [QQuadPoint(z, ws.ctx).x for z in zs]
    H = ds.H
    a_u = lambda n: ref.ops(0).a(n)  # noqa: E731
    run.check("linear_n1_2", "deform_reln:a", max(dfm.linear_identity(ds, n, a_u) for n in (1, 2)), 1e-15, 30)
    run.check("trace_n0_2", "deform_reln:c", max(dfm.trace_identity(ds.coeffs(n), x) for n in range(3) for x in xs), 1e-15, 30)
    run.check("bilinear_n0_2", "deform_reln:d", max(dfm.bilinear_identity(ds.coeffs(n), x) for n in range(3) for x in xs), 1e-15, 30)
    rec = {"Defm_a": mpf(0), "Defm_b": mpf(0)}
    bk = {k: mpf(0) for k in ("BK_a", "BK_b", "BK_c", "BK_d")}
    for n in (0, 1):
        for k, v in dfm.recurrence_relations(ds, n, xs, H).items():
            rec[k] = max(rec[k], v)
        for k, v in dfm.bk_components(ds, n, xs, H).items():
            bk[k] = max(bk[k], v)
    run.check("recur_a_n0_2", "Defm_recur:a", rec["Defm_a"], 1e-15, 30)
    run.check("recur_b_n0_2", "Defm_recur:b", rec["Defm_b"], 1e-15, 30)
    for k, v in bk.items():
        run.check(f"{k}_n0_2", k.replace("BK_", "BK_comp:"), v, 1e-15, 30)
    sch = max(dfm.schlesinger_residual(sp.coeffs(n), sm.coeffs(n), ds.coeffs(n), z) for n in range(3) for z in zs[:3])
    run.check("schlesinger_n0_2", "spectral+deform:b", sch, 1e-15, 30)
    for k, v in dfm.initial_values(ds, xs).items():
        run.check(f"initial_{k}", _INIT_ANCHORS.get(k, "deform_def_n=0"), v, 1e-15, 30)


# Closure, residue relations and coordinate maps at n = 1


def suite_closure(run: SuiteRun) -> None:
    ws = run.ws
    ref = ws.ref
    n = 1
    p = ref.params(0).at(n=n)
    dp = e7.DeformParam.from_coeffs(ref.deform(0).coeffs(n))
    a_adv, a_ret = ref.ops(1).a(n), ref.ops(-1).a(n)
    sp_adv = e7.spectral_param_from_coeffs(ref.params(1).at(n=n), ref.spectral(1).coeffs(n))
    sp_ret = e7.spectral_param_from_coeffs(ref.params(-1).at(n=n), ref.spectral(-1).coeffs(n))
    for k, v in e7.dclose_residuals(p, dp, a_adv, a_ret, sp_adv.w2, sp_ret.w2).items():
        run.check(f"Dclose_{k}", f"Dclose:{k}", v, 1e-15, 30)
    ga, gr = ref.ops(1).state.gamma, ref.ops(-1).state.gamma
    H = ref.deform(0).H
    lead = e7.leading_from_gammas(p, H(n), ga[n], gr[n], ga[n - 1], gr[n - 1], ref.ops(0).a(n), ref.ops(0).a(n - 1), H(n - 1))
    for name, u, v in zip("defg", lead, (dp.r1p, dp.r1m, dp.pp, dp.pm)):
        run.check(f"DCff_{name}", f"deform_AW_DCff:{name}", _rel(u, v), 1e-15, 30)
    fa, fr = ref.spectral(1).coeffs(n).frak, ref.spectral(-1).coeffs(n).frak
    for k, v in e7.cse_residuals(p, dp, fa, fr).items():
        run.check(f"cse_{k}", f"cse:{k}", v, 1e-15, 30)
    for k, v in e7.esme_residuals(p, dp, fa, fr).items():
        run.check(f"eSME_{k}", f"eSME:{k}", v, 1e-15, 30)
    run.check("prodId", "prodId", e7.prod_id_residual(p, fa, fr), 1e-15, 30)
    rh_p, rh_m = e7.rho_hat_from_deform(p, dp, a_ret, a_adv)
    run.check("rho_plus_vs_minus", "rPxfm", _rel(rh_p, rh_m), 1e-15, 30)
    split = e7.split_id_residuals(p, fa, fr, rh_p, a_adv, a_ret)
    run.check("splitId", "splitId", max(split.values()) if isinstance(split, dict) else split, 1e-15, 30)
    # evaluated spectral coefficients about the midpoint between the stored states
    pm = ref.params(1).at(n=n)
    hat, chk = ref.state(2, n), ref.state(0, n)
    sph = e7.spectral_param_from_coeffs(hat.p, ref.spectral(2).coeffs(n))
    spc = e7.spectral_param_from_coeffs(chk.p, ref.spectral(0).coeffs(n))
    direct = e7.evalspec_direct(pm, ref.spectral(2).coeffs(n).frak, ref.spectral(0).coeffs(n).frak, ref.ops(2).a(n), ref.ops(0).a(n))
    fl = e7.evalspec_fl(pm, hat.f, sph.l, chk.f, spc.l)
    gf = e7.lhs2nd_gf(pm, e7.rho_to_g(hat.rho, ws.ctx), hat.f)
    for k in "abcd":
        run.check(f"evalSpec_{k}", f"evalSpec:{k}", _rel(fl[k], direct[k]), 1e-15, 30)
    for k, label in (("a", "a"), ("c", "b")):
        run.check(f"lhs2ND_{label}", f"lhs2ND:{label}", _rel(gf[k], direct[k]), 1e-15, 30)
    # coordinate maps on the stored state
    s = chk
    run.check("glXFM", "glXFM", e7.glxfm_residual(s.p, s.f, s.rho, s.lam), 1e-15, 30)
    run.check("LR_xfm", "LR_xfm", _rel(e7.lr_xfm_rho(s.p, spc.l, s.f), s.rho), 1e-15, 30)
    run.check("glIXFM", "glIXFM", _rel(e7.glixfm_lambda(s.p, e7.rho_to_g(s.rho, ws.ctx), s.f), s.lam), 1e-15, 30)
    zp, zm = e7.zpm_from_f(s.p, spc.l, s.f)
    run.check("splitXfm_round_trip", "splitXfm:a", max(_rel(zp, spc.zpm[0]), _rel(zm, spc.zpm[1])), 1e-15, 30)
    lr = e7.lambda_to_l(s.lam, ws.ctx)
    run.check("lambda_l_round_trip", "deform_AW_spec:a", _rel((lr + 1 / lr) / 2, s.lam), ("tol", 20))


# Seed solution


def suite_seed(run: SuiteRun) -> None:
    ws = run.ws
    p = ws.m3
    guard = e7.seed_guard(p)
    anchors = {"f": "CLsoln:a", "riccati": "t-Evol:a", "lambda_d": "t-Evol:d", "lambda_c": "t-Evol:c", "square": "perfectSQ"}
    for k, v in guard.items():
        run.check(f"guard_{k}", anchors[k], v, 1e-18, 10)
    m = ws.m00_explicit()
    qh = ws.ctx.qh
    pc, ph = p.at(t=p.t / qh), p.at(t=p.t * qh)
    rho_c, rho_h = e7.seed_rho(pc, m), e7.seed_rho(ph, m)
    run.check("explicit_rho_tEvol_a", "t-Evol:a", _rel(e7.evol_rho_forward(p, e7.seed_f(pc), rho_c), rho_h), 1e-18, 10)
    run.check("explicit_rho_riccati", "CLsoln:b", _rel(e7.riccati_rhs(p, rho_c), rho_h), 1e-18, 10)
    run.check("explicit_CLsoln_c", "CLsoln:c", e7.seed_linear_residual(p, m), ("tol", 20))
    run.check("CLsoln_c_equals_3TermMoment", "3TermMoment", e7.seed_moment_equivalence(p), ("tol", 20))
    ratio = lambda tt: mpf("0.7") * tt + mpf("0.2")  # noqa: E731
    vals = e7.seed_linear_orbit(p, (mpf("0.37"), mpf("1.21")), 2, ratio)
    table = {j: v for j, v in vals.items()}
    mm = lambda tt: table[int(mp.nint((2 * mp.log(tt / p.t) / mp.log(ws.ctx.q)).real))]  # noqa: E731
    r_c, r_h = e7.seed_rho(pc, mm, ratio), e7.seed_rho(ph, mm, ratio)
    run.check("general_CD_riccati", "CLsoln:b", _rel(e7.riccati_rhs(p, r_c), r_h), 1e-18, 10)
    # against the contour-weight orthogonal polynomial data
    ref = ws.ref
    for k in (0, 2):
        st = ref.state(k, 0)
        run.check(f"ops_f0_k{k}", "CLsoln:a", _rel(st.f, e7.seed_f(st.p)), 1e-18, 10)
        rho_m = e7.seed_rho(st.p, lambda tt, k=k: ref.m00(k) if abs(tt - st.p.t) < abs(tt) / 4 else ref.m00(k - 2))
        run.check(f"ops_rho0_moments_k{k}", "CLsoln:b", _rel(rho_m, st.rho), 1e-18, 10)
    chk, hat = ref.state(0, 0), ref.state(2, 0)
    pm = ref.params(1).at(n=0)
    run.check("ops_tEvol_a", "t-Evol:a", _rel(e7.evol_rho_forward(pm, chk.f, chk.rho), hat.rho), 1e-18, 10)
    run.check("ops_riccati", "CLsoln:b", _rel(e7.riccati_rhs(pm, chk.rho), hat.rho), 1e-18, 10)
    run.check("ops_lambda0_relation", "t-Evol:d", e7.seed_lambda_residual(pm, chk.lam, hat.rho), 1e-18, 10)
    zs = sample_points(ws.ctx, 3, ws.seed(6))
    mats = e7.seed_matrix_residuals(
        pm, ref.spectral(1).coeffs(0), ref.deform(1).coeffs(0), ref.ops(2).state.gamma[0], ref.ops(0).state.gamma[0], zs
    )
    for k, v in mats.items():
        run.check(f"n0_matrix_{k}", "spectral_coeff_init" if k[0] in "WT" else "deform_def_n=0", v, 1e-18, 10)
    sph = e7.spectral_param_from_coeffs(hat.p, ref.spectral(2).coeffs(0))
    spc = e7.spectral_param_from_coeffs(chk.p, ref.spectral(0).coeffs(0))
    fl = e7.evalspec_fl(pm, hat.f, sph.l, chk.f, spc.l)
    run.check("evalSpec_c_vanishes", "evalSpec:c", abs(fl["c"]), 1e-18, 10)
    run.check("evalSpec_d_vanishes", "evalSpec:d", abs(fl["d"]), 1e-18, 10)


# Evolution


def suite_evolution(run: SuiteRun) -> None:
    ws = run.ws
    ref = ws.ref
    n = 1
    s0 = ref.state(0, n)
    hat = ref.state(2, n)
    step, info = e7.evolve_forward(s0)
    run.check("forward_vs_ops", "t-Evol:b", step.distance(hat), 1e-16, 30)
    pm = ref.params(1).at(n=n)
    g_h, g_c = ref.ops(2).state.gamma[n], ref.ops(0).state.gamma[n]
    run.check("gamma_ratio", "t-Evol:f", _rel(e7.evol_gamma_ratio(pm, hat.rho), pm.t**2 * g_h**2 / g_c**2), 1e-16, 30)
    run.check("backward_vs_ops", "t-Evol:e", e7.evolve_backward(hat).distance(s0), 1e-16, 30)
    lc = e7.evol_lambda_back_c(pm, e7.rho_to_g(hat.rho, ws.ctx), hat.f)
    ld = e7.evol_lambda_back_d(pm, hat.f, hat.lam, hat.rho)
    run.check("backward_c_vs_d", "t-Evol:c", _rel(lc, ld), ("tol", 16))
    run.check("evol_aux", "Evol_aux", _rel(e7.evol_aux_rho(pm, s0.f, s0.lam), hat.rho), 1e-16, 30)
    # four forward steps, then four back
    states, sq, sign, cd = [s0], mpf(0), mpf(0), mpf(0)
    s = s0
    for _ in range(ws.cfg.orbit_steps):
        s, info = e7.evolve_forward(s)
        states.append(s)
        sq = max(sq, info.square_residual)
        sign = max(sign, _rel(info.root_hat, info.root_check))
        pmid = s.p.at(t=s.t / ws.ctx.qh)
        cd = max(cd, _rel(e7.evol_lambda_back_c(pmid, e7.rho_to_g(s.rho, ws.ctx), s.f), e7.evol_lambda_back_d(pmid, s.f, s.lam, s.rho)))
    b = states[-1]
    for _ in range(ws.cfg.orbit_steps):
        b = e7.evolve_backward(b)
    run.check("round_trip_orbit", "t-Evol:b", b.distance(s0), 1e-14, 30)
    run.check("perfect_square_orbit", "t-Aux:c", sq, 1e-16, 30)
    run.check("perfect_square_same_sign", "t-Aux:d", sign, 1e-16, 30)
    run.check("backward_c_vs_d_orbit", "t-Evol:d", cd, ("tol", 16))
    # removable pole: alpha - t f = 1e-20 against the uncancelled form at triple precision
    pr = ws.m3.at(n=n)
    f = (pr.alpha - mpf(10) ** -20) / pr.t
    rho = s0.rho
    v = e7.evol_rho_forward(pr, f, rho)
    with mp.workdps(3 * ws.P):
        oracle = _uncancelled_rho_forward(pr, f, rho)
    run.check("removable_pole", "t-Evol:a", _rel(v, oracle), ("tol", 18))


def _uncancelled_rho_forward(p: e7.M3Params, f, rho_c) -> mpc:
    t, al, q, s4, w = p.t, p.alpha, p.q, p.s4, p.auxquartic
    e = 2 * s4 * rho_c - 1 / f - s4**2 * f
    r = q * (t - al * f) * (q * f - al * t) / ((t * f - al) * (q - al * t * f))
    d2 = q * al * t * w(f) - (q * f - al * t) * (q - al * t * f) * f * e
    d3 = al * t * w(f) - (t * f - al) * (t - al * f) * f * e
    r += al**4 * t * t * (q - t * t) / (q - al * al) * (q * f - al * t) / (q - al * t * f) * f * f * w(q / (al * t)) / d2
    r -= q * t * t * (q - t * t) / (q - al * al) * (t - al * f) / (t * f - al) * f * f * w(al / t) / d3
    return (r * e + t * t / f + q * q * s4**2 * f / (t * t)) / (2 * q * s4)


# Structural invariants


def suite_invariants(run: SuiteRun) -> None:
    ws = run.ws
    p = ws.m3.at(n=1)
    xs = [QQuadPoint(z, ws.ctx).x for z in sample_points(ws.ctx, 5, ws.seed(7))]
    anchors = {
        "W_cubic": "deform_AW_SCff:b",
        "W2_Dy2V2": "deform_AW_SCff:a",
        "R2_Dv2S2": "deform_AW_DCff:a",
        "WV_products": "deform_AW_SCff:a",
        "RS_products": "deform_AW_DCff:a",
        "divides": "deform_AW_SCff:a",
        "sigma_tilde": "M=3AWmoment",
    }
    for k, v in e7.m3_data_checks(p, xs).items():
        run.check(f"data_{k}", anchors[k], v, 1e-20, 10)
    run.check("bracket_identity", "M=3AWmoment", max(e7.bracket_identity(p, s) for s in (mpf(1) / 2, 1, mpf(3) / 2)), 1e-20, 10)
    run.check("sigma_shift", "M=3AWmoment", e7.sigma_shift_residual(p), 1e-20, 10)
    ref = ws.ref
    U = e7.m3_U(ref.params(0), ref.m00(0), ref.m0pm(0))
    run.check("U_formula", "M=3U", _pmax_rel(U, ref.spectral(0).sd.U), 1e-18, 30)
    T = e7.m3_T(ref.params(0), ref.m00(1), ref.m00(-1))
    run.check("T_formula", "M=3Tpoly", _rel(T, ref.deform(0).dd.T[0]), 1e-18, 30)
    zs = sample_points(ws.ctx, 3, ws.seed(8))
    sc = ref.spectral(0).coeffs(1)
    run.check("star_reversal_n1", "spectral_inverse", max(e7.star_reversal_residual(ref.params(0), sc, z) for z in zs), 1e-18, 30)
    worst = {"conic": mpf(0), "zpm": mpf(0), "a2": mpf(0), "b": mpf(0), "frak": mpf(0)}
    for n in range(3):
        pn = ref.params(0).at(n=n)
        c = ref.spectral(0).coeffs(n)
        sp = e7.spectral_param_from_coeffs(pn, c)
        worst["conic"] = max(worst["conic"], sp.conic_residual())
        worst["zpm"] = max(worst["zpm"], sp.zpm_product_residual())
        if n >= 1:
            worst["a2"] = max(worst["a2"], _rel(e7.spec_a2(sp), c.an**2))
        worst["b"] = max(worst["b"], _rel(e7.spec_b(sp), c.bn))
        for z in zs:
            fr, fp = c.frak(z), e7.frak_from_param(sp, z)
            worst["frak"] = max(worst["frak"], max(abs(u - v) / max(abs(u), 1) for u, v in zip(fr[:3], fp[:3])))
    run.check("spectral_conic_n0_2", "xfmV:a", worst["conic"], 1e-18, 30)
    run.check("spectral_zpm_product_n0_2", "xfmV:b", worst["zpm"], 1e-18, 30)
    run.check("spectral_a2_n1_2", "deform_AW_spec:d", worst["a2"], 1e-18, 30)
    run.check("spectral_b_n0_2", "deform_AW_spec:e", worst["b"], 1e-18, 30)
    run.check("matrix_z_form_n0_2", "auxB1", worst["frak"], 1e-18, 30)
    sp0 = e7.spectral_param_from_coeffs(ref.params(0).at(n=0), ref.spectral(0).coeffs(0))
    w2, v0 = e7.seed_w2_v0(ref.params(0).at(n=0))
    run.check("seed_w2_v0", "deform_AW_spec:c", max(_rel(w2, sp0.w2), _rel(v0, sp0.v0)), 1e-18, 30)
    sd0 = e7.m0pm_moment_relation(ref.params(0), lambda tt: ref.m00(0) if abs(tt - ref.params(0).t) < abs(tt) / 4 else ref.m00(-2))
    run.check("m0pm_relation", "M=3L=1U", _rel(sd0, ref.params(0).bracket(1) * ref.m0pm(0)), 1e-18, 30)


def suite_scope(run: SuiteRun) -> None:
    run.out_of_scope("canonical_E7_coordinates", "E7")
    run.out_of_scope("schlesinger_ladder_n_above_2", "spectral+deform:b")


SUITES = {
    "aw-pearson": suite_aw_pearson,
    "aw-integral": suite_aw_integral,
    "aw-recurrence": suite_aw_recurrence,
    "aw-spectral": suite_aw_spectral,
    "laguerre-freud": suite_laguerre_freud,
    "m3-moments": suite_m3_moments,
    "deformation": suite_deformation,
    "closure": suite_closure,
    "seed": suite_seed,
    "evolution": suite_evolution,
    "invariants": suite_invariants,
    "scope": suite_scope,
}


_REFERENCE_SUITES = {"laguerre-freud", "deformation", "closure", "seed", "evolution", "invariants"}


def run_suites(cfg: RunConfig, names=None, ws: Workspace | None = None) -> list:
    """Run the named suites (default: the config's list, else all) in the given order."""
    if names is None:
        names = cfg.suites if cfg.suites is not None else tuple(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        from .errors import ConfigInvalid

        raise ConfigInvalid("unknown suite(s): " + ", ".join(unknown))
    if not names:
        return []
    ws = ws or Workspace(cfg)
    ws.validate(any(n in _REFERENCE_SUITES for n in names))
    out = []
    for name in names:
        run = SuiteRun(name, ws)
        SUITES[name](run)
        out.extend(run.records)
    return out
