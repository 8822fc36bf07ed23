"""The M = 3, L = 1 deformation of the Askey-Wilson system and its t-evolution.

The six Pearson parameters are a1..a4 together with a5 = alpha t and
a6 = alpha/t. Time steps move t along the lattice t -> q t; a state at time
T carries f(T), lambda(T) and rho(T), with the hatted and checked quantities of
the evolution maps living at q^(1/2) t and q^(-1/2) t about the midpoint t.

The auxiliary quartic w(z) = prod_(j<=4) (1 - q^(-1/2) a_j z) is called
``auxquartic`` throughout to keep it apart from the weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .deform import DeformationCoeffs, DeformationData, DeformLattice, DeformSystem, recover_T
from .errors import (
    BranchDegenerate,
    GenericityViolated,
    HardSingularity,
    LambdaAtFixedPoint,
    NonConvergent,
)
from .lattice import QQuadPoint
from .opsys import OPS, WeightSpec, compute_moments, ops_from_moments
from .polyx import padd, peval, pmul, pscale, psub
from .qseries import QContext, elementary_symmetric, qpoch_inf_fast, qpoch_many, w8_7_balanced
from .spectral import SpectralCoeffs, SpectralData, SpectralSystem, recover_U

THETA_NODE = mpf("0.6")


@dataclass(frozen=True)
class M3Params:
    """Parameters of the M = 3 system at deformation variable t and degree n."""

    a: tuple
    alpha: mpc
    t: mpc
    ctx: QContext
    n: int = 0
    sigma: tuple = field(init=False)

    def __post_init__(self):
        a = tuple(mpc(v) for v in self.a)
        if len(a) != 4:
            raise ValueError("four fixed parameters expected")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "alpha", mpc(self.alpha))
        object.__setattr__(self, "t", mpc(self.t))
        object.__setattr__(self, "sigma", tuple(elementary_symmetric(a)))
        self._check_generic()

    def _check_generic(self):
        ctx = self.ctx
        eps = ctx.tol(10)
        qh = ctx.qh
        if abs(ctx.q - 1) < eps:
            raise GenericityViolated("q = 1")
        for v in self.a:
            if abs(abs(v / qh) - 1) < eps:
                raise GenericityViolated("|q^(-1/2) a_j| = 1")
        al = self.alpha
        if abs(abs(al / qh) - 1) < eps:
            raise GenericityViolated("|q^(-1/2) alpha| = 1")
        if abs(al) < eps or abs(al - qh) < eps or abs(al + qh) < eps:
            raise GenericityViolated("alpha in {0, +-q^(1/2)}")
        if abs(self.t - 1) < eps or abs(self.t + 1) < eps:
            raise GenericityViolated("t = +-1")
        if abs(self.bracket(self.n)) < eps or abs(self.bracket(self.n + mpf(1) / 2)) < eps:
            raise GenericityViolated("[n] or [n+1/2] vanishes")

    def at(self, t=None, n=None) -> "M3Params":
        return replace(self, t=self.t if t is None else t, n=self.n if n is None else n)

    @property
    def q(self):
        return self.ctx.q

    @property
    def s4(self) -> mpc:
        """s4 with sigma_4 = q^2 s4^2 (principal root)."""
        return mp.sqrt(self.sigma[4]) / self.q

    @property
    def six(self) -> tuple:
        return self.a + (self.alpha * self.t, self.alpha / self.t)

    @property
    def u(self) -> mpc:
        return (self.t + 1 / self.t) / 2

    @property
    def sigma_tilde(self) -> list:
        """Elementary symmetric functions of q^(-1/2) a_1..a_6, index 0..6."""
        return elementary_symmetric([v / self.ctx.qh for v in self.six])

    def sigma_tilde_closed(self) -> list:
        """The same values written through sigma_k(a1..a4), alpha and u."""
        s = self.sigma
        al, u, qh = self.alpha, self.u, self.ctx.qh
        return [
            mpc(1),
            (s[1] + 2 * al * u) / qh,
            (s[2] + al**2 + 2 * al * s[1] * u) / qh**2,
            (s[3] + al**2 * s[1] + 2 * al * s[2] * u) / qh**3,
            (s[4] + al**2 * s[2] + 2 * al * s[3] * u) / qh**4,
            (al**2 * s[3] + 2 * al * s[4] * u) / qh**5,
            al**2 * s[4] / qh**6,
        ]

    def bracket(self, s) -> mpc:
        """[s] = q^s st6 - q^-s."""
        st6 = self.alpha**2 * self.sigma[4] / self.ctx.q**3
        return self.ctx.q**s * st6 - self.ctx.q ** (-s)

    def brace(self, s) -> mpc:
        """{s} = q^s st6 + q^-s."""
        st6 = self.alpha**2 * self.sigma[4] / self.ctx.q**3
        return self.ctx.q**s * st6 + self.ctx.q ** (-s)

    def auxquartic(self, z) -> mpc:
        out = mpc(1)
        for v in self.a:
            out *= 1 - v * z / self.ctx.qh
        return out

    def x_tilde(self) -> list:
        qh = self.ctx.qh
        return [(v / qh + qh / v) / 2 for v in self.six]

    def w_pm(self) -> tuple:
        """(W(1), W(-1))."""
        st = self.sigma_tilde
        wp = 1 - st[1] + st[2] - st[3] + st[4] - st[5] + st[6]
        wm = -1 - st[1] - st[2] - st[3] - st[4] - st[5] - st[6]
        return wp, wm


def m3_plus(p: M3Params, z) -> mpc:
    """W + Dy V = z^-3 prod_(j<=6) (1 - a_j q^(-1/2) z)."""
    out = z**-3
    for v in p.six:
        out *= 1 - v * z / p.ctx.qh
    return out


def m3_minus(p: M3Params, z) -> mpc:
    return m3_plus(p, 1 / z)


def m3_W_poly(p: M3Params) -> list:
    st = p.sigma_tilde
    return [st[1] - st[3] + st[5], st[2] + st[4] - 3 - 3 * st[6], -2 * (st[1] + st[5]), 4 * (1 + st[6])]


def m3_V_poly(p: M3Params) -> list:
    st = p.sigma_tilde
    c = 1 / (p.ctx.qh - 1 / p.ctx.qh)
    return [c * (1 - st[2] + st[4] - st[6]), c * 2 * (st[1] - st[5]), -4 * c * (1 - st[6])]


def m3_R_poly(p: M3Params) -> list:
    al, u, q, qh = p.alpha, p.u, p.q, p.ctx.qh
    return [1 - al**2 / q + 2 * al**2 * u**2 / q, -2 * al * u / qh]


def m3_S_poly(p: M3Params) -> list:
    al, u, q, qh = p.alpha, p.u, p.q, p.ctx.qh
    c = 2 * al / (q - 1)
    return [c * al * u / qh, -c]


def m3_rplus(p: M3Params, z) -> mpc:
    """R + Dv S = phi_1(x; q^(-1/2) alpha t)."""
    b = p.alpha * p.t / p.ctx.qh
    return (1 - b * z) * (1 - b / z)


def m3_rminus(p: M3Params, z) -> mpc:
    b = p.alpha / (p.t * p.ctx.qh)
    return (1 - b * z) * (1 - b / z)


def m3_data(p: M3Params, U=None, T=None) -> tuple:
    """(SpectralData, DeformationData) for the parameters at their t."""
    ctx = p.ctx
    sd = SpectralData(ctx, m3_W_poly(p), m3_V_poly(p), lambda z: m3_plus(p, z), lambda z: m3_minus(p, z), U)
    lat = DeformLattice(p.t, ctx)
    dd = DeformationData(lat, m3_R_poly(p), m3_S_poly(p), lambda z: m3_rplus(p, z), lambda z: m3_rminus(p, z), T)
    return sd, dd


def m3_data_checks(p: M3Params, xs: Sequence) -> dict:
    """Residuals of the structural statements about the M = 3 data."""
    sd, dd = m3_data(p)
    ctx = p.ctx
    q = p.q
    xt = p.x_tilde()
    out = {"W_cubic": abs(sd.W[3] - 4 * (1 + p.sigma_tilde[6])) / abs(sd.W[3])}
    prod_W = sd.product_poly()
    prod_R = dd.product_poly()
    r1 = r2 = r3 = r4 = mpf(0)
    for x in xs:
        pt = QQuadPoint.from_x(x, ctx)
        full = 64 / q**3 * p.sigma[4] * p.alpha**2
        for v in xt:
            full *= x - v
        wv = peval(prod_W, x)
        r1 = max(r1, abs(wv - full) / abs(full))
        pair = 4 / q * p.alpha**2 * (x - xt[4]) * (x - xt[5])
        rv = peval(prod_R, x)
        r2 = max(r2, abs(rv - pair) / abs(pair))
        r3 = max(r3, sd.decomposition_residual(pt.z) / max(abs(sd.plus(pt.z)), 1))
        rp = dd.R_at(x) + dd.lat.dv * dd.S_at(x)
        r4 = max(r4, abs(rp - dd.plus(pt.z)) / max(abs(rp), 1))
    out["W2_Dy2V2"] = r1
    out["R2_Dv2S2"] = r2
    out["WV_products"] = r3
    out["RS_products"] = r4
    quotient, remainder = _poly_divmod(prod_W, prod_R)
    out["divides"] = max(abs(c) for c in remainder) / max(abs(c) for c in prod_W)
    st, stc = p.sigma_tilde, p.sigma_tilde_closed()
    out["sigma_tilde"] = max(abs(u - v) for u, v in zip(st, stc))
    return out


def _poly_divmod(num: Sequence, den: Sequence) -> tuple:
    num = list(num)
    den = list(den)
    while abs(den[-1]) == 0:
        den.pop()
    out = [mpc(0)] * max(len(num) - len(den) + 1, 1)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / den[-1]
        out[k] = c
        for j, d in enumerate(den):
            num[k + j] -= c * d
    return out, num[: len(den) - 1]


def bracket_identity(p: M3Params, s) -> mpf:
    """[s]{s} - (q^(2s) st6^2 - q^(-2s))."""
    st6 = p.sigma_tilde[6]
    return abs(p.bracket(s) * p.brace(s) - (p.q ** (2 * s) * st6**2 - p.q ** (-2 * s)))


def sigma_shift_residual(p: M3Params) -> mpf:
    """sigma-tilde recomputed at t q^(+-1/2) against the closed u-dependence."""
    worst = mpf(0)
    for tt in (p.t * p.ctx.qh, p.t / p.ctx.qh):
        pp = p.at(t=tt)
        worst = max(worst, max(abs(u - v) for u, v in zip(pp.sigma_tilde, pp.sigma_tilde_closed())))
    return worst


# The weight and its moments


def m3_density(p: M3Params, z, beta=THETA_NODE) -> mpc:
    """A positive weight with the M = 3 Pearson data, as density w(z) sin(theta).

    The theta pair theta(beta z) theta(beta/z) supplies the extra factor z^-2 in
    the Pearson ratio that the six-parameter Askey-Wilson integrand lacks.
    """
    ctx = p.ctx
    num = qpoch_inf_fast(z * z, ctx) * qpoch_inf_fast(1 / (z * z), ctx)
    num *= qpoch_many([beta * z, ctx.q / (beta * z), beta / z, ctx.q * z / beta], ctx)
    den = mpc(1)
    for v in p.six:
        den *= qpoch_inf_fast(v * z, ctx) * qpoch_inf_fast(v / z, ctx)
    return num / den


def m3_weight_spec(p: M3Params, nodes: int = 4096, beta=THETA_NODE) -> WeightSpec:
    for v in p.six:
        if abs(v) >= 1:
            raise GenericityViolated("the contour weight needs |a_j| < 1 for all six parameters")
    return WeightSpec(lambda z: m3_density(p, z, beta), {"a": p.six, "beta": beta}, "m3", nodes)


def m3_weight(p: M3Params, z, beta=THETA_NODE) -> mpc:
    return m3_density(p, z, beta) / ((z - 1 / z) / mpc(0, 2))


def m3_integral(six: Sequence, ctx: QContext, beta=THETA_NODE, nodes: int = 4096) -> mpc:
    """I_3(a_1..a_6) for the contour weight."""
    a = tuple(mpc(v) for v in six)

    def dens(z):
        num = qpoch_inf_fast(z * z, ctx) * qpoch_inf_fast(1 / (z * z), ctx)
        num *= qpoch_many([beta * z, ctx.q / (beta * z), beta / z, ctx.q * z / beta], ctx)
        den = mpc(1)
        for v in a:
            den *= qpoch_inf_fast(v * z, ctx) * qpoch_inf_fast(v / z, ctx)
        return num / den

    return WeightSpec(dens, {"a": a}, "I3", nodes).integrate()


def m3_moment_explicit(p: M3Params, t=None, alpha=None) -> mpc:
    """The two-8W7 moment sequence m_00(t) (sum of the t and 1/t terms)."""
    t = p.t if t is None else mpc(t)
    al = p.alpha if alpha is None else mpc(alpha)
    return _m00_half(p, t, al) + _m00_half(p, 1 / t, al)


def _m00_half(p: M3Params, t, al) -> mpc:
    ctx = p.ctx
    q, qh = ctx.q, ctx.qh
    s4 = p.sigma[4]
    at = al * t
    pref = mp.sqrt(t) * qpoch_many([q * at, 1 / at, qh * at, qh / at], ctx)
    pref *= qpoch_many([s4 * at / v for v in p.a], ctx)
    pref /= qpoch_many([v * at for v in p.a] + [t**-2, s4 * at * at], ctx)
    big = s4 * at * at / q
    return pref * w8_7_balanced(big, s4 * al * al / q, *[v * at for v in p.a], ctx)


def three_term_moment_coeffs(p: M3Params, t=None) -> tuple:
    """Coefficients of m_00 at q^(1/2) t, q^(-1/2) t, q^(-3/2) t in the q-difference equation in t."""
    ctx = p.ctx
    q, qh = ctx.q, ctx.qh
    t = p.t if t is None else mpc(t)
    al = p.alpha
    s = p.sigma
    w = p.auxquartic
    c1 = (t / q - q / t) * w(al / t)
    br = (1 + q) * (1 + al**2 * s[2] / q + al**4 * s[4] / q**2)
    br += al**2 / q * (q + s[4]) * (t - 1 / t) * (t / q - q / t)
    br -= al * (t / qh + qh / t) * (s[1] + al**2 * s[3] / q)
    c2 = -(t / qh - qh / t) / qh * br
    c3 = (t - 1 / t) * w(al * t / q)
    return c1, c2, c3


def three_term_moment_residual(p: M3Params, m: Callable, t=None) -> mpf:
    """Relative residual of the second-order q-difference equation in t for m_00."""
    qh = p.ctx.qh
    t = p.t if t is None else mpc(t)
    c1, c2, c3 = three_term_moment_coeffs(p, t)
    terms = [c1 * m(qh * t), c2 * m(t / qh), c3 * m(t / (p.q * qh))]
    return abs(mp.fsum(terms)) / max(abs(v) for v in terms)


def int_recur_b_residual(six: Sequence, I: Callable, ctx: QContext) -> mpf:
    """Relative residual of the three-term recurrence of I_3 in (a5, a6)."""
    q = ctx.q
    a = [mpc(v) for v in six]
    a5, a6 = a[4], a[5]
    s = elementary_symmetric(a[:4])
    p6 = p5 = mpc(1)
    for v in a[:4]:
        p6 *= 1 - v * a6
        p5 *= 1 - v * a5
    br = (1 + q) * (1 + q * a5 * a6 * s[2] + q**2 * a5**2 * a6**2 * s[4])
    br -= (q * a5 - a6) * (q * a6 - a5) * (q + s[4])
    br -= q * (a5 + a6) * (s[1] + q * a5 * a6 * s[3])
    base = a[:4]
    terms = [
        (a5 - q * a6) * p6 * I(base + [q * q * a5, a6]),
        -(a5 - a6) * br * I(base + [q * a5, q * a6]),
        (q * a5 - a6) * p5 * I(base + [a5, q * q * a6]),
    ]
    return abs(mp.fsum(terms)) / max(abs(v) for v in terms)


def explicit_as_integral(p: M3Params) -> Callable:
    """View the explicit moment as a function of (a1..a6) with alpha^2 = a5 a6, t^2 = a5/a6."""

    def I(six):
        a5, a6 = mpc(six[4]), mpc(six[5])
        al = mp.sqrt(a5 * a6)
        t = mp.sqrt(a5 / a6)
        return m3_moment_explicit(p, t=t, alpha=al)

    return I


def pair_identity_residual(six: Sequence, j: int, k: int, I: Callable, ctx: QContext) -> mpf:
    """a_k I(q a_j) - a_j I(q a_k) - (a_k - a_j)(1 - a_j a_k) I."""
    a = [mpc(v) for v in six]
    aj, ak = a[j], a[k]
    bj = list(a)
    bj[j] = ctx.q * aj
    bk = list(a)
    bk[k] = ctx.q * ak
    lhs = ak * I(bj) - aj * I(bk)
    rhs = (ak - aj) * (1 - aj * ak) * I(a)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def m3_U(p: M3Params, m00, m0pm) -> list:
    """U(x) from m_00 and m_0+ + m_0-; linear in x."""
    qh = p.ctx.qh
    st = p.sigma_tilde
    c = 4 / (qh - 1 / qh)
    half = p.bracket(mpf(1) / 2)
    return [c * (m00 * (qh * st[5] - st[1] / qh) - p.bracket(1) * m0pm), c * m00 * (-2 * half)]


def m3_T(p: M3Params, m00_plus, m00_minus) -> mpc:
    """T from m_00 at v+ and v-; a constant."""
    t, q, al = p.t, p.q, p.alpha
    return 4 * al / (q - 1) * (t * m00_minus - m00_plus / t) / (t - 1 / t)


def m0pm_moment_relation(p: M3Params, m: Callable) -> mpc:
    """Right side of the relation for [1](m_0+ + m_0-)(t) in terms of m_00 at t and t/q."""
    q, qh = p.q, p.ctx.qh
    t, al = p.t, p.alpha
    s = p.sigma
    coef = al**2 * s[3] / q**2 - s[1] / q + (q - al**2) * (q**2 / (al * t) + s[4] * al * t) / q**3
    ratio = (t / qh * m(t / q) - qh / t * m(t)) / (t / qh - qh / t)
    return coef * m(t) - p.auxquartic(al * t / qh) / (al * t) * ratio


def star_reversal_residual(p: M3Params, sc: SpectralCoeffs, z) -> mpf:
    """A*_n(z) A*_n(1/z) against (W^2 - Dy^2 V^2) Id."""
    m = sc.matrix_star(z) * sc.matrix_star(1 / z)
    target = m3_plus(p, z) * m3_minus(p, z)
    return max(abs(m[0, 0] - target), abs(m[1, 1] - target), abs(m[0, 1]), abs(m[1, 0])) / abs(target)


# Quadrature reference system on the half-step grid t q^(k/2)


def m3_ops(p: M3Params, n_max: int, nodes: int = 1024, max_nodes: int = 16384) -> OPS:
    """OPS of the contour weight at p.t, doubling the node count until certified."""
    while True:
        w = m3_weight_spec(p, nodes)
        try:
            m = compute_moments(w, p.a[0], p.a[1], n_max, n_max + 1, p.ctx)
            ops = OPS(w, ops_from_moments(m, n_max, p.ctx))
            ops.q(mpc(2))
            return ops
        except NonConvergent:
            if nodes >= max_nodes:
                raise
            nodes *= 2


class M3Reference:
    """Orthogonal polynomial data of the contour weight at the times t q^(k/2).

    ``spectral(k)`` fits the spectral coefficients at t q^(k/2); ``deform(k)``
    fits the deformation coefficients about the midpoint t q^(k/2), using the
    systems at k - 1 and k + 1 and H_n = a_n/2 at k.
    """

    def __init__(self, p: M3Params, n_max: int = 3):
        self.p = p
        self.n_max = n_max
        self.ctx = p.ctx
        self._ops = {}
        self._spec = {}
        self._deform = {}

    def params(self, k: int) -> M3Params:
        return self.p.at(t=self.p.t * self.ctx.qh**k)

    def ops(self, k: int) -> OPS:
        if k not in self._ops:
            self._ops[k] = m3_ops(self.params(k), self.n_max)
        return self._ops[k]

    def m00(self, k: int) -> mpc:
        return self.ops(k).state.m00

    def m0pm(self, k: int) -> mpc:
        """m_0+ + m_0- = integral of w (z + 1/z) = 2 int w x."""
        return self.ops(k).weight.integrate(lambda z: z + 1 / z)

    def spectral(self, k: int) -> SpectralSystem:
        if k not in self._spec:
            pk = self.params(k)
            ops = self.ops(k)
            sd, _ = m3_data(pk)
            sd = replace(sd, U=recover_U(sd, ops.f))
            self._spec[k] = SpectralSystem(ops, sd)
        return self._spec[k]

    def deform(self, k: int) -> DeformSystem:
        if k not in self._deform:
            pk = self.params(k)
            _, dd = m3_data(pk)
            ops_p, ops_m = self.ops(k + 1), self.ops(k - 1)
            dd = dd.with_T(recover_T(dd, ops_p.f, ops_m.f))
            ops_0 = self.ops(k)
            self._deform[k] = DeformSystem(ops_p, ops_m, dd, lambda n: ops_0.state.a[n] / 2)
        return self._deform[k]

    def state(self, k: int, n: int) -> "E7State":
        """(f, lambda, rho) at t q^(k/2) from the quadrature data; needs the systems at k - 2 and k."""
        pk = self.params(k).at(n=n)
        sp = spectral_param_from_coeffs(pk, self.spectral(k).coeffs(n))
        f = f_from_zpm(pk, sp.l, sp.zpm[0])
        dp = DeformParam.from_coeffs(self.deform(k - 1).coeffs(n))
        rho = rho_hat_from_deform(self.params(k - 1).at(n=n), dp, self.ops(k - 2).a(n), self.ops(k).a(n))[0]
        return E7State(pk, f, sp.lam, rho)


# Spectral parameterisation


@dataclass(frozen=True)
class SpectralParam:
    """lambda_n with nu_n, mu_n and the derived w_(2,n), v_(0,n), l and frak-z+-."""

    p: M3Params
    an: mpc
    lam: mpc
    nu: mpc
    mu: mpc

    @property
    def delta_sqrt(self) -> mpc:
        return self.p.ctx.qh - 1 / self.p.ctx.qh

    @property
    def w2(self) -> mpc:
        p, lam = self.p, self.lam
        wp, wm = p.w_pm()
        return self.nu / (lam**2 - 1) - 4 * p.brace(p.n) * lam - wp / (2 * (lam - 1)) + wm / (2 * (lam + 1))

    @property
    def v0(self) -> mpc:
        p, lam = self.p, self.lam
        st = p.sigma_tilde
        bn = p.bracket(p.n)
        c = st[1] * st[6] + st[5]
        return self.delta_sqrt * self.mu - 4 * bn * lam**2 - lam * (p.brace(p.n) * self.w2 + 4 * c) / bn

    @property
    def l(self) -> mpc:
        return lambda_to_l(self.lam, self.p.ctx)

    @property
    def zpm(self) -> tuple:
        l = self.l
        d = self.delta_sqrt * (l - 1 / l) / 2 * self.mu
        return self.nu + d, self.nu - d

    def conic_residual(self) -> mpf:
        """nu^2 - W^2(lambda) - Delta (lambda^2 - 1)(mu^2 - V^2(lambda)), relative."""
        p, lam = self.p, self.lam
        W = peval(m3_W_poly(p), lam)
        V = peval(m3_V_poly(p), lam)
        lhs = self.nu**2 - W**2
        rhs = self.delta_sqrt**2 * (lam**2 - 1) * (self.mu**2 - V**2)
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs), abs(W) ** 2)

    def zpm_product_residual(self) -> mpf:
        """frak-z+ frak-z- against prod_j (1 - q^(-1/2) a_j l^(+-1))."""
        zp, zm = self.zpm
        l, qh = self.l, self.p.ctx.qh
        target = mpc(1)
        for v in self.p.six:
            target *= (1 - v * l / qh) * (1 - v / (l * qh))
        return abs(zp * zm - target) / abs(target)


def lambda_to_l(lam, ctx: QContext, near=None) -> mpc:
    """Inverse of lambda = (l + 1/l)/2 on the branch |l| >= 1.

    When both roots lie on the unit circle the tie is broken by ``near`` (the
    value at a neighbouring time) if given, otherwise by Im l >= 0.
    """
    lam = mpc(lam)
    if abs(lam * lam - 1) < ctx.tol(10):
        raise BranchDegenerate("lambda = +-1 gives the double root l = +-1")
    r = mp.sqrt(lam * lam - 1)
    l1, l2 = lam + r, lam - r
    if abs(abs(l1) - abs(l2)) > ctx.tol(10):
        return l1 if abs(l1) > abs(l2) else l2
    if near is not None:
        return l1 if abs(l1 - near) <= abs(l2 - near) else l2
    return l1 if mp.im(l1) >= 0 else l2


def rho_to_g(rho, ctx: QContext, near=None) -> mpc:
    """Inverse of 2 rho = g + 1/g with the same branch rule as l."""
    return lambda_to_l(rho, ctx, near)


def spectral_param_from_coeffs(p: M3Params, c: SpectralCoeffs) -> SpectralParam:
    """Read lambda_n, nu_n, mu_n off fitted spectral coefficients."""
    th = c.Theta
    if len(th) < 2 or th[1] == 0:
        raise LambdaAtFixedPoint("Theta_n has no linear term")
    lam = -th[0] / th[1]
    if abs(lam * lam - 1) < p.ctx.tol(10):
        raise LambdaAtFixedPoint("lambda_n = +-1")
    two_w = 2 * peval(c.Wn, lam) - peval(c.sd.W, lam)
    ov = peval(c.Omega, lam) + peval(c.sd.V, lam)
    return SpectralParam(p, c.an, lam, two_w, ov)


def spec_polys(sp: SpectralParam) -> tuple:
    """(2W_n - W, Theta_n, Omega_n + V) rebuilt from (lambda, nu, mu)."""
    p, lam, nu, mu = sp.p, sp.lam, sp.nu, sp.mu
    n = p.n
    d = sp.delta_sqrt
    st = p.sigma_tilde
    wp, wm = p.w_pm()
    bn, cn = p.bracket(n), p.brace(n)
    # (x - lam) [4{n}(x^2 - 1) + wp/2 (x + 1)/(1 - lam) + wm/2 (x - 1)/(1 + lam)]
    inner = [-4 * cn + wp / (2 * (1 - lam)) - wm / (2 * (1 + lam)), wp / (2 * (1 - lam)) + wm / (2 * (1 + lam)), 4 * cn]
    two_w = pmul([-lam, 1], inner)
    two_w = [two_w[0] - nu / (lam**2 - 1), two_w[1], two_w[2] + nu / (lam**2 - 1), two_w[3]]
    theta = [-lam * 8 * p.bracket(n + mpf(1) / 2) / d, 8 * p.bracket(n + mpf(1) / 2) / d]
    c = st[1] * st[6] + st[5]
    lin = 16 / d * st[6] / bn * (c / (4 * st[6]) - lam)
    lin += cn / (d * bn) * (nu / (lam**2 - 1) + wp / (2 * (1 - lam)) + wm / (2 * (1 + lam)))
    ov = [mu - lin * lam, lin - 4 * bn / d * lam, 4 * bn / d]
    return two_w, theta, ov


def recur_a_residual(sp0: SpectralParam, sp1: SpectralParam) -> mpf:
    """w_(2,n+1) - w_(2,n) + 4 (q^(1/2) - q^(-1/2)) [n + 1/2] lambda_n."""
    p = sp0.p
    rhs = -4 * sp0.delta_sqrt * p.bracket(p.n + mpf(1) / 2) * sp0.lam
    return abs(sp1.w2 - sp0.w2 - rhs) / max(abs(sp1.w2), abs(sp0.w2))


def recur_b_residual(sp0: SpectralParam, sp1: SpectralParam) -> mpf:
    p = sp0.p
    n = p.n
    st = p.sigma_tilde
    c = st[1] * st[6] + st[5]
    h = p.bracket(n + mpf(1) / 2)
    qh = p.ctx.qh
    lam = sp0.lam
    rhs = -h / (p.bracket(n + 1) * p.bracket(n))
    rhs *= 2 * p.brace(n + mpf(1) / 2) * lam * sp0.w2 + 8 * h * p.bracket(n) * lam**2 + 4 * (qh + 1 / qh) * c * lam
    lhs = sp1.v0 + sp0.v0
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def seed_w2_v0(p: M3Params) -> tuple:
    """The n = 0 initial values of w_(2,n) and v_(0,n)."""
    st = p.sigma_tilde
    return -2 * (st[1] + st[5]), 1 - st[2] + st[4] - st[6]


def spec_a2(sp: SpectralParam) -> mpc:
    """a_n^2 from w_(2,n) and v_(0,n)."""
    p = sp.p
    n = p.n
    st = p.sigma_tilde
    c = st[1] * st[6] + st[5]
    bn, cn = p.bracket(n), p.brace(n)
    w2, v0 = sp.w2, sp.v0
    num = st[6] * w2**2 + 2 * c * cn * w2 + 2 * bn**3 * v0
    num += 2 * bn**2 * (4 * st[6] + 2 * st[4] + 2 * st[2] * st[6] + 2 * st[1] * st[5] - cn * (1 + st[2] + st[4] + st[6]) + 2 * bn**2)
    num += 4 * c**2
    half = mpf(1) / 2
    return num / (16 * p.bracket(n + half) * bn**2 * p.bracket(n - half))


def spec_b(sp: SpectralParam) -> mpc:
    p = sp.p
    n = p.n
    st = p.sigma_tilde
    c = st[1] * st[6] + st[5]
    qh = p.ctx.qh
    half = mpf(1) / 2
    val = -p.brace(n + half) * sp.w2 / 4 - p.bracket(n + half) * p.bracket(n) * sp.lam - (qh + 1 / qh) * c / 2
    return val / (p.bracket(n + 1) * p.bracket(n))


def frak_from_param(sp: SpectralParam, z) -> tuple:
    """(frakW+, frakW-, frakT+, frakT-) built from the interpolation formulae in (l, frak-z+-).

    frakT- is obtained from the (n-1) system and is not part of this formula,
    so it is returned as None.
    """
    p = sp.p
    n = p.n
    z = mpc(z)
    l = sp.l
    zp, zm = sp.zpm
    q = p.q
    st = p.sigma_tilde
    s6 = st[6]
    bn = p.bracket(n)
    wp, wm = p.w_pm()
    qn, qmn = q**n, q ** (-n)
    li = 1 / l
    zi = 1 / z
    dz = z - zi
    core = dz * (z - l) * (1 - li * zi)
    T = 2 * sp.an * p.bracket(n + mpf(1) / 2) * core
    cc = s6 * st[1] + st[5] - 2 * s6 * (l + li)
    d2 = (l - li) ** 2
    Wp = zp * dz * (z - li) * (qn * s6 - qmn * l * zi) / d2
    Wp += zm * dz * (z - l) * (qn * s6 - qmn * li * zi) / d2
    Wp += bn * core * (qn * s6 * z - qmn * zi)
    Wp += cc * core
    Wp += wp / 2 * (z + 1) * (z - l) * (zi - l) * (qn * s6 - qmn * zi) / (l - 1) ** 2
    Wp -= wm / 2 * (z - 1) * (z - l) * (zi - l) * (qn * s6 + qmn * zi) / (l + 1) ** 2
    Wm = zm * dz * (z - li) * (qn * s6 * l * zi - qmn) / d2
    Wm += zp * dz * (z - l) * (qn * s6 * li * zi - qmn) / d2
    Wm -= bn * core * (qn * s6 * zi - qmn * z)
    Wm -= cc * core
    Wm += wp / 2 * (z + 1) * (z - l) * (zi - l) * (qn * s6 * zi - qmn) / (l - 1) ** 2
    Wm += wm / 2 * (z - 1) * (z - l) * (zi - l) * (qn * s6 * zi + qmn) / (l + 1) ** 2
    return Wp / bn, Wm / bn, T, None


# Deformation parameterisation (L = 1)


@dataclass(frozen=True)
class DeformParam:
    """frakR+- = r1+- x + r0+-, frakP+- = p+- at the midpoint time."""

    r1p: mpc
    r0p: mpc
    r1m: mpc
    r0m: mpc
    pp: mpc
    pm: mpc

    @classmethod
    def from_coeffs(cls, c: DeformationCoeffs) -> "DeformParam":
        f0 = c.frak(mpc(0))
        f1 = c.frak(mpc(1))
        return cls(f1[0] - f0[0], f0[0], f1[1] - f0[1], f0[1], f0[2], f0[3])

    def R_plus(self, x) -> mpc:
        return self.r1p * x + self.r0p

    def R_minus(self, x) -> mpc:
        return self.r1m * x + self.r0m


def leading_from_gammas(p: M3Params, Hn, gp, gm, gp1, gm1, an, an1, Hn1) -> tuple:
    """(r1+, r1-, p+, p-) from gamma_n(v+-), gamma_(n-1)(v+-), a_n, a_(n-1) and H.

    For n = 0 pass gamma_(-1) = a_0 gamma_0 and any nonzero a_(-1); p- is then 0.
    """
    t, al, qh = p.t, p.alpha, p.ctx.qh
    c = 4 * al / qh
    r1p = c * Hn * t * gp / gm1
    r1m = c * Hn * gm / (t * gp1)
    pp = c * Hn * (t * gp / gm - gm / (t * gp))
    pm = mpc(0) if p.n == 0 else c * an * Hn1 / an1 * (t * gp1 / gm1 - gm1 / (t * gp1))
    return r1p, r1m, pp, pm


def dclose_residuals(p: M3Params, dp: DeformParam, ap, am, w2p, w2m) -> dict:
    """The closure relations tying p+-, r0+- to r1+-, a_n(v+-) and w_(2,n)(v+-)."""
    n, t, al, qh = p.n, p.t, p.alpha, p.ctx.qh
    d = qh - 1 / qh
    s6 = p.sigma_tilde[6]
    dv2 = 4 * p.bracket(n) * d
    k = 2 * d * (al / qh + qh / al)
    qn = p.q**n
    r0p = dp.r1p / dv2 * (-w2p + w2m - k * (s6 * qn * t - 1 / (qn * t)))
    r0m = dp.r1m / dv2 * (w2p - w2m - k * (s6 * qn / t - t / qn))

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), abs(dp.r1p))

    return {
        "a": rel(dp.pp, dp.r1p * am - dp.r1m * ap),
        "b": rel(dp.pm, dp.r1p * ap - dp.r1m * am),
        "c": rel(dp.r0p, r0p),
        "d": rel(dp.r0m, r0m),
    }


# Residues of the spectral/deformation compatibility at the zeros and poles of chi


def residue_points(p: M3Params) -> dict:
    """Spectral points z and the lattice coordinates x5~, x6~ about the midpoint t."""
    t, al, q, qh = p.t, p.alpha, p.q, p.ctx.qh
    pts = {"z5": al * t, "z6": al / t, "z6_adv": al / (q * t), "z5_ret": al * t / q}
    x5 = (al * t / qh + qh / (al * t)) / 2
    x6 = (al / (t * qh) + qh * t / al) / 2
    return pts, x5, x6


def cse_residuals(p: M3Params, dp: DeformParam, frak_adv: Callable, frak_ret: Callable) -> dict:
    """The eight residue relations; frak_adv/frak_ret give (W+, W-, T+, T-) at q^(+-1/2) t.

    Relations whose right side needs frakT- are skipped at n = 0 where it vanishes.
    """
    pts, x5, x6 = residue_points(p)
    A5 = frak_adv(pts["z5"])
    A6 = frak_adv(pts["z6_adv"])
    R5 = frak_ret(pts["z5_ret"])
    R6 = frak_ret(pts["z6"])
    Rp5, Rm5 = dp.R_plus(x5), dp.R_minus(x5)
    Rp6, Rm6 = dp.R_plus(x6), dp.R_minus(x6)
    pairs = {
        "a": (Rm5, -A5[0] / A5[2] * dp.pp),
        "d": (Rm6, A6[1] / A6[2] * dp.pp),
        "f": (Rp5, -R5[1] / R5[2] * dp.pp),
        "g": (Rp6, R6[0] / R6[2] * dp.pp),
    }
    if p.n >= 1:
        pairs.update(
            {
                "i": (Rp5, -A5[1] / A5[3] * dp.pm),
                "l": (Rp6, A6[0] / A6[3] * dp.pm),
                "n": (Rm5, -R5[0] / R5[3] * dp.pm),
                "o": (Rm6, R6[1] / R6[3] * dp.pm),
            }
        )
    scale = max(abs(dp.r1p), abs(dp.r1m))
    return {k: abs(a - b) / max(abs(a), abs(b), scale) for k, (a, b) in pairs.items()}


def esme_ratios(p: M3Params, frak_adv: Callable, frak_ret: Callable) -> dict:
    """The four evaluated ratios frakW/frakT+ that enter the residue relations."""
    pts, _, _ = residue_points(p)
    A5 = frak_adv(pts["z5"])
    A6 = frak_adv(pts["z6_adv"])
    R5 = frak_ret(pts["z5_ret"])
    R6 = frak_ret(pts["z6"])
    return {
        "a5": A5[0] / A5[2],
        "a6": A6[1] / A6[2],
        "r5": R5[1] / R5[2],
        "r6": R6[0] / R6[2],
        "A5": A5,
        "A6": A6,
        "R5": R5,
        "R6": R6,
    }


def esme_residuals(p: M3Params, dp: DeformParam, frak_adv: Callable, frak_ret: Callable) -> dict:
    e = esme_ratios(p, frak_adv, frak_ret)
    A5, A6, R5, R6 = e["A5"], e["A6"], e["R5"], e["R6"]
    pairs = {
        "a": (e["a5"] * dp.pp, R5[0] / R5[3] * dp.pm),
        "b": (e["a6"] * dp.pp, R6[1] / R6[3] * dp.pm),
        "c": (e["r5"] * dp.pp, A5[1] / A5[3] * dp.pm),
        "d": (e["r6"] * dp.pp, A6[0] / A6[3] * dp.pm),
    }
    return {k: abs(a - b) / max(abs(a), abs(b)) for k, (a, b) in pairs.items()}


def prod_id_residual(p: M3Params, frak_adv: Callable, frak_ret: Callable) -> mpf:
    e = esme_ratios(p, frak_adv, frak_ret)
    lhs = e["a5"] * e["r5"]
    rhs = e["r6"] * e["a6"]
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def rho_hat_from_deform(p: M3Params, dp: DeformParam, a_ret, a_adv) -> tuple:
    """rho at q^(1/2) t from r1+ a_n(q^(-1/2) t)/p+ and, independently, from r1- a_n(q^(1/2) t)/p+."""
    n, t, al, qh = p.n, p.t, p.alpha, p.ctx.qh
    s4 = p.s4
    qn = p.q**n
    c = qh * p.bracket(n + mpf(1) / 2) * (t - 1 / t)
    from_plus = (c * dp.r1p * a_ret / dp.pp + t / qn + qn * al**2 * s4**2 / t) / (2 * al * s4)
    from_minus = (c * dp.r1m * a_adv / dp.pp + qn * al**2 * s4**2 * t + 1 / (qn * t)) / (2 * al * s4)
    return from_plus, from_minus


def split_id_residuals(p: M3Params, frak_adv: Callable, frak_ret: Callable, rho_hat, a_adv, a_ret) -> dict:
    n, t, al = p.n, p.t, p.alpha
    s4 = p.s4
    qn = p.q**n
    e = esme_ratios(p, frak_adv, frak_ret)
    lhs = a_adv / a_ret * (2 * al * s4 * rho_hat - t / qn - qn * al**2 * s4**2 / t)
    lhs /= 2 * al * s4 * rho_hat - qn * al**2 * s4**2 * t - 1 / (qn * t)
    r1 = e["r6"] / e["a5"]
    r2 = e["r5"] / e["a6"]
    return {"first": abs(lhs - r1) / abs(lhs), "second": abs(lhs - r2) / abs(lhs)}


# Coordinate maps at a single time


def split_prefactors(p: M3Params, l) -> tuple:
    """The (f-independent) prefactors of frak-z+ and frak-z- in the f-parameterisation."""
    t, al, qh = p.t, p.alpha, p.ctx.qh
    w = p.auxquartic
    kp = l**-2 * w(l) * (1 - al * t / (qh * l)) * (1 - al * l / (qh * t))
    km = l**2 * w(1 / l) * (1 - al * t * l / qh) * (1 - al / (qh * t * l))
    return kp, km


def zpm_from_f(p: M3Params, l, f) -> tuple:
    kp, km = split_prefactors(p, l)
    return kp * (l * f - 1) / (f - l), km * (f - l) / (l * f - 1)


def f_from_zpm(p: M3Params, l, zp) -> mpc:
    """Invert the frak-z+ map for f."""
    kp, _ = split_prefactors(p, l)
    k = zp / kp
    den = l - k
    if abs(den) < p.ctx.tol(10) * max(abs(l), 1):
        raise HardSingularity("f is infinite for this frak-z+")
    return (1 - k * l) / den


def glxfm_lambda(p: M3Params, f, rho) -> mpc:
    """lambda from (f, rho) at one time."""
    s4 = p.s4
    lhs = -2 * s4 * f * rho + 1 + s4**2 * f**2
    if lhs == 0:
        raise HardSingularity("rho maps lambda to infinity")
    return (f**2 + 1 - p.auxquartic(f) / lhs) / (2 * f)


def glxfm_rho(p: M3Params, f, lam) -> mpc:
    """rho from (f, lambda) at one time."""
    s4 = p.s4
    den = f**2 + 1 - 2 * f * lam
    if den == 0:
        raise HardSingularity("f is a root of f^2 + 1 - 2 f lambda")
    return (1 + s4**2 * f**2 - p.auxquartic(f) / den) / (2 * s4 * f)


def glxfm_residual(p: M3Params, f, rho, lam) -> mpf:
    s4 = p.s4
    lhs = -2 * s4 * f * rho + 1 + s4**2 * f**2
    rhs = p.auxquartic(f) / (f**2 + 1 - 2 * f * lam)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def lr_xfm_rho(p: M3Params, l, f) -> mpc:
    """rho from (l, f): the form before partial fractions in l."""
    s4 = p.s4
    qh = p.ctx.qh
    w = p.auxquartic
    v = p.sigma[3] / qh**3 - s4**2 * (l + 1 / l) + w(l) / ((l * l - 1) * (l - f)) + l**3 * w(1 / l) / ((l * l - 1) * (l * f - 1))
    return v / (2 * s4)


def glixfm_lambda(p: M3Params, g, f) -> mpc:
    """lambda from (g, f)."""
    s4 = p.s4
    qh = p.ctx.qh
    w = p.auxquartic
    s = p.sigma
    v = qh * s[3] / (2 * s[4]) - (g + 1 / g) / (2 * s4)
    v -= w(g / s4) / (2 * (g * g - 1) * (f - g / s4))
    v += g * g * w(1 / (s4 * g)) / (2 * (g * g - 1) * (f - 1 / (s4 * g)))
    return v


# Evaluated spectral coefficients as rational functions of the state variables


def _evalspec_scale(p: M3Params, a) -> mpc:
    n = p.n
    return 2 * p.t * p.bracket(n) * p.bracket(n + mpf(1) / 2) * a


def evalspec_direct(p: M3Params, frak_adv: Callable, frak_ret: Callable, a_adv, a_ret) -> dict:
    """The four left sides 2t[n][n+1/2] a_n frakW/frakT+ from spectral matrices at q^(+-1/2) t."""
    e = esme_ratios(p, frak_adv, frak_ret)
    sa, sr = _evalspec_scale(p, a_adv), _evalspec_scale(p, a_ret)
    return {"a": sa * e["a5"], "b": sr * e["r6"], "c": sa * e["a6"], "d": sr * e["r5"]}


def evalspec_fl(p: M3Params, fh, lh, fc, lc) -> dict:
    """The same four quantities from (f, l) at q^(1/2) t (hat) and q^(-1/2) t (check)."""
    n, t, al, q, qh = p.n, p.t, p.alpha, p.q, p.ctx.qh
    s = p.sigma
    s6 = p.sigma_tilde[6]
    bn = p.bracket(n)
    w = p.auxquartic
    qn = q**n
    out = {}
    f, l = fh, lh
    pole = w(f) / ((f - l) * (f - 1 / l))
    lsum = l + 1 / l
    qt = q * t
    v = -f**-2 / q * (qt - al * f) * (qn * al * t * s6 - f / qn) * pole
    v += s6 / (al * f) * (al * t - f / qn) * (qn * al * t - f) * lsum
    br = -s6 / qn * (f * f - 1) * (qn * al * t + f) - al * t * s6 * s[1] * f / qh
    br += al**2 * s[3] * f * f / (qn * qh**5) + (q**2 / qn + qn / q**2 * al**4 * s[4]) * f * (-1 / (qn * q**2) + al * t * s[4] * f / q**4)
    v += (qn * al * t - f) * br / (al * f * f)
    out["a"] = v
    v = f**-2 / qh * (al * t - f) * (qn * qh * t * s6 - al * f / (qn * qh)) * pole
    v -= s6 / (al * f) * (al * t - f / qn) * (qn * al * t - f) * lsum
    br = (qn - 1) * al * s[4] * f * (1 + al * t * f) / (qn * q**3) + t * s6 * s[1] * f / qh - al * s[3] * f * f / (qn * qh**5)
    br -= (qn * qh * t * s6 - al * f / (qn * qh)) * (1 / (qn * qh) + s[4] * f * f / qh**5)
    v += (qn * al * t - f) * br / (f * f)
    out["c"] = v
    f, l = fc, lc
    pole = w(f) / ((f - l) * (f - 1 / l))
    lsum = l + 1 / l
    v = -f**-2 / q * (t - al * f) * (al * t - q * f) * (qn * al * s6 - t * f / qn) / (al - t * f) * pole
    v += s6 / (al * f) * (al * t - q * f / qn) * (qn / q * al * t - f) * lsum
    v -= bn * (q - t * t) * t**3 / q * (t - al * f) / (al - t * f) * w(al / t) / ((al - t * l) * (al - t / l))
    br = -t * s6 / qn * (f * f - 1) * (qn * al * t + q * f) - (q - t * t) * s6 * f * (qn * t + al * f) / qn
    br += t * t * f * (-q * q * t + qn * al * s[4] * f) / (q**2 * qn**2) - al * t * t * s6 * s[1] * f / qh
    br += al**2 * t * s[3] * f * f / (qh**3 * qn) - al**2 * s6 * f * (t - qn / q**2 * al * s[4] * f)
    v += (qn / q * al * t - f) * br / (al * t * f * f)
    out["b"] = v
    v = f**-2 / qh * (t - al * f) * (al * t - q * f) * (qn * qh * s6 - al * t * f / (qn * qh)) / (q - al * t * f) * pole
    v -= s6 / (al * f) * (al * t - q * f / qn) * (qn / q * al * t - f) * lsum
    v += bn * (q - t * t) * al**4 * t**3 / q**2 * (al * t - q * f) / (q - al * t * f) * w(q / (al * t)) / ((q - al * t * l) * (q - al * t / l))
    br = q / qn / al * t * s6 * (f * f - 1) * (qn / q * al * t + f) + (q - t * t) * s[4] * f * (qn * al**3 * t + q * q * f) / (q**4 * qn)
    br += t * t * s6 * s[1] * f / qh - al * t * s[3] * f * f / (qn * qh**3)
    br -= al * (q * t * t + qn**2 * s[4]) * f * (-q * q * t + qn * al * s[4] * f) / (q**4 * qn**2)
    v += (qn / q * al * t - f) * br / (t * f * f)
    out["d"] = v
    return out


def lhs2nd_gf(p: M3Params, gh, fh) -> dict:
    """The advanced evaluations a and c of :func:`evalspec_fl` written in (g, f) at q^(1/2) t."""
    n, t, al, q, qh = p.n, p.t, p.alpha, p.q, p.ctx.qh
    s = p.sigma
    s4 = p.s4
    w = p.auxquartic
    g, f = gh, fh
    qn = q**n
    gd = g - 1 / g
    t1 = al * s4 / (qn * q) * (qn * t * al * s4 / g - 1) ** 2 / gd * w(g / s4) / (f - g / s4)
    t2 = al * s4 / (qn * q) * (qn * t * al * s4 * g - 1) ** 2 / gd * w(1 / (s4 * g)) / (f - 1 / (s4 * g))
    sq = g * g + 1 / (g * g)
    gs = g + 1 / g
    a = -t1 + t2 - al / (qn * q) * sq
    a -= (-(qh**7) * al * s[3] + t * s[4] * (q**4 - 2 * qn * q**3 * al**2 + qn**2 * al**4 * s[4])) * gs / (qn * q**6 * s4)
    a += (
        q**6
        + t * t * qn**4 * al**6 * s[4] ** 2
        - t * t * qn**3 * q * al**4 * s[4] * (q * q + s[4])
        + qn**2 * q * q * al**2 * (t * t * q * q + al**2) * s[4]
        - qn * q**4 * al**2 * (2 * q + s[2])
        + qn**2 * qh**5 * al**3 * t * (-q * s[3] + s[1] * s[4])
    ) / (qn**2 * q**6 * al)
    c = t1 - t2 + al / (qn * q) * sq
    c -= al / (qn * qh**15 * s4) * (q**5 * s[3] - t * al * s[4] * (qh**9 - 2 * qn * qh**9 + qn**2 * qh**5 * s[4])) * gs
    c += al / (qn**2 * qh**11) * (
        -(qh**9)
        - qn**4 * qh * al**2 * t * t * s[4] ** 2
        + qn**3 * qh * al**2 * t * t * s[4] * (q * q + s[4])
        - qn**2 * qh**5 * (1 + al**2 * t * t) * s[4]
        + qn * qh**7 * (2 * q + s[2])
        - qn**2 * q * q * al * t * (-q * s[3] + s[1] * s[4])
    )
    return {"a": a, "c": c}


# Evolution maps about the midpoint t: check = q^(-1/2) t, hat = q^(1/2) t


class _EvolTerms:
    """Shared sub-expressions of the evolution formulae at midpoint t and degree n."""

    def __init__(self, p: M3Params):
        self.p = p
        self.n = p.n
        self.t = p.t
        self.al = p.alpha
        self.q = p.q
        self.qh = p.ctx.qh
        self.s = p.sigma
        self.s4 = p.s4
        self.w = p.auxquartic
        self.qn = self.q**self.n
        self.h = p.bracket(self.n + mpf(1) / 2)
        self.hb = p.brace(self.n + mpf(1) / 2)

    def rho_dens(self, rho_h) -> tuple:
        """(1 + q^2n a^2 t^2 s4^2 - 2 q^n a t s4 rho, t^2 + q^2n a^2 s4^2 - 2 q^n a t s4 rho)."""
        qn, al, t, s4 = self.qn, self.al, self.t, self.s4
        d1 = 1 + qn**2 * al**2 * t * t * s4**2 - 2 * qn * al * t * s4 * rho_h
        d2 = t * t + qn**2 * al**2 * s4**2 - 2 * qn * al * t * s4 * rho_h
        return d1, d2

    def w_far(self) -> tuple:
        """(w(q^-n/(alpha t s4^2)), w(q^n alpha/t))."""
        qn, al, t, s4 = self.qn, self.al, self.t, self.s4
        return self.w(1 / (qn * al * t * s4**2)), self.w(qn * al / t)

    def lam_dens(self, lam_c) -> tuple:
        """(alpha^2 + t^2 - 2 alpha t lambda, q^2 + alpha^2 t^2 - 2 q alpha t lambda)."""
        al, t, q = self.al, self.t, self.q
        return al * al + t * t - 2 * al * t * lam_c, q * q + al * al * t * t - 2 * q * al * t * lam_c

    def aux_c_bracket(self, f_h, rho_h) -> mpc:
        """The bracket shared by the (f, rho) perfect-square root and the inverse f-map."""
        qn, al, t, s4 = self.qn, self.al, self.t, self.s4
        d1, d2 = self.rho_dens(rho_h)
        wa, wb = self.w_far()
        v = qn**2 * al**2 * s4**3 * (1 - qn**2 * al**2 * t * t * s4**2) * (f_h - qn * al * t) * wa
        v /= (1 - qn * al * t * s4**2 * f_h) * d1
        v2 = (t * t - qn**2 * al**2 * s4**2) * (t - qn * al * s4**2 * f_h) * wb
        v2 /= qn**2 * al**2 * s4**3 * (t * f_h - qn * al) * d2
        return v + v2

    def aux_d_bracket(self, f_c, lam_c) -> mpc:
        al, t, q = self.al, self.t, self.q
        e1, e2 = self.lam_dens(lam_c)
        v = (t - al * f_c) / (t * f_c - al) * q * q * (t * t - al * al) * self.w(al / t) / e1
        v += (q * f_c - al * t) / (q - al * t * f_c) * al**4 * (q * q - al * al * t * t) * self.w(q / (al * t)) / e2
        return v


def _rho_map_polys(p: M3Params, rho_c) -> tuple:
    """Polynomials in f entering the forward rho map: (w, f E, d2, d3)."""
    t, al, q, s4 = p.t, p.alpha, p.q, p.s4
    w = [mpc(1)]
    for v in p.a:
        w = pmul(w, [mpc(1), -v / p.ctx.qh])
    fe = [mpc(-1), 2 * s4 * rho_c, -(s4**2)]
    d2 = psub(pscale(w, q * al * t), pmul(pmul([-al * t, q], [q, -al * t]), fe))
    d3 = psub(pscale(w, al * t), pmul(pmul([-al, t], [t, -al]), fe))
    return w, fe, d2, d3


def _deflate(c: Sequence, root) -> list:
    """Quotient of c(x) by (x - root), dropping the remainder."""
    out = [mpc(0)] * (len(c) - 1)
    acc = mpc(0)
    for k in range(len(c) - 1, 0, -1):
        acc = acc * root + c[k]
        out[k - 1] = acc
    return out


def removable_pole(p: M3Params, f_c, eps=None) -> str | None:
    """Which apparent pole of the forward rho map lies within eps of f (default tol(P/3))."""
    if eps is None:
        eps = p.ctx.tol(p.ctx.precision_digits / 3)
    d1, d2 = abs(p.t * f_c - p.alpha), abs(p.q - p.alpha * p.t * f_c)
    if min(d1, d2) >= eps:
        return None
    return "alpha = t f" if d1 <= d2 else "q = alpha t f"


# The cancelled forms are exact identities, so they are used well before the
# removable-pole tolerance to avoid losing digits to the near-cancellation.
_CANCEL_RADIUS = mpf("0.1")


def evol_rho_forward(p: M3Params, f_c, rho_c) -> mpc:
    """rho at q^(1/2) t from (f, rho) at q^(-1/2) t.

    The map has apparent poles at alpha = t f and q = alpha t f whose residues
    cancel identically in f; on them the pre-cancelled form is used.
    """
    t, al, q, s4 = p.t, p.alpha, p.q, p.s4
    f = f_c
    w, fe, d2p, d3p = _rho_map_polys(p, rho_c)
    e = peval(fe, f) / f
    d2, d3 = peval(d2p, f), peval(d3p, f)
    if d2 == 0 or d3 == 0:
        raise HardSingularity("vanishing denominator in the rho map")
    c2 = al**4 * t * t * (q - t * t) / (q - al * al) * p.auxquartic(q / (al * t))
    c3 = q * t * t * (q - t * t) / (q - al * al) * p.auxquartic(al / t)
    pole = removable_pole(p, f, _CANCEL_RADIUS)
    if pole != "q = alpha t f":
        t2 = c2 * (q * f - al * t) / (q - al * t * f) * f * f / d2
    if pole != "alpha = t f":
        t3 = -c3 * (t - al * f) / (t * f - al) * f * f / d3
    if pole is None:
        r = q * (t - al * f) * (q * f - al * t) / ((t * f - al) * (q - al * t * f)) + t2 + t3
    elif pole == "alpha = t f":
        n3 = psub(pscale(pmul([-al * t, q], d3p), q), pscale(pmul([0, 0, 1], [q, -al * t]), c3))
        r = (t - al * f) * peval(_deflate(n3, al / t), f) / (t * (q - al * t * f) * d3) + t2
    else:
        n2 = padd(pscale(pmul([t, -al], d2p), q), pscale(pmul([0, 0, 1], [-al, t]), c2))
        r = -(q * f - al * t) * peval(_deflate(n2, q / (al * t)), f) / (al * t * (t * f - al) * d2) + t3
    return (r * e + t * t / f + q * q * s4**2 * f / (t * t)) / (2 * q * s4)


def evol_aux_rho(p: M3Params, f_c, lam_c) -> mpc:
    """rho at q^(1/2) t from (f, lambda) at q^(-1/2) t."""
    E = _EvolTerms(p)
    t, al, q, s4, w = E.t, E.al, E.q, E.s4, E.w
    f = f_c
    e1, e2 = E.lam_dens(lam_c)
    v = t * t / (q * f) + q * s4**2 * f / (t * t)
    v -= (t - al * f) * (q * f - al * t) / (f * (t * f - al) * (q - al * t * f)) * w(f) / (f * f + 1 - 2 * f * lam_c)
    v -= al**4 * t * t * (q - t * t) * (q * f - al * t) / (q * (q - al * al) * (q - al * t * f)) * w(q / (al * t)) / e2
    v += t * t * (q - t * t) * (t - al * f) / ((q - al * al) * (t * f - al)) * w(al / t) / e1
    return v / (2 * s4)


def evol_gamma_ratio(p: M3Params, rho_h) -> mpc:
    """t^2 gamma_n(q^(1/2) t)^2 / gamma_n(q^(-1/2) t)^2 in terms of rho at q^(1/2) t."""
    d1, d2 = _EvolTerms(p).rho_dens(rho_h)
    return d2 / d1


def evol_lambda_back_d(p: M3Params, f_h, lam_h, rho_h) -> mpc:
    """lambda at q^(-1/2) t from (f, lambda, rho) at q^(1/2) t."""
    E = _EvolTerms(p)
    t, al, qn, s4, qh = E.t, E.al, E.qn, E.s4, E.qh
    f = f_h
    d1, d2 = E.rho_dens(rho_h)
    wa, wb = E.w_far()
    v = (f - qn * al * t) * (t - qn * al * s4**2 * f) / ((t * f - qn * al) * (1 - qn * al * t * s4**2 * f))
    v = v * (lam_h - (f + 1 / f) / 2) + (t**4 + f * f) / (2 * t * t * f)
    br = -(s4**3) * (f - qn * al * t) / (1 - qn * al * t * s4**2 * f) * qn**4 * al**4 * wa / d1
    br += (t - qn * al * s4**2 * f) / (s4**3 * (t * f - qn * al)) * wb / d2
    return v + t * t * (t * t - 1) * s4**3 / (2 * qn * qh * E.h) * br


def evol_lambda_back_c(p: M3Params, g_h, f_h) -> mpc:
    """lambda at q^(-1/2) t from (g, f) at q^(1/2) t."""
    E = _EvolTerms(p)
    t, al, qn, s4, qh, s, w = E.t, E.al, E.qn, E.s4, E.qh, E.s, E.w
    g, f = g_h, f_h
    wa, wb = E.w_far()
    a = qn * al * t * s4
    b = qn * al * s4
    v = -(g - a) * (t - b * g) / (2 * (g * g - 1) * (1 - a * g) * (t * g - b)) * w(g / s4) / (f - g / s4)
    v += g * g * (1 - a * g) * (t * g - b) / (2 * (g * g - 1) * (g - a) * (t - b * g)) * w(1 / (s4 * g)) / (f - 1 / (s4 * g))
    v += (qh * al * t * s[3] + qh**5 * (t * t - 1) * E.hb) / (2 * al * t**3 * s[4])
    v -= (g + 1 / g) / (2 * t * t * s4)
    br = qn**2 * al * s4 * wa / ((1 - a * g) * (1 - a / g)) - wb / (al * s4 * (t - b * g) * (t - b / g))
    return v + al * al * t * (t * t - 1) * s4**3 / (2 * qh * E.h) * br


def perfect_square(p: M3Params, rho_h, lam_c) -> mpc:
    """The biquadratic in (rho at q^(1/2) t, lambda at q^(-1/2) t)."""
    q, qh = p.q, p.ctx.qh
    s = p.sigma
    s4 = p.s4
    r, l = rho_h, lam_c
    v = 16 * s[4] * (r * r * l * l - r * r - l * l) - 8 * s4 * (q * q + q * s[2] + s[4]) * r * l
    v += 8 * qh * s4 * (q * s[1] + s[3]) * r + 8 / qh * (s[1] * s[4] + q * s[3]) * l
    v += (q - s[2]) ** 2 - 4 * s[1] * s[3] + 2 * s[4] - 2 * s[2] * s[4] / q + s[4] ** 2 / q**2
    return v


def perfect_square_root_hat(p: M3Params, f_h, rho_h) -> mpc:
    """Square root of the biquadratic written in (f, rho) at q^(1/2) t."""
    E = _EvolTerms(p)
    t, al, q, qh, qn, s4, s, w = E.t, E.al, E.q, E.qh, E.qn, E.s4, E.s, E.w
    f = f_h
    v = q * t * t / f**2 - qh * t * t * s[1] / f + s[3] * f / (qh * t * t) - s[4] * f * f / (q * t * t)
    v += q / (t * t) - t * t * s[4] / q + qh**3 * E.hb * (t * t - 1) * (f + t**4 / f) / (al * t**3)
    v -= 2 * q * s4 * (f / (t * t) - t * t / f) * rho_h
    v -= q * (1 - s4**2 * f * f) * (f - qn * al * t) * (t - qn * al * s4**2 * f) / (
        f * f * (t * f - qn * al) * (1 - qn * al * t * s4**2 * f)
    ) * w(f) / (1 + s4**2 * f * f - 2 * s4 * f * rho_h)
    v += qh * al * t * (t * t - 1) * s4**3 / E.h * E.aux_c_bracket(f, rho_h)
    return v


def perfect_square_root_check(p: M3Params, f_c, lam_c) -> mpc:
    """Square root of the biquadratic written in (f, lambda) at q^(-1/2) t."""
    E = _EvolTerms(p)
    t, al, q, qh, s4, s, w = E.t, E.al, E.q, E.qh, E.s4, E.s, E.w
    f = f_c
    v = qh * s[3] * f / (t * t) - s[1] * t * t / (qh * f)
    v -= (t * t / f**2 + q * q * s4**2 / (t * t)) * (f * f - 1 + (q + al * al) * (q - t * t) * f / (q * al * t))
    v += 2 * lam_c * (t * t / f - q * q * s4**2 * f / (t * t))
    v += q * (f * f - 1) * (q * f - al * t) * (t - al * f) / (f * f * (t * f - al) * (q - al * t * f)) * w(f) / (
        f * f + 1 - 2 * f * lam_c
    )
    v += t * (q - t * t) / (q * al * (q - al * al)) * E.aux_d_bracket(f, lam_c)
    return v


def evol_f_forward(p: M3Params, f_c, lam_c, rho_h) -> mpc:
    """f at q^(1/2) t from (f, lambda) at q^(-1/2) t and rho at q^(1/2) t."""
    E = _EvolTerms(p)
    t, al, q, qh, qn, s4, s, w = E.t, E.al, E.q, E.qh, E.qn, E.s4, E.s, E.w
    f = f_c
    d1, d2 = E.rho_dens(rho_h)
    wa, wb = E.w_far()
    num = 2 * t * t * (t * t - 1) * s4**2 / (qn / qh * E.h) * (-(qn**4) * al**4 * s4**4 * wa / d1 + wb / d2)
    num += -s[2] - (1 - 2 * t * t) * s[4] / q - q * (1 - 2 / (t * t))
    num += 2 * lam_c * (2 * q * s4 * rho_h - t * t / f + q * q * s4**2 * f / (t * t))
    num += -qh * s[3] * f / (t * t) + s[1] * t * t / (qh * f)
    num += (t * t / f**2 + q * q * s4**2 / (t * t)) * (f * f - 1 + (q + al * al) * (q - t * t) * f / (q * al * t))
    num -= q * (f * f - 1) * (q * f - al * t) * (t - al * f) / (f * f * (t * f - al) * (q - al * t * f)) * w(f) / (
        f * f + 1 - 2 * f * lam_c
    )
    num -= t * (q - t * t) / (q * al * (q - al * al)) * E.aux_d_bracket(f, lam_c)
    den = 2 * qh * t * (t * t - 1) / E.h * (-(qn**2) * al**3 * s4**6 * wa / d1 + al * s4**4 * wb / d2)
    den += -2 * qh**3 * E.hb * (t * t - 1) / (al * t**3) - 2 * (qh * s[3] - 2 * t * t * s[4] * lam_c) / (q * t * t)
    den += 4 * q * s4 * rho_h / (t * t)
    if den == 0:
        raise HardSingularity("vanishing denominator in the forward f map")
    return num / den


def evol_f_backward(p: M3Params, f_h, rho_h, lam_c) -> mpc:
    """f at q^(-1/2) t from (f, rho) at q^(1/2) t and lambda at q^(-1/2) t."""
    E = _EvolTerms(p)
    t, al, q, qh, qn, s4, s, w = E.t, E.al, E.q, E.qh, E.qn, E.s4, E.s, E.w
    f = f_h
    e1, e2 = E.lam_dens(lam_c)
    num = 2 * t * t * (q - t * t) / (q - al * al) * (w(al / t) / e1 - al**4 * w(q / (al * t)) / (q * e2))
    num += 4 * s4 * rho_h * lam_c + 2 * s4 * (f / (t * t) - t * t / f) * rho_h
    num += -t * t / f**2 + t * t * s[1] / (qh * f) - s[2] / q - s[3] * f / (qh**3 * t * t) + s[4] * f * f / (q * q * t * t)
    num += -(-2 * q + t * t - t**4) * s[4] / (q * q * t * t) - (q * (1 + t * t) - 2 * t**4) / (q * t * t)
    num -= qh * E.hb * (t * t - 1) * (f + t**4 / f) / (al * t**3)
    num += (1 - s4**2 * f * f) * (f - qn * al * t) * (t - qn * al * s4**2 * f) / (
        f * f * (t * f - qn * al) * (1 - qn * al * t * s4**2 * f)
    ) * w(f) / (1 + s4**2 * f * f - 2 * s4 * f * rho_h)
    num -= al * t * (t * t - 1) * s4**3 / (qh * E.h) * E.aux_c_bracket(f, rho_h)
    den = 2 * al * t * (q - t * t) / (q - al * al) * (w(al / t) / e1 - al * al * w(q / (al * t)) / e2)
    den += -2 * s[3] / (qh * t * t) + 2 * (q - t * t) * (q + al * al) * s[4] / (q * q * al * t**3)
    den += 4 * s4 * rho_h + 4 * s[4] * lam_c / (q * t * t)
    if den == 0:
        raise HardSingularity("vanishing denominator in the backward f map")
    return num / den


# Seed solution at n = 0


def seed_f(p: M3Params) -> mpc:
    return p.alpha * p.t / p.ctx.qh


def seed_ratio_moments(t, q) -> mpc:
    """D/C for the orthogonal-polynomial specialisation."""
    return -t * t / q


def seed_rho(p: M3Params, m: Callable, ratio: Callable | None = None) -> mpc:
    """rho_0(t) from a solution m of the linear equation and the ratio D(t)/C(t).

    With ratio = -t^2/q and m = m_00 this is the moment formula for rho_0.
    """
    q, qh, t, al, s4g = p.q, p.ctx.qh, p.t, p.alpha, p.sigma[4]
    r = (ratio or (lambda tt: seed_ratio_moments(tt, q)))(t)
    mt, mq = m(t), m(t / q)
    num = (qh * t / al + s4g * al / (qh * t)) * mt + r * (qh**3 / (al * t) + s4g * al * t / qh**3) * mq
    return num / ((mt + r * mq) * 2 * q * p.s4)


def riccati_rhs(p: M3Params, rho_c) -> mpc:
    """rho_0 at q^(1/2) t from rho_0 at q^(-1/2) t (t the midpoint)."""
    q, t, al, s4, w = p.q, p.t, p.alpha, p.s4, p.auxquartic
    x = 2 * q * s4 * rho_c - q * q / (al * t) - al * t * s4**2
    v = q * t**4 * w(al / t) * x / (al * t * (q - t * t) * (q - al * al) * x + q**4 * w(al * t / q))
    return (v + t / al + al * s4**2 / t) / (2 * s4)


def seed_lambda_residual(p: M3Params, lam_c, rho_h) -> mpf:
    """t^2 + alpha^2 - 2 alpha t lambda_0 against its rho_0 form (t the midpoint)."""
    t, al, s4 = p.t, p.alpha, p.s4
    lhs = t * t + al * al - 2 * al * t * lam_c
    rhs = t**4 * p.auxquartic(al / t) / (t * t + al * al * s4**2 - 2 * al * t * s4 * rho_h)
    return abs(lhs - rhs) / abs(rhs)


def seed_linear_coeffs(p: M3Params, ratio: Callable | None = None) -> tuple:
    """Coefficients of m(q^(1/2) t), m(q^(-1/2) t), m(q^(-3/2) t) in the linear equation at t."""
    q, qh, t, al, s4g, w = p.q, p.ctx.qh, p.t, p.alpha, p.sigma[4], p.auxquartic
    r = ratio or (lambda tt: seed_ratio_moments(tt, q))
    rh, rc = r(qh * t), r(t / qh)
    a = (t * t - q * q) * t**4 * w(al / t)
    c = q**3 * (t * t - 1) * w(al * t / q)
    b = a + c - (q - al * al) * (q * q - s4g * al * al) * (t * t - 1) * (t * t - q) * (t * t - q * q) / q**3
    return a, rh * b, rh * rc * c


def seed_linear_residual(p: M3Params, m: Callable, ratio: Callable | None = None) -> mpf:
    qh, t = p.ctx.qh, p.t
    terms = [c * m(s) for c, s in zip(seed_linear_coeffs(p, ratio), (qh * t, t / qh, t / qh**3))]
    return abs(sum(terms)) / max(abs(v) for v in terms)


def seed_moment_equivalence(p: M3Params) -> mpf:
    """Proportionality of the seed linear equation (moment ratio) and the moment equation in t."""
    u = seed_linear_coeffs(p)
    v = three_term_moment_coeffs(p)
    k = v[0] / u[0]
    return max(abs(v[i] - k * u[i]) / abs(v[i]) for i in range(3))


def seed_linear_orbit(p: M3Params, m_init: tuple, steps: int, ratio: Callable | None = None) -> dict:
    """Solve the linear equation upward in t: keys j map to m(t q^(j/2)).

    m_init gives m(t q^(-3/2)) and m(t q^(-1/2)); the returned table extends to
    j = 2 steps - 1.
    """
    qh = p.ctx.qh
    vals = {-3: mpc(m_init[0]), -1: mpc(m_init[1])}
    for j in range(1, 2 * steps, 2):
        a, b, c = seed_linear_coeffs(p.at(t=p.t * qh ** (j - 1)), ratio)
        if a == 0:
            raise HardSingularity("leading coefficient of the linear equation vanishes")
        vals[j] = -(b * vals[j - 2] + c * vals[j - 4]) / a
    return vals


def seed_matrix_residuals(p: M3Params, sc: SpectralCoeffs, dc: DeformationCoeffs, gh, gc, zs: Sequence) -> dict:
    """n = 0 spectral and deformation matrix entries against their product forms.

    p is at the midpoint t; sc are the n = 0 spectral coefficients at t and dc
    the n = 0 deformation coefficients about t; gh, gc are gamma_0 at q^(+-1/2) t.
    """
    t, al, qh, w = p.t, p.alpha, p.ctx.qh, p.auxquartic
    a0 = 2 * dc.Hn
    l0 = spectral_param_from_coeffs(p.at(n=0), sc).l
    ah, ac = dc.ap, dc.am
    out = {k: mpf(0) for k in ("W+", "W-", "T+", "T-", "R+", "R-", "P+", "P-")}
    rel = lambda a, b: abs(a - b) / abs(b)  # noqa: E731
    for z in zs:
        Wp, Wm, Tp, Tm = sc.frak(z)
        x = (z + 1 / z) / 2
        Rp, Rm, Pp, Pm = dc.frak(x)
        cases = {
            "W+": rel(Wp, z**-3 * w(z) * (1 - al * t * z / qh) * (1 - al * z / (t * qh))),
            "W-": rel(Wm, z**3 * w(1 / z) * (1 - al * t / (z * qh)) * (1 - al / (t * z * qh))),
            "T+": rel(Tp, 2 * a0 * p.bracket(mpf(1) / 2) * (z - 1 / z) * (z - l0) * (1 - 1 / (l0 * z))),
            "T-": abs(Tm),
            "R+": rel(Rp, -a0 * gh / (ac * gc) * (1 - al * t * z / qh) * (1 - al * t / (z * qh))),
            "R-": rel(Rm, -a0 * gc / (ah * gh) * (1 - al * z / (t * qh)) * (1 - al / (t * z * qh))),
            "P+": rel(Pp, 2 * al * a0 / qh * (t * gh / gc - gc / (t * gh))),
            "P-": abs(Pm),
        }
        for k, v in cases.items():
            out[k] = max(out[k], v)
    return out


# Evolution driver


@dataclass(frozen=True)
class E7State:
    """(f, lambda, rho) at time t and degree n."""

    p: M3Params
    f: mpc
    lam: mpc
    rho: mpc

    @property
    def t(self) -> mpc:
        return self.p.t

    @classmethod
    def from_f_rho(cls, p: M3Params, f, rho) -> "E7State":
        return cls(p, mpc(f), glxfm_lambda(p, f, rho), mpc(rho))

    @classmethod
    def seed(cls, p: M3Params, rho) -> "E7State":
        """The n = 0 classical state with f = q^(-1/2) alpha t and the given rho_0."""
        p0 = p.at(n=0)
        return cls.from_f_rho(p0, seed_f(p0), rho)

    def distance(self, other: "E7State") -> mpf:
        return max(abs(a - b) / max(abs(b), 1) for a, b in ((self.f, other.f), (self.lam, other.lam), (self.rho, other.rho)))


@dataclass(frozen=True)
class StepInfo:
    """Diagnostics of one step: the removable pole met (if any) and perfect-square data."""

    removable: str | None
    square: mpc
    root_hat: mpc
    root_check: mpc

    @property
    def square_residual(self) -> mpf:
        s = max(abs(self.square), mpf(1) / 10**3)
        return max(abs(self.root_hat**2 - self.square), abs(self.root_check**2 - self.square)) / s

    @property
    def sign(self) -> int:
        """+1 when the two square roots coincide, -1 when they differ by sign."""
        return 1 if abs(self.root_hat - self.root_check) <= abs(self.root_hat + self.root_check) else -1


def evolve_forward(s: E7State) -> tuple:
    """Advance t -> q t (through the midpoint q^(1/2) t); returns (state, StepInfo)."""
    pm = s.p.at(t=s.t * s.p.ctx.qh)
    rho_h = evol_rho_forward(pm, s.f, s.rho)
    f_h = evol_f_forward(pm, s.f, s.lam, rho_h)
    out = E7State.from_f_rho(s.p.at(t=s.t * s.p.q), f_h, rho_h)
    info = StepInfo(
        removable_pole(pm, s.f),
        perfect_square(pm, rho_h, s.lam),
        perfect_square_root_hat(pm, f_h, rho_h),
        perfect_square_root_check(pm, s.f, s.lam),
    )
    return out, info


def evolve_backward(s: E7State, form: str = "d") -> E7State:
    """Retreat t -> t/q using the lambda map of the given form ('c' or 'd')."""
    pm = s.p.at(t=s.t / s.p.ctx.qh)
    if form == "d":
        lam_c = evol_lambda_back_d(pm, s.f, s.lam, s.rho)
    elif form == "c":
        lam_c = evol_lambda_back_c(pm, rho_to_g(s.rho, s.p.ctx), s.f)
    else:
        raise ValueError("form must be 'c' or 'd'")
    f_c = evol_f_backward(pm, s.f, s.rho, lam_c)
    pc = s.p.at(t=s.t / s.p.q)
    return E7State(pc, f_c, lam_c, glxfm_rho(pc, f_c, lam_c))


def seed_guard(p: M3Params, rho_c=None) -> dict:
    """Consistency of the transcribed evolution maps on the n = 0 seed at midpoint t.

    The classical family keeps f = q^(-1/2) alpha t for any initial rho, so the
    forward f map must reproduce it (this fixes the sign choices), the rho map
    must agree with the Riccati form, and the backward lambda map with its
    seed relation.
    """
    p0 = p.at(n=0)
    pc = p0.at(t=p0.t / p0.ctx.qh)
    if rho_c is None:
        rho_c = -(1 + p0.sigma[4]) / p0.s4
    s = E7State.seed(pc, rho_c)
    nxt, info = evolve_forward(s)
    back_d = evol_lambda_back_d(p0, nxt.f, nxt.lam, nxt.rho)
    back_c = evol_lambda_back_c(p0, rho_to_g(nxt.rho, p0.ctx), nxt.f)
    return {
        "f": abs(nxt.f - seed_f(nxt.p)) / abs(nxt.f),
        "riccati": abs(nxt.rho - riccati_rhs(p0, rho_c)) / abs(nxt.rho),
        "lambda_d": seed_lambda_residual(p0, back_d, nxt.rho),
        "lambda_c": seed_lambda_residual(p0, back_c, nxt.rho),
        "square": info.square_residual,
    }
