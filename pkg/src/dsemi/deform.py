"""Deformation structure of a D-semi-classical weight depending on a parameter t.

The deformation variable u = (t + 1/t)/2 lives on the same symmetric
q-quadratic lattice as the spectral variable, so v+- = u(t q^(+-1/2)) and
Dv = v+ - v-. Deformation data R +- Dv S are evaluated through the spectral
point z, exactly as W +- Dy V are.

Polynomials are ascending coefficient lists in x. An OPS at v+ and at v-
(``ops_p`` and ``ops_m``) supplies p_n and the associated functions q_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .errors import Degenerate, RnZero, ZeroDenominator
from .lattice import QQuadPoint
from .opsys import OPS, kmatrix
from .polyx import fit_on_circle, padd, peval, pmul, pscale, psub, trim
from .qseries import QContext
from .spectral import SpectralCoeffs, SpectralData, _pmax


class DeformLattice:
    """The deformation lattice at t: v+- = u(t q^(+-1/2)) and Dv = v+ - v-."""

    def __init__(self, t, ctx: QContext):
        self.ctx = ctx
        self.t = mpc(t)
        qh = ctx.qh
        self.tp = self.t * qh
        self.tm = self.t / qh
        self.u = (self.t + 1 / self.t) / 2
        self.vp = (self.tp + 1 / self.tp) / 2
        self.vm = (self.tm + 1 / self.tm) / 2
        self.dv = self.vp - self.vm
        if self.dv == 0:
            raise Degenerate("t = +-1 makes the deformation lattice collapse")

    def __repr__(self):
        return "DeformLattice(t=%s)" % mp.nstr(self.t, 12)


@dataclass
class DeformationData:
    """R, S and T with the evaluators ``plus(z)`` = R + Dv S and ``minus(z)`` = R - Dv S."""

    lat: DeformLattice
    R: list
    S: list
    plus: Callable
    minus: Callable
    T: list | None = None

    @property
    def L(self) -> int:
        return max(len(trim(self.R)), len(trim(self.S))) - 1

    @classmethod
    def from_products(cls, lat: DeformLattice, plus: Callable, minus: Callable, L: int, T=None) -> "DeformationData":
        ctx = lat.ctx

        def rfun(x):
            p = QQuadPoint.from_x(x, ctx)
            return (plus(p.z) + minus(p.z)) / 2

        def sfun(x):
            p = QQuadPoint.from_x(x, ctx)
            return (plus(p.z) - minus(p.z)) / (2 * lat.dv)

        return cls(lat, fit_on_circle(rfun, L), fit_on_circle(sfun, L), plus, minus, T)

    def R_at(self, x) -> mpc:
        return peval(self.R, x)

    def S_at(self, x) -> mpc:
        return peval(self.S, x)

    def rpm_x(self, x) -> tuple:
        """(R + Dv S, R - Dv S) at x from the polynomial form."""
        r, s = self.R_at(x), self.S_at(x)
        return r + self.lat.dv * s, r - self.lat.dv * s

    def product_poly(self) -> list:
        dv2 = self.lat.dv**2
        return psub(pmul(self.R, self.R), pscale(pmul(self.S, self.S), dv2))

    def with_T(self, T: Sequence) -> "DeformationData":
        return DeformationData(self.lat, self.R, self.S, self.plus, self.minus, list(T))


def deform_pearson_residual(weight_p: Callable, weight_m: Callable, dd: DeformationData, z) -> mpc:
    """w(x; v+)/w(x; v-) - (R + Dv S)/(R - Dv S) at the point z."""
    wm = weight_m(z)
    den = dd.minus(z)
    if wm == 0 or den == 0:
        raise ZeroDenominator("w(x; v-) or R - Dv S vanishes")
    return weight_p(z) / wm - dd.plus(z) / den


def stieltjes_deform(dd: DeformationData, f_p: Callable, f_m: Callable, x) -> mpc:
    """((R - Dv S) f(x; v+) - (R + Dv S) f(x; v-))/Dv, which must be the polynomial T."""
    rp, rm = dd.rpm_x(x)
    return (rm * f_p(x) - rp * f_m(x)) / dd.lat.dv


def recover_T(dd: DeformationData, f_p: Callable, f_m: Callable) -> list:
    """Certify that the deformed Stieltjes relation has a polynomial inhomogeneity of degree L - 1."""
    return fit_on_circle(lambda x: stieltjes_deform(dd, f_p, f_m, x), max(dd.L - 1, 0))


def weight_compat_residual(sd_p: SpectralData, sd_m: SpectralData, dd: DeformationData, z) -> mpf:
    """Relative residual of the cross-ratio form of the spectral/deformation weight compatibility."""
    p = QQuadPoint(z, dd.lat.ctx)
    lhs = sd_p.plus(p.z) / sd_p.minus(p.z) * dd.plus(p.zm) / dd.minus(p.zm)
    rhs = sd_m.plus(p.z) / sd_m.minus(p.z) * dd.plus(p.zp) / dd.minus(p.zp)
    return abs(lhs - rhs) / max(abs(lhs), mpf(1))


def twist(sd_p: SpectralData, sd_m: SpectralData, dd: DeformationData, z) -> tuple:
    """chi(z) from the W + Dy V ratio and from the W - Dy V ratio."""
    p = QQuadPoint(z, dd.lat.ctx)
    first = sd_p.plus(p.z) / sd_m.plus(p.z) * dd.plus(p.zm) / dd.plus(p.zp)
    second = sd_p.minus(p.z) / sd_m.minus(p.z) * dd.minus(p.zm) / dd.minus(p.zp)
    return first, second


def ut_consistency_residual(sd_p: SpectralData, sd_m: SpectralData, dd: DeformationData, z) -> mpf:
    """Relative residual of the identity linking U(x; v+-) and T."""
    ctx = dd.lat.ctx
    p = QQuadPoint(z, ctx)
    x = p.x
    Up, Um = peval(sd_p.U, x), peval(sd_m.U, x)
    T = dd.T
    wpp, wmp = sd_p.plus(p.z), sd_p.minus(p.z)
    wpm = sd_m.plus(p.z)
    rp_m, rm_m = dd.plus(p.zm), dd.minus(p.zm)
    rm_p = dd.minus(p.zp)
    lhs = p.dy * (wpp / wpm * rp_m * Um - rm_m * Up)
    rhs = dd.lat.dv * (wpp * peval(T, p.ym) - wmp * rm_m / rm_p * peval(T, p.yp))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), mpf(1))


@dataclass
class DeformationCoeffs:
    """R_n, Gamma_n, Xi_n, Phi_n, Psi_n and the scalars they are built from."""

    n: int
    Rn: list
    Gamma: list
    Xi: list
    Phi: list
    Psi: list
    Hn: mpc
    ap: mpc
    am: mpc
    bp: mpc
    bm: mpc
    dd: DeformationData = field(repr=False)

    def values(self, x) -> tuple:
        return tuple(peval(c, x) for c in (self.Rn, self.Gamma, self.Xi, self.Phi, self.Psi))

    def matrix(self, x) -> mp.matrix:
        """B_n at x."""
        r, g, xi, ph, ps = self.values(x)
        if r == 0:
            raise RnZero("R_n vanishes at x")
        return mp.matrix([[g, ph], [ps, xi]]) / r

    def frak(self, x) -> tuple:
        """(frakR+, frakR-, frakP+, frakP-) at x."""
        r, g, xi, ph, ps = self.values(x)
        rp, rm = self.dd.rpm_x(x)
        dv = self.dd.lat.dv
        return (
            2 * r + 2 * self.Hn * rm / self.ap + dv * g,
            2 * r + 2 * self.Hn * rp / self.am - dv * g,
            -dv * ph,
            dv * ps,
        )

    def matrix_star(self, x) -> mp.matrix:
        Rp, Rm, Pp, Pm = self.frak(x)
        return mp.matrix([[Rp, -Pp], [Pm, Rm]])

    def cayley(self, x) -> mp.matrix:
        """(1 - Dv B_n/2)^-1 (1 + Dv B_n/2) at x."""
        one = mp.eye(2)
        B = self.matrix(x)
        dv = self.dd.lat.dv
        return mp.inverse(one - dv / 2 * B) * (one + dv / 2 * B)


def _pq(ops: OPS, n: int, x) -> tuple:
    p = ops.p(x)
    q = ops.q(x)
    return p[n], (p[n - 1] if n >= 1 else mpc(0)), q[n + 1], q[n]


def deform_bilinears(ops_p: OPS, ops_m: OPS, dd: DeformationData, n: int, Hn, x) -> tuple:
    """(R_n, Gamma_n, Xi_n, Phi_n, Psi_n) at x from products of p and q at v+ and v-."""
    dv = dd.lat.dv
    rp, rm = dd.rpm_x(x)
    pnP, pn1P, qnP, qn1P = _pq(ops_p, n, x)
    pnM, pn1M, qnM, qn1M = _pq(ops_m, n, x)
    ap, am = ops_p.a(n), ops_m.a(n)
    Rn = Hn / 2 * (rp * (-1 / am + pn1P * qnM - pnP * qn1M) + rm * (-1 / ap + pn1M * qnP - pnM * qn1P))
    G = Hn / dv * (rp * (1 / am - pn1P * qnM - pnP * qn1M) + rm * (-1 / ap + pn1M * qnP + pnM * qn1P))
    Xi = Hn / dv * (rp * (1 / am + pn1P * qnM + pnP * qn1M) + rm * (-1 / ap - pn1M * qnP - pnM * qn1P))
    Phi = 2 * Hn / dv * (rp * pnP * qnM - rm * pnM * qnP)
    Psi = 2 * Hn / dv * (-rp * pn1P * qn1M + rm * pn1M * qn1P)
    return Rn, G, Xi, Phi, Psi


class DeformSystem:
    """Deformation coefficients for n = 0..n_max recovered by polynomial fitting.

    ``H`` maps n to the decoupling factor H_n; the usual choice is a_n(u)/2
    with a_0 the conventional value used by the OPS.
    """

    def __init__(self, ops_p: OPS, ops_m: OPS, dd: DeformationData, H: Callable, fit_tol=None):
        self.ops_p = ops_p
        self.ops_m = ops_m
        self.dd = dd
        self.H = H
        self.ctx = dd.lat.ctx
        self.fit_tol = fit_tol if fit_tol is not None else self.ctx.tol(25)
        self._coeffs = {}
        self._check_weight_condition()

    def _check_weight_condition(self) -> None:
        """gamma_0(v+)(R - Dv S) + gamma_0(v-)(R + Dv S) must not vanish identically."""
        dd = self.dd
        ds = pscale(dd.S, dd.lat.dv)
        g0p, g0m = self.ops_p.state.gamma[0], self.ops_m.state.gamma[0]
        comb = padd(pscale(psub(dd.R, ds), g0p), pscale(padd(dd.R, ds), g0m))
        scale = max([abs(c) for c in dd.R + ds] + [mpf(1)]) * max(abs(g0p), abs(g0m))
        if all(abs(c) <= self.ctx.tol(10) * scale for c in comb):
            raise Degenerate("gamma_0(v+)(R - Dv S) + gamma_0(v-)(R + Dv S) vanishes identically")

    def coeffs(self, n: int) -> DeformationCoeffs:
        if n in self._coeffs:
            return self._coeffs[n]
        L = self.dd.L
        Hn = self.H(n)
        cache = {}

        def vals(x):
            key = (mp.nstr(mp.re(x), 40), mp.nstr(mp.im(x), 40))
            if key not in cache:
                cache[key] = deform_bilinears(self.ops_p, self.ops_m, self.dd, n, Hn, x)
            return cache[key]

        degs = (L, L, L, max(L - 1, 0), max(L - 1, 0))
        polys = [fit_on_circle(lambda x, i=i: vals(x)[i], degs[i], rel_tol=self.fit_tol) for i in range(5)]
        c = DeformationCoeffs(
            n, *polys, Hn, self.ops_p.a(n), self.ops_m.a(n), self.ops_p.b(n), self.ops_m.b(n), self.dd
        )
        self._coeffs[n] = c
        return c

    def gammas(self, n: int) -> tuple:
        """(gamma_n(v+), gamma_n(v-))."""
        return self.ops_p.state.gamma[n], self.ops_m.state.gamma[n]


def _rel(a, b) -> mpf:
    return abs(a - b) / max(abs(a), abs(b), mpf(1))


def linear_identity(sys: DeformSystem, n: int, a_u: Callable) -> mpf:
    """Psi_n + (a_n/a_(n-1)) Phi_(n-1) coefficient-wise, n >= 1; a_u gives a_n(u)."""
    c, cm = sys.coeffs(n), sys.coeffs(n - 1)
    return _pmax(padd(c.Psi, pscale(cm.Phi, a_u(n) / a_u(n - 1))))


def trace_identity(c: DeformationCoeffs, x) -> mpf:
    r, g, xi, ph, ps = c.values(x)
    rp, rm = c.dd.rpm_x(x)
    lhs = c.dd.lat.dv * (g + xi)
    rhs = 2 * c.Hn * (rp / c.am - rm / c.ap)
    return _rel(lhs, rhs)


def bilinear_identity(c: DeformationCoeffs, x) -> mpf:
    r, g, xi, ph, ps = c.values(x)
    rp, rm = c.dd.rpm_x(x)
    lhs = r**2 + c.dd.lat.dv**2 / 4 * (g * xi - ph * ps)
    rhs = -c.Hn * r * (rp / c.am + rm / c.ap)
    return _rel(lhs, rhs)


def star_determinant(c: DeformationCoeffs, x) -> mpf:
    """det B*_n against 4 H_n^2 (R^2 - Dv^2 S^2)/(a_n(v+) a_n(v-))."""
    Rp, Rm, Pp, Pm = c.frak(x)
    rp, rm = c.dd.rpm_x(x)
    lhs = Rp * Rm + Pp * Pm
    rhs = 4 * c.Hn**2 / (c.ap * c.am) * rp * rm
    return _rel(lhs, rhs)


def initial_values(sys: DeformSystem, xs: Sequence) -> dict:
    """Residuals of the n = 0 values of R_0, Gamma_0, Xi_0, Phi_0, Psi_0 and of the n = 0 B*_0 entries."""
    c = sys.coeffs(0)
    dd = sys.dd
    dv = dd.lat.dv
    H0 = c.Hn
    gp, gm = sys.gammas(0)
    a0p, a0m = sys.ops_p.state.a0, sys.ops_m.state.a0
    out = {k: mpf(0) for k in ("R0", "Gamma0", "Xi0", "Phi0", "Psi0", "frakR+0", "frakR-0", "frakP+0", "frakP-0")}
    T0 = peval(dd.T, 0) if dd.T is not None else None
    for x in xs:
        r, g, xi, ph, ps = c.values(x)
        rp, rm = dd.rpm_x(x)
        sp = rp / (a0m * gm) + rm / (a0p * gp)
        sm = rp / (a0m * gm) - rm / (a0p * gp)
        out["R0"] = max(out["R0"], _rel(r, -H0 / 2 * (gm + gp) * sp))
        out["Gamma0"] = max(out["Gamma0"], _rel(g, H0 / dv * (gm - gp) * sp))
        out["Xi0"] = max(out["Xi0"], _rel(xi, H0 / dv * (gm + gp) * sm))
        out["Psi0"] = max(out["Psi0"], abs(ps))
        if T0 is not None:
            out["Phi0"] = max(out["Phi0"], _rel(ph, -2 * H0 * gm * gp * peval(dd.T, x)))
        Rp, Rm, Pp, Pm = c.frak(x)
        out["frakR+0"] = max(out["frakR+0"], _rel(Rp, -2 * H0 / a0m * gp / gm * rp))
        out["frakR-0"] = max(out["frakR-0"], _rel(Rm, -2 * H0 / a0p * gm / gp * rm))
        if T0 is not None:
            out["frakP+0"] = max(out["frakP+0"], _rel(Pp, 2 * dv * H0 * gp * gm * peval(dd.T, x)))
        out["frakP-0"] = max(out["frakP-0"], abs(Pm))
    return out


def leading_orders(sys: DeformSystem, n: int) -> dict:
    """Leading x-coefficients of R_n, Phi_n, Gamma_n, Xi_n against their large-x forms in gamma_n(v+-)."""
    c = sys.coeffs(n)
    dd = sys.dd
    L = dd.L
    dv = dd.lat.dv
    R = dd.R + [mpc(0)] * (L + 1 - len(dd.R))
    S = dd.S + [mpc(0)] * (L + 1 - len(dd.S))
    lp, lm = R[L] + dv * S[L], R[L] - dv * S[L]
    gp, gm = sys.gammas(n)
    if n >= 1:
        gp1, gm1 = sys.ops_p.state.gamma[n - 1], sys.ops_m.state.gamma[n - 1]
    else:
        gp1, gm1 = sys.ops_p.state.a0 * gp, sys.ops_m.state.a0 * gm
    H = c.Hn
    coef = lambda p, k: p[k] if k < len(p) else mpc(0)  # noqa: E731
    return {
        "Rn": _rel(2 / H * coef(c.Rn, L), -(gp + gm) * (lm / gp1 + lp / gm1)),
        "Phi": _rel(dv / (2 * H) * coef(c.Phi, L - 1), lp * gp / gm - lm * gm / gp),
        "Gamma": _rel(dv / H * coef(c.Gamma, L), (gm - gp) * (lp / gm1 + lm / gp1)),
        "Xi": _rel(dv / H * coef(c.Xi, L), (gm + gp) * (lp / gm1 - lm / gp1)),
    }


def cayley_checks(c: DeformationCoeffs, x, ops_p: OPS | None = None, ops_m: OPS | None = None) -> dict:
    """Determinant, inverse and product evaluations of 1 +- Dv B_n/2 at x."""
    dd = c.dd
    dv = dd.lat.dv
    rp, rm = dd.rpm_x(x)
    r, g, xi, ph, ps = c.values(x)
    B = c.matrix(x)
    one = mp.eye(2)
    plus = one + dv / 2 * B
    minus = one - dv / 2 * B
    res = {
        "det_plus": _rel(mp.det(plus), -2 * c.Hn * rm / (r * c.ap)),
        "det_minus": _rel(mp.det(minus), -2 * c.Hn * rp / (r * c.am)),
    }
    for sgn, mat, a, rr in ((1, plus, c.ap, rm), (-1, minus, c.am, rp)):
        inv = -a / (2 * c.Hn * rr) * mp.matrix(
            [[r + sgn * dv / 2 * xi, -sgn * dv / 2 * ph], [-sgn * dv / 2 * ps, r + sgn * dv / 2 * g]]
        )
        res["inverse_%s" % ("plus" if sgn == 1 else "minus")] = mp.mnorm(inv * mat - one, 1)
    prod = mp.inverse(minus) * plus
    res["product_star"] = mp.mnorm(prod + c.am / (2 * c.Hn * rp) * c.matrix_star(x), 1) / mp.mnorm(prod, 1)
    if ops_p is not None and ops_m is not None:
        n = c.n
        pnP, pn1P, qnP, qn1P = _pq(ops_p, n, x)
        pnM, pn1M, qnM, qn1M = _pq(ops_m, n, x)
        t = c.am * mp.matrix([[pnP * qn1M, -pnP * qnM], [pn1P * qn1M, -pn1P * qnM]])
        t -= c.am * rm / rp * mp.matrix([[qnP * pn1M, -qnP * pnM], [qn1P * pn1M, -qn1P * pnM]])
        res["product_tensor"] = mp.mnorm(prod - t, 1) / mp.mnorm(prod, 1)
    return res


def dd_equation_residual(c: DeformationCoeffs, ops_p: OPS, ops_m: OPS, weight_p: Callable, weight_m: Callable, z) -> mpf:
    """Relative residual of D_u Y_n = B_n M_u Y_n at the point z (both columns)."""
    ctx = c.dd.lat.ctx
    pt = QQuadPoint(z, ctx)
    x = pt.x
    n = c.n
    dv = c.dd.lat.dv

    def Y(ops, wv):
        pn, pn1, qn, qn1 = _pq(ops, n, x)
        return mp.matrix([[pn, qn / wv], [pn1, qn1 / wv]])

    Yp = Y(ops_p, weight_p(pt.z))
    Ym = Y(ops_m, weight_m(pt.z))
    lhs = (Yp - Ym) / dv
    rhs = c.matrix(x) * (Yp + Ym) / 2
    return mp.mnorm(lhs - rhs, 1) / max(mp.mnorm(lhs, 1), mp.mnorm(rhs, 1))


def recurrence_relations(sys: DeformSystem, n: int, xs: Sequence, H: Callable) -> dict:
    """Residuals of the two recurrences in n for R_n, Gamma_n, Phi_n at the sample points."""
    c0, c1 = sys.coeffs(n), sys.coeffs(n + 1)
    dd = sys.dd
    dv = dd.lat.dv
    op, om = sys.ops_p, sys.ops_m
    out = {"Defm_a": mpf(0), "Defm_b": mpf(0)}
    for x in xs:
        r0, g0, _, ph0, _ = c0.values(x)
        r1, g1, _, _, _ = c1.values(x)
        rp, rm = dd.rpm_x(x)
        tr = rp / om.a(n) - rm / op.a(n)
        Hn, Hn1 = H(n), H(n + 1)
        la = om.a(n + 1) / Hn1 * (-2 * r1 + dv * g1) + om.a(n) / Hn * (2 * r0 + dv * g0)
        ra = -(x - om.b(n)) * dv / Hn * ph0 + 2 * om.a(n) * tr
        lb = op.a(n + 1) / Hn1 * (2 * r1 + dv * g1) + op.a(n) / Hn * (-2 * r0 + dv * g0)
        rb = -(x - op.b(n)) * dv / Hn * ph0 + 2 * op.a(n) * tr
        out["Defm_a"] = max(out["Defm_a"], _rel(la, ra))
        out["Defm_b"] = max(out["Defm_b"], _rel(lb, rb))
    return out


def bk_components(sys: DeformSystem, n: int, xs: Sequence, H: Callable) -> dict:
    """Residuals of the four component relations giving B*_(n+1) from B*_n."""
    c0, c1 = sys.coeffs(n), sys.coeffs(n + 1)
    op, om = sys.ops_p, sys.ops_m
    ah, ac = op.a(n), om.a(n)
    ah1, ac1 = op.a(n + 1), om.a(n + 1)
    bh, bc = op.b(n), om.b(n)
    ratio = H(n) / H(n + 1)
    out = {k: mpf(0) for k in ("BK_a", "BK_b", "BK_c", "BK_d")}
    for x in xs:
        Rp0, Rm0, Pp0, Pm0 = c0.frak(x)
        Rp1, Rm1, Pp1, Pm1 = c1.frak(x)
        lhs_a = ratio * ah1 * ac1 * Pp1
        rhs_a = -ac * (x - bh) * Rp0 + ah * (x - bc) * Rm0 + (x - bh) * (x - bc) * Pp0 + ah * ac * Pm0
        out["BK_a"] = max(out["BK_a"], _rel(lhs_a, rhs_a))
        out["BK_b"] = max(out["BK_b"], _rel(ratio * Pm1, Pp0))
        out["BK_c"] = max(out["BK_c"], _rel(ratio * Rp1, ah / ah1 * Rm0 + (x - bh) / ah1 * Pp0))
        out["BK_d"] = max(out["BK_d"], _rel(ratio * Rm1, ac / ac1 * Rp0 - (x - bc) / ac1 * Pp0))
    return out


def brecur_residual(sys: DeformSystem, n: int, z) -> mpf:
    """K_n(v+) C(B_n) - C(B_(n+1)) K_n(v-) with C the Cayley transform in the deformation direction."""
    x = QQuadPoint(z, sys.ctx).x
    lhs = kmatrix(sys.ops_p, n, x) * sys.coeffs(n).cayley(x)
    rhs = sys.coeffs(n + 1).cayley(x) * kmatrix(sys.ops_m, n, x)
    return mp.mnorm(lhs - rhs, 1) / max(mp.mnorm(lhs, 1), mp.mnorm(rhs, 1))


def _spec_cayley(c: SpectralCoeffs, pt: QQuadPoint) -> mp.matrix:
    one = mp.eye(2)
    A = c.matrix(pt.x)
    return mp.inverse(one - pt.dy / 2 * A) * (one + pt.dy / 2 * A)


def schlesinger_residual(spec_p: SpectralCoeffs, spec_m: SpectralCoeffs, dc: DeformationCoeffs, z) -> mpf:
    """Entrywise relative residual of the Cayley-product form of the D-Schlesinger equation at z."""
    pt = QQuadPoint(z, dc.dd.lat.ctx)
    lhs = _spec_cayley(spec_p, pt) * dc.cayley(pt.ym)
    rhs = dc.cayley(pt.yp) * _spec_cayley(spec_m, pt)
    return mp.mnorm(lhs - rhs, 1) / max(mp.mnorm(lhs, 1), mp.mnorm(rhs, 1))


def sd_components(spec_p: SpectralCoeffs, spec_m: SpectralCoeffs, dc: DeformationCoeffs, z) -> dict:
    """Both sides (lhs, rhs) of the four scalar compatibility relations with the twist chi."""
    pt = QQuadPoint(z, dc.dd.lat.ctx)
    chi = twist(spec_p.sd, spec_m.sd, dc.dd, z)[0]
    Wp_m, Wm_m, Tp_m, Tm_m = spec_m.frak(z)
    Wp_p, Wm_p, Tp_p, Tm_p = spec_p.frak(z)
    Rp_u, Rm_u, Pp_u, Pm_u = dc.frak(pt.yp)
    Rp_d, Rm_d, Pp_d, Pm_d = dc.frak(pt.ym)
    return {
        "SD_a": (chi * (Wp_m * Rp_u - Tm_m * Pp_u), Wp_p * Rp_d - Tp_p * Pm_d),
        "SD_b": (chi * (Tp_m * Rp_u + Wm_m * Pp_u), Tp_p * Rm_d + Wp_p * Pp_d),
        "SD_c": (chi * (Tm_m * Rm_u + Wp_m * Pm_u), Tm_p * Rp_d + Wm_p * Pm_d),
        "SD_d": (chi * (Wm_m * Rm_u - Tp_m * Pm_u), Wm_p * Rm_d - Tm_p * Pp_d),
    }


def sd_matrix_components(spec_p: SpectralCoeffs, spec_m: SpectralCoeffs, dc: DeformationCoeffs, z) -> dict:
    """Entries of chi B*(y+) A*(v-) and A*(v+) B*(y-)."""
    pt = QQuadPoint(z, dc.dd.lat.ctx)
    chi = twist(spec_p.sd, spec_m.sd, dc.dd, z)[0]
    lhs = chi * dc.matrix_star(pt.yp) * spec_m.matrix_star(z)
    rhs = spec_p.matrix_star(z) * dc.matrix_star(pt.ym)
    return {"SD_%d%d" % (i + 1, j + 1): (lhs[i, j], rhs[i, j]) for i in range(2) for j in range(2)}
