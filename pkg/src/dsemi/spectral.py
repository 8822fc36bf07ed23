"""Spectral structure of a D-semi-classical orthogonal polynomial system.

All polynomial data are ascending coefficient lists in x. Values such as
W + Dy V are evaluated at a lattice point given by its z coordinate, with
y+- = x(z q^(+-1/2)) and Dy = y+ - y-.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .errors import WnZero, ZeroDenominator
from .lattice import QQuadPoint, basis_d, basis_dd_coeff, basis_e, joukowski_inverse
from .opsys import OPS, ismail_expand
from .polyx import fit_on_circle, padd, peval, pmul, pscale, psub
from .qseries import QContext


def lattice_dy2(ctx: QContext) -> list:
    """Dy^2 = (q^(1/2) - q^(-1/2))^2 (x^2 - 1) as a polynomial."""
    c = (ctx.qh - 1 / ctx.qh) ** 2
    return [-c, mpc(0), c]


def mean_x(ctx: QContext) -> list:
    """M_x x = (q^(1/2) + q^(-1/2)) x / 2."""
    return [mpc(0), (ctx.qh + 1 / ctx.qh) / 2]


def sample_points(ctx: QContext, count: int, seed: int, rmin=None, rmax=None) -> list:
    """Deterministic z samples with both shifted points well off the unit circle."""
    rng = random.Random(seed)
    s = float(abs(ctx.qh))
    rmin = rmin if rmin is not None else 1.4 / s
    rmax = rmax if rmax is not None else 2.2 / s
    out = []
    for _ in range(count):
        r = mpf(rng.uniform(rmin, rmax))
        th = mpf(rng.uniform(0.05, 3.09))
        out.append(r * mp.expj(th))
    return out


def circle_samples(count: int, seed: int) -> list:
    """Deterministic z samples on the unit circle, away from z = +-1."""
    rng = random.Random(seed)
    return [mp.expj(mpf(rng.uniform(0.02, 3.12)) * (1 if rng.random() < 0.5 else -1)) for _ in range(count)]


@dataclass
class SpectralData:
    """Pearson data W, V (and the Stieltjes inhomogeneity U) with the products W +- Dy V.

    ``plus(z)`` and ``minus(z)`` must return W + Dy V and W - Dy V at the point z.
    """

    ctx: QContext
    W: list
    V: list
    plus: Callable
    minus: Callable
    U: list | None = None

    @property
    def M(self) -> int:
        return len(self.W) - 1

    @classmethod
    def from_products(cls, ctx: QContext, plus: Callable, minus: Callable, M: int, U=None) -> "SpectralData":
        """Recover W and V by fitting (plus + minus)/2 and (plus - minus)/(2 Dy)."""

        def wfun(x):
            p = QQuadPoint.from_x(x, ctx)
            return (plus(p.z) + minus(p.z)) / 2

        def vfun(x):
            p = QQuadPoint.from_x(x, ctx)
            return (plus(p.z) - minus(p.z)) / (2 * p.dy)

        return cls(ctx, fit_on_circle(wfun, M), fit_on_circle(vfun, M - 1), plus, minus, U)

    def W_at(self, x) -> mpc:
        return peval(self.W, x)

    def V_at(self, x) -> mpc:
        return peval(self.V, x)

    def product_poly(self) -> list:
        """W^2 - Dy^2 V^2 as a polynomial of degree 2M."""
        return psub(pmul(self.W, self.W), pmul(lattice_dy2(self.ctx), pmul(self.V, self.V)))

    def spectral_zeros(self) -> list:
        c = self.product_poly()
        while len(c) > 1 and abs(c[-1]) == 0:
            c.pop()
        return mp.polyroots(list(reversed(c)), maxsteps=200, extraprec=2 * mp.dps)

    def decomposition_residual(self, z) -> mpf:
        """|W - (plus+minus)/2| + |Dy V - (plus-minus)/2| at z."""
        p = QQuadPoint(z, self.ctx)
        wp, wm = self.plus(p.z), self.minus(p.z)
        return abs(self.W_at(p.x) - (wp + wm) / 2) + abs(p.dy * self.V_at(p.x) - (wp - wm) / 2)


def pearson_residual(weight: Callable, sd: SpectralData, z) -> mpc:
    """w(y+)/w(y-) - (W + Dy V)/(W - Dy V) with w given as a function of z."""
    p = QQuadPoint(z, sd.ctx)
    wm = weight(p.zm)
    den = sd.minus(p.z)
    if wm == 0 or den == 0:
        raise ZeroDenominator("w(y-) or W - Dy V vanishes")
    return weight(p.zp) / wm - sd.plus(p.z) / den


def stieltjes_pearson(sd: SpectralData, f: Callable, x) -> mpc:
    """W D_x f - 2 V M_x f at x for a Stieltjes function f of x."""
    p = QQuadPoint.from_x(x, sd.ctx)
    fp, fm = f(p.yp), f(p.ym)
    return sd.W_at(p.x) * (fp - fm) / p.dy - sd.V_at(p.x) * (fp + fm)


def recover_U(sd: SpectralData, f: Callable) -> list:
    """Certify that W D f - 2 V M f is a polynomial of degree M - 2 and return it."""
    return fit_on_circle(lambda x: stieltjes_pearson(sd, f, x), max(sd.M - 2, 0))


@dataclass
class SpectralCoeffs:
    """W_n, Theta_n, Omega_n (and Theta_(n-1)) together with a_n and b_n."""

    n: int
    Wn: list
    Theta: list
    Omega: list
    Theta_prev: list
    an: mpc
    bn: mpc
    sd: SpectralData = field(repr=False)

    def frak(self, z) -> tuple:
        """(frakW+, frakW-, frakT+, frakT-) at z."""
        p = QQuadPoint(z, self.sd.ctx)
        x = p.x
        two_w = 2 * peval(self.Wn, x) - self.sd.W_at(x)
        ov = peval(self.Omega, x) + self.sd.V_at(x)
        return (
            two_w + p.dy * ov,
            two_w - p.dy * ov,
            p.dy * self.an * peval(self.Theta, x),
            p.dy * self.an * peval(self.Theta_prev, x),
        )

    def matrix_star(self, z) -> mp.matrix:
        wp, wm, tp, tm = self.frak(z)
        return mp.matrix([[wp, -tp], [tm, wm]])

    def matrix(self, x) -> mp.matrix:
        """Spectral matrix A_n at x."""
        wn = peval(self.Wn, x)
        if wn == 0:
            raise WnZero("W_n vanishes at x")
        om = peval(self.Omega, x)
        v = self.sd.V_at(x)
        return mp.matrix(
            [
                [om / wn, -self.an * peval(self.Theta, x) / wn],
                [self.an * peval(self.Theta_prev, x) / wn, -(om + 2 * v) / wn],
            ]
        )


def _pq_at(ops: OPS, n: int, x) -> tuple:
    """(p_n, p_(n-1), q_n, q_(n-1)) at x."""
    p = ops.p(x)
    q = ops.q(x)
    pn1 = p[n - 1] if n >= 1 else mpc(0)
    return p[n], pn1, q[n + 1], q[n]


def bilinear_values(ops: OPS, sd: SpectralData, n: int, x) -> tuple:
    """(2W_n - W, Theta_n, Omega_n + V) at x from the polynomial/associated-function bilinears."""
    pt = QQuadPoint.from_x(x, sd.ctx)
    wp, wm = sd.plus(pt.z), sd.minus(pt.z)
    pnp, pn1p, qnp, qn1p = _pq_at(ops, n, pt.yp)
    pnm, pn1m, qnm, qn1m = _pq_at(ops, n, pt.ym)
    an = ops.a(n)
    two_w = an / 2 * (wp * (pnp * qn1m - pn1p * qnm) + wm * (pnm * qn1p - pn1m * qnp))
    theta = (wp * pnp * qnm - wm * pnm * qnp) / pt.dy
    ov = an / (2 * pt.dy) * (wp * (pnp * qn1m + pn1p * qnm) - wm * (pnm * qn1p + pn1m * qnp))
    return two_w, theta, ov


class SpectralSystem:
    """Spectral coefficients of an OPS for n = 0..n_max recovered by polynomial fitting.

    Hankel determinants lose roughly four digits per unit of n, so the
    polynomiality certificate uses ``fit_tol`` (default 10^(25-P)) rather than
    the near-working-precision default of the fitter.
    """

    def __init__(self, ops: OPS, sd: SpectralData, fit_tol=None):
        self.ops = ops
        self.sd = sd
        self.ctx = sd.ctx
        self.fit_tol = fit_tol if fit_tol is not None else self.ctx.tol(25)
        self._raw = {}
        self._coeffs = {}

    def _fit(self, n: int):
        if n in self._raw:
            return self._raw[n]
        M = self.sd.M
        cache = {}

        def vals(x):
            key = (mp.nstr(mp.re(x), 40), mp.nstr(mp.im(x), 40))
            if key not in cache:
                cache[key] = bilinear_values(self.ops, self.sd, n, x)
            return cache[key]

        two_w = fit_on_circle(lambda x: vals(x)[0], M, rel_tol=self.fit_tol)
        theta = fit_on_circle(lambda x: vals(x)[1], max(M - 2, 0), rel_tol=self.fit_tol)
        ov = fit_on_circle(lambda x: vals(x)[2], M - 1, rel_tol=self.fit_tol)
        wn = pscale(padd(two_w, self.sd.W), mpf(1) / 2)
        omega = psub(ov, self.sd.V)
        self._raw[n] = (wn, theta, omega)
        return self._raw[n]

    def coeffs(self, n: int) -> SpectralCoeffs:
        if n not in self._coeffs:
            wn, theta, omega = self._fit(n)
            prev = self._fit(n - 1)[1] if n >= 1 else [mpc(0)]
            self._coeffs[n] = SpectralCoeffs(n, wn, theta, omega, prev, self.ops.a(n), self.ops.b(n), self.sd)
        return self._coeffs[n]


def initial_value_residuals(sys: SpectralSystem) -> dict:
    """Residuals of W_0 = W, Theta_0 = -gamma_0^2 U, Omega_0 = 0, Omega_1 = -2V - gamma_0^2(M x - b_0)U."""
    sd = sys.sd
    c0 = sys.coeffs(0)
    g2 = sys.ops.state.gamma2[0]
    U = sd.U
    out = {
        "W0": _pmax(psub(c0.Wn, sd.W)),
        "Omega0": _pmax(c0.Omega),
    }
    if U is not None:
        out["Theta0"] = _pmax(padd(c0.Theta, pscale(U, g2)))
        if sys.ops.n_max >= 1:
            c1 = sys.coeffs(1)
            mx = psub(mean_x(sys.ctx), [sys.ops.b(0)])
            target = psub(pscale(sd.V, -2), pscale(pmul(mx, U), g2))
            out["Omega1"] = _pmax(psub(c1.Omega, target))
    return out


def _pmax(c: Sequence) -> mpf:
    return max(abs(v) for v in c)


def cayley_checks(c: SpectralCoeffs, z) -> dict:
    """Determinant, inverse and product forms of 1 +- Dy A_n / 2 at z."""
    sd = c.sd
    p = QQuadPoint(z, sd.ctx)
    x = p.x
    A = c.matrix(x)
    one = mp.eye(2)
    wn = peval(c.Wn, x)
    wp, wm = sd.plus(p.z), sd.minus(p.z)
    plus = one + p.dy / 2 * A
    minus = one - p.dy / 2 * A
    res = {
        "det_plus": abs(mp.det(plus) - wm / wn),
        "det_minus": abs(mp.det(minus) - wp / wn),
    }
    om = peval(c.Omega, x)
    v = sd.V_at(x)
    th = peval(c.Theta, x)
    thp = peval(c.Theta_prev, x)
    for sgn, mat, den in ((1, plus, wm), (-1, minus, wp)):
        inv = mp.matrix(
            [
                [wn - sgn * p.dy / 2 * (om + 2 * v), sgn * p.dy / 2 * c.an * th],
                [-sgn * p.dy / 2 * c.an * thp, wn + sgn * p.dy / 2 * om],
            ]
        ) / den
        res["inverse_%s" % ("plus" if sgn == 1 else "minus")] = mp.mnorm(inv * mat - one, 1)
    prod = mp.inverse(minus) * plus
    res["product_star"] = mp.mnorm(prod - c.matrix_star(p.z) / wp, 1)
    return res


def cayley_tensor_form(ops: OPS, c: SpectralCoeffs, z) -> mpf:
    """Rank-one tensor form of (1 - Dy A/2)^-1 (1 + Dy A/2) against the matrix form."""
    sd = c.sd
    p = QQuadPoint(z, sd.ctx)
    n = c.n
    pnp, pn1p, qnp, qn1p = _pq_at(ops, n, p.yp)
    pnm, pn1m, qnm, qn1m = _pq_at(ops, n, p.ym)
    an = c.an
    ratio = sd.minus(p.z) / sd.plus(p.z)
    t = an * mp.matrix([[pnp * qn1m, -pnp * qnm], [pn1p * qn1m, -pn1p * qnm]])
    t -= an * ratio * mp.matrix([[qnp * pn1m, -qnp * pnm], [qn1p * pn1m, -qn1p * pnm]])
    A = c.matrix(p.x)
    one = mp.eye(2)
    prod = mp.inverse(one - p.dy / 2 * A) * (one + p.dy / 2 * A)
    return mp.mnorm(prod - t, 1)


def bilinear_residual(c: SpectralCoeffs, z) -> dict:
    """W_n(W_n - W) = Dy^2 [Omega_n(Omega_n + 2V) - a_n^2 Theta_(n-1) Theta_n]/4 and det A* = W^2 - Dy^2 V^2."""
    sd = c.sd
    p = QQuadPoint(z, sd.ctx)
    x = p.x
    wn = peval(c.Wn, x)
    om = peval(c.Omega, x)
    v = sd.V_at(x)
    lhs = wn * (wn - sd.W_at(x))
    rhs = p.dy**2 / 4 * (om * (om + 2 * v) - c.an**2 * peval(c.Theta_prev, x) * peval(c.Theta, x))
    wp, wm, tp, tm = c.frak(p.z)
    return {
        "bilinear": abs(lhs - rhs),
        "det_star": abs(wp * wm + tp * tm - sd.plus(p.z) * sd.minus(p.z)),
    }


def verify_structure(ops: OPS, c: SpectralCoeffs, zs: Sequence) -> dict:
    """Maximum residuals of the four first-order divided-difference relations."""
    sd = c.sd
    n = c.n
    out = {"DDO_a": mpf(0), "DDO_b": mpf(0), "DDO_c": mpf(0), "DDO_d": mpf(0)}
    for z in zs:
        pt = QQuadPoint(z, sd.ctx)
        x = pt.x
        pnp, pn1p, qnp, qn1p = _pq_at(ops, n, pt.yp)
        pnm, pn1m, qnm, qn1m = _pq_at(ops, n, pt.ym)
        wn = peval(c.Wn, x)
        om = peval(c.Omega, x)
        v = sd.V_at(x)
        th = peval(c.Theta, x)
        thp = peval(c.Theta_prev, x)
        an = c.an
        D = lambda u, w: (u - w) / pt.dy  # noqa: E731
        Mm = lambda u, w: (u + w) / 2  # noqa: E731
        ra = wn * D(pnp, pnm) - om * Mm(pnp, pnm) + an * th * Mm(pn1p, pn1m)
        rb = wn * D(pn1p, pn1m) + (om + 2 * v) * Mm(pn1p, pn1m) - an * thp * Mm(pnp, pnm)
        rc = wn * D(qnp, qnm) - (om + 2 * v) * Mm(qnp, qnm) + an * th * Mm(qn1p, qn1m)
        rd = wn * D(qn1p, qn1m) + om * Mm(qn1p, qn1m) - an * thp * Mm(qnp, qnm)
        scale_p = max(abs(pnp), abs(pnm), mpf(1))
        scale_q = max(abs(qnp), abs(qnm), mpf(10) ** (-mp.dps // 2))
        out["DDO_a"] = max(out["DDO_a"], abs(ra) / scale_p)
        out["DDO_b"] = max(out["DDO_b"], abs(rb) / scale_p)
        out["DDO_c"] = max(out["DDO_c"], abs(rc) / scale_q)
        out["DDO_d"] = max(out["DDO_d"], abs(rd) / scale_q)
    return out


def second_order_residual(ops: OPS, c: SpectralCoeffs, z) -> mpf:
    """Nodal second-order equation for p_n at z, relative to the size of its terms."""
    sd = c.sd
    ctx = sd.ctx
    n = c.n
    pt = QQuadPoint(z, ctx)
    up = QQuadPoint(pt.zp, ctx)
    um = QQuadPoint(pt.zm, ctx)

    def parts(q: QQuadPoint):
        x = q.x
        wp, wm = sd.plus(q.z), sd.minus(q.z)
        th = peval(c.Theta, x) * q.dy
        two_w = 2 * peval(c.Wn, x) - sd.W_at(x)
        ov = q.dy * (peval(c.Omega, x) + sd.V_at(x))
        return wp / th, wm / th, (two_w + ov) / th, (two_w - ov) / th

    pp = parts(up)
    pm = parts(um)
    pn = lambda zz: ops.p((zz + 1 / zz) / 2)[n]  # noqa: E731
    f0 = pn(pt.z)
    t1 = pp[0] * pn(pt.z * ctx.q)
    t2 = pm[1] * pn(pt.z / ctx.q)
    t3 = -(pp[2] + pm[3]) * f0
    return abs(t1 + t2 + t3) / max(abs(t1), abs(t2), abs(t3))


def laguerre_freud_check(sys: SpectralSystem, n: int, zs: Sequence) -> dict:
    """Residuals of the recurrences in n for the spectral coefficients and their matrix components."""
    ctx = sys.ctx
    sd = sys.sd
    c0 = sys.coeffs(n)
    c1 = sys.coeffs(n + 1)
    ops = sys.ops
    an, an1, bn = ops.a(n), ops.a(n + 1), ops.b(n)
    dy2 = lattice_dy2(ctx)
    mx = mean_x(ctx)
    out = {}
    # (a) and (b) coefficient-wise
    ra = psub(c1.Wn, padd(c0.Wn, pscale(pmul(dy2, c0.Theta), mpf(1) / 4)))
    rb = psub(padd(padd(c1.Omega, c0.Omega), pscale(sd.V, 2)), pmul(psub(mx, [bn]), c0.Theta))
    out["recur_a"] = _pmax(ra)
    out["recur_a_leading"] = abs(ra[-1]) if len(ra) > sd.M else mpf(0)
    out["recur_b"] = _pmax(rb)
    rc = mpf(0)
    ak = {"AK_a": mpf(0), "AK_b": mpf(0), "AK_c": mpf(0), "AK_d": mpf(0)}
    for z in zs:
        pt = QQuadPoint(z, ctx)
        x = pt.x
        w0, w1 = peval(c0.Wn, x), peval(c1.Wn, x)
        o0, o1 = peval(c0.Omega, x), peval(c1.Omega, x)
        th1 = peval(c1.Theta, x)
        thm = peval(c0.Theta_prev, x)
        lhs = (w0 * o1 - w1 * o0) * (peval(mx, x) - bn)
        rhs = -pt.dy**2 / 4 * o1 * o0 + w0 * w1 + an1**2 * w0 * th1 - an**2 * w1 * thm
        rc = max(rc, abs(lhs - rhs) / max(abs(lhs), abs(rhs), mpf(1)))
        wp0, wm0, tp0, tm0 = c0.frak(z)
        wp1, wm1, tp1, tm1 = c1.frak(z)
        yp, ym = pt.yp, pt.ym
        a_lhs = an * an1 * tp1
        a_rhs = -an * (yp - bn) * wp0 + an * (ym - bn) * wm0 + (yp - bn) * (ym - bn) * tp0 + an**2 * tm0
        sc = max(abs(a_lhs), mpf(1))
        ak["AK_a"] = max(ak["AK_a"], abs(a_lhs - a_rhs) / sc)
        ak["AK_b"] = max(ak["AK_b"], abs(an * tm1 - an1 * tp0) / sc)
        ak["AK_c"] = max(ak["AK_c"], abs(an * wp1 - an * wm0 - (yp - bn) * tp0) / sc)
        ak["AK_d"] = max(ak["AK_d"], abs(an * wm1 - an * wp0 + (ym - bn) * tp0) / sc)
    out["recur_c"] = rc
    out.update(ak)
    return out


def spectral_zero_factorisation(sys: SpectralSystem, n: int) -> dict:
    """At the zeros x_j of W^2 - Dy^2 V^2: the vanishing determinant and the factorised T_+(n+1)."""
    ctx = sys.ctx
    c0 = sys.coeffs(n)
    c1 = sys.coeffs(n + 1)
    ops = sys.ops
    an, an1, bn = ops.a(n), ops.a(n + 1), ops.b(n)
    det_res = mpf(0)
    fac_res = mpf(0)
    for xj in sys.sd.spectral_zeros():
        z = joukowski_inverse(xj)
        if abs(abs(z) - 1) < mpf("1e-8"):
            z = z * (1 + mpf(10) ** (-mp.dps // 2))
        pt = QQuadPoint(z, ctx)
        wp0, wm0, tp0, tm0 = c0.frak(z)
        wp1, wm1, tp1, tm1 = c1.frak(z)
        scale = max(abs(wp1 * wm1), mpf(1))
        det_res = max(det_res, abs(wp1 * wm1 + an1 / an * tp1 * tp0) / scale)
        lhs = -an * an1 * tp1 * tp0
        rhs = (an * wm0 + (pt.yp - bn) * tp0) * (an * wp0 - (pt.ym - bn) * tp0)
        fac_res = max(fac_res, abs(lhs - rhs) / max(abs(lhs), mpf(1)))
    return {"det_zero": det_res, "factorised": fac_res}


def recurrence_compat(ops: OPS, sys: SpectralSystem, n: int, z) -> mpf:
    """K_n(y+) C(A_n) - C(A_(n+1)) K_n(y-) with C the Cayley transform."""
    from .opsys import kmatrix

    ctx = sys.ctx
    pt = QQuadPoint(z, ctx)
    one = mp.eye(2)

    def cay(c):
        A = c.matrix(pt.x)
        return mp.inverse(one - pt.dy / 2 * A) * (one + pt.dy / 2 * A)

    lhs = kmatrix(ops, n, pt.yp) * cay(sys.coeffs(n))
    rhs = cay(sys.coeffs(n + 1)) * kmatrix(ops, n, pt.ym)
    return mp.mnorm(lhs - rhs, 1) / max(mp.mnorm(lhs, 1), mpf(1))


def theta_leading_check(c: SpectralCoeffs, radius=mpf(10) ** 6) -> mpf:
    """Relative gap between Theta_n and its leading large-x form at a far point."""
    sd = c.sd
    z = radius * mp.expj(mpf("0.3"))
    pt = QQuadPoint(z, sd.ctx)
    n = c.n
    wp, wm = sd.plus(pt.z), sd.minus(pt.z)
    r = pt.yp / pt.ym
    lead = wp * r**n / (pt.ym * pt.dy) - wm * r ** (-n) / (pt.yp * pt.dy)
    th = peval(c.Theta, pt.x)
    return abs(th - lead) / abs(th)


def kappa_delta(sd: SpectralData, a, ctx: QContext) -> tuple:
    """Basis coefficients of E+(W + Dy V) +- E-(W - Dy V) in phi_k(x; a)."""

    def s(x):
        p = QQuadPoint.from_x(x, ctx)
        return sd.plus(p.zp) + sd.minus(p.zm)

    def d(x):
        p = QQuadPoint.from_x(x, ctx)
        return (sd.plus(p.zp) - sd.minus(p.zm)) / p.dy

    N = sd.M
    kappa = [v / 2 for v in ismail_expand(fit_on_circle(s, N), a, ctx)]
    delta = ismail_expand(fit_on_circle(d, N - 1), a, ctx)
    return kappa, delta


def moment_recurrence(k: int, kappa: Sequence, delta: Sequence, m_shift, b, ctx: QContext) -> mpc:
    """Residual of the linear homogeneous moment recurrence at index k.

    ``m_shift(k, l)`` returns m_{k,l}(b', a) with b' = q^(1/2) b; for k = 0 only
    the first sum enters.
    """
    qh = ctx.qh
    bp = qh * b
    BA = -(qh + 1 / qh) / 2
    c = lambda r: basis_dd_coeff(r, b, ctx)  # noqa: E731
    first = basis_d(k, b, ctx) * c(k + 1)
    if k >= 1:
        first += BA * basis_d(k - 1, bp, ctx) * c(k)
    total = first * mp.fsum(delta[l] * m_shift(k, l) for l in range(len(delta)))
    if k >= 1:
        e = basis_e(k, b, ctx) + BA * basis_e(k - 1, bp, ctx)
        total += c(k) * mp.fsum((kappa[l] + e * (delta[l] if l < len(delta) else 0)) * m_shift(k - 1, l) for l in range(len(kappa)))
    return total
