"""The Askey-Wilson weight and its explicit orthogonal polynomial system."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

from .errors import DegenerateParameters, GenericityViolated, PoleAtBoundary
from .opsys import WeightSpec, sin_theta
from .qseries import QContext, elementary_symmetric, phi_series, qpoch, qpoch_inf_fast, qpoch_many, w8_7, w8_7_balanced


@dataclass(frozen=True)
class AWParams:
    a: tuple
    ctx: QContext
    sigma: tuple = field(init=False)

    def __post_init__(self):
        a = tuple(mpc(v) for v in self.a)
        if len(a) != 4:
            raise ValueError("four parameters expected")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "sigma", tuple(elementary_symmetric(a)))
        for v in a:
            if abs(v) >= 1:
                raise GenericityViolated("|a_j| must be < 1")
            if abs(abs(v / self.ctx.qh) - 1) < self.ctx.tol(10):
                raise GenericityViolated("|q^(-1/2) a_j| = 1")
        for u, v in itertools.combinations(a, 2):
            if abs(u * v) >= 1:
                raise GenericityViolated("|a_j a_k| must be < 1")

    @property
    def s4(self) -> mpc:
        return self.sigma[4]

    def pairs(self):
        return [u * v for u, v in itertools.combinations(self.a, 2)]


def aw_density(p: AWParams, z) -> mpc:
    """w(z) sin(theta) = (z^2, z^-2; q)_inf / prod (a_j z, a_j/z; q)_inf."""
    ctx = p.ctx
    num = qpoch_inf_fast(z * z, ctx) * qpoch_inf_fast(1 / (z * z), ctx)
    den = mpc(1)
    for a in p.a:
        den *= qpoch_inf_fast(a * z, ctx) * qpoch_inf_fast(a / z, ctx)
    return num / den


def aw_weight(p: AWParams, z) -> mpc:
    z = mpc(z)
    if abs(z * z - 1) < mpf(10) ** (-mp.dps / 2):
        raise PoleAtBoundary("z = +-1")
    return aw_density(p, z) / sin_theta(z)


def aw_weight_spec(p: AWParams, nodes: int = 4096) -> WeightSpec:
    return WeightSpec(lambda z: aw_density(p, z), {"a": p.a}, label="askey-wilson", nodes=nodes)


def aw_I2(p: AWParams) -> mpc:
    ctx = p.ctx
    return 2 * qpoch(p.s4, ctx) / (qpoch(ctx.q, ctx) * qpoch_many(p.pairs(), ctx))


def aw_I2_of(a, ctx: QContext) -> mpc:
    """I_2 at an arbitrary parameter tuple without genericity checks."""
    s4 = a[0] * a[1] * a[2] * a[3]
    pairs = [u * v for u, v in itertools.combinations(a, 2)]
    return 2 * qpoch(s4, ctx) / (qpoch(ctx.q, ctx) * qpoch_many(pairs, ctx))


def aw_integral_recurrence_residual(p: AWParams) -> mpc:
    """(s4 - 1) I2(q a1, ...) - (a1a2 - 1)(a1a3 - 1)(a1a4 - 1) I2(a1, ...)."""
    ctx = p.ctx
    a1, a2, a3, a4 = p.a
    lhs = (p.s4 - 1) * aw_I2_of((ctx.q * a1, a2, a3, a4), ctx)
    rhs = (a1 * a2 - 1) * (a1 * a3 - 1) * (a1 * a4 - 1) * aw_I2_of(p.a, ctx)
    return lhs - rhs


def aw_moments(p: AWParams, n: int, which: int = 0) -> mpc:
    """m_{0,n}(a_j) with the basis parameter a_j, j = ``which``."""
    ctx = p.ctx
    a = list(p.a)
    a1 = a.pop(which)
    prods = [a1 * v for v in a]
    return mp.pi * qpoch_many(prods, ctx, n) / qpoch(p.s4, ctx, n) * aw_I2(p)


def aw_moment_product_form(p: AWParams, n: int) -> mpc:
    ctx = p.ctx
    a1, a2, a3, a4 = p.a
    qn = ctx.q**n
    den = qpoch_many([qn * a1 * a2, qn * a1 * a3, qn * a1 * a4, a2 * a3, a2 * a4, a3 * a4, ctx.q], ctx)
    return 2 * mp.pi * qpoch(qn * p.s4, ctx) / den


def aw_spectral_data(p: AWParams, z):
    """(W + Dy V, W - Dy V) at z."""
    z = mpc(z)
    s = 1 / p.ctx.qh
    plus = z**-2
    minus = z**2
    for a in p.a:
        plus *= 1 - a * s * z
        minus *= 1 - a * s / z
    return plus, minus


def aw_W_poly(p: AWParams) -> list:
    q, qh = p.ctx.q, p.ctx.qh
    s = p.sigma
    return [-1 + s[2] / q - s[4] / q**2, -(s[1] / qh + s[3] / (q * qh)), 2 * (1 + s[4] / q**2)]


def aw_V_poly(p: AWParams) -> list:
    q, qh = p.ctx.q, p.ctx.qh
    s = p.sigma
    d = qh - 1 / qh
    return [(s[1] / qh - s[3] / (q * qh)) / d, 2 * (s[4] / q**2 - 1) / d]


def aw_U(p: AWParams) -> mpc:
    ctx = p.ctx
    q = ctx.q
    return 8 * mp.pi / (q - 1) * qpoch(p.s4 / q, ctx) / (qpoch(q, ctx) * qpoch_many(p.pairs(), ctx))


@dataclass
class AWSpectralClosed:
    Wn: list
    Omega_plus_V: list
    Theta: list
    a2: mpc
    b: mpc


def aw_spectral(p: AWParams, n: int) -> AWSpectralClosed:
    """Closed-form spectral coefficients and recurrence coefficients at index n."""
    ctx = p.ctx
    q, qh = ctx.q, ctx.qh
    s = p.sigma
    s1, s2, s3, s4 = s[1], s[2], s[3], s[4]
    d = qh - 1 / qh
    qn = q**n
    A = (1 + 1 / qn) * (1 + s4 * q ** (n - 2))
    Wn = [-A + 1 + s2 / q + s4 / q**2, -(s1 / qh + s3 / (q * qh)), A]
    num0 = (
        q ** (-n) / qh * s1
        + (-2 + q ** (-n)) * s3 / (q * qh)
        + (-2 + qn) * s1 * s4 / (q**2 * qh)
        + q**n * s3 * s4 / (q**3 * qh)
    )
    ov = [num0 / (d * (q ** (-n) - q ** (n - 2) * s4)), 2 * (q ** (n - 2) * s4 - q ** (-n)) / d]
    theta = [4 * (q**n / (q * qh) * s4 - q ** (-n) / qh) / d]
    if n >= 1:
        prod = mpc(1)
        for u in p.pairs():
            prod *= 1 - u * q ** (n - 1)
        a2 = (
            (1 - qn) * (1 - s4 * q ** (n - 2)) * prod
            / (4 * (1 - s4 * q ** (2 * n - 3)) * (1 - s4 * q ** (2 * n - 2)) ** 2 * (1 - s4 * q ** (2 * n - 1)))
        )
    else:
        a2 = mpc(0)
    b = (
        (s1 * (q + s4 * (q ** (2 * n) - qn - q ** (n - 1))) + s3 * (1 - qn - q ** (n + 1) + s4 * q ** (2 * n - 1)))
        * q ** (n - 1)
        / (2 * (1 - s4 * q ** (2 * n)) * (1 - s4 * q ** (2 * n - 2)))
    )
    return AWSpectralClosed(Wn, ov, theta, a2, b)


def aw_poly(p: AWParams, n: int, z) -> mpc:
    """Monic Askey-Wilson polynomial through the terminating balanced 4phi3."""
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)
    a1, a2, a3, a4 = p.a
    den = (2 * a1) ** n * qpoch(q ** (n - 1) * p.s4, ctx, n)
    if abs(den) == 0:
        raise DegenerateParameters("(q^(n-1) s4; q)_n = 0")
    pref = qpoch_many([a1 * a2, a1 * a3, a1 * a4], ctx, n) / den
    if n == 0:
        return mpc(1)
    return pref * phi_series([q ** (-n), p.s4 * q ** (n - 1), a1 * z, a1 / z], [a1 * a2, a1 * a3, a1 * a4], ctx, q)


def aw_poly_w87(p: AWParams, n: int, z) -> mpc:
    """The permutation-symmetric 8W7 form of the monic polynomial."""
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)
    if n == 0:
        return mpc(1)
    s4 = p.s4
    pref = (2 * z) ** (-n) * qpoch_many([a * z for a in p.a] + [s4 / q], ctx, n)
    pref /= qpoch(z * z, ctx, n) * qpoch(s4 / q, ctx, 2 * n)
    return pref * w8_7(q ** (-n) / z**2, q ** (-n), *[a / z for a in p.a], ctx, q ** (2 - n) / s4)


def aw_stieltjes(p: AWParams, z) -> mpc:
    """Stieltjes function through the 8W7 closed form, |z| > 1.

    The 8W7 has argument s4/q; outside |s4/q| < 1 it is continued by Bailey's
    transformation.
    """
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)
    pref = 4 * mp.pi * qpoch(p.s4 / q, ctx) / (qpoch(q, ctx) * qpoch_many(p.pairs(), ctx))
    den = z
    for a in p.a:
        den *= 1 - a / z
    return pref * (1 - q / z**2) / den * w8_7_balanced(q / z**2, *[q / (a * z) for a in p.a], q, ctx)


def aw_stieltjes_alt(p: AWParams, z) -> mpc:
    """Alternative two-term form; requires |q^2/s4| < 1 for its 8W7 series."""
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)
    a1, a2, a3, a4 = p.a
    s4 = p.s4
    pre = 4 * mp.pi * q * a1 / s4 / qpoch_many([q / (a2 * a3), q / (a2 * a4), q / (a3 * a4)], ctx)
    t1 = qpoch_many([q / (a2 * z), q / (a3 * z), q / (a4 * z), s4 / (q * a1 * z), q**2 * a1 * z / s4], ctx)
    t1 /= qpoch_many([a2 * a3, a2 * a4, a3 * a4, a1 / z, a2 / z, a3 / z, a4 / z, a1 * z], ctx)
    t2 = qpoch_many([s4 / q, q * a1 / a2, q * a1 / a3, q * a1 / a4, q**2 / s4], ctx)
    t2 /= qpoch_many([q, q * a1**2], ctx) * qpoch_many(p.pairs(), ctx) * (1 - a1 * z) * (1 - a1 / z)
    t2 *= w8_7(a1**2, a1 * z, a1 / z, a1 * a2, a1 * a3, a1 * a4, ctx, q**2 / s4)
    return pre * (-t1 + t2)


def aw_stieltjes_large_x(p: AWParams, z) -> mpc:
    """Two-term 4phi3 / 3phi2 form of the Stieltjes function.

    The first term is the basis-series part and the second the f_inf/phi_inf
    part; the latter enters with a positive sign.
    """
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)
    a1, a2, a3, a4 = p.a
    s4 = p.s4
    base = qpoch(q, ctx) * qpoch_many(p.pairs(), ctx)
    t1 = -4 * mp.pi * a1 * qpoch(s4, ctx) / (base * (1 - a1 * z) * (1 - a1 / z))
    t1 *= phi_series([q, a1 * a2, a1 * a3, a1 * a4], [q * a1 * z, q * a1 / z, s4], ctx, q)
    phinf = qpoch_inf_fast(a1 * z, ctx) * qpoch_inf_fast(a1 / z, ctx)
    t2 = 4 * mp.pi * qpoch_many([a2 * a3 * a4 / z, q / z**2], ctx)
    t2 /= z * qpoch_many([a2 * a3, a2 * a4, a3 * a4, a2 / z, a3 / z, a4 / z], ctx) * phinf
    t2 *= phi_series([a2 / z, a3 / z, a4 / z], [a2 * a3 * a4 / z, q / z**2], ctx, q)
    return t1 + t2


def aw_contiguous_residual(p: AWParams, z) -> mpc:
    """Residual of the three-8W7 contiguous relation equivalent to the inhomogeneous Pearson equation."""
    ctx = p.ctx
    q, qh = ctx.q, ctx.qh
    z = mpc(z)
    a1, a2, a3, a4 = p.a
    s4 = p.s4
    rest = (a1 * a2, a1 * a3, a1 * a4)
    lhs1 = z**2 / (1 - qh * a1 * z)
    lhs2 = z**-2 / (1 - qh * a1 / z)
    for a in (a2, a3, a4):
        lhs1 *= 1 - a / (qh * z)
        lhs2 *= 1 - a * z / qh
    lhs1 *= w8_7(a1**2, qh * a1 * z, a1 / (qh * z), *rest, ctx, q**2 / s4)
    lhs2 *= w8_7(a1**2, a1 * z / qh, qh * a1 / z, *rest, ctx, q**2 / s4)
    rhs = a2 * a3 * a4 / (q * qh) * (1 - q / s4) * (z - 1 / z)
    rhs *= w8_7(a1**2, qh * a1 * z, qh * a1 / z, *rest, ctx, q / s4)
    return lhs1 - lhs2 - rhs


def aw_second_order_residual(p: AWParams, n: int, z) -> mpc:
    """The second-order q-difference equation applied to the monic polynomial."""
    ctx = p.ctx
    q = ctx.q
    z = mpc(z)

    def P(zz):
        return aw_poly(p, n, zz)

    pn = P(z)
    c1 = mpc(1)
    c2 = mpc(1)
    for a in p.a:
        c1 *= 1 - a * z
        c2 *= z - a
    return c1 / (q * z**2 - 1) * (P(q * z) - pn) + c2 / (z**2 - q) * (P(z / q) - pn) + q ** (-n - 1) * (1 - q**n) * (q**n * p.s4 - q) * (z**2 - 1) * pn
