"""Quadratic lattices, divided differences and the canonical q-quadratic basis.

Internally points are carried by their z coordinate with x = (z + 1/z)/2, so
the shifts y_+ and y_- are exact multiplications z -> q^(+-1/2) z.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .errors import Degenerate, FixedPointSingular, NonConvergent, PoleCollision
from .qseries import INF, QContext, hp, qbinomial, qpoch


class LatticeKind(str, Enum):
    LINEAR = "linear"
    Q_LINEAR = "q-linear"
    QUADRATIC = "quadratic"
    Q_QUADRATIC_REAL = "q-quadratic-real"
    Q_QUADRATIC_UNIT = "q-quadratic-unit"


@dataclass(frozen=True)
class LatticeConic:
    """Conic A y^2 + 2B xy + C x^2 + 2D y + 2E x + F = 0 linking x to y = E^(+-) x."""

    A: mpc
    B: mpc
    C: mpc
    D: mpc
    E: mpc
    F: mpc

    def __post_init__(self):
        for name in "ABCDEF":
            object.__setattr__(self, name, hp(getattr(self, name)) if isinstance(getattr(self, name), str) else mpc(getattr(self, name)))

    @classmethod
    def canonical(cls, ctx: QContext) -> "LatticeConic":
        """Symmetric q-quadratic conic with cos(eta) = (q^(1/2) + q^(-1/2))/2."""
        c = (ctx.qh + 1 / ctx.qh) / 2
        return cls(1, -c, 1, 0, 0, c * c - 1)

    @property
    def symmetric(self) -> bool:
        return self.A == self.C and self.D == self.E

    def value(self, x, y) -> mpc:
        return (
            self.A * y * y + 2 * self.B * x * y + self.C * x * x
            + 2 * self.D * y + 2 * self.E * x + self.F
        )

    def iota(self, x) -> tuple:
        """Both solutions y of the conic for given x."""
        a = self.A
        b = self.B * x + self.D
        c = self.C * x * x + 2 * self.E * x + self.F
        disc = mp.sqrt(b * b - a * c)
        return ((-b + disc) / a, (-b - disc) / a)


@dataclass(frozen=True)
class LatticeClass:
    discriminant: mpc
    theta: mpc
    kind: LatticeKind
    fixed_points: tuple
    degenerate: bool = False


def _sign(v, scale) -> int:
    v = mp.re(v)
    if abs(v) <= mpf(10) ** (10 - mp.dps) * max(1, scale):
        return 0
    return 1 if v > 0 else -1


def classify(conic: LatticeConic) -> LatticeClass:
    """Classify the lattice by sign(B^2 - AC) and sign of the conic determinant."""
    A, B, C, D, E, F = conic.A, conic.B, conic.C, conic.D, conic.E, conic.F
    if A * C == 0:
        raise Degenerate("A*C = 0")
    # fix the overall sign of the conic so that A > 0
    s = 1 if mp.re(A) > 0 else -1
    A, B, C, D, E, F = (s * v for v in (A, B, C, D, E, F))
    disc = B * B - A * C
    theta = mp.det(mp.matrix([[A, B, D], [B, C, E], [D, E, F]]))
    scale = max(abs(v) for v in (A, B, C, D, E, F)) ** 3
    sd, st = _sign(disc, scale), _sign(theta, scale)
    table = {
        (0, 0): LatticeKind.LINEAR,
        (1, 0): LatticeKind.Q_LINEAR,
        (0, -1): LatticeKind.QUADRATIC,
        (1, -1): LatticeKind.Q_QUADRATIC_REAL,
        (-1, -1): LatticeKind.Q_QUADRATIC_UNIT,
    }
    if (sd, st) not in table:
        raise Degenerate("conic with sign pattern %s is not a lattice of quadratic type" % ((sd, st),))
    kind = table[(sd, st)]
    a2, a1, a0 = disc, 2 * (B * D - A * E), D * D - A * F
    if _sign(a2, scale) == 0:
        fixed = () if a1 == 0 else (-a0 / a1,)
    else:
        r = mp.sqrt(a1 * a1 - 4 * a2 * a0)
        fixed = ((-a1 + r) / (2 * a2), (-a1 - r) / (2 * a2))
    # q = -1 boundary: symmetric conic with B = 0
    degenerate = kind is LatticeKind.Q_QUADRATIC_UNIT and _sign(B, scale ** (1 / 3)) == 0
    return LatticeClass(disc, theta, kind, fixed, degenerate)


class QQuadPoint:
    """A point x = (z + 1/z)/2 of the canonical q-quadratic lattice with its shifts."""

    __slots__ = ("z", "x", "yp", "ym", "dy", "zp", "zm")

    def __init__(self, z, ctx: QContext):
        z = mpc(z)
        if z == 0:
            raise PoleCollision("z = 0 is not a lattice point")
        qh = ctx.qh
        self.z = z
        self.x = (z + 1 / z) / 2
        self.zp = qh * z
        self.zm = z / qh
        self.yp = (self.zp + 1 / self.zp) / 2
        self.ym = (self.zm + 1 / self.zm) / 2
        self.dy = (qh - 1 / qh) * (z - 1 / z) / 2

    @classmethod
    def from_x(cls, x, ctx: QContext) -> "QQuadPoint":
        return cls(joukowski_inverse(x), ctx)

    def __repr__(self):
        return "QQuadPoint(z=%s)" % mp.nstr(self.z, 12)


def joukowski_inverse(x) -> mpc:
    """Root z of z^2 - 2xz + 1 = 0 with |z| >= 1 (ties broken by Im z >= 0)."""
    x = mpc(x)
    r = mp.sqrt(x * x - 1)
    z1, z2 = x + r, x - r
    d = abs(z1) - abs(z2)
    if abs(d) <= mpf(10) ** (5 - mp.dps):
        return z1 if mp.im(z1) >= 0 else z2
    return z1 if d > 0 else z2


def _as_point(p, ctx: QContext) -> QQuadPoint:
    return p if isinstance(p, QQuadPoint) else QQuadPoint(p, ctx)


def dd_apply(f: Callable, p, ctx: QContext, limit: bool = True) -> mpc:
    """Divided difference (f(y+) - f(y-))/dy of a function of x."""
    p = _as_point(p, ctx)
    if abs(p.dy) >= mpf(10) ** (-mp.dps / 2):
        return (f(p.yp) - f(p.ym)) / p.dy
    if not limit:
        raise FixedPointSingular("dy vanishes at x = %s" % mp.nstr(p.x, 8))
    return _dd_fixed_point(f, p, ctx)


def _dd_fixed_point(f: Callable, p: QQuadPoint, ctx: QContext) -> mpc:
    """Removable limit at x = +-1: displace z along the circle and extrapolate in h^2."""
    digits = mp.dps
    with mp.workdps(digits + digits // 2 + 10):
        h = mpf(10) ** (-(digits // 3))
        vals = []
        for step in (h, h / 2):
            q = QQuadPoint(p.z * mp.expj(step), ctx)
            vals.append((f(q.yp) - f(q.ym)) / q.dy)
        out = (4 * vals[1] - vals[0]) / 3
    return +out


def mean_apply(f: Callable, p, ctx: QContext) -> mpc:
    p = _as_point(p, ctx)
    return (f(p.yp) + f(p.ym)) / 2


def basis_phi(r, p, a, ctx: QContext) -> mpc:
    """phi_r(x; a) = (az, a/z; q)_r; r may be a non-negative integer, infinity or a complex order."""
    z = p.z if isinstance(p, QQuadPoint) else mpc(p)
    a = mpc(a)
    if r == INF:
        return qpoch(a * z, ctx) * qpoch(a / z, ctx)
    if isinstance(r, int) or (hasattr(r, "imag") and r.imag == 0 and float(mp.re(r)).is_integer() and mp.re(r) >= 0):
        n = int(mp.re(r)) if not isinstance(r, int) else r
        if n < 0:
            raise ValueError("negative integer order")
        return qpoch(a * z, ctx, n) * qpoch(a / z, ctx, n)
    s = ctx.q**r
    return qpoch(a * z, ctx) * qpoch(a / z, ctx) / (qpoch(a * s * z, ctx) * qpoch(a * s / z, ctx))


def basis_phi_list(nmax: int, z, a, ctx: QContext) -> list:
    """[phi_0, ..., phi_nmax](x; a) evaluated incrementally."""
    z = mpc(z)
    out = [mpc(1)]
    az, aoz = a * z, a / z
    cur = mpc(1)
    qk = mpc(1)
    for _ in range(nmax):
        cur *= (1 - az * qk) * (1 - aoz * qk)
        qk *= ctx.q
        out.append(cur)
    return out


def basis_leading(r: int, a, ctx: QContext) -> mpc:
    """Leading x-coefficient g_r = (-2a)^r q^(r(r-1)/2) of phi_r(x; a)."""
    return (-2 * a) ** r * ctx.q ** (r * (r - 1) // 2)


def basis_d(r: int, a, ctx: QContext) -> mpc:
    """d_r(a) in x phi_r = d_r phi_(r+1) + e_r phi_r."""
    return -1 / (2 * a * ctx.q**r)


def basis_e(r: int, a, ctx: QContext) -> mpc:
    q = ctx.q
    return (a * q**r + 1 / (a * q**r)) / 2


def basis_dd_coeff(r: int, a, ctx: QContext) -> mpc:
    """c_r with D phi_r(x; a) = c_r phi_(r-1)(x; q^(1/2) a)."""
    q = ctx.q
    return -2 * a * (q**r - 1) / (q - 1)


def change_base_coeffs(n: int, b, a, ctx: QContext) -> list:
    """Coefficients c_k with phi_n(x; b) = sum_k c_k phi_k(x; a)."""
    q = ctx.q
    a, b = mpc(a), mpc(b)
    out = []
    for k in range(n + 1):
        c = qbinomial(n, k, ctx) * qpoch(a * b * q**k, ctx, n - k) * qpoch(b / a, ctx, n - k) * (b / a) ** k
        out.append(c)
    return out


def linearize(k: int, l: int, a, ctx: QContext) -> dict:
    """Coefficients {m: c_m} with phi_k phi_l = sum_m c_m phi_m (all with base a).

    The q-trinomial sum carries the weight q^(j(j-1)/2), j = k + l - m.
    """
    q = ctx.q
    a = mpc(a)
    out = {}
    for m in range(max(k, l), k + l + 1):
        j = k + l - m
        c = (-1) ** (k + l + m) * q ** (-k * l + j * (j - 1) // 2)
        c *= qpoch(a * a * q**m, ctx, k + l - m) * qpoch(q, ctx, l) * qpoch(q, ctx, k)
        c /= qpoch(q, ctx, k + l - m) * qpoch(q, ctx, m - k) * qpoch(q, ctx, m - l)
        out[m] = c
    return out


class ContourRule:
    """Trapezoid rule on the unit circle folded onto the upper semicircle.

    For integrands of the form density(z) with density symmetric under
    z -> 1/z and analytic on an annulus, the rule converges geometrically.
    """

    def __init__(self, nodes: int = 4096):
        if nodes % 4:
            raise ValueError("node count must be a multiple of 4")
        self.nodes = nodes
        self.z = []
        self.x = []
        self.sin = []
        for k in range(1, nodes // 2):
            th = 2 * mp.pi * k / nodes
            z = mp.expj(th)
            self.z.append(z)
            self.x.append(mpc(mp.cos(th)))
            self.sin.append(mp.sin(th))

    def integrate(self, values: Sequence, certify: bool = True, tol_digits: int = 12) -> mpc:
        """Integral over theta in (0, pi) of the folded density values (interior nodes).

        Endpoint values are omitted: the densities used here vanish at z = +-1.
        """
        n = self.nodes
        full = 2 * mp.pi / n * mp.fsum(values)
        if certify:
            half = 2 * mp.pi / (n // 2) * mp.fsum(values[1::2])
            scale = max(abs(full), mpf(10) ** (-mp.dps))
            if abs(full - half) > mpf(10) ** (tol_digits - mp.dps) * max(1, scale):
                raise NonConvergent("node doubling changed the integral by %s" % mp.nstr(abs(full - half), 5))
        return full


@lru_cache(maxsize=8)
def contour_rule(nodes: int, dps: int) -> ContourRule:
    return ContourRule(nodes)


def dd_integral(f: Callable, ctx: QContext, nodes: int = 4096, certify: bool = True) -> mpc:
    """Integral of f over x in (-1, 1), the normalization used for all moments.

    f is a function of z on the upper unit semicircle; f(z) * sin(theta) must
    extend to a z -> 1/z symmetric analytic density (as for weights carrying
    a 1/sin(theta) factor). Other integrands should go through
    :func:`smooth_integral`.
    """
    rule = contour_rule(nodes, mp.dps)
    vals = [f(z) * s for z, s in zip(rule.z, rule.sin)]
    return rule.integrate(vals, certify=certify)


def smooth_integral(f: Callable, nodes: int = 256) -> mpc:
    """Clenshaw-Curtis integral of a smooth function of x over (-1, 1)."""
    n = nodes
    th = [mp.pi * k / n for k in range(n + 1)]
    vals = [f(mp.cos(t)) for t in th]
    total = mpc(0)
    for j in range(0, n + 1, 2):
        # cosine coefficient a_j of f(cos theta)
        s = mp.fsum(
            (mpf(1) / 2 if k in (0, n) else 1) * v * mp.cos(j * th[k]) for k, v in enumerate(vals)
        )
        aj = 2 * s / n
        if j in (0, n):
            aj /= 2
        total += aj * 2 / (1 - j * j)
    return total


def lattice_telescope(f: Callable, a, steps: int, ctx: QContext) -> tuple:
    """Sum of dy * Df over x_s = (a q^s + 1/(a q^s))/2, s = 0..steps-1, and its boundary value.

    Returns (sum, f(E+ x_(steps-1)) - f(E- x_0)).
    """
    a = mpc(a)
    total = []
    for s in range(steps):
        p = QQuadPoint(a * ctx.q**s, ctx)
        total.append(p.dy * dd_apply(f, p, ctx))
    first = QQuadPoint(a, ctx)
    last = QQuadPoint(a * ctx.q ** (steps - 1), ctx)
    return mp.fsum(total), f(last.yp) - f(first.ym)


def cauchy_expand(x, y, a, ctx: QContext, terms: int = 60) -> tuple:
    """Partial sum of the basis expansion of 1/(y - x) and a tail estimate.

    1/(y-x) = phi_inf(x;a)/((y-x) phi_inf(y;a)) - 2a sum_n q^n phi_n(x;a)/phi_(n+1)(y;a).
    x and y are points (QQuadPoint or z values).
    """
    px, py = _as_point(x, ctx), _as_point(y, ctx)
    if abs(py.x - px.x) == 0:
        raise PoleCollision("y = x")
    a = mpc(a)
    q = ctx.q
    first = basis_phi(INF, px, a, ctx) / ((py.x - px.x) * basis_phi(INF, py, a, ctx))
    phix = basis_phi_list(terms, px.z, a, ctx)
    phiy = basis_phi_list(terms + 1, py.z, a, ctx)
    parts = [-2 * a * q**n * phix[n] / phiy[n + 1] for n in range(terms)]
    last = abs(parts[-1]) if parts else mpf(0)
    tail = last * abs(q) / (1 - abs(q))
    return first + mp.fsum(parts), tail
