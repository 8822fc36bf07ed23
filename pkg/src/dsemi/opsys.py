"""Orthogonal polynomial systems built from the moments of a weight.

Moments are integrals over x in (-1, 1) computed by the folded trapezoid rule
on the unit circle. A weight is described by its density w(z) sin(theta),
which for the weights used here is analytic and symmetric under z -> 1/z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .errors import NonConvergent, PoleCollision, SingularHankel, ZeroWeight
from .lattice import (
    QQuadPoint,
    basis_d,
    basis_e,
    basis_leading,
    basis_phi,
    basis_phi_list,
    contour_rule,
)
from .polyx import dd_poly, peval, trim
from .qseries import INF, QContext, qpoch


def sin_theta(z) -> mpc:
    """sin(theta) continued off the circle as (z - 1/z)/(2i)."""
    return (z - 1 / z) / mpc(0, 2)


class WeightSpec:
    """A weight given through its symmetric density w(z) sin(theta).

    Node values of the density are computed once and cached; every moment and
    Stieltjes integral reuses them.
    """

    def __init__(self, density: Callable, params: dict, label: str = "weight", nodes: int = 4096):
        self.density = density
        self.params = dict(params)
        self.label = label
        self.nodes = nodes
        self._node_cache = None

    def evaluator(self, z) -> mpc:
        """w(x(z)), continued analytically in z."""
        z = mpc(z)
        s = sin_theta(z)
        if s == 0:
            raise ZeroWeight("sin(theta) vanishes at z = +-1")
        return self.density(z) / s

    __call__ = evaluator

    def node_data(self):
        """(rule, [2pi/N * density(z_k)]) on the upper semicircle, cached."""
        if self._node_cache is None or self._node_cache[0] != mp.dps:
            rule = contour_rule(self.nodes, mp.dps)
            h = 2 * mp.pi / self.nodes
            with mp.workdps(mp.dps + 10):
                vals = [h * self.density(z) for z in rule.z]
            self._node_cache = (mp.dps, rule, vals)
        return self._node_cache[1], self._node_cache[2]

    def integrate(self, g: Callable | None = None, certify: bool = True) -> mpc:
        """Integral of w(x) g(x) over (-1, 1); g is called with the node z."""
        rule, wv = self.node_data()
        with mp.workdps(mp.dps + 10):
            vals = wv if g is None else [w * g(z) for w, z in zip(wv, rule.z)]
            full = mp.fsum(vals)
            if certify:
                half = 2 * mp.fsum(vals[1::2])
                _certify(full, half)
        return +full


def _certify(full, half, digits: int = 12):
    scale = max(abs(full), mpf(1))
    if abs(full - half) > mpf(10) ** (digits - mp.dps) * scale:
        raise NonConvergent("node doubling changed the integral by %s" % mp.nstr(abs(full - half), 5))


@dataclass
class MomentTable:
    """m[j][k] = integral of w phi_j(x; b) phi_k(x; a)."""

    m: list
    a: mpc
    b: mpc
    max_j: int
    max_k: int

    def __getitem__(self, jk):
        j, k = jk
        return self.m[j][k]


def compute_moments(w: WeightSpec, a, b, max_j: int, max_k: int, ctx: QContext, certify: bool = True) -> MomentTable:
    """All moments m_{j,k}(b, a) with j <= max_j, k <= max_k by contour quadrature."""
    a, b = mpc(a), mpc(b)
    rule, wv = w.node_data()
    with mp.workdps(mp.dps + 10):
        acc = [[mpc(0)] * (max_k + 1) for _ in range(max_j + 1)]
        acc_odd = [[mpc(0)] * (max_k + 1) for _ in range(max_j + 1)]
        for idx, (z, wk) in enumerate(zip(rule.z, wv)):
            lb = basis_phi_list(max_j, z, b, ctx)
            la = basis_phi_list(max_k, z, a, ctx)
            odd = idx % 2 == 1
            for j in range(max_j + 1):
                wj = wk * lb[j]
                row, row_odd = acc[j], acc_odd[j]
                for k in range(max_k + 1):
                    v = wj * la[k]
                    row[k] += v
                    if odd:
                        row_odd[k] += v
        if certify:
            for j in range(max_j + 1):
                for k in range(max_k + 1):
                    _certify(acc[j][k], 2 * acc_odd[j][k])
    m = [[+v for v in row] for row in acc]
    return MomentTable(m, a, b, max_j, max_k)


def det_full_pivot(rows: Sequence[Sequence]) -> mpc:
    """Determinant by Gaussian elimination with full pivoting."""
    n = len(rows)
    if n == 0:
        return mpc(1)
    a = [list(map(mpc, r)) for r in rows]
    sign = 1
    det = mpc(1)
    for c in range(n):
        best, bi, bj = mpf(-1), c, c
        for i in range(c, n):
            for j in range(c, n):
                v = abs(a[i][j])
                if v > best:
                    best, bi, bj = v, i, j
        if best == 0:
            return mpc(0)
        if bi != c:
            a[c], a[bi] = a[bi], a[c]
            sign = -sign
        if bj != c:
            for r in a:
                r[c], r[bj] = r[bj], r[c]
            sign = -sign
        piv = a[c][c]
        det *= piv
        for i in range(c + 1, n):
            f = a[i][c] / piv
            if f != 0:
                ri, rc = a[i], a[c]
                for j in range(c + 1, n):
                    ri[j] -= f * rc[j]
    return sign * det


def hankel_delta(m: MomentTable, n: int) -> mpc:
    """Delta_n = det[m_{j,k}]_{j,k<n}, Delta_0 = 1."""
    return det_full_pivot([[m.m[j][k] for k in range(n)] for j in range(n)])


def hankel_sigma(m: MomentTable, n: int, j: int) -> mpc:
    """Sigma_{n,j}: rows 0..n-1, columns 0..n with column j removed; Sigma_{0,0} = 0."""
    if n == 0:
        return mpc(0)
    cols = [k for k in range(n + 1) if k != j]
    return det_full_pivot([[m.m[r][k] for k in cols] for r in range(n)])


@dataclass
class OPSState:
    """Recurrence data of the orthonormal system and its determinant caches."""

    ctx: QContext
    moments: MomentTable
    n_max: int
    delta: list
    sigma: list
    gamma2: list
    gamma: list
    gamma1: list
    a: list
    a2: list
    b: list
    a0: mpc

    @property
    def m00(self) -> mpc:
        return self.moments.m[0][0]


def ops_from_moments(m: MomentTable, n_max: int, ctx: QContext, a0=1) -> OPSState:
    """Recurrence coefficients for n <= n_max from the moment determinants."""
    if m.max_j < n_max or m.max_k < n_max + 1:
        raise ValueError("moment table too small for n_max=%d" % n_max)
    a, b = m.a, m.b
    delta = [hankel_delta(m, n) for n in range(n_max + 2)]
    for n in range(1, len(delta)):
        scale = max(abs(m.m[j][k]) for j in range(n) for k in range(n))
        if abs(delta[n]) < mpf(10) ** (-mp.dps / 2) * scale * abs(delta[n - 1]):
            raise SingularHankel("Delta_%d = %s" % (n, mp.nstr(delta[n], 5)))
    sigma = [hankel_sigma(m, n, n - 1) if n >= 1 else mpc(0) for n in range(n_max + 2)]
    gamma2 = [basis_leading(n, a, ctx) * basis_leading(n, b, ctx) * delta[n] / delta[n + 1] for n in range(n_max + 1)]
    gamma = [mp.sqrt(g) for g in gamma2]
    avals = [mpc(a0)] + [gamma[n - 1] / gamma[n] for n in range(1, n_max + 1)]
    a2 = [mpc(a0) ** 2] + [
        basis_d(n - 1, a, ctx) * basis_d(n - 1, b, ctx) * delta[n + 1] * delta[n - 1] / delta[n] ** 2
        for n in range(1, n_max + 1)
    ]
    bvals = []
    for n in range(n_max + 1):
        v = basis_e(n, a, ctx) + basis_d(n, a, ctx) * sigma[n + 1] / delta[n + 1]
        if n >= 1:
            v -= basis_d(n - 1, a, ctx) * sigma[n] / delta[n]
        bvals.append(v)
    gamma1 = [mpc(0)]
    for n in range(1, n_max + 1):
        gamma1.append(gamma[n] * (gamma1[n - 1] / gamma[n - 1] - bvals[n - 1]))
    return OPSState(ctx, m, n_max, delta, sigma, gamma2, gamma, gamma1, avals, a2, bvals, mpc(a0))


def poly_eval(state: OPSState, n: int, x) -> list:
    """[p_0(x), ..., p_n(x)] by the forward three-term recurrence."""
    x = mpc(x)
    out = [state.gamma[0]]
    prev = mpc(0)
    for k in range(n):
        nxt = ((x - state.b[k]) * out[k] - state.a[k] * prev) / state.a[k + 1]
        prev = out[k]
        out.append(nxt)
    return out[: n + 1]


def assoc_eval(state: OPSState, n: int, x) -> list:
    """[p^(1)_(-1), p^(1)_0, ..., p^(1)_(n-1)]: associated polynomials aligned with p_n."""
    x = mpc(x)
    out = [mpc(0), state.m00 * state.gamma[1]] if n >= 1 else [mpc(0)]
    for k in range(1, n):
        nxt = ((x - state.b[k]) * out[k] - state.a[k] * out[k - 1]) / state.a[k + 1]
        out.append(nxt)
    return out[: n + 1]


def afun_eval(state: OPSState, n: int, x, fx) -> list:
    """[q_(-1), q_0, ..., q_n] by the recurrence from q_(-1) = 1/(a_0 gamma_0), q_0 = gamma_0 f."""
    x = mpc(x)
    out = [1 / (state.a[0] * state.gamma[0]), state.gamma[0] * fx]
    for k in range(n):
        nxt = ((x - state.b[k]) * out[k + 1] - state.a[k] * out[k]) / state.a[k + 1]
        out.append(nxt)
    return out


def stieltjes(w: WeightSpec, x, ctx: QContext | None = None) -> mpc:
    """f(x) = integral of w(y)/(x - y) over (-1, 1), for x off the support."""
    x = mpc(x)
    rule, _ = w.node_data()
    dmin = min(abs(x - y) for y in rule.x[:: max(1, len(rule.x) // 64)])
    if dmin < mpf(10) ** (-mp.dps / 4):
        raise PoleCollision("x on the support contour")
    return w.integrate(lambda z: 1 / (x - (z + 1 / z) / 2))


class OPS:
    """An orthonormal system bound to its weight: evaluates p_n, q_n and f anywhere off the support.

    q_n is computed as the stable integral of w(y) p_n(y)/(x - y) unless a
    closed-form Stieltjes function is supplied, in which case the recurrence
    from q_0 = gamma_0 f is used.
    """

    def __init__(self, weight: WeightSpec, state: OPSState, stieltjes_fn: Callable | None = None):
        self.weight = weight
        self.state = state
        self.ctx = state.ctx
        self.stieltjes_fn = stieltjes_fn
        self._pnodes = None
        self._cache = {}

    @property
    def n_max(self) -> int:
        return self.state.n_max

    def a(self, n: int) -> mpc:
        return self.state.a[n]

    def b(self, n: int) -> mpc:
        return self.state.b[n]

    def p(self, x) -> list:
        """[p_0..p_nmax](x); index -1 handled by :meth:`pm`."""
        return poly_eval(self.state, self.n_max, x)

    def pm(self, n: int, x) -> mpc:
        if n < 0:
            return mpc(0)
        return self.p(x)[n]

    def _node_polys(self):
        if self._pnodes is None:
            rule, wv = self.weight.node_data()
            self._pnodes = [poly_eval(self.state, self.n_max, xx) for xx in rule.x]
        return self._pnodes

    def f(self, x) -> mpc:
        if self.stieltjes_fn is not None:
            return self.stieltjes_fn(x)
        return stieltjes(self.weight, x)

    def q(self, x) -> list:
        """[q_(-1), q_0, ..., q_nmax](x)."""
        x = mpc(x)
        key = ("q", x)
        if key in self._cache:
            return self._cache[key]
        if self.stieltjes_fn is not None:
            out = afun_eval(self.state, self.n_max, x, self.stieltjes_fn(x))
        else:
            rule, wv = self.weight.node_data()
            pn = self._node_polys()
            with mp.workdps(mp.dps + 10):
                acc = [mpc(0)] * (self.n_max + 1)
                acc_odd = [mpc(0)] * (self.n_max + 1)
                for idx, (xx, wk, pv) in enumerate(zip(rule.x, wv, pn)):
                    c = wk / (x - xx)
                    for k in range(self.n_max + 1):
                        v = c * pv[k]
                        acc[k] += v
                        if idx % 2:
                            acc_odd[k] += v
                for k in range(self.n_max + 1):
                    _certify(acc[k], 2 * acc_odd[k])
            out = [1 / (self.state.a[0] * self.state.gamma[0])] + [+v for v in acc]
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = out
        return out

    def qm(self, n: int, x) -> mpc:
        return self.q(x)[n + 1]


def christoffel_darboux(ops: OPS, n: int, x, y) -> tuple:
    """(pp, qp, qq) kernels from their closed forms, with the direct sums for comparison.

    Returns ((pp, qp, qq) closed, (pp, qp, qq) summed).
    """
    x, y = mpc(x), mpc(y)
    px, py = ops.p(x), ops.p(y)
    qx, qy = ops.q(x), ops.q(y)
    an = ops.a(n)

    def P(v, k):
        return v[k] if k >= 0 else mpc(0)

    def Q(v, k):
        return v[k + 1]

    d = x - y
    pp = an * (P(px, n) * P(py, n - 1) - P(px, n - 1) * P(py, n)) / d
    qp = an * (Q(qx, n) * P(py, n - 1) - Q(qx, n - 1) * P(py, n)) / d + 1 / d
    qq = an * (Q(qx, n) * Q(qy, n - 1) - Q(qx, n - 1) * Q(qy, n)) / d - (ops.f(x) - ops.f(y)) / d
    spp = mp.fsum(px[j] * py[j] for j in range(n))
    sqp = mp.fsum(Q(qx, j) * py[j] for j in range(n))
    sqq = mp.fsum(Q(qx, j) * Q(qy, j) for j in range(n))
    return (pp, qp, qq), (spp, sqp, sqq)


def ymatrix(ops: OPS, n: int, x, wx, fx=None) -> mp.matrix:
    """Y_n = [[p_n, q_n/w], [p_(n-1), q_(n-1)/w]]."""
    if wx == 0:
        raise ZeroWeight("w(x) = 0")
    x = mpc(x)
    p = [mpc(0)] + ops.p(x)
    q = afun_eval(ops.state, ops.n_max, x, fx) if fx is not None else ops.q(x)
    return mp.matrix([[p[n + 1], q[n + 1] / wx], [p[n], q[n] / wx]])


def kmatrix(ops: OPS, n: int, x) -> mp.matrix:
    an, an1, bn = ops.a(n), ops.a(n + 1), ops.b(n)
    return mp.matrix([[(x - bn) / an1, -an / an1], [mpc(1), mpc(0)]])


def poly_det_form(ops: OPS, n: int, x) -> mpc:
    """p_n from the bordered moment determinant with last row phi_k(x; a)."""
    st = ops.state
    m = st.moments
    z = QQuadPoint.from_x(x, ops.ctx).z
    last = basis_phi_list(n, z, m.a, ops.ctx)
    rows = [[m.m[j][k] for k in range(n + 1)] for j in range(n)] + [last]
    cnn = st.gamma[n] / basis_leading(n, m.a, ops.ctx)
    return cnn / st.delta[n] * det_full_pivot(rows)


def afun_det_form(ops: OPS, n: int, x) -> mpc:
    """q_n from the bordered determinant whose last row holds f_j(x; a)."""
    st = ops.state
    m = st.moments
    x = mpc(x)
    a = m.a
    fj = [ops.weight.integrate(lambda z, j=j: basis_phi(j, z, a, ops.ctx) / (x - (z + 1 / z) / 2)) for j in range(n + 1)]
    rows = [[m.m[j][k] for k in range(n + 1)] for j in range(n)] + [fj]
    cnn = st.gamma[n] / basis_leading(n, a, ops.ctx)
    return cnn / st.delta[n] * det_full_pivot(rows)


def stieltjes_basis_expansion(ops: OPS, x, terms: int = 80) -> tuple:
    """(f_inf(x)/phi_inf(x;a), remaining series) of the basis expansion of f.

    f = f_inf/phi_inf(x; a) - 2a sum_n q^n m_{0,n}(a)/phi_(n+1)(x; a); the moments
    m_{0,n}(a) are integrated directly up to ``terms``.
    """
    ctx = ops.ctx
    a = ops.state.moments.a
    x = mpc(x)
    z = QQuadPoint.from_x(x, ctx).z
    finf = ops.weight.integrate(lambda y: basis_phi(INF, y, a, ctx) / (x - (y + 1 / y) / 2))
    head = finf / basis_phi(INF, z, a, ctx)
    rule, wv = ops.weight.node_data()
    with mp.workdps(mp.dps + 10):
        mom = [mpc(0)] * terms
        for zz, wk in zip(rule.z, wv):
            lst = basis_phi_list(terms - 1, zz, a, ctx)
            for n in range(terms):
                mom[n] += wk * lst[n]
    phx = basis_phi_list(terms, z, a, ctx)
    series = mp.fsum(-2 * a * ctx.q**n * mom[n] / phx[n + 1] for n in range(terms))
    return head, series


def ismail_expand(p: Sequence, a, ctx: QContext) -> list:
    """Coefficients p_k of p(x) = sum_k p_k phi_k(x; a) from iterated divided differences."""
    p = trim([mpc(c) for c in p])
    n = len(p) - 1
    q = ctx.q
    a = mpc(a)
    out = []
    cur = list(p)
    for k in range(n + 1):
        xk = (ctx.qh**k * a + 1 / (ctx.qh**k * a)) / 2
        val = peval(cur, xk)
        coef = (q - 1) ** k / ((2 * a) ** k * qpoch(q, ctx, k)) * q ** (-mpf(k * (k - 1)) / 4) * val
        out.append(coef)
        cur = dd_poly(cur, ctx.qh) if len(cur) > 1 else [mpc(0)]
    return out
