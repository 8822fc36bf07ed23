"""Scalar arithmetic at working precision and the q-series kernel.

Every scalar is an ``mpmath`` number evaluated in the global ``mp`` context,
whose decimal precision is fixed once per run by :func:`set_precision`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from mpmath import mp, mpc, mpf

from .errors import DivergentTerm, NonConvergent

INF = math.inf

ScalarHP = mpc

DEFAULT_PRECISION = 60
DEFAULT_SEED = 20100607

_MAX_SERIES_TERMS = 200_000


def set_precision(digits: int) -> None:
    """Fix the global working precision (decimal digits)."""
    if digits < 10:
        raise ValueError("precision below 10 digits is not supported")
    mp.dps = int(digits)


def hp(value) -> mpc:
    """Convert ints, decimal strings, mpf or mpc to a working-precision complex."""
    if isinstance(value, str):
        return mpc(mp.mpmathify(value.strip().replace("i", "j")))
    return mpc(value)


def tol(k: float, digits: int | None = None) -> mpf:
    """Tolerance 10^(k - P) at precision P."""
    p = mp.dps if digits is None else digits
    return mpf(10) ** (k - p)


@dataclass(frozen=True)
class QContext:
    """Base q together with precision and truncation settings."""

    q: mpc
    precision_digits: int = DEFAULT_PRECISION
    truncation_eps: mpf | None = None
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        q = mpc(self.q)
        object.__setattr__(self, "q", q)
        if q == 0:
            raise ValueError("q must be nonzero")
        if self.truncation_eps is None:
            object.__setattr__(self, "truncation_eps", mpf(10) ** (10 - self.precision_digits))

    @classmethod
    def create(cls, q, precision_digits: int = DEFAULT_PRECISION, **kw) -> "QContext":
        """Set the global precision and build a context."""
        set_precision(precision_digits)
        return cls(hp(q), precision_digits, **kw)

    @property
    def qh(self) -> mpc:
        """Principal square root q^(1/2)."""
        return mp.sqrt(self.q)

    @property
    def inside_unit_disc(self) -> bool:
        return abs(self.q) < 1

    def tol(self, k: float) -> mpf:
        return tol(k, self.precision_digits)


def _product_length(a, ctx: QContext) -> int:
    """Number of factors needed before the tail bound |a q^N|/(1 - |q|) drops below truncation_eps."""
    aq = abs(a)
    if aq == 0:
        return 0
    lq = math.log(float(abs(ctx.q)))
    tail = math.log(1 - float(abs(ctx.q)))
    target = math.log(float(ctx.truncation_eps)) + tail - math.log(max(float(aq), 1e-300))
    n = max(0, math.ceil(target / lq))
    return n + 16


def qpoch(a, ctx: QContext, n=INF) -> mpc:
    """q-Pochhammer symbol (a;q)_n for integer n >= 0 or n = infinity."""
    a = mpc(a)
    q = ctx.q
    if n == INF:
        if abs(q) >= 1:
            raise NonConvergent("(a;q)_inf needs |q| < 1")
        n = _product_length(a, ctx)
    n = int(n)
    if n < 0:
        # (a;q)_{-m} = 1/(aq^{-m};q)_m
        return 1 / qpoch(a * q**n, ctx, -n)
    prod = mpc(1)
    term = a
    for _ in range(n):
        prod *= 1 - term
        term *= q
    return prod


def qpoch_many(params: Iterable, ctx: QContext, n=INF) -> mpc:
    """(a_1, ..., a_k; q)_n as a product of single symbols."""
    out = mpc(1)
    for a in params:
        out *= qpoch(a, ctx, n)
    return out


@lru_cache(maxsize=32)
def _euler_coefficients(q: mpc, dps: int) -> tuple:
    """Coefficients (-1)^k q^(k(k-1)/2)/(q;q)_k of the Euler expansion of (z;q)_inf."""
    coeffs = []
    c = mpc(1)
    k = 0
    lim = mpf(10) ** (-dps - 30)
    while True:
        coeffs.append(c)
        k += 1
        c = -c * q ** (k - 1) / (1 - q**k)
        if abs(c) * 10 ** (2 * k) < lim or k > 400:
            coeffs.append(c)
            break
    return tuple(coeffs)


def qpoch_inf_fast(a, ctx: QContext) -> mpc:
    """(a;q)_inf through Euler's series; agrees with :func:`qpoch` and is much cheaper.

    Accurate for |a| up to about 10^2 at the default precision; used inside
    quadrature loops where thousands of products are needed.
    """
    a = mpc(a)
    if abs(a) > 100:
        return qpoch(a, ctx)
    coeffs = _euler_coefficients(ctx.q, mp.dps)
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * a + c
    return acc


def theta_q(z, ctx: QContext) -> mpc:
    """Jacobi-type theta product (z, q/z; q)_inf."""
    return qpoch_inf_fast(z, ctx) * qpoch_inf_fast(ctx.q / z, ctx)


def qbinomial(n: int, k: int, ctx: QContext) -> mpc:
    """Gaussian binomial [n choose k]_q."""
    if k < 0 or k > n:
        return mpc(0)
    q = ctx.q
    return qpoch(q, ctx, n) / (qpoch(q, ctx, k) * qpoch(q, ctx, n - k))


def _is_zero_factor(v, ref=1) -> bool:
    return abs(v) <= mpf(10) ** (8 - mp.dps) * max(1, abs(ref))


def phi_series(num: Sequence, den: Sequence, ctx: QContext, z) -> mpc:
    """Basic hypergeometric series r+1 phi r (num; den; q, z).

    Sums until the geometric tail bound falls below ``truncation_eps`` relative
    to the partial sum, or exactly when a numerator parameter is q^(-m).
    """
    num = [mpc(a) for a in num]
    den = [mpc(b) for b in den]
    z = mpc(z)
    q = ctx.q
    if len(num) != len(den) + 1:
        raise ValueError("need len(num) == len(den) + 1")
    absz = abs(z)
    eps = ctx.truncation_eps * mpf(10) ** -5
    terms = [mpc(1)]
    term = mpc(1)
    running = mpc(1)
    qk = mpc(1)
    quiet = 0
    for k in range(_MAX_SERIES_TERMS):
        nfac = [1 - a * qk for a in num]
        if any(_is_zero_factor(v) for v in nfac):
            return mp.fsum(terms)
        dfac = [1 - b * qk for b in den] + [1 - q * qk]
        if any(_is_zero_factor(v) for v in dfac):
            raise DivergentTerm("denominator Pochhammer factor vanishes at k=%d" % k)
        ratio = z
        for v in nfac:
            ratio *= v
        for v in dfac:
            ratio /= v
        term *= ratio
        terms.append(term)
        running += term
        qk *= q
        if absz >= 1:
            if k > 4000:
                raise NonConvergent("|z| >= 1 and the series does not terminate")
            continue
        bound = abs(term) * absz / (1 - absz)
        if bound <= eps * max(abs(running), mpf(10) ** (-mp.dps)):
            quiet += 1
            if quiet >= 3:
                return mp.fsum(terms)
        else:
            quiet = 0
    raise NonConvergent("series did not converge within the term budget")


def _w87_lists(a1, rest: Sequence, ctx: QContext):
    q = ctx.q
    s = mp.sqrt(mpc(a1))
    num = [a1, q * s, -q * s] + list(rest)
    den = [s, -s] + [q * a1 / b for b in rest]
    return num, den


def w8_7(a1, a4, a5, a6, a7, a8, ctx: QContext, z) -> mpc:
    """Very-well-poised 8W7(a1; a4..a8; q, z) through its 8phi7 series."""
    num, den = _w87_lists(mpc(a1), [mpc(v) for v in (a4, a5, a6, a7, a8)], ctx)
    return phi_series(num, den, ctx, z)


def w8_7_natural_arg(a, b, c, d, e, f, ctx: QContext) -> mpc:
    """The argument q^2 a^2/(bcdef) of a balanced-type 8W7."""
    return ctx.q**2 * a**2 / (b * c * d * e * f)


def w8_7_bailey_rhs(a, b, c, d, e, f, ctx: QContext) -> mpc:
    """Right side of Bailey's 8W7 transformation (Gasper-Rahman III.23).

    8W7(a; b,c,d,e,f; q, a^2q^2/(bcdef)) equals
    (aq, aq/ef, lq/e, lq/f)_inf / (aq/e, aq/f, lq/ef, lq)_inf
    * 8W7(l; lb/a, lc/a, ld/a, e, f; q, aq/ef)  with  l = q a^2/(bcd).
    The right side converges whenever |aq/ef| < 1.
    """
    q = ctx.q
    lam = q * a**2 / (b * c * d)
    pref = qpoch_many([a * q, a * q / (e * f), lam * q / e, lam * q / f], ctx) / qpoch_many(
        [a * q / e, a * q / f, lam * q / (e * f), lam * q], ctx
    )
    return pref * w8_7(lam, lam * b / a, lam * c / a, lam * d / a, e, f, ctx, a * q / (e * f))


def w8_7_balanced(a, b, c, d, e, f, ctx: QContext) -> mpc:
    """8W7(a; b,c,d,e,f; q, a^2q^2/(bcdef)) including its continuation to |argument| >= 1.

    Uses the defining series when it converges quickly, otherwise the Bailey
    transformation with the parameter pair that gives the smallest new argument.
    """
    a, b, c, d, e, f = (mpc(v) for v in (a, b, c, d, e, f))
    z = w8_7_natural_arg(a, b, c, d, e, f, ctx)
    if abs(z) < mpf("0.75"):
        return w8_7(a, b, c, d, e, f, ctx, z)
    params = [b, c, d, e, f]
    best = None
    for i, j in itertools.combinations(range(5), 2):
        ee, ff = params[i], params[j]
        arg = abs(a * ctx.q / (ee * ff))
        if best is None or arg < best[0]:
            best = (arg, i, j)
    if best is None or best[0] >= 1:
        if abs(z) < 1:
            return w8_7(a, b, c, d, e, f, ctx, z)
        raise NonConvergent("no Bailey pairing gives a convergent 8W7")
    _, i, j = best
    others = [params[k] for k in range(5) if k not in (i, j)]
    return w8_7_bailey_rhs(a, *others, params[i], params[j], ctx)


def elementary_symmetric(params: Sequence) -> list:
    """[e_0, e_1, ..., e_n] of the given values."""
    coeffs = [mpc(1)]
    for a in params:
        nxt = coeffs + [mpc(0)]
        for k in range(len(coeffs), 0, -1):
            nxt[k] = nxt[k] + a * coeffs[k - 1]
        coeffs = nxt
    return coeffs


@dataclass(frozen=True)
class SymmetricSet:
    """Parameters with their elementary symmetric polynomials.

    ``tilde_sigma`` refers to the q^(-1/2)-scaled parameters.
    """

    params: tuple
    ctx: QContext
    sigma: tuple = field(init=False)
    tilde_sigma: tuple = field(init=False)

    def __post_init__(self):
        params = tuple(mpc(p) for p in self.params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "sigma", tuple(elementary_symmetric(params)))
        s = 1 / self.ctx.qh
        object.__setattr__(self, "tilde_sigma", tuple(elementary_symmetric([s * p for p in params])))
