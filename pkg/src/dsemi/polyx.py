"""Dense polynomials in x with working-precision coefficients.

Coefficient lists are in ascending powers. The divided-difference and mean
operators act exactly through the Chebyshev basis, where
T_k(x) = (z^k + z^-k)/2.
"""

from __future__ import annotations

from typing import Callable, Sequence

from mpmath import mp, mpc, mpf

from .errors import NotPolynomial


def peval(c: Sequence, x) -> mpc:
    acc = mpc(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def trim(c: Sequence) -> list:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c or [mpc(0)]


def padd(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def pscale(a: Sequence, s) -> list:
    return [s * v for v in a]


def psub(a: Sequence, b: Sequence) -> list:
    return padd(a, pscale(b, -1))


def pmul(a: Sequence, b: Sequence) -> list:
    out = [mpc(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


def to_cheb(c: Sequence) -> list:
    """Monomial coefficients to Chebyshev-T coefficients."""
    t = [mpc(0)]
    for a in reversed(c):
        t = _cheb_mulx(t)
        t[0] += a
    return t


def _cheb_mulx(t: Sequence) -> list:
    r = [mpc(0)] * (len(t) + 1)
    for k, v in enumerate(t):
        if k == 0:
            r[1] += v
        else:
            r[k + 1] += v / 2
            r[k - 1] += v / 2
    return r


def from_cheb(t: Sequence) -> list:
    """Chebyshev-T coefficients to monomial coefficients."""
    out = [mpc(0)] * max(1, len(t))
    prev, cur = [mpc(1)], [mpc(0), mpc(1)]
    for k, v in enumerate(t):
        if k == 0:
            tk = prev
        elif k == 1:
            tk = cur
        else:
            nxt = psub([mpc(0)] + pscale(cur, 2), prev)
            prev, cur = cur, nxt
            tk = cur
        for i, a in enumerate(tk):
            out[i] += v * a
    return out


def _u_in_cheb(m: int) -> list:
    """Chebyshev-U_m expressed in the T basis."""
    out = [mpc(0)] * (m + 1)
    for j in range(m % 2, m + 1, 2):
        out[j] = mpc(1) if j == 0 else mpc(2)
    return out


def dd_poly(c: Sequence, qh) -> list:
    """Askey-Wilson divided difference of a polynomial; qh = q^(1/2)."""
    t = to_cheb(c)
    res = [mpc(0)] * max(1, len(t) - 1)
    den = qh - 1 / qh
    for k in range(1, len(t)):
        if t[k] == 0:
            continue
        factor = t[k] * (qh**k - qh ** (-k)) / den
        for j, u in enumerate(_u_in_cheb(k - 1)):
            res[j] += factor * u
    return from_cheb(res)[: max(1, len(c) - 1)]


def mean_poly(c: Sequence, qh) -> list:
    """Askey-Wilson mean operator applied to a polynomial."""
    t = to_cheb(c)
    t = [v * (qh**k + qh ** (-k)) / 2 for k, v in enumerate(t)]
    return from_cheb(t)[: len(c)]


def fit_on_circle(
    func: Callable, degree: int, radius=2, extra: int = 3, holdout: int = 5, rel_tol=None
) -> list:
    """Recover a polynomial of the given degree from samples on |x| = radius.

    Samples at degree+1+extra equally spaced points and reads off coefficients
    by a discrete Fourier transform; the unused top coefficients and residuals
    at rotated held-out points certify polynomiality.
    """
    if rel_tol is None:
        rel_tol = mpf(10) ** (15 - mp.dps)
    radius = mpf(radius)
    k = degree + 1 + extra
    pts = [radius * mp.expj(2 * mp.pi * j / k) for j in range(k)]
    vals = [func(x) for x in pts]
    coeffs = []
    for m in range(k):
        s = mp.fsum(v * mp.expj(-2 * mp.pi * j * m / k) for j, v in enumerate(vals))
        coeffs.append(s / k / radius**m)
    scale = max([abs(v) for v in vals] + [mpf(10) ** (-mp.dps)])
    for m in range(degree + 1, k):
        if abs(coeffs[m]) * radius**m > rel_tol * scale:
            raise NotPolynomial("coefficient of x^%d is %s (scale %s)" % (m, mp.nstr(abs(coeffs[m]), 5), mp.nstr(scale, 5)))
    coeffs = coeffs[: degree + 1]
    for j in range(holdout):
        x = radius * mp.expj(2 * mp.pi * (j + mpf("0.37")) / holdout)
        r = abs(func(x) - peval(coeffs, x))
        if r > rel_tol * scale:
            raise NotPolynomial("held-out residual %s" % mp.nstr(r, 5))
    return coeffs
