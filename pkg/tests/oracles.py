"""Brute-force reference computations shared by the tests.

Everything here works with plain dictionaries so that it shares no code with
the library.  Bivariate series are ``{(n, e): c}`` for ``c * x^n * t^e``,
truncated at x-degree ``deg`` and t-exponent ``hi``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from thetaforge.laurent import LaurentPoly


def _gen_binom(m: int, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out = out * (m - i) / (i + 1)
    return out


def bi_mul(a: dict, b: dict, deg: int, hi: int) -> dict:
    out: dict = {}
    for (n1, e1), c1 in a.items():
        for (n2, e2), c2 in b.items():
            n, e = n1 + n2, e1 + e2
            if n <= deg and e < hi:
                out[(n, e)] = out.get((n, e), 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def binomial_factor(sign: int, s: int, m: int, deg: int, hi: int) -> dict:
    """``(1 + sign * t^s x)^m`` for any integer m."""
    out = {}
    for n in range(deg + 1):
        if s * n >= hi:
            break
        c = _gen_binom(m, n) * sign**n
        if c:
            out[(n, s * n)] = c
    return out


def ee_factors(p: dict[int, int], deg: int, hi: int) -> list[tuple[int, int, int]]:
    """``EE(p(t) x)`` as factors ``(sign, s, m)`` meaning ``(1 + sign t^s x)^m``.

    The plethystic input ``p(t)(t + t^3 + ...)`` is a sum of ``a (-t)^s x`` and
    each such term contributes ``(1 - (-t)^s x)^(-a)``.
    """
    coeffs: dict[int, int] = {}
    for e, c in p.items():
        s = e + 1
        while s < hi:
            coeffs[s] = coeffs.get(s, 0) + c
            s += 2
    out = []
    for s, c in coeffs.items():
        if c:
            # c t^s = c (-1)^s (-t)^s
            a = c * (-1) ** (s % 2)
            out.append((-((-1) ** (s % 2)), s, -a))
    return out


def series_from_factors(factors, deg: int, hi: int, xshift: int = 0) -> dict:
    """Product of the factors after substituting ``x -> t^xshift x``."""
    out = {(0, 0): Fraction(1)}
    for sign, s, m in factors:
        out = bi_mul(out, binomial_factor(sign, s + xshift, m, deg, hi), deg, hi)
    return out


def ad_coefficients(factors, b: int, deg: int, hi: int) -> dict[int, dict[int, Fraction]]:
    """Coefficients of ``z^(p + n v)`` in ``F(z^v) z^p F(z^v)^-1`` with ``omega(v, p) = b``.

    ``F(x) z^p = z^p F(t^(2b) x)`` and ``z^p x^n = t^(-n b) z^(p + n v)``.
    """
    inverse = [(sign, s, -m) for sign, s, m in factors]
    ratio = bi_mul(series_from_factors(factors, deg, hi, 2 * b), series_from_factors(inverse, deg, hi), deg, hi)
    out: dict[int, dict[int, Fraction]] = {}
    for (n, e), c in ratio.items():
        out.setdefault(n, {})[e - n * b] = c
    return out


def laurent_window(p: LaurentPoly, below: int) -> dict[int, Fraction]:
    return {e: Fraction(c) for e, c in p.terms.items() if e < below}


def psi_factors(shift: int, hi: int) -> list[tuple[int, int, int]]:
    """``Psi_t(t^shift x) = prod_k (1 + t^(2k - 1 + shift) x)^-1``."""
    out = []
    k = 1
    while 2 * k - 1 + shift < hi:
        out.append((1, 2 * k - 1 + shift, -1))
        k += 1
    return out


def poly_power_coeffs(n: int) -> list[int]:
    """Coefficients of ``(1 + y)^n``."""
    return [comb(n, k) for k in range(n + 1)]
