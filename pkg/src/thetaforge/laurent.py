"""Laurent polynomials in a fractional power of ``t``.

A :class:`LaurentPoly` stores integer (or rational) coefficients keyed by a
scaled exponent ``e`` meaning ``t**(e/denom)``.  Values are immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

Coeff = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class LaurentPoly:
    __slots__ = ("_terms", "_denom", "_hash")

    def __init__(self, terms: Mapping[int, Coeff] | None = None, denom: int = 1) -> None:
        if denom < 1:
            raise ValueError("denom must be a positive integer")
        clean: dict[int, Coeff] = {}
        for e, c in (terms or {}).items():
            tc = type(c)
            if tc is not int and tc is not Fraction and not isinstance(c, Rational):
                raise TypeError(f"coefficient {c!r} is not an exact rational")
            if c != 0:
                clean[int(e)] = _norm_coeff(c)
        self._terms = clean
        self._denom = denom
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: Mapping[int, Coeff], denom: int) -> LaurentPoly:
        """Trusted constructor for int keys and int/Fraction values."""
        obj = object.__new__(cls)
        clean = {}
        for e, c in terms.items():
            if c:
                if type(c) is Fraction and c.denominator == 1:
                    c = c.numerator
                clean[e] = c
        obj._terms = clean
        obj._denom = denom
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def const(cls, c: Coeff, denom: int = 1) -> LaurentPoly:
        return cls({0: c}, denom)

    @classmethod
    def monomial(cls, exp: int | Fraction, coeff: Coeff = 1, denom: int = 1) -> LaurentPoly:
        """``coeff * t**exp``; ``exp`` may be a Fraction whose denominator divides ``denom``."""
        scaled = Fraction(exp) * denom
        if scaled.denominator != 1:
            raise ValueError(f"exponent {exp} not representable with denom {denom}")
        return cls({int(scaled): coeff}, denom)

    @classmethod
    def zero(cls, denom: int = 1) -> LaurentPoly:
        return cls({}, denom)

    @classmethod
    def one(cls, denom: int = 1) -> LaurentPoly:
        return cls({0: 1}, denom)

    # accessors

    @property
    def denom(self) -> int:
        return self._denom

    @property
    def terms(self) -> dict[int, Coeff]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, Coeff]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, exp: int | Fraction) -> Coeff:
        scaled = Fraction(exp) * self._denom
        if scaled.denominator != 1:
            return 0
        return self._terms.get(int(scaled), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def min_exp(self) -> Fraction:
        return Fraction(min(self._terms), self._denom)

    def max_exp(self) -> Fraction:
        return Fraction(max(self._terms), self._denom)

    def exponents(self) -> list[Fraction]:
        return [Fraction(e, self._denom) for e in sorted(self._terms)]

    def is_integral(self) -> bool:
        """True when every coefficient is an integer."""
        return all(isinstance(c, int) for c in self._terms.values())

    def has_integer_exponents(self) -> bool:
        return all(e % self._denom == 0 for e in self._terms)

    # denominators

    def rescale(self, denom: int) -> LaurentPoly:
        if denom % self._denom:
            raise ValueError(f"cannot rescale denom {self._denom} to {denom}")
        f = denom // self._denom
        return LaurentPoly({e * f: c for e, c in self._terms.items()}, denom)

    def reduced(self) -> LaurentPoly:
        """Same value with the smallest possible denom."""
        g = self._denom
        for e in self._terms:
            g = gcd(g, e)
        if g == 1:
            return self
        return LaurentPoly({e // g: c for e, c in self._terms.items()}, self._denom // g)

    def _aligned(self, other: LaurentPoly) -> tuple[dict[int, Coeff], dict[int, Coeff], int]:
        if self._denom == other._denom:
            return self._terms, other._terms, self._denom
        d = _lcm(self._denom, other._denom)
        return self.rescale(d)._terms, other.rescale(d)._terms, d

    # arithmetic

    def __add__(self, other: object) -> LaurentPoly:
        other = _coerce(other, self._denom)
        if other is NotImplemented:
            return NotImplemented
        a, b, d = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly._raw(out, d)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()}, self._denom)

    def __sub__(self, other: object) -> LaurentPoly:
        other = _coerce(other, self._denom)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other: object) -> LaurentPoly:
        if type(other) is not LaurentPoly:
            if isinstance(other, Rational):
                return LaurentPoly._raw({e: c * other for e, c in self._terms.items()}, self._denom)
            if not isinstance(other, LaurentPoly):
                return NotImplemented
        a, b, d = self._aligned(other)
        if len(b) == 1 and len(a) > 1:
            a, b = b, a
        out: dict[int, Coeff] = {}
        get = out.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                out[e] = get(e, 0) + c1 * c2
        return LaurentPoly._raw(out, d)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._terms.items()
            return LaurentPoly({-e * (-n): Fraction(1, c) ** (-n)}, self._denom)
        result = LaurentPoly.one(self._denom)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, exp: int | Fraction) -> LaurentPoly:
        """Multiply by ``t**exp``."""
        return self * LaurentPoly.monomial(exp, 1, _denom_for(exp, self._denom))

    def scale_exponents(self, k: int) -> LaurentPoly:
        """Substitute ``t -> t**k`` (k may be negative)."""
        return LaurentPoly({e * k: c for e, c in self._terms.items()}, self._denom)

    def adams(self, k: int) -> LaurentPoly:
        """Adams operation with respect to ``-t``: substitute ``-t -> (-t)**k``.

        Only defined for integer exponents.
        """
        if not self.has_integer_exponents():
            raise ValueError("Adams operation needs integer exponents")
        out: dict[int, Coeff] = {}
        for e, c in self._terms.items():
            r = e // self._denom
            sign = -1 if (r * (k + 1)) % 2 else 1
            out[r * k] = out.get(r * k, 0) + sign * c
        return LaurentPoly(out, 1)

    def bar(self) -> LaurentPoly:
        """Substitute ``t -> 1/t``."""
        return self.scale_exponents(-1)

    def at_one(self) -> Coeff:
        """Value at ``t = 1``."""
        return _norm_coeff(sum(self._terms.values(), 0))

    def evaluate(self, x: Fraction | int) -> Fraction:
        """Value at a rational ``t = x`` (only for integer exponents)."""
        if not self.has_integer_exponents():
            raise ValueError("evaluation at a rational needs integer exponents")
        x = Fraction(x)
        return sum((c * x ** (e // self._denom) for e, c in self._terms.items()), Fraction(0))

    def divmod(self, other: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        """Long division ordered from the top exponent down.

        The remainder has top exponent strictly below ``other``'s span offset;
        callers normally only use :meth:`exact_div`.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        a, b, d = self._aligned(other)
        rem = dict(a)
        quot: dict[int, Coeff] = {}
        btop = max(b)
        bbot = min(b)
        lead = b[btop]
        while rem:
            top = max(rem)
            if top - btop < min(rem) - bbot:
                break
            q = Fraction(rem[top]) / lead
            shift = top - btop
            quot[shift] = quot.get(shift, 0) + q
            for e, c in b.items():
                k = e + shift
                v = rem.get(k, 0) - q * c
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return LaurentPoly(quot, d), LaurentPoly(rem, d)

    def exact_div(self, other: LaurentPoly) -> LaurentPoly:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError(f"{self} is not divisible by {other}")
        return q

    # comparison

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Rational):
            other = LaurentPoly.const(other, self._denom)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a == b

    def __hash__(self) -> int:
        if self._hash is None:
            r = self.reduced()
            self._hash = hash((r._denom, frozenset(r._terms.items())))
        return self._hash

    # structure

    def is_bar_invariant(self) -> bool:
        return self == self.bar()

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self._terms.values())

    def parity(self) -> str:
        """``'even'``, ``'odd'``, ``'mixed'`` or ``'zero'``."""
        if not self._terms:
            return "zero"
        kinds = set()
        for e in self._terms:
            if e % self._denom:
                return "mixed"
            kinds.add((e // self._denom) % 2)
        if len(kinds) == 2:
            return "mixed"
        return "odd" if kinds.pop() else "even"

    # rendering

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            exp = Fraction(e, self._denom)
            if exp == 0:
                parts.append(f"{c}")
            elif exp.denominator == 1:
                parts.append(f"{c}*t^{exp.numerator}")
            else:
                parts.append(f"{c}*t^({e}/{self._denom})")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()!r}, denom={self._denom})"

    def to_json(self) -> dict:
        return {
            "denom": self._denom,
            "terms": [[e, _json_coeff(c)] for e, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> LaurentPoly:
        return cls({int(e): _parse_coeff(c) for e, c in data["terms"]}, int(data.get("denom", 1)))


def _json_coeff(c: Coeff) -> int | str:
    return c if isinstance(c, int) else str(c)


def _parse_coeff(c: int | str) -> Coeff:
    return _norm_coeff(Fraction(c)) if isinstance(c, str) else int(c)


def _denom_for(exp: int | Fraction, denom: int) -> int:
    d = Fraction(exp).denominator
    return _lcm(d, denom)


def _coerce(other: object, denom: int) -> LaurentPoly:
    if isinstance(other, LaurentPoly):
        return other
    if isinstance(other, Rational):
        return LaurentPoly.const(other, denom)
    return NotImplemented


T = LaurentPoly.monomial(1)
ZERO = LaurentPoly.zero()
ONE = LaurentPoly.one()


def t_pow(exp: int | Fraction, denom: int = 1) -> LaurentPoly:
    return LaurentPoly.monomial(exp, 1, _denom_for(exp, denom))


def from_coeffs(pairs: Iterable[tuple[int, Coeff]], denom: int = 1) -> LaurentPoly:
    out: dict[int, Coeff] = {}
    for e, c in pairs:
        out[e] = out.get(e, 0) + c
    return LaurentPoly(out, denom)


def quantum_number(a: int) -> LaurentPoly:
    """``(a)_t = t**a - t**-a``."""
    if a == 0:
        return LaurentPoly.zero()
    return LaurentPoly({a: 1, -a: -1})


def quantum_int(a: int) -> LaurentPoly:
    """Balanced quantum integer ``t**(1-a) + t**(3-a) + ... + t**(a-1)``."""
    if a < 1:
        raise ValueError(f"quantum integer needs a >= 1, got {a}")
    return LaurentPoly({e: 1 for e in range(1 - a, a, 2)})


def quantum_binomial(a: int, k: int) -> LaurentPoly:
    """Balanced quantum binomial via the Pascal rule.

    Uses ``(a choose k) = t**-k (a-1 choose k) + t**(a-k) (a-1 choose k-1)``.
    """
    if k < 0 or k > a:
        raise ValueError(f"quantum binomial needs 0 <= k <= a, got a={a}, k={k}")
    row = [LaurentPoly.one()]
    for n in range(1, a + 1):
        new = []
        for j in range(n + 1):
            acc = LaurentPoly.zero()
            if j < n:
                acc = acc + row[j].shift(-j)
            if j > 0:
                acc = acc + row[j - 1].shift(n - j)
            new.append(acc)
        row = new
    return row[k]


def quantum_factorial(a: int) -> LaurentPoly:
    """``(a)_t! = (a)_t (a-1)_t ... (1)_t``."""
    out = LaurentPoly.one()
    for j in range(1, a + 1):
        out = out * quantum_number(j)
    return out


def pl_poly(n: int) -> LaurentPoly:
    """``t**n`` for even n, ``t**(n-2) + t**n`` for odd n."""
    if n % 2 == 0:
        return LaurentPoly({n: 1})
    return LaurentPoly({n - 2: 1, n: 1})


@dataclass(frozen=True)
class Classification:
    nonnegative: bool
    bar_invariant: bool
    parity: str
    lefschetz: tuple[tuple[int, int], ...] | None
    pl: tuple[tuple[int, int], ...] | None

    def to_json(self) -> dict:
        return {
            "nonnegative": self.nonnegative,
            "bar_invariant": self.bar_invariant,
            "parity": self.parity,
            "lefschetz": None if self.lefschetz is None else [list(x) for x in self.lefschetz],
            "pl": None if self.pl is None else [list(x) for x in self.pl],
        }


def _integer_terms(p: LaurentPoly) -> dict[int, Coeff] | None:
    if not p.has_integer_exponents() or not p.is_integral():
        return None
    return {e // p.denom: c for e, c in p.terms.items()}


def lefschetz_decomposition(p: LaurentPoly) -> tuple[tuple[int, int], ...] | None:
    """Peel ``[n]_t`` from the outermost exponent inward.

    Returns ``((n, multiplicity), ...)`` with decreasing n, or None when p is
    not a nonnegative sum of balanced quantum integers.
    """
    rem = _integer_terms(p)
    if rem is None:
        return None
    out = []
    while rem:
        top = max(rem)
        if min(rem) != -top:
            return None
        c = rem[top]
        if c <= 0:
            return None
        for e in range(-top, top + 1, 2):
            v = rem.get(e, 0) - c
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
        out.append((top + 1, c))
    return tuple(out)


def pl_decomposition(p: LaurentPoly) -> tuple[tuple[int, int], ...] | None:
    """Peel ``pl_n`` from the lowest exponent upward.

    Returns ``((n, multiplicity), ...)`` with increasing n, or None.
    """
    rem = _integer_terms(p)
    if rem is None:
        return None
    out: dict[int, int] = {}
    while rem:
        low = min(rem)
        c = rem[low]
        if c <= 0:
            return None
        n = low if low % 2 == 0 else low + 2
        for e in pl_poly(n).terms:
            v = rem.get(e, 0) - c
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
        out[n] = out.get(n, 0) + c
    return tuple(sorted(out.items()))


def classify(p: LaurentPoly) -> Classification:
    return Classification(
        nonnegative=p.is_nonnegative(),
        bar_invariant=p.is_bar_invariant(),
        parity=p.parity(),
        lefschetz=lefschetz_decomposition(p),
        pl=pl_decomposition(p),
    )


_TERM = re.compile(
    r"([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*(t(?:\^\(?(-?\d+)(?:/(\d+))?\)?)?)?\s*"
)


def parse_laurent(text: str) -> LaurentPoly:
    """Parse the output of :meth:`LaurentPoly.to_text` (and simple variants)."""
    out = LaurentPoly.zero()
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or not (m.group(2) or m.group(3)):
            raise ValueError(f"cannot parse Laurent polynomial {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        exp = Fraction(0)
        if m.group(3):
            exp = Fraction(1)
            if m.group(4) is not None:
                exp = Fraction(int(m.group(4)), int(m.group(5) or 1))
        out = out + LaurentPoly.monomial(exp, _norm_coeff(sign * coeff), exp.denominator)
        pos = m.end()
    return out
