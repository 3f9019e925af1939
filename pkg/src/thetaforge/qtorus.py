"""Truncated quantum torus series, wall-crossing group elements and their adjoint action.

Group elements are stored as words of ray factors.  A factor on a primitive
direction ``v`` is either in EE form, ``prod_j EE(-p_j(t) z^{j v})``, or in log
form, ``exp(sum_N l_N zhat^{N v})``.  Words avoid the Baker-Campbell-Hausdorff
formula, whose coefficients need not stay in ``Z[t, t^-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence

from .lattice import QLattice, Vec, as_vec, index, primitive, vadd, vscale, vsub
from .laurent import ONE, Coeff, LaurentPoly, quantum_int, quantum_number


def _sign(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def _term_text(v: Vec, c: LaurentPoly) -> str:
    if not any(v):
        return c.to_text()
    return f"({c.to_text()})*z^{list(v)}"


class QSeries:
    """Finite or truncated sum ``sum_v c_v(t) z^v``.

    With ``base = w`` and ``max_order = k`` the series lives in
    ``z^w Z_t[[L+]]`` and terms with ``order(v - w) > k`` are dropped.
    Without a base the series is an exact Laurent polynomial.
    """

    __slots__ = ("lattice", "_terms", "base", "max_order")

    def __init__(
        self,
        lattice: QLattice,
        terms: Mapping[Sequence[int], LaurentPoly | Coeff] | None = None,
        base: Sequence[int] | None = None,
        max_order: int | None = None,
    ) -> None:
        if (base is None) != (max_order is None):
            raise ValueError("base and max_order go together")
        self.lattice = lattice
        self.base = as_vec(base) if base is not None else None
        self.max_order = max_order
        clean: dict[Vec, LaurentPoly] = {}
        for v, c in (terms or {}).items():
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly.const(c)
            if c.is_zero():
                continue
            v = as_vec(v)
            if len(v) != lattice.rank:
                raise ValueError("exponent has the wrong rank")
            if self.base is not None and not self.within(v):
                continue
            clean[v] = c
        self._terms = clean

    def within(self, v: Sequence[int]) -> bool:
        """Is ``v`` kept by the truncation?"""
        if self.base is None:
            return True
        rel = vsub(v, self.base)
        c = self.lattice.cone_coords(rel)
        if c is None or any(x < 0 for x in c):
            raise ValueError(f"exponent {tuple(v)} is outside base + cone")
        return sum(c, Fraction(0)) < self.max_order + 1

    @classmethod
    def monomial(
        cls,
        lattice: QLattice,
        v: Sequence[int],
        coeff: LaurentPoly | Coeff = 1,
        max_order: int | None = None,
    ) -> QSeries:
        v = as_vec(v)
        if max_order is None:
            return cls(lattice, {v: coeff})
        return cls(lattice, {v: coeff}, base=v, max_order=max_order)

    @property
    def terms(self) -> dict[Vec, LaurentPoly]:
        return dict(self._terms)

    def items(self) -> list[tuple[Vec, LaurentPoly]]:
        return sorted(self._terms.items())

    def coeff(self, v: Sequence[int]) -> LaurentPoly:
        return self._terms.get(as_vec(v), LaurentPoly.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def _like(self, terms: Mapping[Vec, LaurentPoly]) -> QSeries:
        return QSeries(self.lattice, terms, self.base, self.max_order)

    def truncate(self, max_order: int) -> QSeries:
        if self.base is None:
            raise ValueError("an exact series has no base to truncate from")
        return QSeries(self.lattice, self._terms, self.base, min(max_order, self.max_order))

    def _check(self, other: QSeries) -> None:
        if other.lattice != self.lattice:
            raise ValueError("lattice mismatch")

    def __add__(self, other: QSeries) -> QSeries:
        self._check(other)
        if self.base != other.base:
            raise ValueError("cannot add series with different bases")
        out = dict(self._terms)
        for v, c in other._terms.items():
            out[v] = out.get(v, LaurentPoly.zero()) + c
        order = None if self.max_order is None else min(self.max_order, other.max_order)
        return QSeries(self.lattice, out, self.base, order)

    def __neg__(self) -> QSeries:
        return self._like({v: -c for v, c in self._terms.items()})

    def __sub__(self, other: QSeries) -> QSeries:
        return self + (-other)

    def scale(self, c: LaurentPoly | Coeff) -> QSeries:
        return self._like({v: x * c for v, x in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.lattice == other.lattice and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __mul__(self, other: QSeries) -> QSeries:
        return qmul(self, other)

    def __repr__(self) -> str:
        return f"QSeries({self.to_text()})"

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(_term_text(v, c) for v, c in self.items())

    def to_json(self) -> dict:
        return {
            "base": list(self.base) if self.base is not None else None,
            "max_order": self.max_order,
            "terms": [{"exponent": list(v), "coeff": c.to_json()} for v, c in self.items()],
        }

    @classmethod
    def from_json(cls, lattice: QLattice, data: Mapping) -> QSeries:
        terms = {tuple(t["exponent"]): LaurentPoly.from_json(t["coeff"]) for t in data["terms"]}
        return cls(lattice, terms, data.get("base"), data.get("max_order"))


def twist(lattice: QLattice, a: Sequence[int], b: Sequence[int]) -> LaurentPoly:
    """The scalar ``t^omega(a, b)`` in ``z^a z^b = t^omega(a,b) z^(a+b)``."""
    return LaurentPoly.monomial(Fraction(lattice.omega_num_pair(a, b), lattice.D), 1, lattice.D).reduced()


def qmul(a: QSeries, b: QSeries) -> QSeries:
    a._check(b)
    if (a.base is None) != (b.base is None):
        raise ValueError("cannot multiply an exact series by a truncated one")
    lat = a.lattice
    out: dict[Vec, LaurentPoly] = {}
    for u, cu in a._terms.items():
        for v, cv in b._terms.items():
            w = vadd(u, v)
            term = cu * cv * twist(lat, u, v)
            out[w] = out[w] + term if w in out else term
    if a.base is None:
        return QSeries(lat, out)
    return QSeries(lat, out, vadd(a.base, b.base), min(a.max_order, b.max_order))


# plethystic exponential along one line


def exp_line_degree(g: LaurentPoly) -> int | None:
    """Degree in y of ``Exp_{-t}(g y)`` when it is a polynomial, else None."""
    total = 0
    for r, gr in _integer_items(g):
        a = (-1) ** (r % 2) * gr
        if a > 0 or Fraction(a).denominator != 1:
            return None
        total -= int(a)
    return total


def _integer_items(g: LaurentPoly) -> list[tuple[int, Coeff]]:
    if not g.has_integer_exponents():
        raise ValueError("plethystic exponential needs integer exponents")
    return [(e // g.denom, c) for e, c in g.items()]


def _divide(p: LaurentPoly, n: int) -> LaurentPoly:
    items = p.terms
    if all(type(c) is int and c % n == 0 for c in items.values()):
        return LaurentPoly._raw({e: c // n for e, c in items.items()}, p.denom)
    return p * Fraction(1, n)


@lru_cache(maxsize=65536)
def exp_line(g: LaurentPoly, limit: int | None = None) -> tuple[LaurentPoly, ...]:
    """Coefficients of ``y^0 .. y^limit`` in ``Exp_{-t}(g(t) y)``.

    Uses ``n F_n = sum_k adams_k(g) F_{n-k}`` from ``F = exp(sum_k adams_k(g) y^k / k)``.
    With ``limit=None`` the expansion must terminate.
    """
    if limit is None:
        limit = exp_line_degree(g)
        if limit is None:
            raise ValueError(f"Exp_(-t)({g} y) is an infinite series; give a truncation")
    _integer_items(g)
    adams = [None] + [g.adams(k) for k in range(1, limit + 1)]
    result: list[LaurentPoly] = [ONE]
    for n in range(1, limit + 1):
        acc = LaurentPoly.zero()
        for k in range(1, n + 1):
            if not result[n - k].is_zero():
                acc = acc + adams[k] * result[n - k]
        result.append(_divide(acc, n))
    while len(result) > 1 and result[-1].is_zero():
        result.pop()
    return tuple(result)


# ray factors


@dataclass(frozen=True)
class RayFactor:
    """One factor supported on the primitive direction ``direction``.

    ``kind == "ee"``: coeffs maps j to p_j for ``EE(-p_j z^{j v})``.
    ``kind == "log"``: coeffs maps N to l_N for ``exp(sum l_N zhat^{N v})``,
    known for ``N <= limit`` (log factors always carry a limit).
    """

    direction: Vec
    kind: str
    coeffs: tuple[tuple[int, LaurentPoly], ...]
    limit: int | None = None

    @staticmethod
    def make(direction: Vec, kind: str, coeffs: Mapping[int, LaurentPoly], limit: int | None = None) -> RayFactor:
        items = tuple(sorted((j, c) for j, c in coeffs.items() if not c.is_zero()))
        return RayFactor(direction, kind, items, limit)

    @property
    def coeff_map(self) -> dict[int, LaurentPoly]:
        return dict(self.coeffs)

    def inverse(self) -> RayFactor:
        return RayFactor(self.direction, self.kind, tuple((j, -c) for j, c in self.coeffs), self.limit)

    def is_trivial(self) -> bool:
        return not self.coeffs

    def log_coeffs(self, limit: int) -> dict[int, LaurentPoly]:
        """Log-form coefficients ``l_N`` for ``N <= limit``."""
        if self.kind == "log":
            if limit > self.limit:
                raise ValueError("log coefficients requested beyond the stored truncation")
            return {n: c for n, c in self.coeffs if n <= limit}
        out: dict[int, LaurentPoly] = {}
        for j, p in self.coeffs:
            m = 1
            while j * m <= limit:
                out[j * m] = out.get(j * m, LaurentPoly.zero()) + ee_log_term(p, j, m)
                m += 1
        return {n: c for n, c in out.items() if not c.is_zero()}

    def merge(self, other: RayFactor) -> RayFactor:
        if other.direction != self.direction:
            raise ValueError("can only merge factors on the same ray")
        if self.kind == other.kind == "ee":
            out = self.coeff_map
            for j, c in other.coeffs:
                out[j] = out.get(j, LaurentPoly.zero()) + c
            return RayFactor.make(self.direction, "ee", out)
        limit = min(f.limit for f in (self, other) if f.kind == "log")
        a, b = self.log_coeffs(limit), other.log_coeffs(limit)
        out = dict(a)
        for n, c in b.items():
            out[n] = out.get(n, LaurentPoly.zero()) + c
        return RayFactor.make(self.direction, "log", out, limit)

    def to_ee(self, limit: int | None = None) -> RayFactor:
        """Convert to EE form; raises ArithmeticError when that form is not Laurent."""
        if self.kind == "ee":
            return self
        top = self.limit if limit is None else limit
        if top is None:
            raise ValueError("need a truncation to convert a log factor")
        return RayFactor.make(self.direction, "ee", log_to_ee(self.coeff_map, top))


def ee_log_term(p: LaurentPoly, j: int, m: int) -> LaurentPoly:
    """Coefficient of ``zhat^{jm v}`` in ``log EE(-p z^{j v})`` for primitive v."""
    eps = 1 if m % 2 else -1
    num = p.adams(m) * quantum_number(j * m) * eps
    return num.exact_div(quantum_number(m)) * Fraction(1, m)


def log_to_ee(log: Mapping[int, LaurentPoly], limit: int) -> dict[int, LaurentPoly]:
    out: dict[int, LaurentPoly] = {}
    for n in range(1, limit + 1):
        rest = log.get(n, LaurentPoly.zero())
        for j, p in out.items():
            if n % j == 0 and j < n:
                rest = rest - ee_log_term(p, j, n // j)
        if rest.is_zero():
            continue
        out[n] = rest.exact_div(quantum_int(n))
    return out


def _apply_ee(lat: QLattice, u: Vec, p: LaurentPoly, sign: int, x: QSeries) -> QSeries:
    """``Ad_{EE(-p z^u)^sign}`` on x via the closed form of the line exponential."""
    out: dict[Vec, LaurentPoly] = {}
    for q, c in x._terms.items():
        bnum = lat.omega_num_pair(u, q)
        if bnum == 0:
            out[q] = out.get(q, LaurentPoly.zero()) + c
            continue
        if bnum % lat.D:
            raise ValueError("wall-crossing needs omega(u, q) integral")
        b = bnum // lat.D
        g = p * quantum_int(abs(b)) * LaurentPoly.monomial(b) * (_sign(b) * sign)
        limit = _multiple_limit(x, q, u)
        if limit is None:
            coeffs = exp_line(g)
        else:
            coeffs = exp_line(g, limit)
        for m, e in enumerate(coeffs):
            if e.is_zero():
                continue
            w = vadd(q, vscale(m, u))
            term = c * e * LaurentPoly.monomial(-m * b)
            out[w] = out[w] + term if w in out else term
    return x._like(out)


def _multiple_limit(x: QSeries, q: Vec, u: Vec) -> int | None:
    """Largest m with ``q + m u`` inside the truncation of x."""
    if x.base is None:
        return None
    lat = x.lattice
    h0, den = lat.height_parts(vsub(q, x.base))
    hu, _ = lat.height_parts(u)
    if hu <= 0:
        raise ValueError("wall direction must be a nonzero element of the cone")
    room = (x.max_order + 1) * den - h0
    if room <= 0:
        return -1
    top, rest = divmod(room, hu)
    return top - 1 if rest == 0 else top


def _apply_log(lat: QLattice, f: RayFactor, sign: int, x: QSeries) -> QSeries:
    """``exp(sign * ad_X)`` on x for a log-form factor X."""
    if x.base is None:
        raise ValueError("log-form factors act only on truncated series")
    v = f.direction
    current = x
    total = dict(x._terms)
    n = 1
    while not current.is_zero():
        nxt: dict[Vec, LaurentPoly] = {}
        for q, c in current._terms.items():
            bnum = lat.omega_num_pair(v, q)
            if bnum == 0:
                continue
            if bnum % lat.D:
                raise ValueError("wall-crossing needs omega(v, q) integral")
            b = bnum // lat.D
            limit = _multiple_limit(x, q, v)
            if limit > f.limit:
                raise ValueError("log factor truncated below the requested order")
            for big_n, ell in f.coeffs:
                if big_n > limit:
                    break
                bracket = quantum_number(big_n * b).exact_div(quantum_number(big_n))
                w = vadd(q, vscale(big_n, v))
                term = c * ell * bracket * (Fraction(sign, n))
                nxt[w] = nxt[w] + term if w in nxt else term
        current = x._like(nxt)
        for w, c in current._terms.items():
            total[w] = total[w] + c if w in total else c
        n += 1
    return x._like(total)


@lru_cache(maxsize=65536)
def ray_coefficient(f: RayFactor, b: Fraction, m: int) -> LaurentPoly:
    """Coefficient of ``z^{q + m v}`` in ``Ad_f(z^q)`` when ``omega(v, q) = b``.

    Only b matters because ``omega(v, v) = 0``; the value is computed on a
    rank-2 model lattice with ``v = e1`` and ``q = b*D*e2``.
    """
    b = Fraction(b)
    D = b.denominator
    lat = QLattice(2, D, ((0, 1), (-1, 0)), ((1, 0), (0, 1)), ((D, 0), (0, D)))
    q = (0, b.numerator)
    g = GroupElem(lat, [RayFactor((1, 0), f.kind, f.coeffs, f.limit)])
    return g.ad(QSeries(lat, {q: ONE}, q, m)).coeff((m, b.numerator))


class GroupElem:
    """Ordered word of ray factors; the leftmost factor acts last under Ad."""

    __slots__ = ("lattice", "factors", "max_order")

    def __init__(self, lattice: QLattice, factors: Iterable[RayFactor] = (), max_order: int | None = None) -> None:
        self.lattice = lattice
        self.max_order = max_order
        word: list[RayFactor] = []
        for f in factors:
            if f.is_trivial():
                continue
            if word and word[-1].direction == f.direction:
                merged = word.pop().merge(f)
                if not merged.is_trivial():
                    word.append(merged)
            else:
                word.append(f)
        self.factors = tuple(word)

    @classmethod
    def identity(cls, lattice: QLattice, max_order: int | None = None) -> GroupElem:
        return cls(lattice, (), max_order)

    def __mul__(self, other: GroupElem) -> GroupElem:
        if other.lattice != self.lattice:
            raise ValueError("lattice mismatch")
        orders = [o for o in (self.max_order, other.max_order) if o is not None]
        return GroupElem(self.lattice, self.factors + other.factors, min(orders) if orders else None)

    def inverse(self) -> GroupElem:
        return GroupElem(self.lattice, (f.inverse() for f in reversed(self.factors)), self.max_order)

    def __pow__(self, n: int) -> GroupElem:
        base = self if n >= 0 else self.inverse()
        out = GroupElem.identity(self.lattice, self.max_order)
        for _ in range(abs(n)):
            out = out * base
        return out

    def ad(self, x: QSeries, exponent: int = 1) -> QSeries:
        """``g^exponent x g^-exponent``."""
        if exponent not in (1, -1):
            raise ValueError("exponent must be +1 or -1")
        g = self if exponent == 1 else self.inverse()
        for f in reversed(g.factors):
            if f.kind == "ee":
                for j, p in f.coeffs:
                    x = _apply_ee(self.lattice, vscale(j, f.direction), p, 1, x)
            else:
                x = _apply_log(self.lattice, f, 1, x)
        return x

    def is_identity_on(self, probes: Sequence[Sequence[int]], max_order: int) -> bool:
        for q in probes:
            m = QSeries.monomial(self.lattice, q, 1, max_order)
            if self.ad(m) != m:
                return False
        return True

    def equals_on(self, other: GroupElem, probes: Sequence[Sequence[int]], max_order: int) -> bool:
        return (self * other.inverse()).is_identity_on(probes, max_order)

    def directions(self) -> list[Vec]:
        return [f.direction for f in self.factors]

    def single_ray(self) -> RayFactor:
        if len(self.factors) != 1:
            raise ValueError("element is not supported on a single ray")
        return self.factors[0]

    def log_terms(self, limit: int | None = None) -> dict[Vec, LaurentPoly]:
        """Coefficients of ``zhat^v`` in log g, for words of pairwise commuting factors."""
        for a in self.factors:
            for b in self.factors:
                if self.lattice.omega_num_pair(a.direction, b.direction):
                    raise ValueError("log coordinates need pairwise commuting factors")
        out: dict[Vec, LaurentPoly] = {}
        for f in self.factors:
            top = limit if limit is not None else (f.limit if f.kind == "log" else None)
            if top is None:
                top = self._default_limit(f)
            for n, c in f.log_coeffs(top).items():
                v = vscale(n, f.direction)
                out[v] = out.get(v, LaurentPoly.zero()) + c
        return {v: c for v, c in sorted(out.items()) if not c.is_zero()}

    def _default_limit(self, f: RayFactor) -> int:
        if self.max_order is None:
            raise ValueError("need an order bound for log coordinates")
        h = self.lattice.height(f.direction)
        m = Fraction(self.max_order + 1) / h
        top = m.numerator // m.denominator
        return top - 1 if Fraction(top) == m else top

    def ee_form(self) -> dict[Vec, dict[int, LaurentPoly]]:
        """EE-form coefficients per direction, for commuting factors."""
        out: dict[Vec, dict[int, LaurentPoly]] = {}
        for f in self.factors:
            ef = f.to_ee() if f.kind == "ee" else f.to_ee(f.limit if f.limit is not None else self._default_limit(f))
            slot = out.setdefault(f.direction, {})
            for j, p in ef.coeffs:
                slot[j] = slot.get(j, LaurentPoly.zero()) + p
        return out

    def __repr__(self) -> str:
        parts = []
        for f in self.factors:
            body = ", ".join(f"{j}: {c.to_text()}" for j, c in f.coeffs)
            parts.append(f"{f.kind}{list(f.direction)}{{{body}}}")
        return "GroupElem(" + " * ".join(parts) + ")"


def _split(lattice: QLattice, v: Sequence[int]) -> tuple[Vec, int]:
    v = as_vec(v)
    if not lattice.in_L0(v):
        raise ValueError(f"{v} is not in L0")
    if not lattice.in_cone(v) or not any(v):
        raise ValueError(f"{v} is not a nonzero element of the cone")
    return primitive(v), index(v)


def ee(lattice: QLattice, p: LaurentPoly | Coeff, v: Sequence[int], max_order: int | None = None) -> GroupElem:
    """``EE(p(t) z^v)``."""
    if not isinstance(p, LaurentPoly):
        p = LaurentPoly.const(p)
    d, g = _split(lattice, v)
    return GroupElem(lattice, [RayFactor.make(d, "ee", {g: -p})], max_order)


def psi(lattice: QLattice, v: Sequence[int], shift: int = 0, max_order: int | None = None) -> GroupElem:
    """``Psi_t(t^shift z^v)``; odd shifts are kept in log form."""
    d, g = _split(lattice, v)
    if shift % 2 == 0:
        return GroupElem(lattice, [RayFactor.make(d, "ee", {g: LaurentPoly.monomial(shift)})], max_order)
    if max_order is None:
        raise ValueError("odd shifts need a truncation order")
    h = lattice.height(v)
    top = int(Fraction(max_order + 1) / h)
    if Fraction(top) == Fraction(max_order + 1) / h:
        top -= 1
    log = {}
    for m in range(1, top + 1):
        sign = 1 if m % 2 else -1
        c = LaurentPoly.monomial(shift * m) * quantum_number(m * g) * sign
        log[m * g] = c.exact_div(quantum_number(m)) * Fraction(1, m)
    return GroupElem(lattice, [RayFactor.make(d, "log", log, top * g)], max_order)


# commutative plethystic exponential and logarithm


def _cmul(a: Mapping[Vec, LaurentPoly], b: Mapping[Vec, LaurentPoly], keep) -> dict[Vec, LaurentPoly]:
    out: dict[Vec, LaurentPoly] = {}
    for u, cu in a.items():
        for v, cv in b.items():
            w = vadd(u, v)
            if keep(w):
                out[w] = out[w] + cu * cv if w in out else cu * cv
    return {w: c for w, c in out.items() if not c.is_zero()}


def _adams_series(f: QSeries, k: int, keep) -> dict[Vec, LaurentPoly]:
    return {vscale(k, v): c.adams(k) for v, c in f._terms.items() if keep(vscale(k, v))}


def _commutative_setup(f: QSeries) -> tuple[QLattice, int, callable]:
    lat = f.lattice
    if f.base is None or any(f.base):
        raise ValueError("plethystic operations need a series truncated from base 0")
    k = f.max_order
    return lat, k, (lambda w: lat.height(w) < k + 1)


def pleth_exp(f: QSeries) -> QSeries:
    """``Exp_{-t}(f)`` for f without constant term, monomials treated as commuting."""
    lat, k, keep = _commutative_setup(f)
    zero = lat.zero()
    if not f.coeff(zero).is_zero():
        raise ValueError("the argument of Exp needs zero constant term")
    s: dict[Vec, LaurentPoly] = {}
    j = 1
    while True:
        ad = _adams_series(f, j, keep)
        if not ad:
            break
        for v, c in ad.items():
            s[v] = s.get(v, LaurentPoly.zero()) + c * Fraction(1, j)
        j += 1
    result = {zero: ONE}
    power = {zero: ONE}
    n = 1
    while True:
        power = _cmul(power, s, keep)
        if not power:
            break
        for v, c in power.items():
            result[v] = result.get(v, LaurentPoly.zero()) + c * Fraction(1, factorial(n))
        n += 1
    return QSeries(lat, result, zero, k)


def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    return -result if m > 1 else result


def pleth_log(f: QSeries) -> QSeries:
    """Inverse of :func:`pleth_exp`; f must have constant term 1."""
    lat, k, keep = _commutative_setup(f)
    zero = lat.zero()
    if f.coeff(zero) != ONE:
        raise ValueError("Log needs constant term 1")
    rest = {v: c for v, c in f._terms.items() if v != zero}
    log: dict[Vec, LaurentPoly] = {}
    power = {zero: ONE}
    n = 1
    while True:
        power = _cmul(power, rest, keep)
        if not power:
            break
        for v, c in power.items():
            log[v] = log.get(v, LaurentPoly.zero()) + c * Fraction((-1) ** (n + 1), n)
        n += 1
    log_series = QSeries(lat, log, zero, k)
    out: dict[Vec, LaurentPoly] = {}
    j = 1
    while True:
        ad = _adams_series(log_series, j, keep)
        if not ad:
            break
        mu = _mobius(j)
        if mu:
            for v, c in ad.items():
                out[v] = out.get(v, LaurentPoly.zero()) + c * Fraction(mu, j)
        j += 1
    return QSeries(lat, out, zero, k)


# classical limit


def classical_limit(x: QSeries | GroupElem | LaurentPoly):
    """Specialize ``t -> 1``.

    A series becomes a map exponent -> rational.  A group element becomes a
    list of ``(direction, coefficients of F(y))`` per factor, where the factor
    acts classically by ``z^q -> z^q F(z^v)^omega(v, q)``.
    """
    if isinstance(x, LaurentPoly):
        return x.at_one()
    if isinstance(x, QSeries):
        return {v: c.at_one() for v, c in x.items() if c.at_one() != 0}
    out = []
    for f in x.factors:
        ef = f.to_ee()
        top = x._default_limit(f) if x.max_order is not None else max(j for j, _ in ef.coeffs)
        out.append((f.direction, classical_function(ef.coeff_map, top)))
    return out


def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], limit: int) -> list[Fraction]:
    out = [Fraction(0)] * (limit + 1)
    for i, x in enumerate(a[: limit + 1]):
        if x:
            for j, y in enumerate(b[: limit + 1 - i]):
                out[i + j] += x * y
    return out


def series_binomial(a: Fraction, sign: int, step: int, limit: int) -> list[Fraction]:
    """Coefficients of ``(1 + sign*y^step)^a`` up to ``y^limit``."""
    out = [Fraction(0)] * (limit + 1)
    c = Fraction(1)
    k = 0
    while k * step <= limit:
        out[k * step] = c * sign**k
        c = c * (a - k) / (k + 1)
        k += 1
    return out


def classical_function(p_form: Mapping[int, LaurentPoly], limit: int) -> list[Fraction]:
    """``F(y) = prod_j G_j(y^j)^j`` with ``G = (1+y)^even(p_j)(1-y)^-odd(p_j)`` at t = 1."""
    out = [Fraction(1)] + [Fraction(0)] * limit
    for j, p in p_form.items():
        if j > limit:
            continue
        if not p.has_integer_exponents():
            raise ValueError("classical limit needs integer exponents")
        even = sum((c for e, c in p.items() if (e // p.denom) % 2 == 0), 0)
        odd = sum((c for e, c in p.items() if (e // p.denom) % 2), 0)
        out = series_mul(out, series_binomial(Fraction(even) * j, 1, j, limit), limit)
        out = series_mul(out, series_binomial(Fraction(-odd) * j, -1, j, limit), limit)
    return out


def classical_action(
    lattice: QLattice, direction: Vec, function: Sequence[Fraction], q: Sequence[int], limit: int
) -> dict[Vec, Fraction]:
    """``z^q F(z^v)^omega(v, q)`` truncated at ``y^limit``."""
    b = lattice.pair(direction, q)
    logs = _series_log(function, limit)
    powered = _series_exp([b * c for c in logs], limit)
    return {vadd(q, vscale(m, direction)): c for m, c in enumerate(powered) if c}


def _series_log(f: Sequence[Fraction], limit: int) -> list[Fraction]:
    if f[0] != 1:
        raise ValueError("series needs constant term 1")
    g = [Fraction(0)] + [Fraction(x) for x in list(f[1 : limit + 1]) + [0] * max(0, limit + 1 - len(f))]
    out = [Fraction(0)] * (limit + 1)
    power = [Fraction(1)] + [Fraction(0)] * limit
    for n in range(1, limit + 1):
        power = series_mul(power, g, limit)
        for i, x in enumerate(power):
            out[i] += x * Fraction((-1) ** (n + 1), n)
    return out


def _series_exp(f: Sequence[Fraction], limit: int) -> list[Fraction]:
    out = [Fraction(1)] + [Fraction(0)] * limit
    power = [Fraction(1)] + [Fraction(0)] * limit
    for n in range(1, limit + 1):
        power = series_mul(power, f, limit)
        for i, x in enumerate(power):
            out[i] += x / factorial(n)
    return out
