"""Broken lines, theta functions and structure constants for 2-plane scattering diagrams.

Lines are found by tracing backward from the endpoint: a final monomial v is
followed along ``+phi(v)``; at each wall hit the line either passes straight
or came from an earlier monomial ``v - m*w`` through a bend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import Point, Vec, angle_key, as_vec, cross, rot90, rotate_to, same_direction, vadd, vscale, vsub
from .laurent import LaurentPoly
from .qtorus import QSeries, qmul, ray_coefficient
from .scattering import ChartRay, ScatDiagram


class NonGenericPointError(ValueError):
    """The endpoint lies on a wall line or makes a segment pass through the origin."""


@dataclass(frozen=True)
class Segment:
    monomial: Vec
    coeff: LaurentPoly
    wall: tuple[int, int] | None  # ray crossed at the start of the segment


@dataclass(frozen=True)
class BrokenLine:
    endpoint: Point
    segments: tuple[Segment, ...]

    @property
    def final_monomial(self) -> Vec:
        return self.segments[-1].monomial

    @property
    def final_coeff(self) -> LaurentPoly:
        return self.segments[-1].coeff

    @property
    def bends(self) -> int:
        return len(self.segments) - 1


@dataclass(frozen=True)
class ThetaExpansion:
    p: Vec
    Q: Point
    order: int
    terms: QSeries

    def is_pointed(self) -> bool:
        lat = self.terms.lattice
        if self.terms.coeff(self.p) != LaurentPoly.one():
            return False
        return all(v == self.p or lat.height(vsub(v, self.p)) > 0 for v in self.terms.terms)

    def to_json(self) -> dict:
        return {
            "p": list(self.p),
            "Q": [str(x) for x in self.Q],
            "order": self.order,
            "terms": self.terms.to_json()["terms"],
        }


def as_point(Q: Sequence) -> Point:
    return (Fraction(Q[0]), Fraction(Q[1]))


def _scaled(v: Sequence) -> tuple[tuple[int, int], int]:
    """``(den * v, den)`` with den the least positive integer making ``den * v`` integral."""
    den = math.lcm(*(Fraction(x).denominator for x in v))
    return (int(v[0] * den), int(v[1] * den)), den


def _hits(rays: Sequence[ChartRay], start: Point, direction: Point, skip: tuple[int, int] | None):
    """Rays met by ``start + s*direction`` for s > 0, ordered by s."""
    # positive rescaling keeps every sign test and the order of the hits
    (st, a), (dr, _) = _scaled(start), _scaled(direction)
    base = st[0] * dr[1] - st[1] * dr[0]
    found = []
    for cr in rays:
        if cr.ray == skip:
            continue
        r0, r1 = cr.ray
        denom = dr[0] * r1 - dr[1] * r0
        if denom == 0 or base == 0:
            continue
        num = st[1] * r0 - st[0] * r1
        if num != 0 and (num > 0) == (denom > 0) and (base > 0) == (denom < 0):
            found.append((Fraction(num, denom), cr))
    found.sort(key=lambda h: h[0])
    return [(s, ((st[0] + s * dr[0]) / a, (st[1] + s * dr[1]) / a), cr) for s, cr in found]


class _Tracer:
    def __init__(self, d: ScatDiagram, k: int) -> None:
        if k > d.max_order:
            raise ValueError(f"order {k} exceeds the diagram order {d.max_order}")
        self.d = d
        self.k = k
        self.lat = d.lattice
        self.rays = d.rays()

    def check_point(self, Q: Point) -> None:
        if Q == (0, 0):
            raise NonGenericPointError("endpoint at the origin")
        for cr in self.rays:
            if cross(Q, cr.ray) == 0:
                raise NonGenericPointError(f"endpoint {Q} lies on the wall line through {cr.ray}")

    def candidates(self, p: Vec) -> list[Vec]:
        """Final monomials ``p + a*v1 + b*v2`` with order at most k."""
        v1, v2 = self.d.chart.v1, self.d.chart.v2
        out = []
        total = 0
        while True:
            found = False
            for a in range(total + 1):
                u = vadd(vscale(a, v1), vscale(total - a, v2))
                if self.lat.order(u) <= self.k:
                    found = True
                    out.append(vadd(p, u))
            if not found:
                return out
            total += 1

    def bend_coeff(self, cr: ChartRay, before: Vec, after: Vec) -> LaurentPoly:
        """Coefficient of ``z^after`` in the wall's action on ``z^before``."""
        b = self.lat.pair(cr.direction, before)
        f = cr.factor if b > 0 else cr.factor.inverse()
        diff = vsub(after, before)
        m = next(x // y for x, y in zip(diff, cr.direction) if y)
        return ray_coefficient(f, b, m)

    def lines(self, p: Vec, Q: Point) -> list[BrokenLine]:
        self.check_point(Q)
        phi = self.d.chart.phi
        if phi(p) == (0, 0):
            return [BrokenLine(Q, (Segment(p, LaurentPoly.one(), None),))]
        found: list[BrokenLine] = []

        def accept(path: list[tuple[Vec, tuple[int, int] | None, ChartRay | None]]) -> None:
            segs = []
            running = LaurentPoly.one()
            prev = None
            for mono, wall, cr in path:
                if cr is not None:
                    running = running * self.bend_coeff(cr, prev, mono)
                segs.append(Segment(mono, running, wall))
                prev = mono
            found.append(BrokenLine(Q, tuple(segs)))

        def bends(v: Vec, cr: ChartRay):
            if self.lat.pair(cr.direction, v) == 0:
                return
            m = 1
            while True:
                prev = vsub(v, vscale(m, cr.direction))
                if not self.lat.in_cone(vsub(prev, p)):
                    return
                if not self.bend_coeff(cr, prev, v).is_zero():
                    yield prev
                m += 1

        def trace(v: Vec, start: Point, skip, later: list) -> None:
            # later: segments after this one, as (monomial, wall ray, chart ray)
            direction = phi(v)
            if direction == (0, 0):
                return
            hits = _hits(self.rays, start, direction, skip)
            for _, point, cr in hits:
                for prev in bends(v, cr):
                    trace(prev, point, cr.ray, [(v, cr.ray, cr)] + later)
            if v == p:
                accept([(p, None, None)] + later)

        cands = self.candidates(p)
        for v in cands:
            if same_direction(phi(v), (-Q[0], -Q[1])):
                # a perturbed endpoint would let this segment bend around the origin
                raise NonGenericPointError(f"the final segment for {v} passes through the origin")
        for v in cands:
            trace(v, Q, None, [])
        return found


def enumerate_broken_lines(d: ScatDiagram, p: Sequence[int], Q: Sequence, k: int | None = None) -> list[BrokenLine]:
    return _Tracer(d, d.max_order if k is None else k).lines(as_vec(p), as_point(Q))


def theta(d: ScatDiagram, p: Sequence[int], Q: Sequence, k: int | None = None) -> ThetaExpansion:
    k = d.max_order if k is None else k
    p, Q = as_vec(p), as_point(Q)
    terms: dict[Vec, LaurentPoly] = {}
    for line in _Tracer(d, k).lines(p, Q):
        v = line.final_monomial
        terms[v] = terms[v] + line.final_coeff if v in terms else line.final_coeff
    return ThetaExpansion(p, Q, k, QSeries(d.lattice, terms, p, k))


def transport(d: ScatDiagram, th: ThetaExpansion, Q2: Sequence) -> ThetaExpansion:
    """Move a theta expansion to the chart at Q2 along the counterclockwise arc."""
    Q2 = as_point(Q2)
    g = d.path_product(th.Q, Q2)
    return ThetaExpansion(th.p, Q2, th.order, g.ad(th.terms))


def point_near(d: ScatDiagram, p: Sequence[int], k: int | None = None, avoid: Sequence[Sequence[int]] = ()) -> Point:
    """A generic chart point just counterclockwise of ``phi(p)``.

    No ray of d lies strictly between ``phi(p)`` and the point, and the point is
    off every wall line and every direction ``-phi(v)`` for v in ``avoid``.
    """
    tr = _Tracer(d, d.max_order if k is None else k)
    bad = [tuple(-x for x in d.chart.phi(v)) for v in avoid]
    return _point_near(tr, d.chart.phi(p), bad)


def _point_near(tr: _Tracer, y: Point, bad: Sequence[Point]) -> Point:
    if y == (0, 0):
        y = (Fraction(1), Fraction(0))
    after = [cr.ray for cr in tr.rays if not same_direction(cr.ray, y)]
    nxt = None
    if after:
        nxt = min(after, key=lambda r: angle_key(rotate_to(r, y)))
    step = nxt if nxt is not None and cross(y, nxt) > 0 else rot90(y)
    eps = Fraction(1)
    for _ in range(200):
        Q = (y[0] + eps * step[0], y[1] + eps * step[1])
        if all(cross(Q, cr.ray) != 0 for cr in tr.rays) and not any(
            b != (0, 0) and same_direction(b, Q) for b in bad
        ):
            return Q
        eps /= 2
    raise NonGenericPointError(f"no generic point found near {tuple(y)}")


def theta_product(a: ThetaExpansion, b: ThetaExpansion) -> QSeries:
    if a.Q != b.Q:
        raise ValueError("theta functions expanded in different charts")
    return qmul(a.terms, b.terms)


def structure_constants(
    d: ScatDiagram, p1: Sequence[int], p2: Sequence[int], k: int | None = None
) -> dict[Vec, LaurentPoly]:
    """``alpha(p1, p2; p)`` for every p with ``order(p - p1 - p2) <= k``.

    Each alpha is the ``z^p`` coefficient of ``theta_p1 * theta_p2`` in a chart
    just counterclockwise of ``phi(p)``.  Products are shared between targets
    whose charts fall in the same chamber.
    """
    k = d.max_order if k is None else k
    p1, p2 = as_vec(p1), as_vec(p2)
    tr = _Tracer(d, k)
    targets = tr.candidates(vadd(p1, p2))
    avoid = set(tr.candidates(p1) + tr.candidates(p2))
    out: dict[Vec, LaurentPoly] = {}
    # theta expansions only change across walls, so one product per chamber suffices
    cache: dict[tuple[bool, ...], QSeries] = {}
    bad = [tuple(-x for x in d.chart.phi(v)) for v in avoid]
    for p in targets:
        Q = _point_near(tr, d.chart.phi(p), bad)
        key = tuple(cross(Q, cr.ray) > 0 for cr in tr.rays)
        if key not in cache:
            cache[key] = theta_product(theta(d, p1, Q, k), theta(d, p2, Q, k))
        c = cache[key].coeff(p)
        if not c.is_zero():
            out[p] = c
    return dict(sorted(out.items()))


def expand_in_theta_basis(d: ScatDiagram, f: QSeries, Q: Sequence, k: int | None = None) -> dict[Vec, LaurentPoly]:
    """Triangular change of basis from monomials to theta functions in the chart at Q."""
    if f.base is None:
        raise ValueError("expansion needs a series truncated from a base point")
    Q = as_point(Q)
    k = f.max_order if k is None else k
    lat = f.lattice
    rest = f.truncate(k)
    out: dict[Vec, LaurentPoly] = {}
    while not rest.is_zero():
        v = min(rest.terms, key=lambda u: (lat.height(vsub(u, f.base)), u))
        c = rest.coeff(v)
        h = lat.height(vsub(v, f.base))
        room = k + 1 - h
        order = -(-room.numerator // room.denominator) - 1
        th = theta(d, v, Q, order)
        shifted = QSeries(lat, th.terms.terms, f.base, k)
        rest = rest - shifted.scale(c)
        out[v] = c
    return dict(sorted(out.items()))
