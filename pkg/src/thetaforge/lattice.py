"""Lattices with a rational skew form, a simplicial positive cone and a 2-plane chart."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

import sympy
from sympy.matrices.normalforms import hermite_normal_form

Vec = tuple[int, ...]
Point = tuple[Fraction, Fraction]


def as_vec(v: Iterable[int]) -> Vec:
    return tuple(int(x) for x in v)


def vadd(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c: int, a: Sequence[int]) -> Vec:
    return tuple(c * x for x in a)


def index(v: Sequence[int]) -> int:
    """gcd of the coordinates; rejects the zero vector."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise ValueError("index of the zero vector is undefined")
    return g


def primitive(v: Sequence[int]) -> Vec:
    g = index(v)
    return tuple(int(x) // g for x in v)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return sympy.Matrix([[sympy.Rational(x) for x in v] for v in vectors]).rank()


@dataclass(frozen=True)
class QLattice:
    """Lattice ``Z^rank`` with skew form ``omega = omega_num / D``.

    ``sigma_gens`` must be linearly independent; they generate the cone and
    define the order grading.  ``L0_basis`` spans the sublattice pairing
    integrally with everything.
    """

    rank: int
    D: int
    omega_num: tuple[tuple[int, ...], ...]
    sigma_gens: tuple[Vec, ...]
    L0_basis: tuple[Vec, ...] = field(default=())
    _left_inverse: tuple = field(default=((), 1), compare=False, repr=False)

    def __post_init__(self) -> None:
        r = self.rank
        if self.D < 1:
            raise ValueError("D must be positive")
        if len(self.omega_num) != r or any(len(row) != r for row in self.omega_num):
            raise ValueError("omega matrix has the wrong shape")
        for i in range(r):
            for j in range(r):
                if self.omega_num[i][j] != -self.omega_num[j][i]:
                    raise ValueError("omega is not skew-symmetric")
        gens = [as_vec(g) for g in self.sigma_gens]
        if any(len(g) != r for g in gens):
            raise ValueError("cone generator has the wrong length")
        if _rank(gens) != len(gens):
            raise ValueError("cone generators must be linearly independent")
        object.__setattr__(self, "sigma_gens", tuple(gens))
        if not self.L0_basis:
            object.__setattr__(self, "L0_basis", _integral_sublattice(self.omega_num, self.D))
        else:
            object.__setattr__(self, "L0_basis", tuple(as_vec(b) for b in self.L0_basis))
        for u in self.L0_basis:
            for j in range(r):
                e = tuple(int(i == j) for i in range(r))
                if self.omega_num_pair(u, e) % self.D:
                    raise ValueError(f"L0 basis vector {u} does not pair integrally")
        if gens:
            g = sympy.Matrix([[sympy.Rational(x) for x in v] for v in gens]).T
            left = (g.T * g).inv() * g.T
            den = 1
            for x in left:
                den = _lcm(den, int(x.q))
            num = tuple(tuple(int(x * den) for x in left.row(i)) for i in range(len(gens)))
            object.__setattr__(self, "_left_inverse", (num, den))

    @classmethod
    def from_omega(
        cls,
        omega: Sequence[Sequence[int | Fraction]],
        sigma_gens: Sequence[Sequence[int]],
        L0_basis: Sequence[Sequence[int]] = (),
    ) -> QLattice:
        fr = [[Fraction(x) for x in row] for row in omega]
        D = 1
        for row in fr:
            for x in row:
                D = _lcm(D, x.denominator)
        num = tuple(tuple(int(x * D) for x in row) for row in fr)
        return cls(len(fr), D, num, tuple(as_vec(g) for g in sigma_gens), tuple(as_vec(b) for b in L0_basis))

    @classmethod
    def standard(cls, n: int | Fraction = 1) -> QLattice:
        """Rank 2 with ``omega(e1, e2) = n`` and cone spanned by e1, e2."""
        return cls.from_omega([[0, n], [-n, 0]], [(1, 0), (0, 1)])

    # pairing

    def omega_num_pair(self, a: Sequence[int], b: Sequence[int]) -> int:
        if len(a) != self.rank or len(b) != self.rank:
            raise ValueError("dimension mismatch")
        total = 0
        for i, ai in enumerate(a):
            if ai:
                row = self.omega_num[i]
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * row[j] * bj
        return total

    def pair(self, a: Sequence, b: Sequence) -> Fraction:
        """Exact ``omega(a, b)``; accepts rational vectors."""
        if len(a) != self.rank or len(b) != self.rank:
            raise ValueError("dimension mismatch")
        if all(type(x) is int for x in a) and all(type(x) is int for x in b):
            return Fraction(self.omega_num_pair(a, b), self.D)
        total = Fraction(0)
        for i, ai in enumerate(a):
            if ai:
                row = self.omega_num[i]
                for j, bj in enumerate(b):
                    if bj:
                        total += Fraction(ai) * row[j] * Fraction(bj)
        return total / self.D

    def omega_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.D) for x in row] for row in self.omega_num]

    # cone and order

    def _int_coords(self, v: Sequence[int]) -> list[int] | None:
        """Numerators of the cone coordinates of an integer vector over ``_left_inverse[1]``."""
        num, den = self._left_inverse
        ints = [sum(c * x for c, x in zip(row, v)) for row in num]
        if len(self.sigma_gens) < self.rank:
            for i in range(self.rank):
                if sum(c * g[i] for c, g in zip(ints, self.sigma_gens)) != v[i] * den:
                    return None
        return ints

    def cone_coords(self, v: Sequence) -> tuple[Fraction, ...] | None:
        """Coordinates of v in the cone generators, or None if v is outside their span."""
        num, den = self._left_inverse
        if all(type(x) is int for x in v):
            ints = self._int_coords(v)
            return None if ints is None else tuple(Fraction(x, den) for x in ints)
        coords = tuple(sum((c * Fraction(x) for c, x in zip(row, v)), Fraction(0)) / den for row in num)
        back = [sum((c * g[i] for c, g in zip(coords, self.sigma_gens)), Fraction(0)) for i in range(self.rank)]
        if any(b != Fraction(x) for b, x in zip(back, v)):
            return None
        return coords

    def in_cone(self, v: Sequence) -> bool:
        if all(type(x) is int for x in v):
            ints = self._int_coords(v)
            return ints is not None and all(x >= 0 for x in ints)
        c = self.cone_coords(v)
        return c is not None and all(x >= 0 for x in c)

    def height_parts(self, v: Sequence[int]) -> tuple[int, int]:
        """``(numerator, denominator)`` of the height of an integer vector, unreduced."""
        ints = self._int_coords(v)
        if ints is None:
            raise ValueError(f"{tuple(v)} is not in the span of the cone generators")
        return sum(ints), self._left_inverse[1]

    def height(self, v: Sequence) -> Fraction:
        """Coordinate sum of v in the cone generators (v must be in their span)."""
        if all(type(x) is int for x in v):
            return Fraction(*self.height_parts(v))
        c = self.cone_coords(v)
        if c is None:
            raise ValueError(f"{tuple(v)} is not in the span of the cone generators")
        return sum(c, Fraction(0))

    def order(self, v: Sequence[int]) -> int:
        """Number of generator steps needed to reach v: floor of the coordinate sum."""
        if all(type(x) is int for x in v):
            ints = self._int_coords(v)
            if ints is None or any(x < 0 for x in ints):
                raise ValueError(f"{tuple(v)} is not in the cone")
            return sum(ints) // self._left_inverse[1]
        c = self.cone_coords(v)
        if c is None or any(x < 0 for x in c):
            raise ValueError(f"{tuple(v)} is not in the cone")
        s = sum(c, Fraction(0))
        return s.numerator // s.denominator

    def in_L0(self, v: Sequence[int]) -> bool:
        return all(
            self.omega_num_pair(v, tuple(int(i == j) for i in range(self.rank))) % self.D == 0
            for j in range(self.rank)
        )

    def zero(self) -> Vec:
        return (0,) * self.rank

    # serialization

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "D": self.D,
            "omega_numerators": [list(r) for r in self.omega_num],
            "sigma_gens": [list(g) for g in self.sigma_gens],
            "L0_basis": [list(b) for b in self.L0_basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> QLattice:
        return cls(
            int(data["rank"]),
            int(data.get("D", 1)),
            tuple(tuple(int(x) for x in row) for row in data["omega_numerators"]),
            tuple(as_vec(g) for g in data["sigma_gens"]),
            tuple(as_vec(b) for b in data.get("L0_basis", ())),
        )


def _integral_sublattice(omega_num: Sequence[Sequence[int]], D: int) -> tuple[Vec, ...]:
    r = len(omega_num)
    if D == 1:
        return tuple(tuple(int(i == j) for i in range(r)) for j in range(r))
    gens = [tuple(D * int(i == j) for i in range(r)) for j in range(r)]
    for u in itertools.product(range(D), repeat=r):
        if any(u) and all(sum(u[i] * omega_num[i][j] for i in range(r)) % D == 0 for j in range(r)):
            gens.append(u)
    h = hermite_normal_form(sympy.Matrix(gens).T)
    cols = [tuple(int(x) for x in h.col(i)) for i in range(h.cols)]
    return tuple(c for c in cols if any(c))


# plane geometry

def cross(a: Sequence, b: Sequence) -> Fraction:
    x = a[0] * b[1] - a[1] * b[0]
    return x if type(x) is Fraction else Fraction(x)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return Fraction(a[0] * b[0] + a[1] * b[1])


def rot90(a: Sequence) -> Point:
    return (-Fraction(a[1]), Fraction(a[0]))


def _half(a: Sequence) -> int:
    return 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1


def angle_cmp(a: Sequence, b: Sequence) -> int:
    """Compare the angles of nonzero plane vectors in ``[0, 2*pi)``."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


angle_key = cmp_to_key(angle_cmp)


def same_direction(a: Sequence, b: Sequence) -> bool:
    return cross(a, b) == 0 and dot(a, b) > 0


def rotate_to(v: Sequence, base: Sequence) -> Point:
    """v in the frame whose first axis is ``base``; angles are then measured from base."""
    return (dot(v, base), cross(base, v))


def canonical_ray(v: Sequence) -> tuple[int, int]:
    """Primitive integer representative of the ray through a rational plane vector."""
    fr = [Fraction(x) for x in v]
    if fr[0] == 0 and fr[1] == 0:
        raise ValueError("zero vector has no ray")
    den = _lcm(fr[0].denominator, fr[1].denominator)
    a, b = int(fr[0] * den), int(fr[1] * den)
    g = gcd(a, b)
    return (a // g, b // g)


@dataclass(frozen=True)
class PlaneChart:
    """Coordinates ``phi(x) = (omega(v1, x), omega(v2, x))`` on a rank-2 reduction.

    A wall with direction ``w = a*v1 + b*v2`` lies on the line
    ``a*y1 + b*y2 = 0`` and its outgoing ray points along ``phi(-w)``.
    """

    lattice: QLattice
    v1: Vec
    v2: Vec

    def __post_init__(self) -> None:
        if self.n == 0:
            raise ValueError("omega vanishes on the chosen plane")

    @property
    def n(self) -> Fraction:
        return self.lattice.pair(self.v1, self.v2)

    def phi(self, x: Sequence) -> Point:
        return (self.lattice.pair(self.v1, x), self.lattice.pair(self.v2, x))

    def plane_coords(self, w: Sequence) -> tuple[Fraction, Fraction]:
        """(a, b) with ``w = a*v1 + b*v2`` for w in the plane."""
        y = self.phi(w)
        a, b = -y[1] / self.n, y[0] / self.n
        back = tuple(a * p + b * q for p, q in zip(self.v1, self.v2))
        if any(Fraction(x) != y_ for x, y_ in zip(w, back)):
            raise ValueError(f"{tuple(w)} is not in the plane of the chart")
        return a, b

    def functional(self, w: Sequence) -> tuple[Fraction, Fraction]:
        """Coefficients (a, b) of ``y -> omega(w, x)`` where ``y = phi(x)``."""
        a, b = self.plane_coords(w)
        return a, b

    def pair_chart(self, w: Sequence, y: Sequence) -> Fraction:
        a, b = self.functional(w)
        return a * Fraction(y[0]) + b * Fraction(y[1])

    def outgoing_ray(self, w: Sequence) -> tuple[int, int]:
        a, b = self.plane_coords(w)
        return canonical_ray((-b * self.n, a * self.n))

    def crossing_sign(self, w: Sequence, velocity: Sequence) -> int:
        """Sign of ``omega(w, -gamma')`` for a path with chart velocity ``gamma'``."""
        val = -self.pair_chart(w, velocity)
        return (val > 0) - (val < 0)

    def to_json(self) -> dict:
        return {"v1": list(self.v1), "v2": list(self.v2), "n": str(self.n)}


def plane_reduce(lattice: QLattice, dirs: Sequence[Sequence[int]]) -> PlaneChart:
    vecs = [as_vec(d) for d in dirs]
    if _rank(vecs) != 2:
        raise ValueError("directions must span a 2-plane")
    v1 = vecs[0]
    v2 = next(v for v in vecs[1:] if _rank([v1, v]) == 2)
    if lattice.pair(v1, v2) == 0:
        raise ValueError("omega is degenerate on the span of the directions")
    return PlaneChart(lattice, v1, v2)
