"""Seeds, mutations, compatible forms and the cluster scattering diagrams built from them.

Vectors of N are written in the initial basis of N and vectors of M in its
dual basis, so the pairing <n, m> is the plain dot product.  A seed keeps
the exchange form in initial coordinates plus the current basis e_i.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

import sympy

from .lattice import QLattice, Vec, as_vec, canonical_ray, index, primitive, same_direction, vadd, vscale
from .laurent import ONE
from .qtorus import GroupElem, QSeries, RayFactor
from .brokenlines import NonGenericPointError, _Tracer, enumerate_broken_lines, theta
from .scattering import ScatDiagram, complete, mutate_diagram

Matrix = tuple[tuple[Fraction, ...], ...]


def _frac_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _form(mat: Matrix, a: Sequence, b: Sequence) -> Fraction:
    return sum((a[i] * mat[i][j] * b[j] for i in range(len(a)) if a[i] for j in range(len(b)) if b[j]), Fraction(0))


def _to_int_vec(v: Sequence[Fraction]) -> Vec:
    if any(Fraction(x).denominator != 1 for x in v):
        raise ValueError(f"{tuple(v)} is not integral")
    return tuple(int(x) for x in v)


def _sym(mat: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(str(Fraction(x))) for x in row] for row in mat])


def _from_sym(m: sympy.Matrix) -> Matrix:
    return tuple(tuple(Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.cols)) for i in range(m.rows))


@dataclass(frozen=True)
class Seed:
    """Skew-symmetric seed with optional compatible form Lambda on M.

    ``B0`` and ``Lambda`` are fixed forms in initial coordinates; ``basis``
    holds the current vectors e_i.  Indices are 0-based.
    """

    n: int
    B0: Matrix
    frozen: frozenset[int] = frozenset()
    basis: tuple[Vec, ...] = ()
    Lambda: Matrix | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "B0", _frac_matrix(self.B0))
        object.__setattr__(self, "frozen", frozenset(self.frozen))
        if not self.basis:
            object.__setattr__(self, "basis", tuple(tuple(int(i == j) for j in range(self.n)) for i in range(self.n)))
        if self.Lambda is not None:
            object.__setattr__(self, "Lambda", _frac_matrix(self.Lambda))
        n = self.n
        if len(self.B0) != n or any(len(r) != n for r in self.B0):
            raise ValueError("B has the wrong shape")
        for i in range(n):
            for j in range(n):
                if self.B0[i][j] != -self.B0[j][i]:
                    raise ValueError("B is not skew-symmetric")
        for i in range(n):
            for j in range(n):
                if not (i in self.frozen and j in self.frozen) and self.B(self.e(i), self.e(j)).denominator != 1:
                    raise ValueError("B(e_i, e_j) must be an integer unless both indices are frozen")
        if self.Lambda is not None:
            for i in range(n):
                for j in range(n):
                    if self.Lambda[i][j] != -self.Lambda[j][i]:
                        raise ValueError("Lambda is not skew-symmetric")

    @classmethod
    def from_matrix(cls, B: Sequence[Sequence], frozen: Sequence[int] = (), Lambda=None) -> Seed:
        return cls(len(B), _frac_matrix(B), frozenset(frozen), (), Lambda)

    @property
    def unfrozen(self) -> list[int]:
        return [i for i in range(self.n) if i not in self.frozen]

    def e(self, i: int) -> Vec:
        return self.basis[i]

    def B(self, a: Sequence, b: Sequence) -> Fraction:
        return _form(self.B0, a, b)

    def matrix(self) -> Matrix:
        """Current exchange matrix ``B(e_i, e_j)``."""
        return tuple(tuple(self.B(self.e(i), self.e(j)) for j in range(self.n)) for i in range(self.n))

    def B1(self, nvec: Sequence) -> Vec:
        """``B1(n) = B(n, .)`` as a vector of M."""
        return _to_int_vec([sum((nvec[i] * self.B0[i][j] for i in range(self.n)), Fraction(0)) for j in range(self.n)])

    def v(self, i: int) -> Vec:
        return self.B1(self.e(i))

    def dual_basis(self) -> tuple[Vec, ...]:
        inv = _sym(self.basis).inv().T
        return tuple(_to_int_vec(r) for r in _from_sym(inv))

    def pairing(self, nvec: Sequence, m: Sequence) -> Fraction:
        return Fraction(_dot(nvec, m))

    def mutate(self, j: int) -> Seed:
        if j in self.frozen:
            raise ValueError(f"index {j} is frozen")
        if not 0 <= j < self.n:
            raise ValueError(f"index {j} out of range")
        ej = self.e(j)
        new = []
        for i in range(self.n):
            if i == j:
                new.append(vscale(-1, ej))
            else:
                c = max(Fraction(0), self.B(self.e(i), ej))
                new.append(vadd(self.e(i), vscale(int(c), ej)))
        return Seed(self.n, self.B0, self.frozen, tuple(new), self.Lambda)

    def mutate_seq(self, jseq: Sequence[int]) -> Seed:
        s = self
        for j in jseq:
            s = s.mutate(j)
        return s

    def wall_directions(self, flavor: str = "a") -> list[Vec]:
        """Directions of the initial walls: ``B1(e_i)`` for A, ``e_i`` for X."""
        if flavor == "a":
            return [self.v(i) for i in self.unfrozen]
        if flavor == "x":
            return [self.e(i) for i in self.unfrozen]
        raise ValueError(f"unknown flavor {flavor!r}")

    def tropical_step(self, j: int, flavor: str = "a") -> tuple[tuple[Fraction, ...], Vec]:
        """``(c, u)`` with ``T_j(x) = x + max(0, c.x) u`` on M (A) or N (X)."""
        if j in self.frozen:
            raise ValueError(f"index {j} is frozen")
        if flavor == "a":
            return tuple(Fraction(x) for x in self.e(j)), self.v(j)
        if flavor == "x":
            ej = self.e(j)
            return tuple(sum((self.B0[i][c] * ej[c] for c in range(self.n)), Fraction(0)) for i in range(self.n)), ej
        raise ValueError(f"unknown flavor {flavor!r}")

    def with_lambda(self, Lambda: Matrix) -> Seed:
        return Seed(self.n, self.B0, self.frozen, self.basis, Lambda)

    def is_compatible(self, Lambda: Matrix | None = None) -> bool:
        lam = self.Lambda if Lambda is None else Lambda
        if lam is None:
            return False
        for i in self.unfrozen:
            vi = self.v(i)
            for j in range(self.n):
                unit = [int(j == x) for x in range(self.n)]
                if _form(lam, unit, vi) != self.e(i)[j]:
                    return False
        return True

    def Lambda_form(self, a: Sequence, b: Sequence) -> Fraction:
        if self.Lambda is None:
            raise ValueError("seed has no compatible form")
        return _form(self.Lambda, a, b)

    def same_seed(self, other: Seed) -> bool:
        return self.basis == other.basis and self.B0 == other.B0 and self.frozen == other.frozen

    def to_json(self) -> dict:
        D = 1
        for row in self.B0:
            for x in row:
                D = D * x.denominator // _gcd(D, x.denominator)
        out = {
            "rank": self.n,
            "frozen": sorted(self.frozen),
            "B_numerators": [[int(x * D) for x in row] for row in self.B0],
            "D": D,
            "basis": [list(b) for b in self.basis],
        }
        if self.Lambda is not None:
            out["lambda"] = [[str(x) for x in row] for row in self.Lambda]
        return out

    @classmethod
    def from_json(cls, data: dict) -> Seed:
        D = int(data.get("D", 1))
        B = [[Fraction(int(x), D) for x in row] for row in data["B_numerators"]]
        lam = data.get("lambda")
        lam = _frac_matrix([[Fraction(x) for x in row] for row in lam]) if lam is not None else None
        basis = tuple(as_vec(b) for b in data.get("basis", ()))
        return cls(int(data["rank"]), _frac_matrix(B), frozenset(int(i) for i in data.get("frozen", ())), basis, lam)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def mutate_seed(s: Seed, j: int) -> Seed:
    return s.mutate(j)


def find_lambda(s: Seed) -> Matrix | None:
    """A skew form with ``Lambda(., B1(e_i)) = e_i`` for unfrozen i, or None if none exists.

    Free parameters of the solution space are set to zero.
    """
    n = s.n
    syms = {}
    for i in range(n):
        for j in range(i + 1, n):
            syms[(i, j)] = sympy.Symbol(f"l_{i}_{j}")

    def entry(i, j):
        if i == j:
            return 0
        return syms[(i, j)] if i < j else -syms[(j, i)]

    eqs = []
    for i in s.unfrozen:
        vi = s.v(i)
        for r in range(n):
            eqs.append(sum(entry(r, c) * vi[c] for c in range(n)) - s.e(i)[r])
    unknowns = list(syms.values())
    if not unknowns:
        return None if eqs and any(e != 0 for e in eqs) else tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    sol = sympy.linsolve(eqs, unknowns)
    if not sol:
        return None
    (values,) = list(sol)
    subs = {u: 0 for u in unknowns}
    vals = [sympy.nsimplify(v.subs(subs)) for v in values]
    lookup = dict(zip(unknowns, vals))
    out = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), sym in syms.items():
        x = sympy.Rational(lookup[sym])
        out[i][j] = Fraction(int(x.p), int(x.q))
        out[j][i] = -out[i][j]
    return tuple(tuple(r) for r in out)


def b1_kernel(s: Seed) -> list[Vec]:
    """Kernel of B1 on the span of unfrozen e_i; nonempty exactly when no compatible form exists."""
    cols = [s.v(i) for i in s.unfrozen]
    if not cols:
        return []
    m = sympy.Matrix(cols).T
    out = []
    for vec in m.nullspace():
        den = 1
        for x in vec:
            den = den * int(sympy.Rational(x).q) // _gcd(den, int(sympy.Rational(x).q))
        coeffs = [int(x * den) for x in vec]
        nvec = [0] * s.n
        for c, i in zip(coeffs, s.unfrozen):
            nvec = [a + c * b for a, b in zip(nvec, s.e(i))]
        out.append(tuple(nvec))
    return out


def principal(s: Seed, mode: str = "lambda_prin") -> Seed:
    """Principal-coefficient seed on ``N + M`` with the second copy frozen.

    ``mode="lambda_prin"`` uses ``Lambda(B1 a, B1 b) = B(a, b)``;
    ``mode="rho"`` pulls back the seed's Lambda along ``(m, n) -> m``.
    """
    n = s.n
    B = s.matrix()
    Bp = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            Bp[i][j] = B[i][j]
        Bp[i][n + i] = Fraction(1)
        Bp[n + i][i] = Fraction(-1)
    frozen = frozenset(s.frozen) | frozenset(range(n, 2 * n))
    if mode == "lambda_prin":
        b1 = _sym(Bp).T
        inv = b1.inv()
        lam = _from_sym(inv.T * _sym(Bp) * inv)
    elif mode == "rho":
        if s.Lambda is None:
            raise ValueError("the rho pullback needs a seed with Lambda")
        # Lambda in the current dual basis of the seed
        f = s.dual_basis()
        small = [[_form(s.Lambda, f[i], f[j]) for j in range(n)] for i in range(n)]
        lam = tuple(
            tuple(small[i][j] if i < n and j < n else Fraction(0) for j in range(2 * n)) for i in range(2 * n)
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Seed(2 * n, _frac_matrix(Bp), frozen, (), lam)


def xi(s: Seed, nvec: Sequence[int]) -> Vec:
    """``n -> (B1(n), n)`` into ``M + N``, in the current coordinates of s."""
    B = s.matrix()
    b1 = [sum(nvec[i] * B[i][j] for i in range(s.n)) for j in range(s.n)]
    return _to_int_vec(list(b1) + list(nvec))


def rho(s: Seed, x: Sequence[int]) -> Vec:
    return as_vec(x[: s.n])


# diagrams


def cluster_lattice(s: Seed, flavor: str = "a") -> tuple[QLattice, list[Vec], Seed]:
    """Lattice, initial wall directions and the seed actually used for a flavor."""
    if len(s.unfrozen) > 2:
        raise ValueError("diagrams are limited to two unfrozen indices")
    if flavor == "aprin":
        return cluster_lattice(principal(s), "a")
    if flavor == "a":
        if s.Lambda is None:
            lam = find_lambda(s)
            if lam is None:
                raise ValueError(f"no compatible form: B1 has kernel {b1_kernel(s)}")
            s = s.with_lambda(lam)
        if not s.is_compatible():
            raise ValueError("Lambda is not compatible with B")
        dirs = s.wall_directions("a")
        return QLattice.from_omega(s.Lambda, dirs), dirs, s
    if flavor == "x":
        dirs = s.wall_directions("x")
        return QLattice.from_omega(s.B0, dirs), dirs, s
    raise ValueError(f"unknown flavor {flavor!r}")


def build_cluster_diagram(s: Seed, flavor: str = "a", k: int = 6) -> ScatDiagram:
    lat, dirs, used = cluster_lattice(s, flavor)
    initial = ScatDiagram.from_inputs(lat, [(v, ONE) for v in dirs], k, seed=used)
    out = complete(initial, k)
    out.flavor = "x" if flavor == "x" else "a"
    return out


# piecewise-linear maps


def T_step(s: Seed, j: int, m: Sequence, inverse: bool = False) -> tuple:
    c = Fraction(_dot(s.e(j), m))
    if c < 0:
        return tuple(m)
    vj = s.v(j)
    sign = -1 if inverse else 1
    return tuple(x + sign * c * y for x, y in zip(m, vj))


def T_map(s: Seed, jseq: Sequence[int], m: Sequence) -> tuple:
    """``T_jseq`` on M (A-flavor)."""
    for j in jseq:
        m = T_step(s, j, m)
        s = s.mutate(j)
    return tuple(m)


def T_inverse(s: Seed, jseq: Sequence[int], m: Sequence) -> tuple:
    seeds = [s]
    for j in jseq:
        seeds.append(seeds[-1].mutate(j))
    for j, sj in zip(reversed(jseq), reversed(seeds[:-1])):
        m = T_step(sj, j, m, inverse=True)
    return tuple(m)


def T_map_x(s: Seed, jseq: Sequence[int], nvec: Sequence) -> tuple:
    """``T^X_jseq`` on N."""
    for j in jseq:
        ej = s.e(j)
        c = s.B(nvec, ej)
        if c >= 0:
            nvec = tuple(x + c * y for x, y in zip(nvec, ej))
        s = s.mutate(j)
    return tuple(nvec)


def psi_linear(s: Seed, jseq: Sequence[int], Q: Sequence, flavor: str = "a") -> tuple[tuple[Fraction, ...], ...]:
    """Linear extension of ``T_jseq`` near a generic point Q (rows act on column vectors)."""
    n = s.n
    mat = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    point = [Fraction(x) for x in Q]
    for j in jseq:
        if flavor == "a":
            c = _dot(s.e(j), point)
            if c == 0:
                raise ValueError(f"{tuple(Q)} lies on a bend locus")
            if c > 0:
                ej, vj = s.e(j), s.v(j)
                step = [[Fraction(int(a == b)) + vj[a] * ej[b] for b in range(n)] for a in range(n)]
                mat = _matmul(step, mat)
                point = [x + c * y for x, y in zip(point, vj)]
        else:
            ej = s.e(j)
            c = s.B(point, ej)
            if c == 0:
                raise ValueError(f"{tuple(Q)} lies on a bend locus")
            if c > 0:
                row = [s.B([int(b == a) for a in range(n)], ej) for b in range(n)]
                step = [[Fraction(int(a == b)) + ej[a] * row[b] for b in range(n)] for a in range(n)]
                mat = _matmul(step, mat)
                point = [x + c * y for x, y in zip(point, ej)]
        s = s.mutate(j)
    return tuple(tuple(r) for r in mat)


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def apply_linear(mat, v: Sequence) -> tuple:
    return tuple(sum((mat[i][j] * v[j] for j in range(len(v))), Fraction(0)) for i in range(len(mat)))


def mutate_monomial(s: Seed, j: int, flavor: str, m: QSeries) -> QSeries:
    """Cluster mutation as the adjoint action of ``Psi_t(z^{v_j})^{-1}``."""
    if j in s.frozen:
        raise ValueError(f"index {j} is frozen")
    if flavor == "x":
        v = s.e(j)
    elif flavor == "a":
        v = s.v(j)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    # built directly: v need not lie in the cone of the series' lattice
    g = GroupElem(m.lattice, [RayFactor.make(primitive(v), "ee", {index(v): ONE})])
    return g.ad(m, -1)


# chambers


@dataclass(frozen=True)
class Chamber:
    jseq: tuple[int, ...]
    rays: tuple[Vec, Vec]  # primitive generators in M, counterclockwise in the chart


def _primitive_rational(v: Sequence[Fraction]) -> Vec:
    r = canonical_ray(v) if len(v) == 2 else None
    if r is None:
        raise ValueError("chambers are computed for rank 2")
    return r


def chamber(s: Seed, jseq: Sequence[int]) -> tuple[Vec, Vec]:
    """Extremal rays of ``T_jseq^{-1}(C^+)`` for the seed reached by jseq (rank 2, no frozen)."""
    if s.n != 2 or s.frozen:
        raise ValueError("chambers are computed for rank 2 seeds without frozen indices")
    target = s.mutate_seq(jseq)
    gens = target.dual_basis()
    images = [_primitive_rational(T_inverse(s, jseq, g)) for g in gens]
    return tuple(sorted(images))


def chambers(s: Seed, max_len: int = 8) -> list[Chamber]:
    """Distinct chambers reached by alternating mutation sequences up to max_len."""
    seen: dict[tuple[Vec, Vec], Chamber] = {}
    for length in range(max_len + 1):
        starts = [0, 1] if length else [0]
        for first in starts:
            jseq = tuple((first + i) % 2 for i in range(length))
            key = chamber(s, jseq)
            if key not in seen:
                seen[key] = Chamber(jseq, key)
    return list(seen.values())


def cluster_complex_rays(s: Seed, max_len: int = 8) -> list[Vec]:
    out = set()
    for c in chambers(s, max_len):
        out.update(c.rays)
    return sorted(out)


# mutation of diagrams: order bounds


def _sigma_coords(dirs: Sequence[Vec], w: Sequence) -> tuple[Fraction, Fraction]:
    a = _sym([list(dirs[0]), list(dirs[1])]).T
    sol = a.solve_least_squares(sympy.Matrix([sympy.Rational(str(Fraction(x))) for x in w]))
    return tuple(Fraction(int(sympy.Rational(x).p), int(sympy.Rational(x).q)) for x in sol)


def mutation_order_bound(s: Seed, k_idx: int, k: int, flavor: str = "a") -> int:
    """Order in the cone of s that covers every wall of order <= k for ``mu_k(s)``."""
    new = s.mutate(k_idx)
    old_dirs = s.wall_directions(flavor)
    new_dirs = new.wall_directions(flavor)
    c, u = s.tropical_step(k_idx, flavor)
    best = 0
    for a, b in itertools.product(range(k + 1), repeat=2):
        if a + b == 0 or a + b > k:
            continue
        w = vadd(vscale(a, new_dirs[0]), vscale(b, new_dirs[1]))
        for pre in (w, tuple(x - _dot(c, w) * y for x, y in zip(w, u))):
            coords = _sigma_coords(old_dirs, pre)
            if all(x >= 0 for x in coords):
                best = max(best, ceil(sum(coords)))
    return best


def ee_form_up_to(d: ScatDiagram, k: int) -> dict:
    """EE-form entries keyed by (ray, direction), dropping multiples above order k."""
    out = {}
    for ray, w0, pf in d.to_ee_form():
        kept = {j: p for j, p in pf.items() if d.lattice.order(vscale(j, w0)) <= k and not p.is_zero()}
        if kept:
            out[(ray, w0)] = kept
    return out


@dataclass
class MutationComparison:
    equal: bool
    mutated: dict
    direct: dict
    source_order: int


def compare_mutation(s: Seed, k_idx: int, k: int, flavor: str = "a") -> MutationComparison:
    """Mutate the diagram of s at k_idx and compare with the diagram of ``mu_k(s)`` to order k."""
    big = mutation_order_bound(s, k_idx, k, flavor)
    mutated = mutate_diagram(build_cluster_diagram(s, flavor, big), k_idx)
    direct = build_cluster_diagram(s.mutate(k_idx), flavor, k)
    a, b = ee_form_up_to(mutated, k), ee_form_up_to(direct, k)
    return MutationComparison(a == b, a, b, big)


# broken lines under mutation


def _linear_at(c: Sequence[Fraction], u: Sequence[int], point: Sequence) -> tuple[bool, callable, callable]:
    side = _dot(c, point)
    if side == 0:
        raise ValueError(f"{tuple(point)} lies on the mutation hyperplane")
    plus = side > 0

    def fwd(x):
        return tuple(Fraction(a) + (_dot(c, x) if plus else 0) * b for a, b in zip(x, u))

    def back(x):
        return tuple(Fraction(a) - (_dot(c, x) if plus else 0) * b for a, b in zip(x, u))

    return plus, fwd, back


def T_point(s: Seed, k_idx: int, x: Sequence, flavor: str = "a") -> tuple:
    c, u = s.tropical_step(k_idx, flavor)
    lin = max(Fraction(0), Fraction(_dot(c, x)))
    return tuple(Fraction(a) + lin * b for a, b in zip(x, u))


def theta_order_bound(s: Seed, k_idx: int, p: Sequence[int], Q: Sequence, k: int, flavor: str = "a") -> int:
    """Order for ``theta_{p,Q}`` on s that covers ``theta_{T(p),T(Q)}`` on ``mu_k(s)`` to order k."""
    c, u = s.tropical_step(k_idx, flavor)
    _, _, back = _linear_at(c, u, Q)
    Tp = T_point(s, k_idx, p, flavor)
    old_dirs = s.wall_directions(flavor)
    new_dirs = s.mutate(k_idx).wall_directions(flavor)
    best = 0
    for a, b in itertools.product(range(k + 1), repeat=2):
        if a + b > k:
            continue
        w = vadd(vscale(a, new_dirs[0]), vscale(b, new_dirs[1]))
        v = back(tuple(x + y for x, y in zip(w, Tp)))
        coords = _sigma_coords(old_dirs, tuple(x - y for x, y in zip(v, p)))
        if all(x >= 0 for x in coords):
            best = max(best, ceil(sum(coords)))
    return best


@dataclass
class LineCorrespondence:
    equal: bool
    mapped: dict
    direct: dict


def compare_broken_lines(
    s: Seed, k_idx: int, p: Sequence[int], Q: Sequence, k: int, flavor: str = "a"
) -> LineCorrespondence:
    """Map the broken lines for ``(p, Q)`` on s through ``T_{k,+-}`` and compare with ``mu_k(s)``.

    Q is a point of M (or N for X) off every wall; the lines are compared as
    multisets of (final monomial, coefficient).  Raises NonGenericPointError
    from the tracer when either endpoint is not generic.
    """
    c, u = s.tropical_step(k_idx, flavor)
    _, fwd, _ = _linear_at(c, u, Q)
    big = max(k, theta_order_bound(s, k_idx, p, Q, k, flavor))
    d_old = build_cluster_diagram(s, flavor, big)
    new = s.mutate(k_idx)
    d_new = build_cluster_diagram(new, flavor, k)
    Tp = as_vec(_to_int_vec(T_point(s, k_idx, p, flavor)))
    TQ = T_point(s, k_idx, Q, flavor)
    mapped: Counter = Counter()
    for line in enumerate_broken_lines(d_old, p, d_old.chart.phi(Q), big):
        v = as_vec(_to_int_vec(fwd(line.final_monomial)))
        rel = tuple(a - b for a, b in zip(v, Tp))
        if d_new.lattice.in_cone(rel) and d_new.lattice.order(rel) > k:
            continue
        mapped[(v, line.final_coeff)] += 1
    direct: Counter = Counter(
        (line.final_monomial, line.final_coeff) for line in enumerate_broken_lines(d_new, Tp, d_new.chart.phi(TQ), k)
    )
    return LineCorrespondence(mapped == direct, dict(mapped), dict(direct))


def positive_chamber_point(s: Seed, d: ScatDiagram, avoid: Sequence[Sequence[int]] = ()) -> tuple[Fraction, Fraction]:
    """A generic chart point inside the image of ``C^+`` (rank 2, no frozen)."""
    f1, f2 = s.dual_basis()
    tracer = _Tracer(d, d.max_order)
    for den in range(2, 60):
        for num in range(1, den):
            m = tuple(Fraction(num, den) * a + Fraction(den - num, den) * b for a, b in zip(f1, f2))
            Q = d.chart.phi(m)
            try:
                tracer.check_point(Q)
            except NonGenericPointError:
                continue
            if not any(same_direction(d.chart.phi(v), (-Q[0], -Q[1])) for v in avoid):
                return Q
    raise ValueError("no generic point found in the positive chamber")


def cluster_variables(s: Seed, k: int = 6, max_len: int = 8) -> dict[Vec, QSeries]:
    """Theta functions on the primitive rays of the cluster complex, in the initial chart."""
    d = build_cluster_diagram(s, "a", k)
    tracer = _Tracer(d, k)
    out = {}
    for g in cluster_complex_rays(s, max_len):
        Q = positive_chamber_point(s, d, tracer.candidates(g))
        out[g] = theta(d, g, Q, k).terms
    return out
