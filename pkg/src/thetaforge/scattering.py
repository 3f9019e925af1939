"""Scattering diagrams in a 2-plane chart: walls, loop products and order-by-order completion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .lattice import (
    PlaneChart,
    QLattice,
    Vec,
    angle_key,
    as_vec,
    canonical_ray,
    index,
    plane_reduce,
    primitive,
    rot90,
    rotate_to,
    same_direction,
    vscale,
    vsub,
)
from .laurent import LaurentPoly, quantum_int
from .qtorus import (
    GroupElem,
    QSeries,
    RayFactor,
    classical_action,
    classical_function,
    series_mul,
)


class InconsistentError(ValueError):
    """Raised when a loop discrepancy cannot be cancelled by a single new wall."""


@dataclass(frozen=True)
class Wall:
    """A wall ``(support, prod_j EE(-p_j z^{j v}))``.

    ``ray`` is a chart direction, or None for a full line through the origin.
    """

    direction: Vec
    factor: RayFactor
    ray: tuple[int, int] | None = None
    incoming: bool = False

    @property
    def p_form(self) -> dict[int, LaurentPoly]:
        return self.factor.to_ee().coeff_map


@dataclass(frozen=True)
class ChartRay:
    ray: tuple[int, int]
    direction: Vec
    factor: RayFactor
    incoming: bool


class ScatDiagram:
    def __init__(
        self,
        lattice: QLattice,
        chart: PlaneChart,
        walls: Iterable[Wall],
        max_order: int,
        seed: Any = None,
    ) -> None:
        self.lattice = lattice
        self.chart = chart
        self.walls = list(walls)
        self.max_order = max_order
        self.seed = seed
        for w in self.walls:
            if w.factor.direction != w.direction:
                raise ValueError("wall factor lives on a different direction")
            if w.ray is not None and chart.pair_chart(w.direction, w.ray) != 0:
                raise ValueError(f"ray {w.ray} is not orthogonal to direction {w.direction}")

    @classmethod
    def from_inputs(
        cls,
        lattice: QLattice,
        inputs: Sequence[tuple[Sequence[int], LaurentPoly | Mapping[int, LaurentPoly]]],
        max_order: int,
        seed: Any = None,
    ) -> ScatDiagram:
        """Full-line incoming walls ``EE(-p z^v)`` for each ``(v, p)``."""
        walls = [line_wall(lattice, v, p) for v, p in inputs]
        chart = plane_reduce(lattice, [as_vec(v) for v, _ in inputs])
        return cls(lattice, chart, walls, max_order, seed)

    def with_walls(self, walls: Iterable[Wall], max_order: int | None = None) -> ScatDiagram:
        return ScatDiagram(
            self.lattice, self.chart, walls, self.max_order if max_order is None else max_order, self.seed
        )

    def incoming(self) -> ScatDiagram:
        return self.with_walls([w for w in self.walls if w.incoming])

    def rays(self) -> list[ChartRay]:
        """Walls split into rays, merged per (ray, direction), sorted by angle."""
        merged: dict[tuple[tuple[int, int], Vec], tuple[RayFactor, bool]] = {}
        order: list[tuple[tuple[int, int], Vec]] = []
        for w in self.walls:
            if w.ray is None:
                pieces = [
                    (canonical_ray(self.chart.phi(w.direction)), True),
                    (canonical_ray(self.chart.phi(vscale(-1, w.direction))), False),
                ]
            else:
                pieces = [(canonical_ray(w.ray), w.incoming)]
            for ray, inc in pieces:
                key = (ray, w.direction)
                if key in merged:
                    f, was = merged[key]
                    merged[key] = (f.merge(w.factor), was or inc)
                else:
                    merged[key] = (w.factor, inc)
                    order.append(key)
        out = [ChartRay(r, d, f, inc) for (r, d), (f, inc) in merged.items() if not f.is_trivial()]
        out.sort(key=lambda cr: (angle_key(cr.ray), cr.direction))
        return out

    def crossing(self, cr: ChartRay, clockwise: bool = False) -> GroupElem:
        velocity = rot90(cr.ray)
        if clockwise:
            velocity = (-velocity[0], -velocity[1])
        s = self.chart.crossing_sign(cr.direction, velocity)
        f = cr.factor if s > 0 else cr.factor.inverse()
        return GroupElem(self.lattice, [f], self.max_order)

    def loop(self) -> GroupElem:
        """Counterclockwise loop starting just below the positive first axis."""
        g = GroupElem.identity(self.lattice, self.max_order)
        for cr in self.rays():
            g = self.crossing(cr) * g
        return g

    def path_product(self, start: Sequence, end: Sequence) -> GroupElem:
        """Product along the counterclockwise arc from chart point start to end."""
        for pt in (start, end):
            if Fraction(pt[0]) == 0 and Fraction(pt[1]) == 0:
                raise ValueError("path endpoint at the origin")
        rays = self.rays()
        for cr in rays:
            for pt in (start, end):
                if same_direction(cr.ray, pt):
                    raise ValueError(f"path endpoint {tuple(pt)} lies on a wall")
        g = GroupElem.identity(self.lattice, self.max_order)
        for cr in sorted(rays, key=lambda c: angle_key(rotate_to(c.ray, start))):
            if angle_key(rotate_to(cr.ray, start)) < angle_key(rotate_to(end, start)) or same_direction(start, end):
                g = self.crossing(cr) * g
        return g

    def probes(self) -> tuple[Vec, Vec]:
        return self.chart.v1, self.chart.v2

    def to_ee_form(self) -> list[tuple[tuple[int, int], Vec, dict[int, LaurentPoly]]]:
        out = []
        for cr in self.rays():
            out.append((cr.ray, cr.direction, cr.factor.to_ee().coeff_map))
        return out

    def wall_on(self, direction: Sequence[int]) -> dict[int, LaurentPoly]:
        """EE-form of the outgoing ray for primitive ``direction`` (empty if trivial)."""
        d = primitive(direction)
        ray = self.chart.outgoing_ray(d)
        for cr in self.rays():
            if cr.ray == ray and cr.direction == d:
                return cr.factor.to_ee().coeff_map
        return {}

    def p_at(self, v: Sequence[int]) -> LaurentPoly:
        """``p`` coefficient of ``EE(-p z^v)`` on the outgoing ray through ``-v``."""
        v = as_vec(v)
        return self.wall_on(v).get(index(v), LaurentPoly.zero())

    def negative_walls(self) -> list[tuple[tuple[int, int], Vec, int]]:
        """Rays whose EE factors have a negative coefficient."""
        return [
            (ray, d, j)
            for ray, d, pf in self.to_ee_form()
            for j, p in pf.items()
            if not p.is_nonnegative()
        ]

    def to_json(self) -> dict:
        walls = []
        for w in sorted(self.walls, key=lambda w: (not w.incoming, w.direction, w.ray or (0, 0))):
            ray = w.ray if w.ray is not None else canonical_ray(self.chart.phi(w.direction))
            walls.append(
                {
                    "direction": list(w.direction),
                    "support": "line" if w.ray is None else "ray",
                    "support_ray": list(ray),
                    "incoming": w.incoming,
                    "ee_factors": [[j, p.to_json()] for j, p in sorted(w.p_form.items())],
                }
            )
        return {
            "lattice": self.lattice.to_json(),
            "chart": {"v1": list(self.chart.v1), "v2": list(self.chart.v2)},
            "walls": walls,
            "order": self.max_order,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ScatDiagram:
        lat = QLattice.from_json(data["lattice"])
        chart = PlaneChart(lat, as_vec(data["chart"]["v1"]), as_vec(data["chart"]["v2"]))
        walls = []
        for w in data["walls"]:
            d = as_vec(w["direction"])
            pf = {int(j): LaurentPoly.from_json(p) for j, p in w["ee_factors"]}
            ray = None if w["support"] == "line" else tuple(w["support_ray"])
            walls.append(Wall(d, RayFactor.make(d, "ee", pf), ray, bool(w["incoming"])))
        return cls(lat, chart, walls, int(data["order"]))


def line_wall(lattice: QLattice, v: Sequence[int], p: LaurentPoly | Mapping[int, LaurentPoly]) -> Wall:
    v = as_vec(v)
    d, g = primitive(v), index(v)
    if isinstance(p, Mapping):
        pf = {g * int(j): c for j, c in p.items()}
    else:
        pf = {g: p if isinstance(p, LaurentPoly) else LaurentPoly.const(p)}
    if not lattice.in_L0(v):
        raise ValueError(f"{v} is not in L0")
    return Wall(d, RayFactor.make(d, "ee", pf), None, True)


def path_ordered_product(d: ScatDiagram, start: Sequence, end: Sequence) -> GroupElem:
    return d.path_product(start, end)


# consistency


@dataclass
class ConsistencyReport:
    consistent: bool
    first_failing_order: int | None = None
    discrepancy: dict[Vec, dict[Vec, LaurentPoly]] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.consistent


def _loop_discrepancy(d: ScatDiagram, loop: GroupElem, order: int) -> dict[Vec, dict[Vec, LaurentPoly]]:
    """For each probe q, the terms ``w -> c`` of ``Ad_loop(z^q) - z^q`` (keyed by ``w = v - q``)."""
    out = {}
    for q in d.probes():
        m = QSeries.monomial(d.lattice, q, 1, order)
        diff = loop.ad(m) - m
        out[q] = {vsub(v, q): c for v, c in diff.items()}
    return out


def check_consistent(d: ScatDiagram) -> ConsistencyReport:
    if not d.walls:
        return ConsistencyReport(True)
    loop = d.loop()
    disc = _loop_discrepancy(d, loop, d.max_order)
    if not any(disc.values()):
        return ConsistencyReport(True)
    first = min(d.lattice.order(w) for terms in disc.values() for w in terms)
    graded = {q: {w: c for w, c in terms.items() if d.lattice.order(w) == first} for q, terms in disc.items()}
    return ConsistencyReport(False, first, graded)


def _correction(d: ScatDiagram, w: Vec, deltas: Mapping[Vec, LaurentPoly]) -> LaurentPoly:
    """p with ``EE(-p z^w)`` on the ray through ``-w`` cancelling ``deltas``."""
    ray = d.chart.outgoing_ray(w)
    s = d.chart.crossing_sign(w, rot90(ray))
    found: LaurentPoly | None = None
    for q, delta in deltas.items():
        b = d.lattice.pair(w, q)
        if b == 0:
            if not delta.is_zero():
                raise InconsistentError(f"probe {q} sees a discrepancy at {w} that no wall on {w} can cancel")
            continue
        if b.denominator != 1:
            raise InconsistentError("wall-crossing needs omega(w, q) integral")
        b = int(b)
        try:
            c = (delta * (-s * (1 if b > 0 else -1))).exact_div(quantum_int(abs(b)))
        except ArithmeticError as exc:
            raise InconsistentError(f"discrepancy at {w} is not a Laurent correction") from exc
        if found is not None and c != found:
            raise InconsistentError(f"probes disagree on the correction at {w}")
        found = c
    if found is None:
        raise InconsistentError(f"no probe detects the direction {w}")
    return found


def complete(initial: ScatDiagram, k: int | None = None) -> ScatDiagram:
    """Add outgoing walls order by order until the loop is trivial up to order k."""
    k = initial.max_order if k is None else k
    for w in initial.walls:
        if w.ray is not None or not w.incoming:
            raise ValueError("completion starts from full-line incoming walls")
    lat = initial.lattice
    d = initial.with_walls(initial.walls, k)
    outgoing: dict[tuple[tuple[int, int], Vec], dict[int, LaurentPoly]] = {}
    for j in range(1, k + 1):
        d = _assemble(initial, outgoing, j)
        disc = _loop_discrepancy(d, d.loop(), j)
        by_w: dict[Vec, dict[Vec, LaurentPoly]] = {}
        for q, terms in disc.items():
            for w, c in terms.items():
                if lat.order(w) < j:
                    raise InconsistentError(f"loop not trivial below order {j} at {w}")
                by_w.setdefault(w, {})[q] = c
        if not by_w:
            continue
        if j == 1:
            raise InconsistentError("initial walls are inconsistent at order 1")
        for w in sorted(by_w):
            deltas = {q: by_w[w].get(q, LaurentPoly.zero()) for q in d.probes()}
            p = _correction(d, w, deltas)
            w0, m = primitive(w), index(w)
            key = (d.chart.outgoing_ray(w0), w0)
            slot = outgoing.setdefault(key, {})
            slot[m] = slot.get(m, LaurentPoly.zero()) + p
        if j == k:
            # lower orders are re-checked by the next round, which rejects leftovers below j + 1
            d = _assemble(initial, outgoing, j)
            rest = _loop_discrepancy(d, d.loop(), j)
            if any(rest.values()):
                raise InconsistentError(f"loop still nontrivial at order {j} after corrections")
    return _assemble(initial, outgoing, k)


def _assemble(initial: ScatDiagram, outgoing: Mapping, order: int) -> ScatDiagram:
    walls = list(initial.walls)
    for (ray, w0), pf in sorted(outgoing.items()):
        f = RayFactor.make(w0, "ee", pf)
        if not f.is_trivial():
            walls.append(Wall(w0, f, ray, False))
    return initial.with_walls(walls, order)


def to_ee_form(d: ScatDiagram) -> list[tuple[tuple[int, int], Vec, dict[int, LaurentPoly]]]:
    return d.to_ee_form()


def _apply_linear(c: Sequence[Fraction], u: Sequence[int], plus: bool, x: Sequence) -> tuple:
    if not plus:
        return tuple(x)
    lin = sum((a * b for a, b in zip(c, x)), Fraction(0))
    return tuple(xi + lin * ui for xi, ui in zip(x, u))


def mutate_diagram(d: ScatDiagram, k_idx: int) -> ScatDiagram:
    """Push a rank-2 cluster diagram through ``T_k`` to the diagram of the mutated seed.

    Walls on the side ``c.x > 0`` move by ``x -> x + (c.x) u``, the others stay,
    and the wall on the hyperplane ``c.x = 0`` is replaced by ``Psi_t(z^{-u})``.
    Wall functions are carried along with their exponents mapped linearly.
    """
    seed = d.seed
    if seed is None:
        raise ValueError("diagram carries no seed")
    if d.lattice.rank != 2:
        raise ValueError("mutation of diagrams is implemented for rank 2")
    flavor = getattr(d, "flavor", "a")
    c, u = seed.tropical_step(k_idx, flavor)
    new_seed = seed.mutate(k_idx)
    new_dirs = new_seed.wall_directions(flavor)
    lat = QLattice.from_omega(d.lattice.omega_matrix(), new_dirs)
    chart = plane_reduce(lat, new_dirs)
    n = d.chart.n
    u0, ui = primitive(u), index(u)
    removed = RayFactor.make(u0, "ee", {ui: LaurentPoly.one()}).inverse()
    walls = [line_wall(lat, vscale(-1, u), LaurentPoly.one())]
    for cr in d.rays():
        y = cr.ray
        a, b = -Fraction(y[1]) / n, Fraction(y[0]) / n
        m = tuple(a * p + b * q for p, q in zip(d.chart.v1, d.chart.v2))
        side = sum((x * z for x, z in zip(c, m)), Fraction(0))
        f = cr.factor
        if side == 0:
            if cr.direction != u0:
                raise ValueError("a wall on the mutation hyperplane has an unexpected direction")
            f = f.merge(removed)
            if f.is_trivial():
                continue
        plus = side >= 0
        direction = as_vec(_apply_linear(c, u, plus, cr.direction))
        ray = canonical_ray(chart.phi(_apply_linear(c, u, plus, m)))
        incoming = same_direction(ray, chart.phi(direction))
        pf = f.to_ee().coeff_map
        walls.append(Wall(direction, RayFactor.make(direction, "ee", pf), ray, incoming))
    out = ScatDiagram(lat, chart, walls, d.max_order, new_seed)
    out.flavor = flavor
    return out


# classical completion, computed independently with rational coefficients


@dataclass
class ClassicalDiagram:
    lattice: QLattice
    chart: PlaneChart
    max_order: int
    rays: dict[tuple[tuple[int, int], Vec], list[Fraction]]

    def function_on(self, direction: Sequence[int]) -> list[Fraction]:
        d = primitive(direction)
        return self.rays.get((self.chart.outgoing_ray(d), d), [Fraction(1)])


def _degree_limit(lat: QLattice, w0: Vec, order: int) -> int:
    m = Fraction(order + 1) / lat.height(w0)
    top = m.numerator // m.denominator
    return top - 1 if Fraction(top) == m else top


def _classical_loop(
    lat: QLattice, chart: PlaneChart, rays: Mapping, q: Vec, order: int
) -> dict[Vec, Fraction]:
    items = sorted(rays.items(), key=lambda kv: (angle_key(kv[0][0]), kv[0][1]))
    series: dict[Vec, Fraction] = {q: Fraction(1)}
    for (ray, w0), func in items:
        s = chart.crossing_sign(w0, rot90(ray))
        limit = _degree_limit(lat, w0, order)
        new: dict[Vec, Fraction] = {}
        for x, c in series.items():
            room = _degree_limit_from(lat, vsub(x, q), w0, order)
            if room < 0:
                continue
            f = func[: room + 1] + [Fraction(0)] * max(0, room + 1 - len(func))
            if s < 0:
                f = _series_inverse(f, room)
            for y, e in classical_action(lat, w0, f, x, min(room, limit)).items():
                new[y] = new.get(y, Fraction(0)) + c * e
        series = {x: c for x, c in new.items() if c}
    return series


def _degree_limit_from(lat: QLattice, rel: Vec, w0: Vec, order: int) -> int:
    room = order + 1 - lat.height(rel)
    if room <= 0:
        return -1
    m = room / lat.height(w0)
    top = m.numerator // m.denominator
    return top - 1 if Fraction(top) == m else top


def _series_inverse(f: Sequence[Fraction], limit: int) -> list[Fraction]:
    out = [Fraction(0)] * (limit + 1)
    out[0] = Fraction(1) / f[0]
    for n in range(1, limit + 1):
        acc = sum((f[i] * out[n - i] for i in range(1, min(n, len(f) - 1) + 1)), Fraction(0))
        out[n] = -acc / f[0]
    return out


def complete_classical(
    lattice: QLattice,
    inputs: Sequence[tuple[Sequence[int], Sequence[Fraction]]],
    k: int,
) -> ClassicalDiagram:
    """Completion of commutative initial lines ``(v, F(y))`` with ``F`` acting by
    ``z^q -> z^q F(z^v)^omega(v, q)`` for primitive v."""
    chart = plane_reduce(lattice, [as_vec(v) for v, _ in inputs])
    rays: dict[tuple[tuple[int, int], Vec], list[Fraction]] = {}
    for v, func in inputs:
        v = as_vec(v)
        if primitive(v) != v:
            raise ValueError("classical inputs are given on primitive directions")
        for ray in (canonical_ray(chart.phi(v)), canonical_ray(chart.phi(vscale(-1, v)))):
            rays[(ray, v)] = [Fraction(x) for x in func]
    probes = (chart.v1, chart.v2)
    for j in range(1, k + 1):
        new: dict[Vec, list[tuple[Vec, Fraction]]] = {}
        for q in probes:
            series = _classical_loop(lattice, chart, rays, q, j)
            for x, c in series.items():
                w = vsub(x, q)
                if not any(w):
                    if c != 1:
                        raise InconsistentError("classical loop changed the leading term")
                    continue
                if lattice.order(w) < j:
                    raise InconsistentError(f"classical loop not trivial below order {j}")
                new.setdefault(w, []).append((q, c))
        for w, hits in sorted(new.items()):
            w0, m = primitive(w), index(w)
            ray = chart.outgoing_ray(w0)
            s = chart.crossing_sign(w0, rot90(ray))
            cands = set()
            for q, c in hits:
                b = lattice.pair(w0, q)
                if b != 0:
                    cands.add(-c / (s * b))
            if len(cands) != 1:
                raise InconsistentError(f"classical probes disagree at {w}")
            c = cands.pop()
            limit = _degree_limit(lattice, w0, k)
            bump = [Fraction(1)] + [Fraction(0)] * limit
            bump[m] = c
            old = rays.get((ray, w0), [Fraction(1)] + [Fraction(0)] * limit)
            old = old + [Fraction(0)] * max(0, limit + 1 - len(old))
            rays[(ray, w0)] = series_mul(old, bump, limit)
    return ClassicalDiagram(lattice, chart, k, rays)


def classical_inputs(d: ScatDiagram) -> list[tuple[Vec, list[Fraction]]]:
    """Classical limits of the incoming line functions of d."""
    out = []
    for w in d.walls:
        if w.incoming:
            limit = _degree_limit(d.lattice, w.direction, d.max_order)
            out.append((w.direction, classical_function(w.p_form, limit)))
    return out


def classical_limit_diagram(d: ScatDiagram) -> dict[tuple[tuple[int, int], Vec], list[Fraction]]:
    """Per-ray classical functions of the quantum diagram d."""
    out = {}
    for cr in d.rays():
        limit = _degree_limit(d.lattice, cr.direction, d.max_order)
        out[(cr.ray, cr.direction)] = classical_function(cr.factor.to_ee().coeff_map, limit)
    return out


# drawing


def to_svg(d: ScatDiagram, window: tuple[float, float, float, float] = (-4.0, -4.0, 4.0, 4.0)) -> str:
    x0, y0, x1, y1 = window
    size = 480
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def px(x: float, y: float) -> tuple[float, float]:
        return ((x - x0) * sx, (y1 - y) * sy)

    ox, oy = px(0, 0)
    reach = 2 * max(abs(x0), abs(x1), abs(y0), abs(y1))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for cr in d.rays():
        rx, ry = float(cr.ray[0]), float(cr.ray[1])
        norm = (rx * rx + ry * ry) ** 0.5
        ex, ey = px(rx / norm * reach, ry / norm * reach)
        color = "black" if cr.incoming else "steelblue"
        lines.append(
            f'<line x1="{ox:.2f}" y1="{oy:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" stroke="{color}" stroke-width="1"/>'
        )
        lx, ly = px(rx / norm * reach * 0.3, ry / norm * reach * 0.3)
        label = "; ".join(f"{j}:{p.to_text()}" for j, p in sorted(cr.factor.to_ee().coeffs))
        lines.append(
            f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="9" fill="{color}">{list(cr.direction)} {label}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _trim(f: Sequence[Fraction]) -> tuple[Fraction, ...]:
    out = list(f)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def classical_mismatches(d: ScatDiagram) -> list[tuple[tuple[int, int], Vec]]:
    """Rays where the classical limit of d differs from the classical completion of its inputs."""
    quantum = {key: _trim(f) for key, f in classical_limit_diagram(d).items()}
    classical = complete_classical(d.lattice, classical_inputs(d), d.max_order).rays
    classical = {key: _trim(f) for key, f in classical.items()}
    keys = set(quantum) | set(classical)
    trivial = (Fraction(1),)
    return sorted(k for k in keys if quantum.get(k, trivial) != classical.get(k, trivial))
