"""Refined DT invariants read off completed two-wall diagrams, with the checks they satisfy.

A completed diagram with incoming walls ``EE(-t^m1 z^v1)`` and ``EE(-t^m2 z^v2)``
carries ``EE(-Omega_v z^v)`` on the ray through ``-v`` for each
``v = a*v1 + b*v2``.  ``Omega_v`` is reported together with the Euler form
of the n-Kronecker quiver and pass/fail verdicts.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import QLattice, vscale
from .laurent import LaurentPoly, lefschetz_decomposition, t_pow
from .scattering import ScatDiagram, complete


def kronecker_setup(n: int, shift1: int = 0, shift2: int = 0, k: int = 6) -> ScatDiagram:
    """Initial walls ``EE(-t^shift1 z^v1)``, ``EE(-t^shift2 z^v2)`` with ``omega(v1, v2) = n``."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    lat = QLattice.standard(n)
    return ScatDiagram.from_inputs(lat, [((1, 0), t_pow(shift1)), ((0, 1), t_pow(shift2))], k)


def kronecker_diagram(n: int, shift1: int = 0, shift2: int = 0, k: int = 6) -> ScatDiagram:
    return complete(kronecker_setup(n, shift1, shift2, k), k)


def euler_form(n: int, v: tuple[int, int]) -> int:
    a, b = v
    return a * a + b * b - n * a * b


def lambda_form(n: int, v: tuple[int, int], parities: tuple[str, str]) -> int:
    """``lambda(a, a)`` with diagonal 1 for even inputs and 0 for odd ones."""
    a, b = v
    diag = [1 if p == "even" else 0 for p in parities]
    return a * a * diag[0] + b * b * diag[1] + a * b * max(0, n) + a * b * max(0, -n)


def in_sigma_bad(n: int, v: tuple[int, int]) -> bool:
    """Strictly inside the cone bounded by the slopes ``(n -+ sqrt(n^2-4))/2``.

    For a, b > 0 this is exactly ``a^2 - n*a*b + b^2 < 0``.
    """
    a, b = v
    return a > 0 and b > 0 and euler_form(n, v) < 0


def degree_bound_ok(omega: LaurentPoly, chi: int) -> bool:
    """``omega = t^(chi-1) (1 + g)`` with g in ``t Z>=0[t]`` of degree at most ``2(1-chi)``."""
    if omega.is_zero() or not omega.has_integer_exponents() or not omega.is_nonnegative():
        return False
    if omega.min_exp() != chi - 1 or omega.coeff(chi - 1) != 1:
        return False
    return omega.max_exp() - (chi - 1) <= 2 * (1 - chi)


@dataclass
class DTEntry:
    a: int
    b: int
    omega: LaurentPoly
    chi: int
    verdicts: dict[str, bool | None] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "chi": self.chi,
            "omega": self.omega.to_text(),
            "verdicts": dict(sorted(self.verdicts.items())),
        }


@dataclass
class DTReport:
    n: int
    shifts: tuple[int | None, int | None]
    order: int
    entries: list[DTEntry]

    def omega(self, a: int, b: int) -> LaurentPoly:
        for e in self.entries:
            if (e.a, e.b) == (a, b):
                return e.omega
        return LaurentPoly.zero()

    def failures(self) -> list[tuple[int, int, str]]:
        return [(e.a, e.b, name) for e in self.entries for name, ok in sorted(e.verdicts.items()) if ok is False]

    def all_pass(self) -> bool:
        return not self.failures()

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "shifts": list(self.shifts),
            "order": self.order,
            "entries": [e.to_json() for e in self.entries],
        }

    def to_csv(self) -> str:
        names = sorted({k for e in self.entries for k in e.verdicts})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "chi", "omega", *names])
        for e in self.entries:
            w.writerow([e.a, e.b, e.chi, e.omega.to_text(), *(_verdict_text(e.verdicts.get(k)) for k in names)])
        return buf.getvalue()


def _verdict_text(v: bool | None) -> str:
    return "n/a" if v is None else ("pass" if v else "fail")


def input_polys(d: ScatDiagram) -> tuple[LaurentPoly, LaurentPoly]:
    """The ``p`` of the incoming lines on v1 and v2."""
    found = {}
    for w in d.walls:
        if w.incoming and w.ray is None:
            found[w.direction] = w.p_form.get(1, LaurentPoly.zero())
    try:
        return found[d.chart.v1], found[d.chart.v2]
    except KeyError:
        raise ValueError("DT tables need incoming lines on both chart vectors") from None


def extract_dt(d: ScatDiagram) -> DTReport:
    """Omega for every dimension vector carried by d, including the two inputs.

    The degree bound and Lefschetz verdicts apply when both inputs are 1
    (the Kronecker quiver) and are None otherwise.
    """
    n_frac = d.chart.n
    if Fraction(n_frac).denominator != 1:
        raise ValueError("DT tables need an integral pairing between v1 and v2")
    n = int(n_frac)
    inputs = input_polys(d)
    parities = tuple(p.parity() for p in inputs)
    shifts = tuple(_shift(p) for p in inputs)
    quiver = all(p == LaurentPoly.one() for p in inputs)
    entries = []
    for ray, w0, pf in d.to_ee_form():
        a0, b0 = d.chart.plane_coords(w0)
        if a0 < 0 or b0 < 0 or ray != d.chart.outgoing_ray(w0):
            continue  # the incoming halves of the two input lines
        for j, omega in sorted(pf.items()):
            if omega.is_zero():
                continue
            a, b = int(j * a0), int(j * b0)
            if d.lattice.order(vscale(j, w0)) > d.max_order:
                continue
            chi = euler_form(n, (a, b))
            verdicts: dict[str, bool | None] = {
                "positivity": omega.is_nonnegative() and omega.is_integral(),
                "parity": _parity_ok(omega, 1 + lambda_form(n, (a, b), parities)),
                "degree_bound": degree_bound_ok(omega, chi) if quiver else None,
                "lefschetz": (lefschetz_decomposition(omega) is not None) if quiver else None,
            }
            entries.append(DTEntry(a, b, omega, chi, verdicts))
    entries.sort(key=lambda e: (e.a + e.b, e.a, e.b))
    return DTReport(n, tuple(shifts), d.max_order, entries)


def _shift(p: LaurentPoly) -> int | None:
    """m when p is the single monomial t^m with integer m."""
    if len(p.terms) != 1 or p.coeff(p.min_exp()) != 1 or p.min_exp().denominator != 1:
        return None
    return int(p.min_exp())


def _parity_ok(p: LaurentPoly, expected: int) -> bool:
    want = "even" if expected % 2 == 0 else "odd"
    return p.parity() == want


def dense_witnesses(report: DTReport) -> list[DTEntry]:
    """Nonzero entries strictly inside the dense cone."""
    return [e for e in report.entries if in_sigma_bad(report.n, (e.a, e.b)) and not e.omega.is_zero()]
