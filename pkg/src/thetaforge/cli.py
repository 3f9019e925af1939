"""Command-line front end: diagrams, theta functions, mutations, DT tables and property checks."""

from __future__ import annotations

import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import click

from . import fixtures
from .brokenlines import NonGenericPointError, point_near, structure_constants, theta, transport
from .cluster import (
    Seed,
    build_cluster_diagram,
    chamber,
    chambers,
    cluster_variables,
    compare_broken_lines,
    compare_mutation,
    find_lambda,
    psi_linear,
)
from .dtwall import DTReport, extract_dt, input_polys
from .lattice import cross
from .laurent import LaurentPoly, lefschetz_decomposition, pl_decomposition, t_pow
from .scattering import (
    InconsistentError,
    ScatDiagram,
    check_consistent,
    classical_mismatches,
    complete,
    to_svg,
)

DEFAULT_ORDER_CAP = 12


def order_cap() -> int:
    raw = os.environ.get("THETAFORGE_ORDER_CAP", "")
    try:
        return int(raw) if raw else DEFAULT_ORDER_CAP
    except ValueError:
        raise click.UsageError(f"THETAFORGE_ORDER_CAP must be an integer, got {raw!r}") from None


@dataclass
class JobConfig:
    command: str
    order: int = 6
    init: str | None = None
    seed: str | None = None
    flavor: str = "a"
    fmt: str = "json"
    Q: tuple[Fraction, Fraction] | None = None
    jseq: tuple[int, ...] = ()
    out: str | None = None
    window: tuple[float, float, float, float] = (-4.0, -4.0, 4.0, 4.0)
    p: tuple[int, ...] | None = None
    p2: tuple[int, ...] | None = None
    samples: int = 4
    exact: bool = True  # all arithmetic is exact; kept for interface stability

    def __post_init__(self) -> None:
        cap = order_cap()
        if not 1 <= self.order <= cap:
            raise click.UsageError(f"--order must be between 1 and {cap} (THETAFORGE_ORDER_CAP)")


@dataclass
class Outcome:
    payload: dict
    text: str
    rows: list[list] = field(default_factory=list)
    svg: str | None = None
    code: int = 0


# parsing


def parse_point(text: str) -> tuple[Fraction, Fraction]:
    parts = [x.strip() for x in text.split(",")]
    if len(parts) != 2:
        raise click.BadParameter(f"expected 'x,y', got {text!r}")
    try:
        return Fraction(parts[0]), Fraction(parts[1])
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"not a rational point: {text!r}") from None


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from None


def parse_jseq(text: str) -> tuple[int, ...]:
    """1-based indices on the command line, 0-based inside."""
    if not text.strip():
        return ()
    seq = parse_vector(text)
    if any(j < 1 for j in seq):
        raise click.BadParameter("mutation indices start at 1")
    return tuple(j - 1 for j in seq)


# loading


def load_seed(cfg: JobConfig) -> Seed:
    if cfg.seed is None:
        raise click.UsageError("this command needs --seed")
    return fixtures.seed(cfg.seed)


def load_diagram(cfg: JobConfig) -> ScatDiagram:
    """Completed diagram from --init or the cluster diagram of --seed."""
    if (cfg.init is None) == (cfg.seed is None):
        raise click.UsageError("give exactly one of --init and --seed")
    if cfg.init is not None:
        return complete(fixtures.initial_diagram(cfg.init, cfg.order), cfg.order)
    return build_cluster_diagram(load_seed(cfg), cfg.flavor, cfg.order)


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def render(cfg: JobConfig, res: Outcome) -> str:
    if cfg.fmt == "json":
        return _json(res.payload)
    if cfg.fmt == "csv":
        if not res.rows:
            raise click.UsageError(f"{cfg.command} has no csv form")
        return _csv(res.rows)
    if cfg.fmt == "svg":
        if res.svg is None:
            raise click.UsageError(f"{cfg.command} has no svg form")
        return res.svg
    return res.text if res.text.endswith("\n") else res.text + "\n"


def _poly(p: LaurentPoly) -> str:
    return p.to_text()


# commands


def cmd_scatter(cfg: JobConfig) -> Outcome:
    if (cfg.init is None) == (cfg.seed is None):
        raise click.UsageError("give exactly one of --init and --seed")
    try:
        d = load_diagram(cfg)
    except InconsistentError as exc:
        return Outcome({"consistent": False, "error": str(exc)}, f"inconsistent: {exc}", code=1)
    report = check_consistent(d)
    payload = d.to_json()
    payload["consistent"] = report.consistent
    payload["first_failing_order"] = report.first_failing_order
    rows = [["ray", "direction", "multiple", "p"]]
    lines = []
    for ray, w0, pf in d.to_ee_form():
        for j, p in sorted(pf.items()):
            rows.append([f"{ray[0]} {ray[1]}", " ".join(map(str, w0)), j, _poly(p)])
            lines.append(f"ray {ray}  EE(-({_poly(p)}) z^{[j * x for x in w0]})")
    lines.append(f"consistent to order {d.max_order}: {report.consistent}")
    return Outcome(payload, "\n".join(lines), rows, to_svg(d, cfg.window), 0 if report.consistent else 1)


def cmd_theta(cfg: JobConfig) -> Outcome:
    if cfg.p is None:
        raise click.UsageError("theta needs --p")
    d = load_diagram(cfg)
    try:
        Q = cfg.Q if cfg.Q is not None else point_near(d, cfg.p, cfg.order)
        th = theta(d, cfg.p, Q, cfg.order)
    except NonGenericPointError as exc:
        return Outcome({"error": str(exc)}, f"non-generic endpoint: {exc}", code=1)
    rows = [["exponent", "coeff"]] + [[" ".join(map(str, v)), _poly(c)] for v, c in th.terms.items()]
    return Outcome(th.to_json(), th.terms.to_text() or "0", rows)


def cmd_product(cfg: JobConfig) -> Outcome:
    if cfg.p is None or cfg.p2 is None:
        raise click.UsageError("product needs --p and --p2")
    d = load_diagram(cfg)
    try:
        alpha = structure_constants(d, cfg.p, cfg.p2, cfg.order)
    except NonGenericPointError as exc:
        return Outcome({"error": str(exc)}, f"non-generic endpoint: {exc}", code=1)
    payload = {
        "p1": list(cfg.p),
        "p2": list(cfg.p2),
        "order": cfg.order,
        "alpha": [{"p": list(p), "coeff": _poly(c)} for p, c in alpha.items()],
    }
    rows = [["p", "alpha"]] + [[" ".join(map(str, p)), _poly(c)] for p, c in alpha.items()]
    text = "\n".join(f"{list(p)}: {_poly(c)}" for p, c in alpha.items())
    return Outcome(payload, text, rows)


def cmd_mutate(cfg: JobConfig) -> Outcome:
    s = load_seed(cfg)
    for j in cfg.jseq:
        if j in s.frozen or not 0 <= j < s.n:
            raise click.UsageError(f"cannot mutate at index {j + 1}")
    new = s.mutate_seq(cfg.jseq)
    payload = {
        "jseq": [j + 1 for j in cfg.jseq],
        "seed": new.to_json(),
        "exchange_matrix": [[str(x) for x in row] for row in new.matrix()],
    }
    lines = [f"basis e_{i + 1} = {list(e)}" for i, e in enumerate(new.basis)]
    lines.append("exchange matrix " + str([[str(x) for x in row] for row in new.matrix()]))
    if s.n == 2 and not s.frozen:
        rays = chamber(s, cfg.jseq)
        payload["chamber"] = [list(r) for r in rays]
        lines.append(f"chamber spanned by {list(rays[0])} and {list(rays[1])}")
    return Outcome(payload, "\n".join(lines))


def cmd_dt(cfg: JobConfig) -> Outcome:
    if cfg.init is None:
        raise click.UsageError("dt needs --init")
    d = load_diagram(cfg)
    report = extract_dt(d)
    text_rows = [f"({e.a},{e.b}) chi={e.chi} omega={_poly(e.omega)}" for e in report.entries]
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    return Outcome(report.to_json(), "\n".join(text_rows), rows, code=0 if report.all_pass() else 1)


def cmd_export(name: str | None) -> Outcome:
    if name is None:
        listing = fixtures.names()
        return Outcome({"fixtures": listing}, "\n".join(listing))
    data = fixtures.read(name)
    return Outcome(data, _json(data))


# property checks


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skip
    detail: str = ""
    reproducer: dict | None = None


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _walls(d: ScatDiagram) -> list[tuple[tuple[int, int], tuple, int, LaurentPoly]]:
    return [(ray, w0, j, p) for ray, w0, pf in d.to_ee_form() for j, p in pf.items() if not p.is_zero()]


def _inputs(d: ScatDiagram) -> list[LaurentPoly]:
    return [p for w in d.walls if w.incoming and w.ray is None for p in w.p_form.values()]


def _wall_property(d: ScatDiagram, name: str, applies: bool, test: Callable[[LaurentPoly], bool]) -> CheckResult:
    if not applies:
        return CheckResult(name, "skip", "inputs outside the hypothesis")
    bad = [(ray, w0, j, p) for ray, w0, j, p in _walls(d) if not test(p)]
    if not bad:
        return CheckResult(name, "pass", f"{len(_walls(d))} factors")
    ray, w0, j, p = bad[0]
    return CheckResult(name, "fail", f"{len(bad)} factors", {"ray": list(ray), "direction": list(w0), "multiple": j, "p": _poly(p)})


def _random_point(rng: random.Random) -> tuple[Fraction, Fraction]:
    return (Fraction(rng.randint(-99, 99), rng.randint(1, 50)), Fraction(rng.randint(-99, 99), rng.randint(1, 50)))


def _dt_table(d: ScatDiagram) -> DTReport | None:
    # DT tables need an integral pairing and both inputs at the first multiple of v1, v2
    if Fraction(d.chart.n).denominator != 1:
        return None
    try:
        input_polys(d)
    except ValueError:
        return None
    return extract_dt(d)


def diagram_checks(d: ScatDiagram, samples: int = 4, rng_seed: int = 0) -> list[CheckResult]:
    out = []
    report = check_consistent(d)
    out.append(CheckResult("consistency", _status(report.consistent), f"order {d.max_order}"))
    ins = _inputs(d)
    positive = all(p.is_nonnegative() and p.is_integral() for p in ins)
    out.append(_wall_property(d, "positivity", positive, lambda p: p.is_nonnegative() and p.is_integral()))
    out.append(_wall_property(d, "bar_invariance", all(p.is_bar_invariant() for p in ins), LaurentPoly.is_bar_invariant))
    out.append(
        _wall_property(d, "pl_type", all(pl_decomposition(p) is not None for p in ins), lambda p: pl_decomposition(p) is not None)
    )
    two_lines = len(ins) == 2 and d.lattice.rank == 2
    out.append(
        _wall_property(
            d, "lefschetz_acyclic", two_lines and all(p == LaurentPoly.one() for p in ins),
            lambda p: lefschetz_decomposition(p) is not None,
        )
    )
    parity_ok = two_lines and positive and all(p.parity() in ("even", "odd") for p in ins)
    dt = _dt_table(d) if parity_ok else None
    if dt is not None:
        bad = [(e.a, e.b) for e in dt.entries if e.verdicts["parity"] is False]
        out.append(CheckResult("parity", _status(not bad), f"{len(dt.entries)} factors", {"bad": bad} if bad else None))
        degree = [e for e in dt.entries if e.verdicts["degree_bound"] is not None]
        if degree:
            bad = [(e.a, e.b) for e in degree if not e.verdicts["degree_bound"]]
            out.append(CheckResult("dt_degree_bound", _status(not bad), f"{len(degree)} invariants", {"bad": bad} if bad else None))
        else:
            out.append(CheckResult("dt_degree_bound", "skip", "inputs are not both 1"))
    else:
        out.append(CheckResult("parity", "skip", "inputs outside the hypothesis"))
        out.append(CheckResult("dt_degree_bound", "skip", "inputs outside the hypothesis"))
    if d.lattice.rank == 2:
        bad = classical_mismatches(d)
        out.append(CheckResult("classical_limit", _status(not bad), f"order {d.max_order}", {"rays": [list(map(list, k)) for k in bad]} if bad else None))
    else:
        out.append(CheckResult("classical_limit", "skip", "rank above 2"))
    out.extend(theta_checks(d, samples, rng_seed))
    return out


def theta_checks(d: ScatDiagram, samples: int, rng_seed: int = 0) -> list[CheckResult]:
    rng = random.Random(rng_seed)
    k = min(d.max_order, 6)
    pointed = cps = True
    repro = None
    for _ in range(samples):
        p = (rng.randint(-2, 2), rng.randint(-2, 2))
        while True:
            Q1, Q2 = _random_point(rng), _random_point(rng)
            try:
                a, b = theta(d, p, Q1, k), theta(d, p, Q2, k)
                break
            except NonGenericPointError:
                continue
        if not a.is_pointed():
            pointed = False
            repro = repro or {"p": list(p), "Q": [str(x) for x in Q1]}
        if transport(d, a, Q2).terms != b.terms:
            cps = False
            repro = repro or {"p": list(p), "Q1": [str(x) for x in Q1], "Q2": [str(x) for x in Q2]}
    out = [
        CheckResult("theta_pointed", _status(pointed), f"{samples} samples at order {k}", None if pointed else repro),
        CheckResult("theta_transport", _status(cps), f"{samples} samples at order {k}", None if cps else repro),
    ]
    sc_ok = True
    sc_repro = None
    for _ in range(samples):
        p1 = (rng.randint(-2, 2), rng.randint(-2, 2))
        p2 = (rng.randint(-2, 2), rng.randint(-2, 2))
        try:
            alpha = structure_constants(d, p1, p2, k)
        except NonGenericPointError:
            continue
        lead = alpha.get(tuple(a + b for a, b in zip(p1, p2)), LaurentPoly.zero())
        want = t_pow(d.lattice.pair(p1, p2))
        if lead != want or not all(c.is_nonnegative() for c in alpha.values()):
            sc_ok = False
            sc_repro = sc_repro or {"p1": list(p1), "p2": list(p2)}
    out.append(CheckResult("structure_constants", _status(sc_ok), f"{samples} pairs", sc_repro))
    return out


def seed_checks(s: Seed, k: int, samples: int = 4, rng_seed: int = 0) -> list[CheckResult]:
    out = []
    lam = s.Lambda or find_lambda(s)
    out.append(CheckResult("compatible_form", _status(lam is not None and s.is_compatible(lam))))
    if lam is None:
        return out
    s = s.with_lambda(lam)
    rank2 = s.n == 2 and not s.frozen
    d = build_cluster_diagram(s, "a", k)
    out.extend(diagram_checks(d, samples, rng_seed))
    if not rank2:
        out.append(CheckResult("chambers", "skip", "rank-2 seeds only"))
        return out
    kk = min(k, 6)
    cs = chambers(s)
    rays = {cr.ray for cr in d.rays()}
    inside = []
    for c in cs:
        a, b = (d.chart.phi(r) for r in c.rays)
        if cross(a, b) < 0:
            a, b = b, a
        for r in rays:
            if cross(a, r) > 0 and cross(r, b) > 0:
                inside.append((list(c.jseq), list(r)))
    out.append(CheckResult("chambers", _status(not inside), f"{len(cs)} chambers", {"wall_inside": inside[:3]} if inside else None))
    bad = []
    for j in s.unfrozen:
        for flavor in ("a", "x"):
            if not compare_mutation(s, j, kk, flavor).equal:
                bad.append([j + 1, flavor])
    out.append(CheckResult("mutation_invariance", _status(not bad), f"order {kk}", {"failing": bad} if bad else None))
    rng = random.Random(rng_seed)
    lines_ok, repro, done = True, None, 0
    while done < samples:
        j = rng.choice(s.unfrozen)
        p = (rng.randint(-2, 2), rng.randint(-2, 2))
        Q = (Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        try:
            res = compare_broken_lines(s, j, p, Q, min(kk, 4))
        except (NonGenericPointError, ValueError):
            continue
        done += 1
        if not res.equal:
            lines_ok = False
            repro = repro or {"k": j + 1, "p": list(p), "Q": [str(x) for x in Q]}
    out.append(CheckResult("broken_line_mutation", _status(lines_ok), f"{samples} samples", repro))
    bad_vars = []
    for g, th in cluster_variables(s, kk, 4).items():
        if not all(c.is_nonnegative() and c.is_integral() and c.is_bar_invariant() for c in th.terms.values()):
            bad_vars.append(list(g))
    out.append(CheckResult("cluster_variable_positivity", _status(not bad_vars), "", {"g": bad_vars} if bad_vars else None))
    preserved = True
    for jseq in ((0,), (1,), (0, 1), (1, 0, 1)):
        Q = (Fraction(3, 7), Fraction(-5, 11))
        try:
            mat = psi_linear(s, jseq, Q)
        except ValueError:
            continue
        for x, y in (((1, 0), (0, 1)), ((2, -1), (1, 3))):
            px = tuple(sum(mat[i][c] * x[c] for c in range(2)) for i in range(2))
            py = tuple(sum(mat[i][c] * y[c] for c in range(2)) for i in range(2))
            if s.Lambda_form(px, py) != s.Lambda_form(x, y):
                preserved = False
    out.append(CheckResult("linearization_preserves_lambda", _status(preserved)))
    return out


def cmd_check(cfg: JobConfig) -> Outcome:
    if (cfg.init is None) == (cfg.seed is None):
        raise click.UsageError("give exactly one of --init and --seed")
    if cfg.seed is not None:
        results = seed_checks(load_seed(cfg), cfg.order, cfg.samples)
    else:
        try:
            d = load_diagram(cfg)
        except InconsistentError as exc:
            results = [CheckResult("consistency", "fail", str(exc))]
        else:
            results = diagram_checks(d, cfg.samples)
    failed = [r for r in results if r.status == "fail"]
    width = max(len(r.name) for r in results)
    text = "\n".join(f"{r.name:<{width}}  {r.status:<4}  {r.detail}".rstrip() for r in results)
    if failed:
        text += "\n\nreproducers:\n" + _json({r.name: r.reproducer for r in failed})
    payload = {
        "order": cfg.order,
        "results": [
            {"name": r.name, "status": r.status, "detail": r.detail, "reproducer": r.reproducer} for r in results
        ],
    }
    rows = [["property", "status", "detail"]] + [[r.name, r.status, r.detail] for r in results]
    return Outcome(payload, text, rows, code=1 if failed else 0)


# click wiring


def _emit(cfg: JobConfig, res: Outcome) -> None:
    body = render(cfg, res)
    if cfg.out:
        Path(cfg.out).write_text(body)
    else:
        click.echo(body, nl=False)
    if res.code:
        sys.exit(res.code)


def _common(f):
    f = click.option("--order", "-k", type=int, default=6, show_default=True, help="Truncation order.")(f)
    f = click.option("--init", type=str, help="Initial-wall JSON file or fixture name.")(f)
    f = click.option("--seed", type=str, help="Seed JSON file or fixture name.")(f)
    f = click.option("--flavor", type=click.Choice(["a", "x", "aprin"]), default="a", show_default=True)(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv", "svg", "text"]), default="json", show_default=True)(f)
    f = click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout.")(f)
    return f


def _cfg(command: str, **kw) -> JobConfig:
    Q = kw.pop("Q", None)
    p = kw.pop("p", None)
    p2 = kw.pop("p2", None)
    jseq = kw.pop("jseq", "")
    window = kw.pop("window", None)
    cfg = JobConfig(
        command,
        Q=parse_point(Q) if Q else None,
        p=parse_vector(p) if p else None,
        p2=parse_vector(p2) if p2 else None,
        jseq=parse_jseq(jseq or ""),
        **kw,
    )
    if window:
        vals = [float(x) for x in window.split(",")]
        if len(vals) != 4:
            raise click.BadParameter("--window takes x0,y0,x1,y1")
        cfg.window = tuple(vals)
    return cfg


@click.group()
def main() -> None:
    """Quantum scattering diagrams, theta functions and cluster mutations."""


@main.command()
@_common
@click.option("--window", type=str, help="SVG viewport x0,y0,x1,y1.")
def scatter(**kw) -> None:
    """Complete a diagram and report its walls; exit 1 if it is inconsistent."""
    cfg = _cfg("scatter", **kw)
    _emit(cfg, cmd_scatter(cfg))


@main.command(name="theta")
@_common
@click.option("--p", "p", type=str, required=True, help="Lattice point a,b.")
@click.option("--Q", "Q", type=str, help="Chart endpoint x,y (rationals allowed).")
def theta_cmd(**kw) -> None:
    """Theta function expansion at a chart point."""
    cfg = _cfg("theta", **kw)
    _emit(cfg, cmd_theta(cfg))


@main.command()
@_common
@click.option("--p1", "p", type=str, required=True)
@click.option("--p2", "p2", type=str, required=True)
def product(**kw) -> None:
    """Structure constants of a product of two theta functions."""
    cfg = _cfg("product", **kw)
    _emit(cfg, cmd_product(cfg))


@main.command()
@_common
@click.option("--jseq", type=str, default="", help="Mutation sequence, 1-based, e.g. 1,2,1.")
def mutate(**kw) -> None:
    """Mutate a seed along a sequence and report the new basis and chamber."""
    cfg = _cfg("mutate", **kw)
    _emit(cfg, cmd_mutate(cfg))


@main.command()
@_common
def dt(**kw) -> None:
    """Refined DT invariants of a two-wall diagram with verdicts."""
    cfg = _cfg("dt", **kw)
    _emit(cfg, cmd_dt(cfg))


@main.command()
@_common
@click.option("--samples", type=int, default=4, show_default=True, help="Random samples per sampled property.")
def check(**kw) -> None:
    """Run the property table; exit 1 on any failure."""
    cfg = _cfg("check", **kw)
    _emit(cfg, cmd_check(cfg))


@main.command()
@click.argument("name", required=False)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def export(name: str | None, fmt: str, out: str | None) -> None:
    """List packaged fixtures, or write one out."""
    cfg = JobConfig("export", fmt=fmt, out=out)
    _emit(cfg, cmd_export(name))


if __name__ == "__main__":
    main()
