from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from thetaforge.brokenlines import theta, transport
from thetaforge.cluster import (
    Seed,
    T_map,
    T_step,
    apply_linear,
    b1_kernel,
    build_cluster_diagram,
    chamber,
    chambers,
    cluster_lattice,
    cluster_variables,
    compare_broken_lines,
    compare_mutation,
    find_lambda,
    mutate_monomial,
    positive_chamber_point,
    principal,
    psi_linear,
    rho,
    xi,
)
from thetaforge.fixtures import seed
from thetaforge.laurent import LaurentPoly, quantum_int
from thetaforge.qtorus import QSeries, classical_limit

ONE = LaurentPoly.one()
A2 = seed("a2_seed")
K2 = seed("kronecker2_seed")


@lru_cache(maxsize=None)
def _diagram(name: str, flavor: str, k: int):
    return build_cluster_diagram(seed(name), flavor, k)


def _rank2(n: int) -> Seed:
    return Seed.from_matrix([[0, n], [-n, 0]])


def _exchange_oracle() -> set:
    """The five A2 cluster variables from ``x_(i-1) x_(i+1) = x_i + 1``, as Laurent polynomials."""
    x1, x2 = sympy.symbols("x1 x2")
    xs = [x1, x2]
    for _ in range(5):
        xs.append(sympy.cancel((xs[-1] + 1) / xs[-2]))
    return {sympy.expand(sympy.cancel(x)) for x in xs[:5]}


def _laurent_from_limit(terms: dict) -> sympy.Expr:
    x1, x2 = sympy.symbols("x1 x2")
    return sympy.expand(sum(sympy.Rational(str(c)) * x1 ** v[0] * x2 ** v[1] for v, c in terms.items()))


def test_mutation_example():
    s = A2.mutate(0)
    assert s.e(0) == (-1, 0)
    assert s.e(1) == (0, 1)
    assert s.matrix() == tuple(tuple(-x for x in row) for row in A2.matrix())


def test_mutating_twice_restores_the_exchange_matrix():
    for s in (A2, K2, _rank2(3)):
        for j in (0, 1):
            back = s.mutate(j).mutate(j)
            assert back.matrix() == s.matrix()
            assert back.frozen == s.frozen
    # the basis itself moves by e_i -> e_i + B(e_i, e_j) e_j
    assert A2.mutate(0).mutate(0).basis == ((1, 0), (-1, 1))


def test_frozen_index_cannot_mutate():
    s = principal(A2)
    with pytest.raises(ValueError):
        s.mutate(2)
    with pytest.raises(ValueError):
        A2.mutate(5)


@pytest.mark.parametrize("n", [1, 2, 3, -2])
def test_find_lambda_rank_two(n):
    s = _rank2(n)
    lam = find_lambda(s)
    assert lam is not None
    assert s.is_compatible(lam)
    assert lam[0][1] == Fraction(1, n)


def test_find_lambda_infeasible_for_zero_form():
    s = Seed.from_matrix([[0, 0], [0, 0]])
    assert find_lambda(s) is None
    assert b1_kernel(s)


def test_principal_seed():
    for s in (A2, K2):
        p = principal(s)
        assert p.n == 4
        assert p.frozen == frozenset({2, 3})
        assert sympy.Matrix(p.matrix()).det() == 1
        assert p.is_compatible()
        assert find_lambda(p) is not None


def test_principal_from_pulled_back_lambda():
    s = A2.with_lambda(find_lambda(A2))
    p = principal(s, mode="rho")
    for a in ((1, 0, 0, 0), (0, 1, 0, 0), (1, 2, 3, 4)):
        for b in ((0, 1, 0, 0), (2, -1, 5, 7)):
            assert p.Lambda_form(a, b) == s.Lambda_form(rho(s, a), rho(s, b))
    with pytest.raises(ValueError):
        principal(A2, mode="rho")


@pytest.mark.parametrize("nvec", [(1, 0), (0, 1), (2, -3), (-1, 4)])
def test_rho_after_xi_is_b1(nvec):
    for s in (A2, K2):
        assert rho(s, xi(s, nvec)) == s.B1(nvec)


def test_a2_diagram_is_the_pentagon():
    d = _diagram("a2_seed", "a", 6)
    assert len(d.rays()) == 5
    assert len(chambers(A2)) == 5
    added = [cr for cr in d.rays() if not cr.incoming and cr.direction not in set(A2.wall_directions())]
    assert len(added) == 1
    assert added[0].factor.to_ee().coeff_map == {1: ONE}


def test_kronecker_diagram_has_the_central_wall():
    d = _diagram("kronecker2_seed", "a", 6)
    # B1(e_i) = 2 * primitive here, so every wall sits at the second multiple
    ees = [cr.factor.to_ee().coeff_map for cr in d.rays()]
    assert {2: quantum_int(2)} in ees
    assert all(set(pf) == {2} for pf in ees)


def test_kronecker_has_infinitely_many_chambers():
    assert len(chambers(K2, 4)) < len(chambers(K2, 6)) < len(chambers(K2, 8))


def test_chambers_are_images_of_the_positive_chamber():
    for c in chambers(A2):
        target = A2.mutate_seq(c.jseq)
        assert chamber(A2, c.jseq) == c.rays
        for r in c.rays:
            image = T_map(A2, c.jseq, r)
            coords = sympy.Matrix([list(b) for b in target.basis]) * sympy.Matrix(image)
            assert all(x >= 0 for x in coords)


def test_cluster_variables_match_the_exchange_relation():
    cv = cluster_variables(A2, 6)
    assert len(cv) == 5
    limits = {_laurent_from_limit(classical_limit(q)) for q in cv.values()}
    assert limits == _exchange_oracle()


def test_cluster_variables_are_bar_invariant_and_positive():
    for q in cluster_variables(A2, 6).values():
        for c in q.terms.values():
            assert c.bar() == c
            assert c.is_integral() and c.is_nonnegative()


def test_theta_is_a_monomial_inside_its_chamber():
    d = _diagram("a2_seed", "a", 6)
    cv = cluster_variables(A2, 6)
    for c in chambers(A2):
        a, b = c.rays
        inside = d.chart.phi(tuple(3 * x + 2 * y for x, y in zip(a, b)))
        for g in c.rays:
            th = theta(d, g, inside)
            assert th.terms == QSeries.monomial(d.lattice, g, 1, 6)
            Q = positive_chamber_point(A2, d, [(g[0] + i, g[1] + j) for i in range(-6, 7) for j in range(-6, 7)])
            assert transport(d, th, Q).terms == cv[g]


def test_t_step_examples():
    m = (-1, 3)
    assert T_step(A2, 0, m) == m
    for j in (0, 1):
        vj = A2.v(j)
        assert T_step(A2, j, vj) == tuple(-x for x in A2.mutate(j).B1(A2.mutate(j).e(j)))


def test_mutate_monomial_examples():
    lat, _, used = cluster_lattice(A2, "a")
    z = QSeries.monomial(lat, (1, 0), 1)
    assert mutate_monomial(used, 0, "a", z) == QSeries(lat, {(1, 0): 1, (1, 1): 1})
    z = QSeries.monomial(lat, (0, 1), 1)
    assert mutate_monomial(used, 0, "a", z) == z
    xlat, _, xs = cluster_lattice(A2, "x")
    p = (0, -1)
    assert A2.B(p, A2.e(0)) == 1
    out = mutate_monomial(xs, 0, "x", QSeries.monomial(xlat, p, 1))
    assert out == QSeries(xlat, {p: 1, (1, -1): 1})


@pytest.mark.parametrize("name", ["a2_seed", "kronecker2_seed"])
@pytest.mark.parametrize("j", [0, 1])
def test_diagram_mutation_matches_the_mutated_seed(name, j):
    result = compare_mutation(seed(name), j, 4)
    assert result.equal
    assert result.direct


def test_x_diagram_mutation():
    assert compare_mutation(A2, 0, 4, "x").equal


@pytest.mark.parametrize("p", [(1, 0), (0, 1), (-1, 1), (1, -1)])
def test_broken_lines_follow_mutation(p):
    result = compare_broken_lines(A2, 0, p, (Fraction(7, 3), Fraction(2, 5)), 4)
    assert result.equal


@pytest.mark.parametrize("nvec", [(3, 1), (-2, 5), (7, -3), (-5, -4)])
def test_b1_intertwines_x_and_a_thetas(nvec):
    dx = _diagram("a2_seed", "x", 4)
    da = _diagram("a2_seed", "a", 4)
    used = cluster_lattice(A2, "a")[2]
    for p in [(1, 0), (0, -1), (-1, 1)]:
        tx = theta(dx, p, dx.chart.phi(nvec)).terms
        ta = theta(da, used.B1(p), da.chart.phi(used.B1(nvec))).terms
        assert {used.B1(v): c for v, c in tx.terms.items()} == ta.terms


@pytest.mark.parametrize("nvec", [(3, 1), (-2, 5), (7, -3), (-5, -4)])
def test_x_thetas_embed_in_principal_thetas(nvec):
    dx = _diagram("a2_seed", "x", 4)
    dp = _diagram("a2_seed", "aprin", 4)
    for p in [(1, 0), (0, -1), (-1, 1)]:
        tx = theta(dx, p, dx.chart.phi(nvec)).terms
        tp = theta(dp, xi(A2, p), dp.chart.phi(xi(A2, nvec))).terms
        assert {xi(A2, v): c for v, c in tx.terms.items()} == tp.terms


vec2 = st.tuples(st.integers(-5, 5), st.integers(-5, 5))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([A2, K2, _rank2(3)]), st.lists(st.integers(0, 1), max_size=4), vec2, vec2, vec2)
def test_local_linearization_preserves_lambda(s, jseq, Q, x, y):
    s = s.with_lambda(find_lambda(s))
    point = (Fraction(Q[0]) + Fraction(1, 7), Fraction(Q[1]) + Fraction(1, 11))
    mat = psi_linear(s, jseq, point)
    assert s.Lambda_form(apply_linear(mat, x), apply_linear(mat, y)) == s.Lambda_form(x, y)


@lru_cache(maxsize=None)
def _a2_thetas():
    d = _diagram("a2_seed", "a", 4)
    Q = (Fraction(1000), Fraction(999))
    return d, {p: theta(d, p, Q, 3).terms for p in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, -1), (-1, 1)]}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.dictionaries(st.integers(-2, 2), st.integers(-2, 2), max_size=3), min_size=6, max_size=6))
def test_classical_limit_kernel(coeffs):
    # a theta combination vanishes at t = 1 exactly when every coefficient does
    d, thetas = _a2_thetas()
    total = {}
    for (p, th), c in zip(thetas.items(), coeffs):
        for v, val in classical_limit(th).items():
            total[v] = total.get(v, 0) + val * LaurentPoly(c).at_one()
    vanishes = all(x == 0 for x in total.values())
    assert vanishes == all(LaurentPoly(c).at_one() == 0 for c in coeffs)
