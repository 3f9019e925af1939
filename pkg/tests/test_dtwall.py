from __future__ import annotations

import csv
import io
import itertools
from functools import lru_cache

import pytest

from thetaforge.dtwall import (
    dense_witnesses,
    degree_bound_ok,
    euler_form,
    extract_dt,
    in_sigma_bad,
    kronecker_diagram,
    kronecker_setup,
)
from thetaforge.fixtures import initial_diagram
from thetaforge.laurent import LaurentPoly, quantum_int, t_pow

ONE = LaurentPoly.one()


@lru_cache(maxsize=None)
def _report(n: int, s1: int = 0, s2: int = 0, k: int = 6):
    return extract_dt(kronecker_diagram(n, s1, s2, k))


def _grassmannian_poincare(k: int, n: int) -> LaurentPoly:
    """Balanced Poincare polynomial of Gr(k, n) from its Schubert cells."""
    dim = k * (n - k)
    out: dict[int, int] = {}
    for subset in itertools.combinations(range(1, n + 1), k):
        cell = sum(subset) - k * (k + 1) // 2
        e = 2 * cell - dim
        out[e] = out.get(e, 0) + 1
    return LaurentPoly(out)


def test_euler_form_examples():
    assert euler_form(2, (1, 1)) == 0
    assert euler_form(1, (1, 0)) == 1
    assert euler_form(3, (1, 1)) == -1


def test_setup_matches_fixtures():
    for (n, s1, s2), name in [((2, 0, 0), "kronecker2"), ((1, 0, -1), "dense_example"), ((1, 0, 0), "pentagon")]:
        assert kronecker_setup(n, s1, s2, 4).to_ee_form() == initial_diagram(name, 4).to_ee_form()
    with pytest.raises(ValueError):
        kronecker_setup(0)


def test_kronecker2_values():
    r = _report(2, k=8)
    assert r.omega(1, 1) == quantum_int(2)
    assert r.omega(2, 2).is_zero()


def test_pentagon_values():
    r = _report(1, k=8)
    assert r.omega(1, 1) == ONE
    assert {(e.a, e.b) for e in r.entries} == {(1, 0), (0, 1), (1, 1)}


def test_dense_values():
    r = _report(1, 0, -1, 8)
    assert r.omega(1, 1) == t_pow(-1)
    assert r.omega(2, 2).is_zero()
    for n in range(1, 6):
        assert r.omega(1, n) == t_pow(-n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_thin_dimension_vectors_are_grassmannians(n):
    # representations of dimension (1, k) are k-planes in the n arrows' span
    r = _report(n)
    for k in range(1, 5):
        want = _grassmannian_poincare(k, n) if k <= n else LaurentPoly.zero()
        assert r.omega(1, k) == want
        assert r.omega(k, 1) == want


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("shifts", [(0, 0), (0, -1), (1, 2), (-2, 1)])
def test_all_verdicts_pass(n, shifts):
    r = _report(n, *shifts)
    assert r.all_pass()
    for e in r.entries:
        assert e.verdicts["positivity"]
        assert e.verdicts["parity"]
        quiver = shifts == (0, 0)
        assert (e.verdicts["degree_bound"] is None) != quiver
        assert (e.verdicts["lefschetz"] is None) != quiver


def test_parity_is_chi_plus_one_for_quivers():
    for n in (1, 2, 3):
        for e in _report(n).entries:
            assert e.omega.parity() == ("even" if (e.chi + 1) % 2 == 0 else "odd")


def test_degree_bound_examples():
    assert degree_bound_ok(quantum_int(3), -1)
    assert degree_bound_ok(ONE, 1)
    assert not degree_bound_ok(quantum_int(3), 0)
    assert not degree_bound_ok(LaurentPoly({-2: 1, 0: -1}), -1)
    assert not degree_bound_ok(LaurentPoly.zero(), 0)
    # t^(chi - 1)(1 + g) with g of degree 2(1 - chi) + 2 is too long
    assert not degree_bound_ok(LaurentPoly({-2: 1, 4: 1}), -1)


def test_dense_witness_for_three_arrows():
    witnesses = dense_witnesses(_report(3))
    assert witnesses
    for e in witnesses:
        assert in_sigma_bad(3, (e.a, e.b))
        assert euler_form(3, (e.a, e.b)) < 0
    assert not dense_witnesses(_report(2))


def test_sigma_bad_boundaries():
    assert in_sigma_bad(3, (1, 1))
    assert not in_sigma_bad(3, (1, 3))
    assert not in_sigma_bad(2, (1, 1))
    assert not in_sigma_bad(3, (0, 1))


def test_csv_and_json():
    r = _report(2)
    rows = list(csv.DictReader(io.StringIO(r.to_csv())))
    assert len(rows) == len(r.entries)
    central = next(row for row in rows if (row["a"], row["b"]) == ("1", "1"))
    assert central["omega"] == quantum_int(2).to_text()
    assert central["positivity"] == "pass"
    data = r.to_json()
    assert data["n"] == 2
    assert {(e["a"], e["b"]) for e in data["entries"]} == {(e.a, e.b) for e in r.entries}
