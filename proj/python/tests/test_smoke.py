import itertools
import json
import pathlib

import pytest

import lrpop

DATA = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data"


def test_example_expansion():
    f = lrpop.CPPoly.load(str(DATA / "five_var_r2.json"))
    assert (f.n, f.r) == (5, 2)
    terms = dict((tuple(e), c) for e, c in f.expand())
    assert len(terms) == 20
    assert terms[(0, 1, 1, 1, 1)] == -3
    assert sum(terms.values()) == -12
    assert f([1.0] * 5) == -12


def test_json_round_trip():
    f = lrpop.monomial_instance(3, 2, 2, seed=4)
    g = lrpop.CPPoly.from_json(f.to_json())
    assert f == g
    doc = json.loads(f.to_json())
    doc["extra"] = 1
    with pytest.raises(lrpop.InvalidInput):
        lrpop.CPPoly.from_json(json.dumps(doc))


def test_basis_conversion_keeps_values():
    f = lrpop.monomial_instance(3, 3, 2, seed=1)
    g = f.convert("bernstein")
    assert g.basis == "bernstein"
    for x in itertools.product([-1.0, -0.3, 0.5], repeat=3):
        assert g(list(x)) == pytest.approx(f(list(x)), abs=1e-9)


def test_bernstein_optimum():
    f = lrpop.bernstein_instance(10, 2, 2, delta=1.0, seed=3)
    report = lrpop.solve(f, 2)
    assert report["status"] == "optimal"
    assert report["lower_bound"] == pytest.approx(2.0, abs=1e-3)
    assert len(report["point"]) == 10


def test_dense_and_low_rank_agree():
    f = lrpop.monomial_instance(3, 2, 2, seed=12)
    lr = lrpop.solve(f, 3)
    dense = lrpop.solve(f, dense=True)
    assert lr["lower_bound"] == pytest.approx(dense["lower_bound"], abs=1e-4)


def test_order_too_small():
    f = lrpop.monomial_instance(3, 3, 1, seed=5)
    with pytest.raises(lrpop.OrderTooSmall):
        lrpop.solve(f, 1)


def test_timeout():
    f = lrpop.bernstein_instance(30, 2, 2)
    assert lrpop.solve(f, 2, timeout=1e-9)["status"] == "time_limit"


def test_clique_tree():
    bags, edges, rip = lrpop.clique_tree(2, 5)
    assert rip
    assert len(bags) == 10
    assert len(edges) == 9
    assert max(len(b) for b in bags) == 4
    assert "graph" in lrpop.clique_tree_dot(2, 5)
