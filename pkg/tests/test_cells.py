import numpy as np
import pytest

from su3ade import cells, graphs
from su3ade.arith import quantum_integer
from su3ade.cells import CellSystem


def test_triangle_counts(catalog):
    assert len(cells.enumerate_triangles(catalog["A4"])) == 1
    # one canonical triangle per closed 3-walk orbit: trace(D^3) / 3
    for name in ("A5", "A6", "D6", "E8"):
        D = catalog[name].adjacency
        assert len(cells.enumerate_triangles(catalog[name])) == np.trace(D @ D @ D) // 3
    assert len(cells.enumerate_triangles(catalog["A5"])) == 4


def test_no_triangles():
    g = graphs.Graph("two", ["a", "b"], [(0, 1), (1, 0)], coxeter=4)
    assert cells.enumerate_triangles(g) == []
    # the graph still has type I frames, so the empty system must fail
    assert not cells.verify_cells(CellSystem(g, {})).passed
    with pytest.raises(cells.NoConvergence):
        cells.solve_cells(g)


def test_a4_closed_form(catalog):
    g = catalog["A4"]
    (t,) = cells.enumerate_triangles(g)
    cs = CellSystem(g, {t: 2 ** 0.25 + 0j})
    assert cells.verify_cells(cs, tol=1e-12).passed
    # |2W|^2 - [2] = 3 [2]
    r = cells.verify_type_I(cs.scaled(2)).max_residual
    assert r == pytest.approx(3 * quantum_integer(2, 4), rel=1e-12)


def test_shipped_cells_verify(shipped_cells):
    assert set(shipped_cells) == {"A4", "A5", "A6", "D6"}
    for cs in shipped_cells.values():
        assert cells.verify_cells(cs, tol=1e-10).passed


def test_solve_a4_to_1e12(catalog):
    cs = cells.solve_cells(catalog["A4"], seed=0, tol=1e-12)
    assert cells.verify_cells(cs, tol=1e-12).passed
    assert abs(next(iter(cs.W.values()))) == pytest.approx(2 ** 0.25, abs=1e-12)


def test_solver_deterministic(catalog):
    a = cells.solve_cells(catalog["A5"], seed=4)
    b = cells.solve_cells(catalog["A5"], seed=4)
    assert a.to_json() == b.to_json()


def test_gauge_invariance(shipped_cells):
    cs = shipped_cells["A5"]
    rng = np.random.default_rng(7)
    u = np.exp(2j * np.pi * rng.random(len(cs.graph.edges)))
    moved = cells.gauge_transform(cs, u)
    r0 = cells.verify_cells(cs).max_residual
    assert abs(cells.verify_cells(moved).max_residual - r0) < 1e-12
    assert cells.gauge_equivalent(cs, moved)
    assert np.allclose(cells.gauge_invariants(cs), cells.gauge_invariants(moved), atol=1e-12)


def test_gauge_trivial_and_sign(shipped_cells):
    cs = shipped_cells["A6"]
    same = cells.gauge_transform(cs, {})
    assert same.W == cs.W
    flipped = cells.gauge_transform(cs, {0: -1})
    for t, w in cs.W.items():
        sign = (-1) ** t.count(0)
        assert flipped.W[t] == pytest.approx(sign * w)
    with pytest.raises(ValueError):
        cells.gauge_transform(cs, {0: 2.0})


def test_d6_conjugates_inequivalent(shipped_cells):
    cs = shipped_cells["D6"]
    conj = cs.conjugate()
    assert cells.verify_cells(conj, tol=1e-10).passed
    assert not cells.gauge_equivalent(cs, conj)


def test_d6_solutions_vary_with_seed(catalog, shipped_cells):
    # the frame equations leave a continuous family on D6; see the decisions ledger
    other = cells.solve_cells(catalog["D6"], seed=2)
    assert cells.verify_cells(other, tol=1e-10).passed
    assert not cells.gauge_equivalent(shipped_cells["D6"], other)


def test_e12_cyclic_candidate_has_no_cells():
    B = [[0, 0, 1, 1], [1, 0, 0, 1], [0, 1, 0, 1], [1, 1, 1, 1]]
    g = graphs.cyclic_graph("E12?", B, 12)
    with pytest.raises(cells.NoConvergence) as info:
        cells.solve_cells(g, seed=0, restarts=3)
    assert info.value.residual > 0.1


def test_json_roundtrip(shipped_cells):
    cs = shipped_cells["A6"]
    back = cells.cells_from_dict(cs.to_dict(), cs.graph)
    assert back.W == cs.W


def test_cells_on_non_triangle_rejected(catalog):
    g = catalog["A5"]
    with pytest.raises(graphs.GraphError):
        cells.cells_from_dict({"graph": "A5", "cells": [{"edges": [0, 0, 0], "re": 1, "im": 0}]}, g)
    with pytest.raises(graphs.GraphError):
        cells.cells_from_dict({"graph": "A5", "cells": [{"edges": [0]}]}, g)
