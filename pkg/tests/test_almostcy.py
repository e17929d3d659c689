import numpy as np
import pytest

from su3ade import almostcy, graphs
from su3ade.cells import CellSystem


def test_potential(shipped_cells):
    pot = almostcy.potential_from_cells(shipped_cells["A4"])
    assert len(pot) == 1
    assert len(almostcy.potential_from_cells(CellSystem(shipped_cells["A4"].graph, {}))) == 0
    for cs in shipped_cells.values():
        assert len(almostcy.potential_from_cells(cs)) == len(cs.W)


def test_relations(shipped_cells):
    cs = shipped_cells["A4"]
    rho = almostcy.relations(almostcy.potential_from_cells(cs))
    assert len(rho) == len(cs.graph.edges)
    assert all(len(terms) == 1 for terms in rho.values())


def test_relations_span_hecke_image(shipped_cells):
    for cs in shipped_cells.values():
        assert almostcy.relations_span_check(cs).passed


def test_closed_series_a4_a5(catalog):
    g = catalog["A4"]
    H = almostcy.closed_hilbert_series(g, almostcy.nakayama_permutation(g))
    assert len(H) == 2 and np.array_equal(H[1], g.adjacency)
    g = catalog["A5"]
    D = g.adjacency
    H = almostcy.closed_hilbert_series(g, almostcy.nakayama_permutation(g))
    assert len(H) == 3 and np.array_equal(H[2], D @ D - D.T)
    assert not H[3].any()


def test_wrong_permutation_does_not_terminate(catalog):
    g = catalog["A5"]
    with pytest.raises(almostcy.InconsistentSeries):
        almostcy.closed_hilbert_series(g, np.arange(g.n))


def test_cy_series_nonnegative():
    g = graphs.mckay_graph_abelian(3, 3)
    H = almostcy.cy_hilbert_series(g, 12)
    assert all((M >= 0).all() for M in H.H)
    assert np.array_equal(H[0], np.eye(9, dtype=int)) and np.array_equal(H[1], g.adjacency)


def test_nakayama_table(catalog):
    assert np.array_equal(almostcy.nakayama_permutation(catalog["D6"]), np.arange(6))
    nu = almostcy.nakayama_permutation(catalog["A4"])
    P0 = almostcy.rotation_P0(catalog["A4"])
    assert np.array_equal(nu, P0[P0]) and sorted(nu) == [0, 1, 2]
    assert (nu != np.arange(3)).all()
    assert np.array_equal(almostcy.nakayama_permutation(catalog["E8"]),
                          almostcy.rotation_P0(catalog["E8"]))


def test_nakayama_matches_forced_everywhere(catalog):
    for name in catalog.names():
        assert almostcy.check_nakayama(catalog[name]).passed, name


def test_top_degree(shipped_cells):
    for cs in shipped_cells.values():
        assert almostcy.verify_top_degree(cs).passed
    d6 = shipped_cells["D6"]
    from su3ade.pathalg import graded_dimension
    assert np.array_equal(graded_dimension(d6, 3), np.eye(6, dtype=int))


def test_brute_equals_closed(shipped_cells):
    for cs in shipped_cells.values():
        rep = almostcy.brute_vs_closed(cs)
        assert rep.passed, rep.text()


def test_zeroed_cell_changes_series(shipped_cells):
    # rescaling a cell leaves the quotient unchanged; dropping one does not
    cs = shipped_cells["A6"]
    t = sorted(cs.W)[0]
    W = dict(cs.W)
    W[t] = 1.3 * W[t]
    assert almostcy.brute_vs_closed(CellSystem(cs.graph, W)).passed
    W[t] = 0j
    rep = almostcy.brute_vs_closed(CellSystem(cs.graph, W))
    assert not rep["degree 3"].passed


def test_euler_identity(catalog):
    g = catalog["A5"]
    nu = almostcy.nakayama_permutation(g)
    H = almostcy.closed_hilbert_series(g, nu)
    assert almostcy.resolution_euler_check(g, nu, g.coxeter, H).passed
    bad = almostcy.HilbertSeries([M.copy() for M in H.H])
    bad.H[1] = bad.H[1] + 1
    assert not almostcy.resolution_euler_check(g, nu, g.coxeter, bad).passed
