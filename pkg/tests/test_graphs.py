import json

import numpy as np
import pytest

from su3ade import fusion, graphs
from su3ade.fusion import Weight


def test_a4_is_three_cycle():
    g = graphs.build_A_graph(4)
    assert g.n == 3 and len(g.edges) == 3
    D = g.adjacency
    assert np.array_equal(D @ D @ D, np.eye(3, dtype=int))


def test_a6_size_and_norm():
    g = graphs.build_A_graph(6)
    assert g.n == 10
    assert graphs.pf_data(g).norm == pytest.approx(2.0, abs=1e-12)


def test_a8_star_has_one_out_edge():
    g = graphs.build_A_graph(8)
    assert g.n == 21 and len(g.out_edges(g.star)) == 1


@pytest.mark.parametrize("m, n", [(5, 2), (6, 6), (8, 7)])
def test_orbifold_sizes(m, n):
    assert graphs.build_D_graph(m).n == n


def test_d6_norm_squared_is_4():
    assert graphs.pf_data(graphs.build_D_graph(6)).norm ** 2 == pytest.approx(4.0, abs=1e-12)


def test_a4_pf_is_flat():
    pf = graphs.pf_data(graphs.build_A_graph(4))
    assert pf.norm == pytest.approx(1.0) and np.allclose(pf.phi, 1)


def test_graph_json_roundtrip():
    g = graphs.build_A_graph(5)
    back = graphs.graph_from_dict(json.loads(g.to_json()))
    assert np.array_equal(back.adjacency, g.adjacency) and back.star == g.star


def test_malformed_colour_rejected():
    d = graphs.build_A_graph(4).to_dict()
    d["vertices"][0]["colour"] = 7
    with pytest.raises(graphs.GraphError):
        graphs.graph_from_dict(d)
    d["vertices"][0]["colour"] = None
    with pytest.raises(graphs.GraphError):
        graphs.graph_from_dict(d)


def test_colouring_enforced():
    with pytest.raises(graphs.GraphError):
        graphs.Graph("bad", ["a", "b"], [(0, 1), (1, 0)], colours=[0, 1])


def test_relabel_is_isomorphic():
    g = graphs.build_A_graph(6)
    perm = np.random.default_rng(0).permutation(g.n)
    assert graphs.isomorphic(g, graphs.relabel(g, perm))
    assert not graphs.isomorphic(g, graphs.build_D_graph(6))


def test_e8_data(catalog):
    g = catalog["E8"]
    assert g.n == 12 and g.coxeter == 8
    assert graphs.check_pf(g, graphs.pf_data(g)).passed


def test_catalog_names(catalog):
    names = set(catalog.names())
    expected = {f"A{m}" for m in range(4, 13)} | {f"D{m}" for m in range(5, 13)}
    assert expected | {"E8", "E8*"} <= names


def test_catalog_validates_everything(catalog):
    for name in catalog.names():
        assert catalog.validate(name).passed, name


def test_catalog_hash_mismatch(tmp_path):
    src = graphs.default_data_dir()
    for f in src.rglob("*.json"):
        dst = tmp_path / f.relative_to(src)
        dst.parent.mkdir(parents=True, exist_ok=True)
        dst.write_bytes(f.read_bytes())
    (tmp_path / "graphs" / "E8.json").write_text(
        (tmp_path / "graphs" / "E8.json").read_text() + " ")
    with pytest.raises(graphs.GraphError):
        graphs.Catalog(tmp_path)


def test_nimrep_of_a_graph_is_fusion_ring():
    for k in (1, 2, 4):
        nim = graphs.nimrep_from_graph(graphs.build_A_graph(k + 3), k)
        fr = fusion.fusion_matrices(k)
        assert all(np.array_equal(nim.G[w], fr[w]) for w in fr.alcove.weights)
        assert graphs.check_nimrep(nim, fr).passed


def test_e8_nimrep_nonnegative(catalog):
    nim = graphs.nimrep_from_graph(catalog["E8"], 5)
    assert len(nim.G) == 21
    assert all((M >= 0).all() for M in nim.G.values())
    assert np.array_equal(nim[(0, 0)], np.eye(12, dtype=int))
    assert graphs.check_nimrep(nim, fusion.fusion_matrices(5)).passed


def test_wrong_level_rejected(catalog):
    with pytest.raises(graphs.GraphError):
        graphs.nimrep_from_graph(catalog["E8"], 4)


def test_spectrum_size_mismatch(catalog):
    md = fusion.build_modular_data(5)
    nim = graphs.nimrep_from_graph(catalog["E8"], 5)
    with pytest.raises(graphs.SizeMismatch, match="12 vertices"):
        graphs.verify_nimrep_spectrum(nim, fusion.identity_invariant(5), md)


def test_e8_star_spectrum(catalog):
    md = fusion.build_modular_data(5)
    nim = graphs.nimrep_from_graph(catalog["E8*"], 5)
    assert graphs.verify_nimrep_spectrum(nim, fusion.e8_star_invariant(), md).passed


def test_supertransitivity(catalog):
    assert graphs.supertransitivity(catalog["A7"], 8) == ">= 8"
    # path-enumeration values, pinned
    assert graphs.supertransitivity(catalog["D6"], 10) == 1
    assert graphs.supertransitivity(catalog["E8"], 10) == 1


def test_mckay_abelian():
    g = graphs.mckay_graph_abelian(1, 1)
    assert g.n == 1 and len(g.edges) == 3
    g = graphs.mckay_graph_abelian(3, 3)
    assert g.n == 9
    for m, n in [(2, 3), (3, 3), (4, 5)]:
        assert graphs.pf_data(graphs.mckay_graph_abelian(m, n)).norm == pytest.approx(3.0)


def test_conjugation_permutation():
    g = graphs.build_A_graph(6)
    tau = graphs.conjugation_permutation(g)
    P = graphs.permutation_matrix(tau)
    assert np.array_equal(P @ g.adjacency @ P.T, g.adjacency.T)
