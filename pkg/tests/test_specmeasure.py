import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su3ade import graphs, specmeasure as sm

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def test_jacobian_values():
    assert sm.jacobian_sq(1) == pytest.approx(16)
    assert abs(sm.jacobian_sq(3)) < 1e-12


def test_a4_vacuum(catalog):
    mu = sm.vacuum_measure_discoid(catalog["A4"])
    assert len(mu) == 3 and np.allclose(mu.weights, 1 / 3)
    assert np.allclose(np.sort_complex(mu.points ** 3), 1)
    t = sm.moments(mu, 3, 3)
    assert t[0, 0] == pytest.approx(1) and t[3, 0] == pytest.approx(1)


def test_vacuum_second_moment_is_out_degree(catalog):
    for name in catalog.names():
        g = catalog[name]
        t = sm.moments(sm.vacuum_measure_discoid(g), 2, 2)
        assert t[1, 1] == pytest.approx(len(g.out_edges(g.star)), abs=1e-10), name
        assert t.hermitian_defect() < 1e-12


def test_non_normal_rejected():
    g = graphs.Graph("nn", ["a", "b"], [(0, 0), (0, 1), (1, 1)])
    with pytest.raises(sm.NonNormalAdjacency):
        sm.vacuum_measure_discoid(g)


def test_point_mass_at_zero():
    t = sm.moments(sm.DiscreteMeasure("discoid", [0j], [1.0]), 3, 3)
    assert t[0, 0] == 1 and np.abs(t.grid.ravel()[1:]).max() == 0


def test_measure_validation():
    with pytest.raises(ValueError):
        sm.DiscreteMeasure("discoid", [0j], [0.5])
    with pytest.raises(ValueError):
        sm.DiscreteMeasure("torus", [(2, 1)], [1.0])
    with pytest.raises(ValueError):
        sm.DiscreteMeasure("discoid", [5 + 0j], [1.0])


def test_cubic_inverse_special_points():
    assert np.allclose(sm.cubic_inverse(3), 1, atol=1e-5)
    r = sm.cubic_inverse(0)
    assert np.allclose(np.sort(np.angle(r)), np.sort(np.angle(np.exp(2j * np.pi * np.arange(3) / 3))))
    with pytest.raises(sm.OutsideDiscoid):
        sm.cubic_inverse(4)


def _separation(w1, w2):
    t = np.array([w1, 1 / w2, w2 / w1])
    return np.abs(t[:, None] - t[None, :])[np.triu_indices(3, 1)].min()


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_cubic_round_trip(a, b):
    w1, w2 = np.exp(1j * a), np.exp(1j * b)
    r = sm.cubic_inverse(sm.phi_map(w1, w2))
    # a root of multiplicity k is only determined to about eps^(1/k)
    tol = 1e-9 if _separation(w1, w2) > 1e-3 else 1e-4
    assert np.abs(r - w1).min() < tol
    assert np.abs(r - 1 / w2).min() < tol


@pytest.mark.parametrize("b", [1e-3, 1e-5, 1e-7])
def test_cubic_near_cusp(b):
    r = sm.cubic_inverse(sm.phi_map(1, np.exp(1j * b)))
    exact = np.array([1, np.exp(-1j * b), np.exp(1j * b)])
    assert np.abs(r[:, None] - exact[None, :]).min(axis=1).max() < 1e-4


@settings(max_examples=50, deadline=None)
@given(angles, angles)
def test_s3_orbit_has_common_image(a, b):
    z = sm.phi_map(np.exp(1j * a), np.exp(1j * b))
    for p in sm.s3_orbit(np.exp(1j * a), np.exp(1j * b)):
        assert abs(sm.phi_map(*p) - z) < 1e-12


def test_lift_point_mass_at_3():
    lifted = sm.lift_to_torus(sm.DiscreteMeasure("discoid", [3 + 0j], [1.0]))
    assert len(lifted) == 1
    assert np.allclose(lifted.points[0], [1, 1], atol=1e-5)


def test_lift_preserves_moments(catalog):
    for name in ("A4", "A6", "E8", "D7"):
        mu = sm.vacuum_measure_discoid(catalog[name])
        back = sm.lift_to_torus(mu).pushforward()
        rep = sm.compare_measures(sm.moments(mu, 4, 4), sm.moments(back, 4, 4), tol=1e-10)
        assert rep.passed, name


def test_a4_lift_atom_count(catalog):
    # six right inverses per atom, no coincidences for the cube roots of unity
    assert len(sm.lift_to_torus(sm.vacuum_measure_discoid(catalog["A4"]))) == 18


def test_uniform_dm():
    mu = sm.uniform_Dm_measure(6)
    assert len(mu) == 108 and np.allclose(mu.weights, 1 / 108)
    with pytest.raises(ValueError):
        sm.uniform_Dm_measure(0)


def test_plain_d4_second_moment():
    # the unweighted reading disagrees with A4 (whose value is 1)
    t = sm.moments(sm.uniform_Dm_measure(4).pushforward(), 1, 1)
    assert t[1, 1] == pytest.approx(3)


def test_jacobian_weighted_d4_is_a4(catalog):
    a = sm.moments(sm.jacobian_weighted(sm.uniform_Dm_measure(4)).pushforward(), 3, 3)
    b = sm.moments(sm.vacuum_measure_discoid(catalog["A4"]), 3, 3)
    assert sm.compare_measures(a, b, tol=1e-10).passed


def test_e8_orbit_pieces():
    # three points on the discoid, each lifting to a full orbit on the torus
    assert len(sm.orbit_measure(sm.orbit_points(8)).pushforward()) == 3
    mu = sm.e8_orbit_mixture()
    assert mu.weights.sum() == pytest.approx(1, abs=1e-12)
    r2 = np.sqrt(2)
    assert (2 - r2) / 8 + (2 + r2) / 8 + 0.5 == pytest.approx(1)


def test_e8_measure_matches_graph(catalog):
    a = sm.moments(sm.vacuum_measure_discoid(catalog["E8"]), 3, 3)
    b = sm.moments(sm.e8_orbit_mixture(), 3, 3)
    assert sm.compare_measures(a, b, tol=1e-8).passed
    assert sm.compare_measures(a, a, tol=1e-15).max_residual == 0


def test_compare_grid_mismatch():
    mu = sm.DiscreteMeasure("discoid", [0j], [1.0])
    with pytest.raises(ValueError):
        sm.compare_measures(sm.moments(mu, 2, 2), sm.moments(mu, 3, 3))


def test_subgroup_moments():
    cd = sm.abelian_class_data(3, 3)
    t = sm.subgroup_moments(cd, 2, 2)
    assert t[1, 1] == pytest.approx(3)
    triv = sm.subgroup_moments(sm.abelian_class_data(1, 1), 3, 3)
    assert triv[2, 1] == pytest.approx(27)


def test_class_data_roundtrip(tmp_path):
    cd = sm.abelian_class_data(2, 3)
    p = tmp_path / "z2z3.json"
    import json
    p.write_text(json.dumps(cd.to_dict()))
    back = sm.ClassData.load(p)
    assert back.order == 6 and np.allclose(back.chi, cd.chi)


def test_bad_class_data():
    with pytest.raises(ValueError):
        sm.ClassData.from_dict({"group": "x", "order": 5,
                                "classes": [{"size": 1, "chi_re": 3, "chi_im": 0}]})


def test_walk_oracle():
    assert [sm.walk_count_oracle(k) for k in range(4)] == [1, 1, 2, 6]
    assert sm.walk_count_oracle(4) == 23


def test_continuous_moments():
    assert sm.continuous_moments("SU3", 1, 1) == pytest.approx(1, abs=1e-6)
    assert sm.continuous_moments("T2", 1, 1) == pytest.approx(3, abs=1e-6)
    assert sm.continuous_moments("SU3", 0, 0) == pytest.approx(1, abs=1e-9)
    assert [round(sm.continuous_moments("semicircle", k, k).real, 9) for k in (1, 2, 3, 4)] == \
        [1, 2, 5, 14]
    assert sm.continuous_moments("SO3", 1, 0) == pytest.approx(1, abs=1e-9)
    # variance 1 about the mean
    assert sm.continuous_moments("SO3", 1, 1).real - 1 == pytest.approx(1, abs=1e-9)
    with pytest.raises(ValueError):
        sm.continuous_moments("cauchy", 1, 1)


def test_moment_csv_shape(catalog):
    text = sm.moments(sm.vacuum_measure_discoid(catalog["E8"]), 3, 3).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "m,n,re,im" and len(lines) == 17
