"""Spectral measures of the graphs on the discoid and the torus.

The adjacency matrix of every graph here is normal, so its spectral measure
in the state of the star vertex is a finite sum of point masses on the
discoid (the deltoid and its interior). Lifting through Phi(w1, w2) =
w1 + 1/w2 + w2/w1 puts the same measure on the torus, where the exceptional
E8 measure has a neat description as a mixture of orbit measures.

    python notebooks/03_spectral_measures.py
"""
import numpy as np

from su3ade import specmeasure as sm
from su3ade.graphs import Catalog, mckay_graph_abelian

cat = Catalog()

# A4 is a 3-cycle: atoms at the cube roots of unity
mu = sm.vacuum_measure_discoid(cat["A4"])
print("A4 atoms", np.round(mu.points, 12), "weights", mu.weights)
print("A4 lifted to the torus:", len(sm.lift_to_torus(mu)), "atoms")

# E8 from its graph and as (2-r2)/8 d(8) + (2+r2)/8 d(8/3) + 1/2 d(24/5, 1/12)
graph_side = sm.moments(sm.vacuum_measure_discoid(cat["E8"]), 3, 3)
torus_side = sm.moments(sm.e8_orbit_mixture(), 3, 3)
print(sm.compare_measures(graph_side, torus_side, name="E8 graph vs orbit mixture").text())
print(graph_side.to_csv())

# uniform measure on D_m: plain, and weighted by J^2
for m in (4, 5, 6):
    plain = sm.moments(sm.uniform_Dm_measure(m).pushforward(), 1, 1)[1, 1].real
    weighted = sm.moments(sm.jacobian_weighted(sm.uniform_Dm_measure(m)).pushforward(), 1, 1)[1, 1].real
    target = sm.moments(sm.vacuum_measure_discoid(cat[f"A{m}"]), 1, 1)[1, 1].real
    print(f"D_{m}: plain s11 = {plain:.6f}, J^2-weighted s11 = {weighted:.6f}, A{m} s11 = {target:.6f}")

# finite subgroups: characters give the same moments as the McKay graph
g = mckay_graph_abelian(3, 3)
print(sm.compare_measures(sm.subgroup_moments(sm.abelian_class_data(3, 3), 4, 4),
                          sm.moments(sm.vacuum_measure_discoid(g), 4, 4),
                          tol=1e-10, name="Z3 x Z3").text())

# continuous limits
for k in (1, 2, 3):
    print(f"SU(3) k={k}: quadrature {sm.continuous_moments('SU3', k, k).real:.10f}, "
          f"walk count {sm.walk_count_oracle(k)}")
print("T2 s11", sm.continuous_moments("T2", 1, 1).real)
print("semicircle", [round(sm.continuous_moments("semicircle", k, k).real, 9) for k in (1, 2, 3, 4)])
