"""Recovering the level-5 exceptional graphs from their modular invariant.

The E8 graph is 3-colourable with four vertices per colour. If its colour
rotation is an automorphism then the adjacency is determined by one 4x4 block B
(colour c -> colour c+1). We scan all 0/1 blocks, keep those whose spectrum
matches the exponents of Z_E8, and check that the survivors agree up to
isomorphism. The same block read as a plain 4-vertex graph is the E8* graph.

Running this script rewrites the data files under src/su3ade/data/graphs and
the manifest that pins their hashes.

    python notebooks/01_exceptional_graphs.py
"""
import itertools
import json
from pathlib import Path

import numpy as np

from su3ade.fusion import build_modular_data, e8_invariant, e8_star_invariant
from su3ade.graphs import (cyclic_graph, file_hash, isomorphic, matrix_graph, min_pf_vertex,
                           nimrep_from_graph, predicted_spectrum, verify_nimrep_spectrum)

DATA = Path(__file__).resolve().parents[1] / "src" / "su3ade" / "data"

md = build_modular_data(5)
Z = e8_invariant()
target = predicted_spectrum(Z, md, (1, 0))
target_sorted = np.sort_complex(np.round(target, 8))

# scan the 2^16 blocks
hits = []
for bits in itertools.product([0, 1], repeat=16):
    B = np.array(bits).reshape(4, 4)
    if (B.sum(0) == 0).any() or (B.sum(1) == 0).any():
        continue
    if not np.array_equal(B @ B.T, B.T @ B):
        continue
    g = cyclic_graph("E8", B, 8)
    ev = np.sort_complex(np.round(np.linalg.eigvals(g.adjacency.astype(float)), 8))
    if np.allclose(ev, target_sorted, atol=1e-6):
        hits.append((B, g))

classes = []
for B, g in hits:
    if not any(isomorphic(g, h) for _, h in classes):
        classes.append((B, g))
print(f"{len(hits)} blocks with the E8 spectrum, {len(classes)} up to isomorphism")

B, _ = classes[0]
# put the minimal Perron-Frobenius vertex first so that star = 0
e8 = cyclic_graph("E8", B, 8)
e8.star = min_pf_vertex(e8)
print("E8 block\n", B, "\nstar", e8.star)
print(verify_nimrep_spectrum(nimrep_from_graph(e8, 5), Z, md).text())

e8s = matrix_graph("E8*", B, 8)
e8s.star = min_pf_vertex(e8s)
print(verify_nimrep_spectrum(nimrep_from_graph(e8s, 5), e8_star_invariant(), md).text())

out = DATA / "graphs"
out.mkdir(parents=True, exist_ok=True)
entries = []
for g, fname, inv in ((e8, "E8.json", "E8"), (e8s, "E8star.json", "E8*")):
    path = out / fname
    path.write_text(g.to_json() + "\n")
    entries.append({"name": g.name, "file": f"graphs/{fname}", "level": 5,
                    "invariant": inv, "sha256": file_hash(path)})
(DATA / "manifest.json").write_text(json.dumps({"graphs": entries}, indent=2) + "\n")
print("wrote", [e["file"] for e in entries])
