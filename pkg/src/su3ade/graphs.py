"""SU(3) ADE graphs, abelian McKay graphs, nimreps and their spectral checks."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import DiGraphMatcher
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import connected_components

from .arith import quantum_integer
from .fusion import (
    ModularData,
    ModularInvariant,
    NegativeEntryError,
    Weight,
    build_alcove,
    chebyshev_recursion,
    fundamental_shifts,
    rotation_A,
)
from .reports import VerificationReport


class GraphError(ValueError):
    pass


@dataclass
class Graph:
    """Directed multigraph with a distinguished vertex.

    ``edges`` holds (src, dst) vertex-index pairs; repeated pairs are
    distinct edges and edge identity is the position in the list.
    """

    name: str
    vertices: list
    edges: list
    star: int = 0
    colours: list | None = None
    coxeter: int | None = None
    flags: list = field(default_factory=list)

    def __post_init__(self):
        self.edges = [tuple(int(x) for x in e) for e in self.edges]
        self.vertices = [str(v) for v in self.vertices]
        n = len(self.vertices)
        for s, r in self.edges:
            if not (0 <= s < n and 0 <= r < n):
                raise GraphError(f"{self.name}: edge ({s},{r}) out of range")
        if self.colours is not None:
            if len(self.colours) != n:
                raise GraphError(f"{self.name}: colour list has wrong length")
            for c in self.colours:
                if c not in (0, 1, 2):
                    raise GraphError(f"{self.name}: colour {c!r} not in {{0,1,2}}")
            for s, r in self.edges:
                if self.colours[r] != (self.colours[s] + 1) % 3:
                    raise GraphError(f"{self.name}: edge {s}->{r} breaks the 3-colouring")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def adjacency(self) -> np.ndarray:
        D = np.zeros((self.n, self.n), dtype=np.int64)
        for s, r in self.edges:
            D[s, r] += 1
        return D

    def is_normal(self) -> bool:
        D = self.adjacency
        return bool(np.array_equal(D @ D.T, D.T @ D))

    def out_edges(self, v) -> list:
        return [e for e, (s, _) in enumerate(self.edges) if s == v]

    def index(self, vid) -> int:
        return self.vertices.index(str(vid))

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "coxeter": self.coxeter,
            "vertices": [
                {"id": v, "colour": None if self.colours is None else self.colours[i]}
                for i, v in enumerate(self.vertices)
            ],
            "edges": [{"src": self.vertices[s], "dst": self.vertices[r]} for s, r in self.edges],
            "star": self.vertices[self.star],
        }
        if self.flags:
            d["flags"] = list(self.flags)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def nx(self) -> nx.DiGraph:
        """Simple digraph with edge multiplicities as the ``w`` attribute."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        D = self.adjacency
        for s, r in zip(*np.nonzero(D)):
            g.add_edge(int(s), int(r), w=int(D[s, r]))
        return g


def graph_from_dict(d: dict) -> Graph:
    try:
        ids = [str(v["id"]) for v in d["vertices"]]
        cols = [v.get("colour") for v in d["vertices"]]
        pos = {v: i for i, v in enumerate(ids)}
        if len(pos) != len(ids):
            raise GraphError("duplicate vertex ids")
        edges = [(pos[str(e["src"])], pos[str(e["dst"])]) for e in d["edges"]]
        star = pos[str(d["star"])]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph data: {exc!r}") from exc
    if all(c is None for c in cols):
        cols = None
    elif any(c is None for c in cols):
        raise GraphError("colour must be given for all vertices or none")
    return Graph(d["name"], ids, edges, star=star, colours=cols,
                 coxeter=d.get("coxeter"), flags=list(d.get("flags", [])))


def load_graph(path) -> Graph:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: {exc}") from exc
    return graph_from_dict(data)


def relabel(g: Graph, perm) -> Graph:
    """Graph with vertex i moved to position perm[i]."""
    perm = list(perm)
    inv = np.argsort(perm)
    verts = [g.vertices[j] for j in inv]
    cols = None if g.colours is None else [g.colours[j] for j in inv]
    edges = [(perm[s], perm[r]) for s, r in g.edges]
    return Graph(g.name, verts, edges, star=perm[g.star], colours=cols,
                 coxeter=g.coxeter, flags=list(g.flags))


def isomorphic(g: Graph, h: Graph) -> bool:
    gm = DiGraphMatcher(g.nx(), h.nx(), edge_match=lambda a, b: a["w"] == b["w"])
    return gm.is_isomorphic()


# ------------------------------------------------------------------ builders

def _weight_id(w) -> str:
    return f"{w[0]},{w[1]}"


def build_A_graph(m: int) -> Graph:
    if m < 4:
        raise GraphError("A graphs need m >= 4")
    k = m - 3
    al = build_alcove(k)
    edges = []
    for i, (a, b) in enumerate(al.weights):
        for da, db in fundamental_shifts():
            nb = (a + da, b + db)
            if nb in al:
                edges.append((i, al.idx(nb)))
    cols = [(a - b) % 3 for a, b in al.weights]
    return Graph(f"A{m}", [_weight_id(w) for w in al.weights], edges,
                 star=0, colours=cols, coxeter=m)


def orbifold_Z3(a_graph: Graph, k: int) -> Graph:
    """Quotient of A^(k+3) by the rotation A; fixed vertices become three copies.

    Free orbit -> fixed weight: the orbit vertex gets c edges to every copy,
    c being the edge count from one orbit member to the fixed weight.
    Fixed weight -> free orbit: its c edges are split evenly over the copies.
    """
    al = build_alcove(k)
    if a_graph.n != len(al):
        raise GraphError("orbifold_Z3 expects the level-k A graph")
    wid = {w: a_graph.index(_weight_id(w)) for w in al.weights}
    D = a_graph.adjacency
    orbits, seen = [], set()
    for w in al.weights:
        if w in seen:
            continue
        orb = sorted({w, rotation_A(w, k), rotation_A(rotation_A(w, k), k)})
        seen.update(orb)
        orbits.append(orb)
    orbit_of = {w: oi for oi, orb in enumerate(orbits) for w in orb}
    verts, cols, owner = [], [], {}
    for oi, orb in enumerate(orbits):
        col = (orb[0][0] - orb[0][1]) % 3
        if len(orb) == 3:
            owner[oi] = [len(verts)]
            verts.append("{" + "|".join(_weight_id(w) for w in orb) + "}")
            cols.append(col)
        else:
            owner[oi] = [len(verts) + j for j in range(3)]
            verts += [f"{_weight_id(orb[0])}#{j}" for j in range(3)]
            cols += [col] * 3
    edges = []
    for oi, orb in enumerate(orbits):
        mult = {}
        for w in al.weights:
            c = int(D[wid[orb[0]], wid[w]])
            if c:
                mult[orbit_of[w]] = mult.get(orbit_of[w], 0) + c
        for oj, c in sorted(mult.items()):
            src, dst = owner[oi], owner[oj]
            if len(src) == 1:
                edges += [(src[0], d) for d in dst for _ in range(c)]
            elif len(dst) == 1:
                if c % 3:
                    raise GraphError("fixed-point edges not divisible by 3")
                edges += [(s, dst[0]) for s in src for _ in range(c // 3)]
            else:
                raise GraphError("adjacent fixed points are not supported")
    return Graph(f"D{k + 3}", verts, edges, star=owner[orbit_of[Weight(0, 0)]][0],
                 colours=cols if k % 3 == 0 else None, coxeter=k + 3)


def build_D_graph(m: int) -> Graph:
    k = m - 3
    return orbifold_Z3(build_A_graph(m), k)


def build_A_star_graph(m: int) -> Graph:
    """Conjugate-invariant graph: a path with a loop on every vertex, except the
    last one when m is odd."""
    if m < 4:
        raise GraphError("A* graphs need m >= 4")
    n = (m - 1) // 2
    edges = []
    for i in range(n):
        if not (m % 2 == 1 and i == n - 1):
            edges.append((i, i))
        if i + 1 < n:
            edges += [(i, i + 1), (i + 1, i)]
    return Graph(f"A{m}*", [str(i) for i in range(n)], edges, star=0, coxeter=m)


def unfold(g: Graph, name=None) -> Graph:
    """Three-fold colour cover: (v, c) -> (w, c+1) for each edge v -> w."""
    verts = [f"{v}/{c}" for c in range(3) for v in g.vertices]
    edges = [(c * g.n + s, ((c + 1) % 3) * g.n + r) for c in range(3) for s, r in g.edges]
    cols = [c for c in range(3) for _ in range(g.n)]
    return Graph(name or f"{g.name}~", verts, edges, star=g.star, colours=cols,
                 coxeter=g.coxeter)


def build_D_star_graph(m: int) -> Graph:
    return unfold(build_A_star_graph(m), name=f"D{m}*")


def cyclic_graph(name, B, coxeter, star=0) -> Graph:
    """3-coloured graph with block adjacency c -> c+1 equal to B on every colour."""
    B = np.asarray(B, dtype=int)
    n = B.shape[0]
    verts = [f"{c}.{i}" for c in range(3) for i in range(n)]
    edges = []
    for c in range(3):
        for i in range(n):
            for j in range(n):
                edges += [(c * n + i, ((c + 1) % 3) * n + j)] * int(B[i, j])
    return Graph(name, verts, edges, star=star, colours=[c for c in range(3) for _ in range(n)],
                 coxeter=coxeter)


def matrix_graph(name, D, coxeter, star=0, colours=None) -> Graph:
    D = np.asarray(D, dtype=int)
    edges = [(i, j) for i in range(D.shape[0]) for j in range(D.shape[1]) for _ in range(D[i, j])]
    return Graph(name, [str(i) for i in range(D.shape[0])], edges, star=star,
                 colours=colours, coxeter=coxeter)


def mckay_graph_abelian(m: int, n: int) -> Graph:
    """McKay graph of Z_m x Z_n embedded diagonally as diag(w1, w2^-1, w1^-1 w2)."""
    if m < 1 or n < 1:
        raise GraphError("m, n must be >= 1")
    verts = [(j1, j2) for j1 in range(m) for j2 in range(n)]
    pos = {v: i for i, v in enumerate(verts)}
    edges = []
    for j1, j2 in verts:
        for d1, d2 in ((1, 0), (0, -1), (-1, 1)):
            edges.append((pos[(j1, j2)], pos[((j1 + d1) % m, (j2 + d2) % n)]))
    return Graph(f"Z{m}xZ{n}", [f"{a},{b}" for a, b in verts], edges, star=0)


# ------------------------------------------------------------ Perron-Frobenius

@dataclass(frozen=True)
class PFData:
    norm: float
    phi: np.ndarray


def strongly_connected(g: Graph) -> bool:
    ncomp, _ = connected_components(g.adjacency, directed=True, connection="strong")
    return ncomp == 1


def pf_data(g: Graph) -> PFData:
    if not strongly_connected(g):
        raise GraphError(f"{g.name} is not strongly connected")
    D = g.adjacency.astype(float)
    # strongly connected, so the top eigenvector is positive up to sign
    w, V = np.linalg.eig(D)
    i = int(np.argmax(w.real))
    norm = float(w[i].real)
    phi = np.abs(V[:, i].real)
    phi = phi / phi[g.star]
    return PFData(norm, phi)


def check_pf(g: Graph, pf: PFData, tol=1e-9) -> VerificationReport:
    D = g.adjacency.astype(float)
    rep = VerificationReport(f"Perron-Frobenius {g.name}")
    rep.residual("D phi = norm phi", np.abs(D @ pf.phi - pf.norm * pf.phi).max(), tol)
    rep.residual("D^T phi = norm phi", np.abs(D.T @ pf.phi - pf.norm * pf.phi).max(), tol)
    if g.coxeter:
        rep.residual("norm = [3]_q", abs(pf.norm - quantum_integer(3, g.coxeter)), tol)
    return rep


def min_pf_vertex(g: Graph) -> int:
    phi = pf_data(g).phi
    return int(np.flatnonzero(phi <= phi.min() + 1e-9)[0])


# ------------------------------------------------------------------- nimreps

@dataclass(frozen=True)
class Nimrep:
    graph: Graph
    level: int
    G: dict

    def __getitem__(self, lam) -> np.ndarray:
        return self.G[Weight(*lam)]


def nimrep_from_graph(g: Graph, k: int) -> Nimrep:
    pf = pf_data(g)
    target = quantum_integer(3, k + 3)
    if abs(pf.norm - target) > 1e-8:
        raise GraphError(f"{g.name}: norm {pf.norm:.6f} != [3]_q = {target:.6f} at level {k}")
    D = g.adjacency
    try:
        G = chebyshev_recursion(D, k)
    except NegativeEntryError as exc:
        raise GraphError(f"{g.name} at level {k}: {exc}") from exc
    return Nimrep(g, k, G)


def check_nimrep(nim: Nimrep, fr) -> VerificationReport:
    """G_lam G_mu = sum_nu N_{lam mu}^nu G_nu against the fusion ring."""
    al = fr.alcove
    worst = 0
    for lam in al.weights:
        i = al.idx(lam)
        for mu in al.weights:
            rhs = sum(int(fr.N[mu][i, j]) * nim.G[nu] for j, nu in enumerate(al.weights)
                      if fr.N[mu][i, j])
            worst = max(worst, int(np.abs(nim.G[lam] @ nim.G[mu] - rhs).max()))
    rep = VerificationReport(f"nimrep {nim.graph.name}")
    rep.flag("G_lam G_mu = sum N G_nu", worst == 0, value=worst, tag="nimrep")
    rep.flag("G_(0,0) = I", bool(np.array_equal(nim.G[Weight(0, 0)], np.eye(nim.graph.n, dtype=int))))
    rep.flag("non-negative entries", all((M >= 0).all() for M in nim.G.values()))
    return rep


class SizeMismatch(ValueError):
    pass


def _match_multisets(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    C = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(C)
    return float(C[r, c].max()) if len(r) else 0.0


def predicted_spectrum(Z: ModularInvariant, md: ModularData, lam) -> np.ndarray:
    ratio = md.ratio(lam)
    mult = np.diag(Z.Z)
    return np.repeat(ratio, mult)


def verify_nimrep_spectrum(nim: Nimrep, Z: ModularInvariant, md: ModularData,
                           tol=1e-8) -> VerificationReport:
    nverts = nim.graph.n
    total = int(np.trace(Z.Z))
    if nverts != total:
        raise SizeMismatch(f"{nim.graph.name} has {nverts} vertices but {Z.name} "
                           f"has {total} exponents")
    worst = 0.0
    for lam, G in nim.G.items():
        ev = np.linalg.eigvals(G.astype(float))
        worst = max(worst, _match_multisets(ev, predicted_spectrum(Z, md, lam)))
    rep = VerificationReport(f"nimrep spectrum {nim.graph.name} vs {Z.name}")
    rep.residual("spectrum = exponents", worst, tol, tag="nimrep-spectrum")
    return rep


# ------------------------------------------------------------ supertransitivity

def _path_counts(D: np.ndarray, star: int, length: int) -> np.ndarray:
    v = np.zeros(D.shape[0], dtype=object)
    v[star] = 1
    Dobj = D.astype(object)
    for _ in range(length):
        v = v.dot(Dobj)
    return v


def endomorphism_dimension(g: Graph, length: int) -> int:
    """sum_v n_{*,v}(length)^2 with exact integer arithmetic."""
    counts = _path_counts(g.adjacency, g.star, length)
    total = sum(int(c) * int(c) for c in counts)
    if total > np.iinfo(np.int64).max:
        raise OverflowError("path count exceeds 64-bit range")
    return total


def supertransitivity(g: Graph, max_k: int, a_graph: Graph | None = None):
    if a_graph is None:
        if not g.coxeter:
            raise GraphError("no Coxeter number to select the A graph")
        a_graph = build_A_graph(g.coxeter)
    if g.coxeter and a_graph.coxeter and g.coxeter != a_graph.coxeter:
        raise GraphError("A graph has a different norm")
    best = 0
    for k in range(1, max_k + 1):
        if endomorphism_dimension(g, k) != endomorphism_dimension(a_graph, k):
            return best
        best = k
    return f">= {max_k}"


# ---------------------------------------------------------------- conjugation

def conjugation_permutation(g: Graph):
    """Involution tau with tau D tau = D^T fixing the star, or None."""
    D = g.adjacency
    gm = DiGraphMatcher(g.nx(), matrix_graph("op", D.T, None).nx(),
                        edge_match=lambda a, b: a["w"] == b["w"])
    for iso in gm.isomorphisms_iter():
        perm = [iso[i] for i in range(g.n)]
        if perm[g.star] != g.star:
            continue
        if all(perm[perm[i]] == i for i in range(g.n)):
            return np.array(perm)
    return None


def permutation_matrix(perm) -> np.ndarray:
    n = len(perm)
    P = np.zeros((n, n), dtype=np.int64)
    P[np.arange(n), perm] = 1
    return P


def automorphisms(g: Graph):
    gm = DiGraphMatcher(g.nx(), g.nx(), edge_match=lambda a, b: a["w"] == b["w"])
    for iso in gm.isomorphisms_iter():
        yield np.array([iso[i] for i in range(g.n)])


# ------------------------------------------------------------------- catalog

DATA_ENV = "SU3_DATA_DIR"


def default_data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class CatalogEntry:
    name: str
    graph: Graph
    level: int
    invariant: str | None = None
    validated: bool = False
    source: str = "constructor"


def _invariant_by_name(name: str, k: int):
    from . import fusion

    table = {
        "A": fusion.identity_invariant,
        "A*": fusion.conjugate_invariant,
        "D": fusion.orbifold_invariant,
        "D*": fusion.conjugate_orbifold_invariant,
    }
    if name in table:
        return table[name](k)
    if name == "E8" and k == 5:
        return fusion.e8_invariant()
    if name == "E8*" and k == 5:
        return fusion.e8_star_invariant()
    return None


class Catalog:
    """Read-only registry of the SU(3) ADE graphs with their paired invariants.

    Infinite families come from constructors; exceptional graphs are read from
    JSON data under the data directory and validated spectrally on first use.
    """

    def __init__(self, data_dir=None, max_m: int = 12):
        self.data_dir = Path(data_dir) if data_dir else default_data_dir()
        self.max_m = max_m
        self._entries: dict[str, CatalogEntry] = {}
        self.cell_files: dict[str, Path] = {}
        self._build()

    def _build(self):
        for m in range(4, self.max_m + 1):
            self._add(CatalogEntry(f"A{m}", build_A_graph(m), m - 3, "A"))
            self._add(CatalogEntry(f"A{m}*", build_A_star_graph(m), m - 3, "A*"))
            if m >= 5:
                self._add(CatalogEntry(f"D{m}", build_D_graph(m), m - 3, "D"))
            if m >= 6:
                self._add(CatalogEntry(f"D{m}*", build_D_star_graph(m), m - 3, "D*"))
        manifest = self.data_dir / "manifest.json"
        if manifest.exists():
            man = json.loads(manifest.read_text())
            for item in man.get("graphs", []):
                path = self.data_dir / item["file"]
                if item.get("sha256") and file_hash(path) != item["sha256"]:
                    raise GraphError(f"{path}: content hash does not match manifest")
                g = load_graph(path)
                self._add(CatalogEntry(item["name"], g, item["level"], item.get("invariant"),
                                       source=str(path)))
            for item in man.get("cells", []):
                path = self.data_dir / item["file"]
                if item.get("sha256") and file_hash(path) != item["sha256"]:
                    raise GraphError(f"{path}: content hash does not match manifest")
                self.cell_files[item["graph"]] = path

    def _add(self, entry):
        entry.graph.name = entry.name
        self._entries[entry.name] = entry

    def names(self) -> list:
        return list(self._entries)

    def entry(self, name) -> CatalogEntry:
        if name not in self._entries:
            raise KeyError(name)
        return self._entries[name]

    def __getitem__(self, name) -> Graph:
        return self.entry(name).graph

    def __contains__(self, name):
        return name in self._entries

    def validate(self, name, md_cache=None) -> VerificationReport:
        e = self.entry(name)
        rep = VerificationReport(f"catalog graph {name}")
        Z = _invariant_by_name(e.invariant, e.level) if e.invariant else None
        if Z is None:
            rep.flag("paired invariant available", False)
            return rep
        from .fusion import build_modular_data

        md = (md_cache or {}).get(e.level) or build_modular_data(e.level)
        try:
            nim = nimrep_from_graph(e.graph, e.level)
            sub = verify_nimrep_spectrum(nim, Z, md)
        except (GraphError, SizeMismatch) as exc:
            rep.flag(f"nimrep: {exc}", False)
            return rep
        rep.checks += sub.checks
        rep.flag("normal adjacency", e.graph.is_normal())
        e.validated = rep.passed
        return rep
