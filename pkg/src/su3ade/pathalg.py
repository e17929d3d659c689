"""Path spaces, creation/annihilation and fork operators, Hecke operators.

Paths of length p are tuples of edge indices; the basis is sorted
lexicographically and carries the plain orthonormal inner product.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arith import DEFAULT_TOL, quantum_integer
from .cells import CellSystem
from .graphs import Graph, pf_data
from .reports import VerificationReport


class IllConditionedRank(ArithmeticError):
    pass


@dataclass(frozen=True)
class PathSpace:
    graph: Graph
    p: int

    @cached_property
    def basis(self) -> list:
        g = self.graph
        if self.p == 0:
            return [(v,) for v in range(g.n)]  # vertex paths, marked by a 1-tuple
        out_by = [[] for _ in range(g.n)]
        for e, (s, _) in enumerate(g.edges):
            out_by[s].append(e)
        paths = [(e,) for e in range(len(g.edges))]
        for _ in range(self.p - 1):
            paths = [q + (e,) for q in paths for e in out_by[g.edges[q[-1]][1]]]
        return sorted(paths)

    @cached_property
    def index(self) -> dict:
        return {q: n for n, q in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def source(self, q) -> int:
        return q[0] if self.p == 0 else self.graph.edges[q[0]][0]

    def target(self, q) -> int:
        return q[0] if self.p == 0 else self.graph.edges[q[-1]][1]

    @cached_property
    def endpoints(self) -> np.ndarray:
        return np.array([(self.source(q), self.target(q)) for q in self.basis],
                        dtype=int).reshape(-1, 2)


@dataclass
class PathOperator:
    src_len: int
    dst_len: int
    M: np.ndarray

    def adjoint(self) -> "PathOperator":
        return PathOperator(self.dst_len, self.src_len, self.M.conj().T)

    def __matmul__(self, other):
        return PathOperator(other.src_len, self.dst_len, self.M @ other.M)


def _weights(g: Graph):
    return pf_data(g).phi


def annihilation_ops(cs: CellSystem):
    """c_l on a~b and c_r on b~a, each with the basis of mixed 2-paths it acts on.

    The cap pairs an edge with its own reverse; the adjoints are creation operators.
    """
    g = cs.graph
    phi = _weights(g)
    E = len(g.edges)
    left = [(a, b) for a in range(E) for b in range(E) if g.edges[a][1] == g.edges[b][1]]
    right = [(b, a) for b in range(E) for a in range(E) if g.edges[a][0] == g.edges[b][0]]
    cl = np.zeros((g.n, len(left)))
    for n, (a, b) in enumerate(left):
        if a == b:
            s, r = g.edges[a]
            cl[s, n] = np.sqrt(phi[r] / phi[s])
    cr = np.zeros((g.n, len(right)))
    for n, (b, a) in enumerate(right):
        if a == b:
            s, r = g.edges[a]
            cr[r, n] = np.sqrt(phi[s] / phi[r])
    return (PathOperator(2, 0, cl), left), (PathOperator(2, 0, cr), right)


def fork_ops(cs: CellSystem):
    """The forks from reversed edges into 2-paths and from edges into reversed 2-paths.

    Both target bases are indexed like PathSpace(graph, 2); the second one is read
    with every edge reversed. Returns (Y, Ybar) as matrices of shape (dim P2, E).
    """
    g = cs.graph
    phi = _weights(g)
    P2 = PathSpace(g, 2)
    E = len(g.edges)
    Y = np.zeros((P2.dim, E), dtype=complex)
    for (a, b1, b2), w in _cells_by_rotation(cs):
        s, r = g.edges[a]
        Y[P2.index[(b1, b2)], a] += w / np.sqrt(phi[s] * phi[r])
    return PathOperator(1, 2, Y), PathOperator(1, 2, Y.conj())


def _cells_by_rotation(cs: CellSystem):
    """(a, b1, b2) -> W for every rotation of every triangle."""
    seen = set()
    for (a, b, c), w in cs.W.items():
        for rot in ((a, b, c), (b, c, a), (c, a, b)):
            if rot not in seen:
                seen.add(rot)
                yield rot, w


def hecke_2(cs: CellSystem) -> np.ndarray:
    Y, _ = fork_ops(cs)
    return Y.M @ Y.M.conj().T


def hecke_operator(cs: CellSystem, p: int, i: int, _u2=None) -> PathOperator:
    """U_i on PathSpace(p), acting on positions i, i+1 (1-based)."""
    if not 1 <= i <= p - 1:
        raise IndexError(f"position {i} out of range for paths of length {p}")
    g = cs.graph
    U2 = hecke_2(cs) if _u2 is None else _u2
    P2 = PathSpace(g, 2)
    Pp = PathSpace(g, p)
    M = np.zeros((Pp.dim, Pp.dim), dtype=complex)
    nz = [np.flatnonzero(np.abs(U2[:, c]) > 0) for c in range(P2.dim)]
    for col, q in enumerate(Pp.basis):
        c = P2.index[q[i - 1:i + 1]]
        for r in nz[c]:
            q2 = q[:i - 1] + P2.basis[r] + q[i + 1:]
            M[Pp.index[q2], col] += U2[r, c]
    return PathOperator(p, p, M)


def hecke_family(cs: CellSystem, p: int) -> list:
    U2 = hecke_2(cs)
    return [hecke_operator(cs, p, i, U2).M for i in range(1, p)]


def _n(x) -> float:
    return float(np.abs(x).max()) if x.size else 0.0


def verify_hecke(cs: CellSystem, p_max: int = 4, tol=1e-8) -> VerificationReport:
    g = cs.graph
    d = quantum_integer(2, g.coxeter)
    h1 = h2 = h3 = hq = sa = 0.0
    for p in range(2, p_max + 1):
        U = hecke_family(cs, p)
        for i, u in enumerate(U):
            sa = max(sa, _n(u - u.conj().T))
            h1 = max(h1, _n(u @ u - d * u))
            if i + 1 < len(U):
                v = U[i + 1]
                h3 = max(h3, _n(u @ v @ u - u - v @ u @ v + v))
            if i + 2 < len(U):
                v, w = U[i + 1], U[i + 2]
                h2 = max(h2, _n(u @ w - w @ u))
                hq = max(hq, _n((u - w @ v @ u + v) @ (v @ w @ v - v)))
    rep = VerificationReport(f"Hecke relations on {g.name} up to length {p_max}")
    rep.residual("self-adjoint", sa, tol, tag="U = U*")
    rep.residual("H1", h1, tol, tag="U_i^2 = [2] U_i")
    rep.residual("H2", h2, tol, tag="U_i U_j = U_j U_i")
    rep.residual("H3", h3, tol, tag="U_i U_i+1 U_i - U_i = U_i+1 U_i U_i+1 - U_i+1")
    rep.residual("q-antisymmetrizer", hq, tol, tag="SU(3) quotient relation")
    return rep


def _rank(M, rank_tol) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    cut = rank_tol * max(1.0, s[0])
    r = int(np.sum(s > cut))
    if 0 < r < len(s) and s[r - 1] < 10 * s[r]:
        raise IllConditionedRank(f"no singular value gap: {s[r - 1]:.3e} vs {s[r]:.3e}")
    return r


def relation_image(cs: CellSystem, p: int) -> list:
    return hecke_family(cs, p) if p >= 2 else []


def graded_dimension(cs: CellSystem, p: int, rank_tol=None) -> np.ndarray:
    """H[i, j] = dim of the degree-p part of e_i A e_j (paths i -> j modulo relations)."""
    rank_tol = DEFAULT_TOL.rank_tol if rank_tol is None else rank_tol
    g = cs.graph
    P = PathSpace(g, p)
    H = np.zeros((g.n, g.n), dtype=np.int64)
    if p == 0:
        return np.eye(g.n, dtype=np.int64)
    U = relation_image(cs, p)
    ends = P.endpoints
    for i in range(g.n):
        for j in range(g.n):
            idx = np.flatnonzero((ends[:, 0] == i) & (ends[:, 1] == j))
            if idx.size == 0:
                continue
            if U:
                blk = np.hstack([u[np.ix_(idx, idx)] for u in U])
                H[i, j] = idx.size - _rank(blk, rank_tol)
            else:
                H[i, j] = idx.size
    return H


def graded_dimensions_csv(rows) -> str:
    """rows of (p, H) -> CSV with columns p,src,dst,dim."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "src", "dst", "dim"])
    for p, H in rows:
        for i, j in zip(*np.nonzero(H)):
            w.writerow([p, int(i), int(j), int(H[i, j])])
    return buf.getvalue()


def jw_trace(p: int, l: int, m: int) -> float:
    """Trace of the Jones-Wenzl projection f_(p,l): [p+1][l+1][p+l+2]/[2]."""
    if p < 0 or l < 0:
        raise ValueError("p, l must be non-negative")
    q = lambda n: quantum_integer(n, m)
    return q(p + 1) * q(l + 1) * q(p + l + 2) / q(2)
