"""Potential, relations and Hilbert series of the almost Calabi-Yau algebra.

Matrix convention: H^p[i, j] is the dimension of the degree-p paths from i
to j modulo relations, so H^1 = Delta. The Nakayama permutation is stored as
an array nu with P[j, nu[j]] = 1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .cells import CellSystem, canonical
from .fusion import build_alcove, rotation_A
from .graphs import Graph, automorphisms, permutation_matrix
from .pathalg import PathSpace, _rank, graded_dimension, hecke_2
from .reports import VerificationReport


class InconsistentSeries(ValueError):
    pass


@dataclass
class Potential:
    graph: Graph
    terms: dict = field(default_factory=dict)  # canonical triangle -> coefficient

    def __len__(self):
        return len(self.terms)


def potential_from_cells(cs: CellSystem) -> Potential:
    return Potential(cs.graph, {canonical(t): complex(w) for t, w in cs.W.items()})


def relations(pot: Potential) -> dict:
    """rho_a = d_a Phi = sum W(a,b,c) b c, for every edge a (possibly zero)."""
    rho = {a: {} for a in range(len(pot.graph.edges))}
    for (a, b, c), w in pot.terms.items():
        for x, y, z in {(a, b, c), (b, c, a), (c, a, b)}:
            rho[x][(y, z)] = rho[x].get((y, z), 0) + w
    return rho


def relation_matrix(pot: Potential) -> np.ndarray:
    """Relations as columns in the basis of PathSpace(graph, 2)."""
    P2 = PathSpace(pot.graph, 2)
    rho = relations(pot)
    R = np.zeros((P2.dim, len(rho)), dtype=complex)
    for a, terms in rho.items():
        for path, w in terms.items():
            R[P2.index[path], a] += w
    return R


def relations_span_check(cs: CellSystem, rank_tol=1e-8) -> VerificationReport:
    """The relations and the image of U_1 span the same subspace of 2-paths."""
    R = relation_matrix(potential_from_cells(cs))
    U = hecke_2(cs)
    r1, r2, r12 = (_rank(R, rank_tol), _rank(U, rank_tol), _rank(np.hstack([R, U]), rank_tol))
    rep = VerificationReport(f"relations vs Hecke image on {cs.graph.name}")
    rep.flag("rank(relations) = rank(U_1)", r1 == r2, value=f"{r1} vs {r2}")
    rep.flag("joint rank unchanged", r12 == r1, value=r12)
    return rep


# ---------------------------------------------------------------- Hilbert series

@dataclass
class HilbertSeries:
    H: list
    terminating: bool = False

    def __getitem__(self, p):
        return self.H[p] if p < len(self.H) else np.zeros_like(self.H[0])

    def __len__(self):
        return len(self.H)

    def top_degree(self) -> int:
        nz = [p for p, M in enumerate(self.H) if M.any()]
        return nz[-1] if nz else -1


def _recursion(D, max_deg, h=None, P=None):
    n = D.shape[0]
    H = [np.eye(n, dtype=np.int64), D.copy(), D @ D - D.T]
    for p in range(3, max_deg + 1):
        X = D @ H[p - 1] - D.T @ H[p - 2] + H[p - 3]
        if h is not None and p == h:
            X = X - P
        H.append(X)
    return H[:max_deg + 1]


def closed_hilbert_series(g: Graph, P, h: int | None = None, max_deg=None) -> HilbertSeries:
    """Coefficients of (1 - P t^h) / (1 - D t + D^T t^2 - t^3)."""
    h = h or g.coxeter
    P = _as_matrix(P, g.n)
    max_deg = max(max_deg or 0, h + 2)
    H = _recursion(g.adjacency, max_deg, h, P)
    neg = [p for p, M in enumerate(H) if (M < 0).any()]
    if neg:
        raise InconsistentSeries(f"{g.name}: negative coefficient in degree {neg[0]}")
    tail = [p for p in range(h - 2, max_deg + 1) if H[p].any()]
    if tail:
        raise InconsistentSeries(f"{g.name}: series does not terminate at h-3 = {h - 3} "
                                 f"(degree {tail[0]} nonzero)")
    return HilbertSeries(H[:h - 2], terminating=True)


def cy_hilbert_series(g: Graph, max_deg: int) -> HilbertSeries:
    """Truncated expansion of 1 / (1 - D t + D^T t^2 - t^3)."""
    H = _recursion(g.adjacency, max(max_deg, 2))[:max_deg + 1]
    neg = [p for p, M in enumerate(H) if (M < 0).any()]
    if neg:
        raise InconsistentSeries(f"{g.name}: negative coefficient in degree {neg[0]}")
    return HilbertSeries(H, terminating=False)


def _as_matrix(P, n) -> np.ndarray:
    P = np.asarray(P)
    return permutation_matrix(P) if P.ndim == 1 else P.astype(np.int64)


# ---------------------------------------------------------------- Nakayama

def forced_permutation(g: Graph, h: int | None = None) -> np.ndarray:
    """The permutation that makes the closed form terminate, read off degree h-3."""
    h = h or g.coxeter
    top = _recursion(g.adjacency, h - 3)[h - 3]
    if not (set(np.unique(top)) <= {0, 1} and (top.sum(0) == 1).all() and (top.sum(1) == 1).all()):
        raise InconsistentSeries(f"{g.name}: degree h-3 coefficient is not a permutation")
    return top.argmax(axis=1)


def _is_automorphism(g: Graph, nu) -> bool:
    Pm = permutation_matrix(nu)
    D = g.adjacency
    return bool(np.array_equal(Pm @ D @ Pm.T, D))


def rotation_P0(g: Graph) -> np.ndarray:
    """The order-3 rotation P0 of a graph.

    For A-graphs this is mu -> A^2 mu on the alcove; for the other 3-coloured
    graphs it is the automorphism moving every vertex one colour back.
    """
    m = re.fullmatch(r"A(\d+)", g.name)
    if m:
        k = int(m.group(1)) - 3
        al = build_alcove(k)
        rot = np.array([al.idx(rotation_A(w, k)) for w in al.weights])
        return rot[rot]
    if g.colours is None:
        raise LookupError(f"{g.name}: no colouring, rotation undefined")
    cols = np.asarray(g.colours)
    for a in automorphisms(g):
        if np.array_equal(cols[a], (cols - 1) % 3):
            return a
    raise LookupError(f"{g.name}: no rotation automorphism")


def expected_nakayama(g: Graph) -> np.ndarray:
    """Nakayama permutation from the family table, in terms of the rotation P0."""
    ident = np.arange(g.n)
    name = g.name
    power = None
    if re.fullmatch(r"A\d+", name):
        power = 2
    elif name == "E8":
        power = 1
    elif re.fullmatch(r"D(\d+)\*", name):
        power = 2 * int(name[1:-1])
    elif re.fullmatch(r"(A\d+\*|D\d+|E8\*|E12_[1245]|E24)", name):
        return ident
    if power is None:
        raise LookupError(f"{name}: no Nakayama rule for this graph")
    power %= 3
    if power == 0:
        return ident
    P0 = rotation_P0(g)
    nu = ident
    for _ in range(power):
        nu = P0[nu]
    return nu


def nakayama_permutation(g: Graph) -> np.ndarray:
    nu = expected_nakayama(g)
    if not _is_automorphism(g, nu):
        raise InconsistentSeries(f"{g.name}: Nakayama permutation is not an automorphism")
    return nu


def check_nakayama(g: Graph) -> VerificationReport:
    rep = VerificationReport(f"Nakayama permutation of {g.name}")
    nu = nakayama_permutation(g)
    rep.flag("automorphism", _is_automorphism(g, nu))
    rep.flag("nu^3 = id", bool((nu[nu[nu]] == np.arange(g.n)).all()))
    try:
        forced = forced_permutation(g)
        rep.flag("table = permutation forced by termination", bool((forced == nu).all()))
    except InconsistentSeries as exc:
        rep.flag(str(exc), False)
    return rep


# ---------------------------------------------------------------- checks

def verify_top_degree(cs: CellSystem, nu=None) -> VerificationReport:
    g = cs.graph
    nu = nakayama_permutation(g) if nu is None else np.asarray(nu)
    top = graded_dimension(cs, g.coxeter - 3)
    rep = VerificationReport(f"top degree of A({g.name})")
    rep.flag("dim j A nu(j) = 1", bool((top[np.arange(g.n), nu] == 1).all()))
    rep.flag("no other top-degree components", int(top.sum()) == g.n, value=int(top.sum()))
    return rep


def brute_vs_closed(cs: CellSystem, nu=None) -> VerificationReport:
    g = cs.graph
    h = g.coxeter
    nu = nakayama_permutation(g) if nu is None else nu
    closed = closed_hilbert_series(g, permutation_matrix(nu), h)
    rep = VerificationReport(f"graded quotient vs closed form on {g.name}")
    for p in range(0, h - 1):
        B = graded_dimension(cs, p)
        diff = np.argwhere(B != closed[p])
        rep.flag(f"degree {p}", diff.size == 0,
                 value="equal" if diff.size == 0 else f"blocks {diff[:3].tolist()} differ")
    return rep


def resolution_euler_check(g: Graph, P, h: int, series: HilbertSeries) -> VerificationReport:
    """H(t) (1 - D t + D^T t^2 - t^3) = 1 - P t^h as integer matrix polynomials."""
    D = g.adjacency
    n = g.n
    P = _as_matrix(P, n)
    coeffs = [np.eye(n, dtype=np.int64), -D, D.T.copy(), -np.eye(n, dtype=np.int64)]
    rep = VerificationReport(f"resolution Euler characteristic on {g.name}")
    first_bad = None
    for p in range(0, h + 4):
        lhs = sum(series[p - r] @ coeffs[r] for r in range(4) if p - r >= 0)
        rhs = np.eye(n, dtype=np.int64) if p == 0 else (-P if p == h else 0 * P)
        if not np.array_equal(lhs, rhs) and first_bad is None:
            first_bad = p
    rep.flag("polynomial identity", first_bad is None,
             value="all degrees" if first_bad is None else f"fails at degree {first_bad}")
    return rep
