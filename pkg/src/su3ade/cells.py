"""Ocneanu cell systems: storage, frame equations and a least-squares solver.

A cell is a complex number attached to each closed loop of length three.
Triangles are identified by their edge indices, rotated so the smallest edge
comes first, so multi-edges give distinct triangles.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .arith import quantum_integer
from .graphs import Graph, GraphError, pf_data
from .reports import VerificationReport

Triangle = tuple


class NoConvergence(RuntimeError):
    def __init__(self, best, restarts, residual):
        super().__init__(f"no cell system found after {restarts} restarts "
                         f"(best residual {residual:.3e})")
        self.best = best
        self.restarts = restarts
        self.residual = residual


def canonical(tri) -> Triangle:
    a, b, c = tri
    rots = [(a, b, c), (b, c, a), (c, a, b)]
    return min(rots)


def enumerate_triangles(g: Graph) -> list:
    out_by_vertex = [[] for _ in range(g.n)]
    for e, (s, _) in enumerate(g.edges):
        out_by_vertex[s].append(e)
    found = set()
    for a, (i, j) in enumerate(g.edges):
        for b in out_by_vertex[j]:
            k = g.edges[b][1]
            for c in out_by_vertex[k]:
                if g.edges[c][1] == i:
                    found.add(canonical((a, b, c)))
    return sorted(found)


def _rotations(t):
    a, b, c = t
    return {(a, b, c), (b, c, a), (c, a, b)}


def type_I_pairs(g: Graph) -> list:
    """Edge pairs (a, a') with the same source and range."""
    E = len(g.edges)
    return [(a, b) for a in range(E) for b in range(E) if g.edges[a] == g.edges[b]]


def type_II_frames(g: Graph) -> np.ndarray:
    """Edge quadruples (a1, a2, a3, a4): a1: i4->i1, a2: i2->i1, a3: i2->i3, a4: i4->i3."""
    by_src = [[] for _ in range(g.n)]
    for e, (s, _) in enumerate(g.edges):
        by_src[s].append(e)
    frames = []
    for i4 in range(g.n):
        for i2 in range(g.n):
            for a1 in by_src[i4]:
                i1 = g.edges[a1][1]
                for a2 in by_src[i2]:
                    if g.edges[a2][1] != i1:
                        continue
                    for a4 in by_src[i4]:
                        i3 = g.edges[a4][1]
                        for a3 in by_src[i2]:
                            if g.edges[a3][1] == i3:
                                frames.append((a1, a2, a3, a4))
    return np.array(frames, dtype=int).reshape(-1, 4)


@dataclass
class CellSystem:
    graph: Graph
    W: dict  # canonical triangle -> complex

    def value(self, a, b, c) -> complex:
        return self.W.get(canonical((a, b, c)), 0j)

    def tensor(self) -> np.ndarray:
        """Dense W[a, b1, b2], zero off triangles."""
        E = len(self.graph.edges)
        T = np.zeros((E, E, E), dtype=complex)
        for t, w in self.W.items():
            for r in _rotations(t):
                T[r] = w
        return T

    def conjugate(self) -> "CellSystem":
        return CellSystem(self.graph, {t: complex(np.conj(w)) for t, w in self.W.items()})

    def scaled(self, s) -> "CellSystem":
        return CellSystem(self.graph, {t: s * w for t, w in self.W.items()})

    def to_dict(self) -> dict:
        cells = [{"edges": list(t), "re": float(w.real), "im": float(w.imag)}
                 for t, w in sorted(self.W.items())]
        return {"graph": self.graph.name, "cells": cells}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def cells_from_dict(d: dict, g: Graph) -> CellSystem:
    try:
        W = {}
        for c in d["cells"]:
            a, b, e = (int(x) for x in c["edges"])
            W[canonical((a, b, e))] = complex(float(c["re"]), float(c["im"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed cell data: {exc!r}") from exc
    valid = set(enumerate_triangles(g))
    bad = [t for t in W if t not in valid]
    if bad:
        raise GraphError(f"cells on non-triangles of {g.name}: {bad[:3]}")
    return CellSystem(g, W)


def load_cells(path, g: Graph) -> CellSystem:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: {exc}") from exc
    return cells_from_dict(d, g)


# ------------------------------------------------------------ frame equations

def _frame_data(g: Graph):
    if g.coxeter is None:
        raise GraphError(f"{g.name}: Coxeter number needed for [2]_q")
    phi = pf_data(g).phi
    return phi, quantum_integer(2, g.coxeter)


def _type_I_residuals(T, g, pairs, phi, d2):
    E = T.shape[0]
    flat = T.reshape(E, E * E)
    G = flat @ flat.conj().T
    out = np.empty(len(pairs), dtype=complex)
    for n, (a, b) in enumerate(pairs):
        i, j = g.edges[a]
        out[n] = G[a, b] - (d2 * phi[i] * phi[j] if a == b else 0.0)
    return out


def _vertex_blocks(g: Graph):
    """Per vertex k: indices of edges into k and out of k."""
    ins = [[] for _ in range(g.n)]
    outs = [[] for _ in range(g.n)]
    for e, (s, r) in enumerate(g.edges):
        outs[s].append(e)
        ins[r].append(e)
    return ins, outs


def _type_II_residuals(T, g, frames, phi, blocks=None):
    if len(frames) == 0:
        return np.zeros(0, dtype=complex)
    ins, outs = blocks or _vertex_blocks(g)
    a1, a2, a3, a4 = frames.T
    lhs = np.zeros(len(frames), dtype=complex)
    for k in range(g.n):
        if not ins[k] or not outs[k]:
            continue
        V = T[:, ins[k]][:, :, outs[k]]  # (E, din, dout)
        X = np.einsum("fyz,fuz->fyu", V[a2], V[a3].conj())
        Y = np.einsum("fuq,fyq->fuy", V[a4], V[a1].conj())
        lhs += np.einsum("fyu,fuy->f", X, Y) / phi[k]
    e = np.asarray(g.edges)
    i1, i2, i3, i4 = e[a1, 1], e[a2, 0], e[a3, 1], e[a4, 0]
    rhs = ((a1 == a4) & (a2 == a3)) * phi[i4] * phi[i1] * phi[i2] \
        + ((a1 == a2) & (a3 == a4)) * phi[i1] * phi[i2] * phi[i3]
    return lhs - rhs


def _max(x):
    return float(np.abs(x).max()) if len(x) else 0.0


def verify_type_I(cs: CellSystem, tol=1e-8) -> VerificationReport:
    g = cs.graph
    phi, d2 = _frame_data(g)
    res = _type_I_residuals(cs.tensor(), g, type_I_pairs(g), phi, d2)
    return VerificationReport(f"type I frames on {g.name}").residual(
        "type I frame", _max(res), tol, tag="typeI_frame")


def verify_type_II(cs: CellSystem, tol=1e-8) -> VerificationReport:
    g = cs.graph
    phi, _ = _frame_data(g)
    res = _type_II_residuals(cs.tensor(), g, type_II_frames(g), phi)
    return VerificationReport(f"type II frames on {g.name}").residual(
        "type II frame", _max(res), tol, tag="typeII_frame")


def verify_cells(cs: CellSystem, tol=1e-8) -> VerificationReport:
    rep = VerificationReport(f"cell system on {cs.graph.name}")
    rep.checks += verify_type_I(cs, tol).checks + verify_type_II(cs, tol).checks
    return rep


def gauge_transform(cs: CellSystem, phases) -> CellSystem:
    """W(a,b,c) -> u_a u_b u_c W(a,b,c) for unit complex u indexed by edge."""
    u = np.asarray([phases.get(e, 1.0) for e in range(len(cs.graph.edges))]
                   if isinstance(phases, dict) else phases, dtype=complex)
    if len(u) != len(cs.graph.edges) or np.abs(np.abs(u) - 1).max() > 1e-12:
        raise ValueError("gauge phases must be unit complex numbers, one per edge")
    return CellSystem(cs.graph, {t: complex(u[t[0]] * u[t[1]] * u[t[2]] * w)
                                 for t, w in cs.W.items()})


# ------------------------------------------------------------------ solving

def _gauge_pins(g: Graph, tris) -> list:
    """Triangles whose edge-incidence vectors are independent; their phase is gauge."""
    pins, rows = [], []
    E = len(g.edges)
    for n, t in enumerate(tris):
        v = np.zeros(E)
        for e in t:
            v[e] += 1
        trial = np.array(rows + [v])
        if np.linalg.matrix_rank(trial) > len(rows):
            rows.append(v)
            pins.append(n)
    return pins


def solve_cells(g: Graph, seed=0, restarts=50, tol=1e-10, max_nfev=2000) -> CellSystem:
    """Cell system by Levenberg-Marquardt over the stacked frame residuals.

    Restarts from random complex starts until the max residual is below tol.
    Raises NoConvergence carrying the best system found.
    """
    tris = enumerate_triangles(g)
    if not tris:
        raise NoConvergence(None, 0, float("inf"))
    phi, d2 = _frame_data(g)
    pairs = type_I_pairs(g)
    frames = type_II_frames(g)
    blocks = _vertex_blocks(g)
    E = len(g.edges)
    nt = len(tris)
    pinned = np.zeros(nt, dtype=bool)
    pinned[_gauge_pins(g, tris)] = True
    free_im = np.flatnonzero(~pinned)
    # scatter map from triangle to its three tensor positions
    pos = np.array([[r for r in sorted(_rotations(t))] + [t] * (3 - len(_rotations(t)))
                    for t in tris])

    def build(x):
        w = x[:nt].astype(complex)
        w[free_im] += 1j * x[nt:]
        T = np.zeros((E, E, E), dtype=complex)
        for r in range(3):
            T[pos[:, r, 0], pos[:, r, 1], pos[:, r, 2]] = w
        return w, T

    def resid(x):
        _, T = build(x)
        r = np.concatenate([_type_I_residuals(T, g, pairs, phi, d2),
                            _type_II_residuals(T, g, frames, phi, blocks)])
        return np.concatenate([r.real, r.imag])

    rng = np.random.default_rng(seed)
    scale = np.sqrt(d2) * float(phi.mean())
    best, best_res = None, np.inf
    npar = nt + len(free_im)
    for attempt in range(1, restarts + 1):
        x0 = rng.normal(scale=scale, size=npar)
        method = "lm" if 2 * (len(pairs) + len(frames)) >= npar else "trf"
        sol = least_squares(resid, x0, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=max_nfev * npar if method == "lm" else max_nfev)
        r = float(np.abs(resid(sol.x)).max())
        if r < best_res:
            w, _ = build(sol.x)
            best_res = r
            best = CellSystem(g, {t: complex(v) for t, v in zip(tris, w)})
        if best_res < tol:
            return best
    raise NoConvergence(best, restarts, best_res)


def gauge_invariants(cs: CellSystem) -> np.ndarray:
    """Products of cells that no gauge transformation can change.

    Each invariant is prod_t W(t)^n_t for an integer vector n in the kernel of
    the triangle/edge incidence map (W^-1 read as conj(W)/|W|^2).
    """
    import sympy

    tris = sorted(cs.W)
    E = len(cs.graph.edges)
    M = sympy.zeros(E, len(tris))
    for n, t in enumerate(tris):
        for e in t:
            M[e, n] += 1
    out = []
    for v in M.nullspace():
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
        n = [int(x * den) for x in v]
        out.append(np.prod([complex(cs.W[t]) ** p for t, p in zip(tris, n)]))
    return np.array(out, dtype=complex)


def gauge_equivalent(a: CellSystem, b: CellSystem, tol=1e-8) -> bool:
    """Necessary test for gauge equivalence: the cell moduli and invariants agree."""
    if set(a.W) != set(b.W):
        return False
    if max(abs(abs(a.W[t]) - abs(b.W[t])) for t in a.W) > tol:
        return False
    ia, ib = gauge_invariants(a), gauge_invariants(b)
    return bool(len(ia) == len(ib) and (len(ia) == 0 or np.abs(ia - ib).max() < tol))
