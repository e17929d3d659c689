"""Spectral measures on the discoid and the 2-torus, and their moments.

Torus points (w1, w2) map to the discoid by Phi(w1, w2) = w1 + 1/w2 + w2/w1.
The discriminant J^2 = 27 - 18|z|^2 + 4z^3 + 4conj(z)^3 - |z|^4 vanishes on
the deltoid boundary.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate, linalg

from .graphs import Graph
from .reports import VerificationReport

MERGE_TOL = 1e-9


class NonNormalAdjacency(ValueError):
    pass


class OutsideDiscoid(ValueError):
    pass


def phi_map(w1, w2):
    w1, w2 = np.asarray(w1), np.asarray(w2)
    return w1 + 1 / w2 + w2 / w1


def jacobian_sq(z):
    z = np.asarray(z, dtype=complex)
    zz = (z * z.conj()).real
    return (27 - 18 * zz + 4 * z ** 3 + 4 * z.conj() ** 3 - zz ** 2).real


# ---------------------------------------------------------------- measures

@dataclass
class DiscreteMeasure:
    """Weighted atoms; ``points`` is (N,) complex on the discoid or (N, 2) on the torus."""

    domain: str
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.domain not in ("discoid", "torus"):
            raise ValueError(f"unknown domain {self.domain!r}")
        self.points = np.asarray(self.points, dtype=complex)
        self.weights = np.asarray(self.weights, dtype=float)
        if abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError(f"total mass {self.weights.sum():.15f} != 1")
        if (self.weights < 0).any():
            raise ValueError("negative atom weight")
        if self.domain == "torus" and np.abs(np.abs(self.points) - 1).max(initial=0) > 1e-9:
            raise ValueError("torus atoms must lie on the unit circle")
        if self.domain == "discoid" and jacobian_sq(self.points).min(initial=0) < -1e-8:
            raise ValueError("discoid atom outside the deltoid")

    def __len__(self):
        return len(self.weights)

    def z(self) -> np.ndarray:
        if self.domain == "discoid":
            return self.points
        return phi_map(self.points[:, 0], self.points[:, 1])

    def pushforward(self) -> "DiscreteMeasure":
        return merged("discoid", self.z(), self.weights)


def merged(domain, points, weights, tol=MERGE_TOL) -> DiscreteMeasure:
    """Combine atoms closer than tol."""
    points = np.asarray(points, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    key = points.reshape(len(points), -1)
    out_p, out_w = [], []
    for p, w in zip(key, weights):
        for n, q in enumerate(out_p):
            if np.abs(p - q).max() < tol:
                out_w[n] += w
                break
        else:
            out_p.append(p)
            out_w.append(w)
    pts = np.array(out_p)
    pts = pts[:, 0] if domain == "discoid" else pts
    w = np.array(out_w)
    return DiscreteMeasure(domain, pts, w / w.sum())


def vacuum_measure_discoid(g: Graph) -> DiscreteMeasure:
    """Spectral measure of the adjacency matrix in the state of the star vertex."""
    D = g.adjacency
    if not np.array_equal(D @ D.T, D.T @ D):
        raise NonNormalAdjacency(f"{g.name}: adjacency is not normal")
    T, Z = linalg.schur(D.astype(complex), output="complex")
    ev = np.diag(T)
    w = np.abs(Z[g.star, :]) ** 2
    keep = w > 1e-14
    return merged("discoid", ev[keep], w[keep])


@dataclass
class MomentTable:
    grid: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=complex)

    @property
    def shape(self):
        return self.grid.shape

    def __getitem__(self, mn):
        return self.grid[mn]

    def hermitian_defect(self) -> float:
        k = min(self.grid.shape)
        sq = self.grid[:k, :k]
        return float(np.abs(sq - sq.T.conj()).max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "re", "im"])
        for m in range(self.grid.shape[0]):
            for n in range(self.grid.shape[1]):
                v = self.grid[m, n]
                w.writerow([m, n, f"{v.real:.12e}", f"{v.imag:.12e}"])
        return buf.getvalue()


def _table(z, w, M, N) -> MomentTable:
    z = np.asarray(z, dtype=complex)
    zm = np.array([z ** m for m in range(M + 1)])
    zn = np.array([z.conj() ** n for n in range(N + 1)])
    return MomentTable(np.einsum("mk,nk,k->mn", zm, zn, w))


def moments(mu: DiscreteMeasure, M: int, N: int) -> MomentTable:
    return _table(mu.z(), mu.weights, M, N)


# ---------------------------------------------------------------- subgroups

@dataclass
class ClassData:
    group: str
    order: int
    sizes: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        self.sizes = np.asarray(self.sizes, dtype=int)
        self.chi = np.asarray(self.chi, dtype=complex)
        if self.sizes.sum() != self.order:
            raise ValueError(f"{self.group}: class sizes sum to {self.sizes.sum()}, "
                             f"not {self.order}")
        if (np.abs(self.chi) > 3 + 1e-9).any():
            raise ValueError(f"{self.group}: |chi| exceeds 3")
        ident = np.flatnonzero(self.sizes == 1)
        if not any(abs(self.chi[i] - 3) < 1e-9 for i in ident):
            raise ValueError(f"{self.group}: no identity class with chi = 3")

    @classmethod
    def from_dict(cls, d):
        try:
            cl = d["classes"]
            return cls(d["group"], int(d["order"]), [c["size"] for c in cl],
                       [complex(c["chi_re"], c.get("chi_im", 0.0)) for c in cl])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed class data: {exc!r}") from exc

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self):
        return {"group": self.group, "order": int(self.order),
                "classes": [{"size": int(s), "chi_re": float(c.real), "chi_im": float(c.imag)}
                            for s, c in zip(self.sizes, self.chi)]}


def abelian_class_data(m: int, n: int) -> ClassData:
    """Z_m x Z_n inside SU(3) as diag(w1, 1/w2, w2/w1)."""
    chi = [phi_map(np.exp(2j * np.pi * a / m), np.exp(2j * np.pi * b / n))
           for a in range(m) for b in range(n)]
    return ClassData(f"Z{m}xZ{n}", m * n, np.ones(m * n, dtype=int), chi)


def subgroup_moments(cd: ClassData, M: int, N: int) -> MomentTable:
    return _table(cd.chi, cd.sizes / cd.order, M, N)


# ---------------------------------------------------------------- inversion

def _vieta_defect(r, z) -> float:
    e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
    return max(abs(r.sum() - z), abs(e2 - np.conj(z)), abs(np.prod(r) - 1))


def cubic_inverse(z: complex, check=True) -> np.ndarray:
    """The three roots of w^3 - z w^2 + conj(z) w - 1 = 0, by the radical formula.

    Next to the deltoid cusps the radicals cancel badly, so there the roots come
    from the companion matrix instead; a triple root is only determined to
    about eps^(1/3) and the unit-modulus check is loosened accordingly.
    """
    z = complex(z)
    zb = z.conjugate()
    J = np.sqrt(complex(jacobian_sq(z)))
    X = 27 - 9 * z * zb + 2 * z ** 3 + 3 * np.sqrt(3) * J
    P = abs(X) ** (1 / 3) * np.exp(1j * (np.angle(X) % (2 * np.pi)) / 3)
    near_cusp = abs(J) ** 2 < 1e-6
    if abs(P) < 1e-12:
        roots = np.full(3, z / 3)
    elif near_cusp:
        roots = np.roots([1, -z, zb, -1])
    else:
        eps = np.exp(2j * np.pi * np.arange(3) / 3)
        c = 2 ** (1 / 3)
        roots = (z + eps * P / c + c * eps.conj() * (z * z - 3 * zb) / P) / 3
        # Newton steps tidy rounding, kept only when they lower the residual
        cubic = lambda w: w ** 3 - z * w ** 2 + zb * w - 1
        for _ in range(3):
            df = 3 * roots ** 2 - 2 * z * roots + zb
            ok = np.abs(df) > 1e-6
            step = roots.copy()
            step[ok] -= cubic(roots[ok]) / df[ok]
            roots = np.where(np.abs(cubic(step)) < np.abs(cubic(roots)), step, roots)
        if _vieta_defect(roots, z) > 1e-9:
            roots = np.roots([1, -z, zb, -1])
    if check:
        if _vieta_defect(roots, z) > 1e-9:
            raise ArithmeticError(f"Vieta identities fail at z = {z}")
        if np.abs(np.abs(roots) - 1).max() > (1e-4 if near_cusp else 1e-8):
            raise OutsideDiscoid(f"z = {z} lies outside the discoid")
        roots = roots / np.abs(roots)
    return roots


def lift_to_torus(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Average of the six right inverses (w_k, conj(w_l)), k != l."""
    pts, wts = [], []
    for z, w in zip(mu.z(), mu.weights):
        r = cubic_inverse(z)
        for k, l in itertools.permutations(range(3), 2):
            pts.append((r[k], r[l].conjugate()))
            wts.append(w / 6)
    return merged("torus", np.array(pts), np.array(wts))


def s3_orbit(w1, w2) -> list:
    """Torus points with the same image under Phi obtained by permuting (w1, 1/w2, w2/w1)."""
    t = (w1, 1 / w2, w2 / w1)
    return [(t[a], 1 / t[b]) for a, b, _ in itertools.permutations(range(3))]


def orbit_measure(points) -> DiscreteMeasure:
    """Uniform measure on the distinct points of the union of S3-orbits."""
    pts = []
    for p in points:
        for q in s3_orbit(*p):
            if not any(abs(q[0] - r[0]) < MERGE_TOL and abs(q[1] - r[1]) < MERGE_TOL for r in pts):
                pts.append(q)
    return DiscreteMeasure("torus", np.array(pts), np.full(len(pts), 1 / len(pts)))


def orbit_points(n, k=None) -> list:
    tau = np.exp(2j * np.pi / n)
    om = np.exp(2j * np.pi / 3)
    if k is None:
        return [(tau, tau), (om.conjugate() * tau.conjugate(), om),
                (om, om.conjugate() * tau.conjugate())]
    e = np.exp(2j * np.pi * k)
    a = om.conjugate() * tau.conjugate()
    return [(tau * e, tau), (tau, tau * e), (a, om * e), (om * e, a),
            (a / e, om / e), (om / e, a / e)]


def mixture(parts) -> DiscreteMeasure:
    """Convex combination of (coefficient, torus measure) pairs."""
    pts = np.concatenate([mu.points for _, mu in parts])
    wts = np.concatenate([c * mu.weights for c, mu in parts])
    return merged("torus", pts, wts / wts.sum())


def e8_orbit_mixture() -> DiscreteMeasure:
    """(2-r2)/8 d(8) + (2+r2)/8 d(8/3) + 1/2 d(24/5, 1/12) on the torus; equals the E8 vacuum measure."""
    r2 = np.sqrt(2)
    return mixture([((2 - r2) / 8, orbit_measure(orbit_points(8))),
                    ((2 + r2) / 8, orbit_measure(orbit_points(8 / 3))),
                    (0.5, orbit_measure(orbit_points(24 / 5, 1 / 12)))])


def uniform_Dm_measure(m: int) -> DiscreteMeasure:
    if m < 1:
        raise ValueError("m must be >= 1")
    q = [(a, b) for a in range(3 * m) for b in range(3 * m) if (a + b) % 3 == 0]
    pts = np.array([(np.exp(2j * np.pi * a / (3 * m)), np.exp(2j * np.pi * b / (3 * m)))
                    for a, b in q])
    return DiscreteMeasure("torus", pts, np.full(len(q), 1 / len(q)))


def jacobian_weighted(mu: DiscreteMeasure, power: int = 2) -> DiscreteMeasure:
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    j2 = np.clip(jacobian_sq(mu.z()), 0, None)
    f = j2 if power == 2 else np.sqrt(j2)
    w = mu.weights * f
    keep = f > 1e-10 * max(f.max(), 1)
    if not keep.any():
        raise ValueError("Jacobian vanishes on every atom")
    return DiscreteMeasure(mu.domain, mu.points[keep], w[keep] / w[keep].sum())


# ---------------------------------------------------------------- continuous

def _torus_integral(f, tol, n0=16, nmax=4096):
    """Mean of f over T^2 on an n x n periodic grid, doubling n until stable."""
    prev = None
    n = n0
    while n <= nmax:
        th = 2 * np.pi * np.arange(n) / n
        w1, w2 = np.meshgrid(np.exp(1j * th), np.exp(1j * th), indexing="ij")
        val = complex(f(w1, w2).mean())
        if prev is not None and abs(val - prev) < tol:
            return val, abs(val - prev)
        prev = val
        n *= 2
    raise ArithmeticError(f"torus quadrature did not reach tolerance {tol}")


def continuous_moments(kind: str, m: int, n: int, tol: float = 1e-10) -> complex:
    """Moments of the continuous spectral measures.

    T2: Haar measure on the torus pushed to the discoid.
    SU3: (1/6) J^2 times Haar on the torus (Weyl integration).
    semicircle: (1/2pi) sqrt(4 - x^2) on [-2, 2]; moment of x^(m+n).
    SO3: (1/2pi) sqrt(4 - (x-1)^2) on [-1, 3]; moment of x^(m+n).
    """
    kind = kind.upper() if kind.lower() in ("t2", "su3", "so3") else kind.lower()
    if kind in ("T2", "SU3"):
        def f(w1, w2):
            z = phi_map(w1, w2)
            v = z ** m * z.conj() ** n
            return v if kind == "T2" else v * jacobian_sq(z) / 6
        return _torus_integral(f, tol)[0]
    if kind in ("semicircle", "SO3"):
        shift = 0.0 if kind == "semicircle" else 1.0
        p = m + n
        # x = shift + 2 cos(t) turns the density into (2/pi) sin^2 t on [0, pi]
        val, err = integrate.quad(lambda t: (shift + 2 * np.cos(t)) ** p * np.sin(t) ** 2 * 2 / np.pi,
                                  0, np.pi, epsabs=tol * 1e-2, epsrel=1e-13, limit=200)
        if err > tol:
            raise ArithmeticError(f"quadrature error {err:.2e} above {tol:.2e}")
        return complex(val)
    raise ValueError(f"unknown kind {kind!r}")


def walk_count_oracle(k: int) -> int:
    """dim of SU(3)-invariants in (C^3 (x) conj C^3)^(x)k by counting alternating walks."""
    from collections import Counter

    state = Counter({(0, 0): 1})
    for step in range(2 * k):
        new = Counter()
        shifts = ((1, 0), (-1, 1), (0, -1)) if step % 2 == 0 else ((0, 1), (1, -1), (-1, 0))
        for (a, b), c in state.items():
            for da, db in shifts:
                if a + da >= 0 and b + db >= 0:
                    new[(a + da, b + db)] += c
        state = new
    return state[(0, 0)]


def compare_measures(a: MomentTable, b: MomentTable, tol=1e-8, name="moments") -> VerificationReport:
    if a.shape != b.shape:
        raise ValueError(f"moment grids differ: {a.shape} vs {b.shape}")
    diff = float(np.abs(a.grid - b.grid).max())
    return VerificationReport(f"moment comparison: {name}").residual(
        "max |a - b|", diff, tol, tag="moment table")
