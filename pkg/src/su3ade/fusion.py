"""SU(3)_k alcove, Kac-Peterson modular data, fusion rules and modular invariants."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .reports import VerificationReport


class Weight(NamedTuple):
    lambda1: int
    lambda2: int


@dataclass(frozen=True)
class Alcove:
    level: int
    weights: tuple

    @property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.weights)}

    def __len__(self):
        return len(self.weights)

    def __contains__(self, mu):
        mu = tuple(mu)
        return mu[0] >= 0 and mu[1] >= 0 and mu[0] + mu[1] <= self.level

    def idx(self, mu) -> int:
        return self.index[Weight(*mu)]


_ALCOVES: dict[int, Alcove] = {}


def build_alcove(k: int) -> Alcove:
    if k < 0:
        raise ValueError("level must be non-negative")
    if k not in _ALCOVES:
        ws = tuple(Weight(a, b) for a in range(k + 1) for b in range(k + 1 - a))
        _ALCOVES[k] = Alcove(k, ws)
    return _ALCOVES[k]


def rotation_A(mu, k: int) -> Weight:
    mu1, mu2 = mu
    if mu1 < 0 or mu2 < 0 or mu1 + mu2 > k:
        raise ValueError(f"{tuple(mu)} is not in the level-{k} alcove")
    return Weight(k - mu1 - mu2, mu1)


def rotation_power(mu, k: int, n: int) -> Weight:
    mu = Weight(*mu)
    for _ in range(n % 3):
        mu = rotation_A(mu, k)
    return mu


def conjugate(mu) -> Weight:
    return Weight(mu[1], mu[0])


def triality(mu) -> int:
    return (mu[0] - mu[1]) % 3


def fundamental_shifts():
    """Weights of the defining representation, in Dynkin labels."""
    return ((1, 0), (-1, 1), (0, -1))


# ---------------------------------------------------------------- modular data

_GRAM = np.array([[2.0, 1.0], [1.0, 2.0]]) / 3.0


def _weyl_group():
    """The six elements of W(A2) acting on Dynkin labels, with signs."""
    s1 = np.array([[-1, 0], [1, 1]])   # (a,b) -> (-a, a+b), column convention
    s2 = np.array([[1, 1], [0, -1]])   # (a,b) -> (a+b, -b)
    e = np.eye(2, dtype=int)
    elems = [(e, 1), (s1, -1), (s2, -1), (s1 @ s2, 1), (s2 @ s1, 1), (s1 @ s2 @ s1, -1)]
    return elems


@dataclass(frozen=True)
class ModularData:
    alcove: Alcove
    S: np.ndarray
    T: np.ndarray  # diagonal entries

    @property
    def level(self) -> int:
        return self.alcove.level

    @property
    def Tmat(self) -> np.ndarray:
        return np.diag(self.T)

    def conjugation_matrix(self) -> np.ndarray:
        al = self.alcove
        C = np.zeros((len(al), len(al)), dtype=int)
        for i, w in enumerate(al.weights):
            C[i, al.idx(conjugate(w))] = 1
        return C

    def ratio(self, lam) -> np.ndarray:
        """S_{mu,lam}/S_{mu,0} for every mu: the eigenvalues of N_lam."""
        j = self.alcove.idx(lam)
        return self.S[:, j] / self.S[:, 0]

    def check(self) -> VerificationReport:
        S, T = self.S, self.Tmat
        n = len(S)
        rep = VerificationReport(f"modular data SU(3)_{self.level}")
        rep.residual("S unitary", np.abs(S @ S.conj().T - np.eye(n)).max(), 1e-9)
        rep.residual("S symmetric", np.abs(S - S.T).max(), 1e-9)
        rep.flag("S_{mu,0} >= S_{0,0} > 0",
                 bool(np.all(np.abs(S[:, 0].imag) < 1e-12)
                      and S[0, 0].real > 0 and np.all(S[:, 0].real >= S[0, 0].real - 1e-12)))
        ST = S @ T
        rep.residual("(ST)^3 = S^2", np.abs(ST @ ST @ ST - S @ S).max(), 1e-9)
        rep.residual("S^2 = C", np.abs(S @ S - self.conjugation_matrix()).max(), 1e-9)
        rep.residual("T unimodular", np.abs(np.abs(self.T) - 1).max(), 1e-12)
        return rep

    def to_json(self) -> str:
        return json.dumps({
            "level": self.level,
            "order": [list(w) for w in self.alcove.weights],
            "S_re": self.S.real.tolist(),
            "S_im": self.S.imag.tolist(),
            "T_phase": (np.angle(self.T) / (2 * np.pi) % 1.0).tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "ModularData":
        d = json.loads(text)
        al = build_alcove(d["level"])
        if [list(w) for w in al.weights] != d["order"]:
            raise ValueError("weight order does not match the canonical alcove order")
        S = np.array(d["S_re"]) + 1j * np.array(d["S_im"])
        T = np.exp(2j * np.pi * np.array(d["T_phase"]))
        return cls(al, S, T)


def build_modular_data(k: int) -> ModularData:
    """Kac-Peterson S and T for SU(3) at level k."""
    if k < 1:
        raise ValueError("level must be >= 1")
    al = build_alcove(k)
    n = k + 3
    shifted = np.array([(a + 1, b + 1) for a, b in al.weights], dtype=float)
    S = np.zeros((len(al), len(al)), dtype=complex)
    for w, sign in _weyl_group():
        wl = shifted @ w.T  # each row: w(lambda + rho)
        S += sign * np.exp(-2j * np.pi * (wl @ _GRAM @ shifted.T) / n)
    S *= 1j / (np.sqrt(3) * n)
    # fix the overall phase so that S_00 is real positive
    S *= np.exp(-1j * np.angle(S[0, 0]))
    lam = np.array(al.weights, dtype=float)
    two_rho = np.array([2.0, 2.0])
    h = np.einsum("ij,jk,ik->i", lam, _GRAM, lam + two_rho) / (2 * n)
    c = 8 * k / n
    T = np.exp(2j * np.pi * (h - c / 24))
    return ModularData(al, S, T)


# ---------------------------------------------------------------- fusion rules

def chebyshev_recursion(G10: np.ndarray, k: int, G01=None, check_nonneg=True) -> dict:
    """All G_lambda, lambda in the level-k alcove, from G_(1,0) (and G_(0,1)).

    Uses G_(p+1,l) = G_(1,0) G_(p,l) - G_(p,l-1) - G_(p-1,l+1) and its
    conjugate; labels outside the alcove contribute zero.
    """
    G10 = np.asarray(G10, dtype=np.int64)
    G01 = G10.T.copy() if G01 is None else np.asarray(G01, dtype=np.int64)
    n = G10.shape[0]
    G = {Weight(0, 0): np.eye(n, dtype=np.int64)}
    if k >= 1:
        G[Weight(1, 0)] = G10
        G[Weight(0, 1)] = G01
    zero = np.zeros((n, n), dtype=np.int64)

    def get(p, l):
        return G.get((p, l), zero) if p >= 0 and l >= 0 else zero

    for d in range(1, k):
        # degree d -> d + 1
        G[Weight(0, d + 1)] = G01 @ get(0, d) - get(1, d - 1)
        for p in range(0, d + 1):
            l = d - p
            G[Weight(p + 1, l)] = G10 @ get(p, l) - get(p, l - 1) - get(p - 1, l + 1)
    if check_nonneg:
        for lam, M in G.items():
            if (M < 0).any():
                raise NegativeEntryError(f"negative entry in G_{tuple(lam)}")
    return G


class NegativeEntryError(ValueError):
    pass


@dataclass(frozen=True)
class FusionRing:
    alcove: Alcove
    N: dict = field(repr=False)

    def __getitem__(self, lam) -> np.ndarray:
        return self.N[Weight(*lam)]

    def coeff(self, lam, mu, nu) -> int:
        """N_{lam mu}^nu."""
        al = self.alcove
        return int(self.N[Weight(*mu)][al.idx(lam), al.idx(nu)])

    def check_associativity(self) -> int:
        """Max |N_lam N_mu - sum_nu N_{lam mu}^nu N_nu| over all pairs."""
        al = self.alcove
        worst = 0
        for lam in al.weights:
            i = al.idx(lam)
            for mu in al.weights:
                rhs = sum(self.N[mu][i, j] * self.N[nu] for j, nu in enumerate(al.weights))
                worst = max(worst, int(np.abs(self.N[lam] @ self.N[mu] - rhs).max()))
        return worst


def alcove_adjacency(k: int) -> np.ndarray:
    al = build_alcove(k)
    D = np.zeros((len(al), len(al)), dtype=np.int64)
    for i, (a, b) in enumerate(al.weights):
        for da, db in fundamental_shifts():
            nb = (a + da, b + db)
            if nb in al:
                D[i, al.idx(nb)] += 1
    return D


def fusion_matrices(k: int) -> FusionRing:
    if k < 1:
        raise ValueError("level must be >= 1")
    al = build_alcove(k)
    N = chebyshev_recursion(alcove_adjacency(k), k)
    return FusionRing(al, N)


def verify_verlinde(md: ModularData, fr: FusionRing) -> VerificationReport:
    if len(md.alcove) != len(fr.alcove):
        raise ValueError("modular data and fusion ring live on different alcoves")
    S = md.S
    worst = 0.0
    for lam in fr.alcove.weights:
        ev = md.ratio(lam)
        # sum_sigma ev_sigma S_sigma S_sigma^*
        rec = (S.T * ev) @ S.conj()
        worst = max(worst, float(np.abs(fr[lam] - rec).max()))
    return VerificationReport(f"Verlinde SU(3)_{md.level}").residual(
        "Verlinde diagonalisation", worst, 1e-9, tag="verlinde")


# ---------------------------------------------------------- modular invariants

@dataclass(frozen=True)
class ModularInvariant:
    name: str
    level: int
    Z: np.ndarray

    @property
    def alcove(self) -> Alcove:
        return build_alcove(self.level)

    def to_rows(self) -> list:
        return self.Z.astype(int).tolist()


def identity_invariant(k) -> ModularInvariant:
    n = len(build_alcove(k))
    return ModularInvariant(f"A({k + 3})", k, np.eye(n, dtype=np.int64))


def conjugate_invariant(k) -> ModularInvariant:
    al = build_alcove(k)
    Z = np.zeros((len(al), len(al)), dtype=np.int64)
    for i, w in enumerate(al.weights):
        Z[i, al.idx(conjugate(w))] = 1
    return ModularInvariant(f"A({k + 3})*", k, Z)


def orbifold_invariant(k) -> ModularInvariant:
    """Z3 orbifold invariant D^(k+3).

    For k not divisible by 3 this is the permutation invariant
    Z[mu][A^{k(mu1-mu2)} mu] = 1; otherwise the simple-current extension with
    fixed-point multiplicity 3.
    """
    al = build_alcove(k)
    n = len(al)
    Z = np.zeros((n, n), dtype=np.int64)
    if k % 3:
        for i, w in enumerate(al.weights):
            Z[i, al.idx(rotation_power(w, k, k * (w[0] - w[1])))] = 1
    else:
        for i, w in enumerate(al.weights):
            if triality(w):
                continue
            orbit = {rotation_power(w, k, j) for j in range(3)}
            mult = 3 // len(orbit)
            for v in orbit:
                Z[i, al.idx(v)] += mult
    return ModularInvariant(f"D({k + 3})", k, Z)


def conjugate_orbifold_invariant(k) -> ModularInvariant:
    Z = orbifold_invariant(k).Z @ conjugate_invariant(k).Z
    return ModularInvariant(f"D({k + 3})*", k, Z)


def _block_invariant(k, name, blocks, pairing) -> ModularInvariant:
    al = build_alcove(k)
    Z = np.zeros((len(al), len(al)), dtype=np.int64)
    for left, right in pairing:
        for u in blocks[left]:
            for v in blocks[right]:
                Z[al.idx(u), al.idx(v)] += 1
    return ModularInvariant(name, k, Z)


# blocks of the level-5 exceptional invariants, transcribed from the character sums
E8_BLOCKS = [
    [(0, 0), (2, 2)],
    [(0, 2), (3, 2)],
    [(2, 0), (2, 3)],
    [(2, 1), (0, 5)],
    [(3, 0), (0, 3)],
    [(1, 2), (5, 0)],
]


def e8_invariant() -> ModularInvariant:
    return _block_invariant(5, "E(8)", E8_BLOCKS, [(i, i) for i in range(6)])


def e8_star_invariant() -> ModularInvariant:
    pairing = [(0, 0), (1, 2), (2, 1), (3, 5), (4, 4), (5, 3)]
    return _block_invariant(5, "E(8)*", E8_BLOCKS, pairing)


def invariant_catalog(k: int, md: ModularData | None = None, report=None) -> list:
    """Identity, conjugate, orbifold and conjugate orbifold invariants at level k,
    plus the exceptional ones at level 5.  Candidates failing verification are
    dropped (and recorded in ``report`` if a list is passed)."""
    md = md or build_modular_data(k)
    cands = [identity_invariant(k), orbifold_invariant(k),
             conjugate_invariant(k), conjugate_orbifold_invariant(k)]
    if k == 5:
        cands += [e8_invariant(), e8_star_invariant()]
    out, seen = [], []
    for z in cands:
        if any(np.array_equal(z.Z, s) for s in seen):
            continue
        rep = verify_invariant(z, md)
        if rep.passed:
            out.append(z)
            seen.append(z.Z)
        elif report is not None:
            report.append(rep)
    return out


def verify_invariant(Z: ModularInvariant, md: ModularData, tol=1e-8) -> VerificationReport:
    Zm = np.asarray(Z.Z)
    rep = VerificationReport(f"modular invariant {Z.name}")
    if Zm.shape != md.S.shape:
        return rep.flag("shape matches alcove", False)
    Zc = Zm.astype(complex)
    rep.residual("ZS - SZ", np.abs(Zc @ md.S - md.S @ Zc).max(), tol, tag="ZS=SZ")
    rep.residual("ZT - TZ", np.abs(Zc * md.T[None, :] - md.T[:, None] * Zc).max(), tol, tag="ZT=TZ")
    rep.flag("Z_00 = 1", bool(Zm[0, 0] == 1))
    rep.flag("non-negative integer entries",
             bool(np.all(Zm >= 0) and np.all(np.asarray(Zm) == np.round(Zm))))
    return rep


def exponents(Z: ModularInvariant) -> dict:
    """{mu: Z[mu][mu]} over the diagonal entries that are positive."""
    al = Z.alcove
    return {w: int(Z.Z[i, i]) for i, w in enumerate(al.weights) if Z.Z[i, i] > 0}

