"""Quantum integers, roots of unity and tolerance helpers.

Throughout the package q = exp(i pi / m) where m = k + 3 is the Coxeter
number, so that [3]_q = 1 + 2 cos(2 pi / m) is the norm of the level-k graphs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ToleranceContext:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    rank_tol: float = 1e-8

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def close(self, a, b) -> bool:
        return bool(np.all(np.abs(np.asarray(a) - np.asarray(b))
                           <= self.abs_tol + self.rel_tol * np.abs(np.asarray(b))))


DEFAULT_TOL = ToleranceContext()


@dataclass(frozen=True)
class QRoot:
    """The root of unity q = exp(i pi / m) attached to Coxeter number m."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("Coxeter number must be positive")

    @property
    def value(self) -> complex:
        return cmath.exp(1j * math.pi / self.m)

    def qint(self, n: int) -> float:
        return quantum_integer(n, self.m)

    @property
    def delta(self) -> float:
        return quantum_integer(2, self.m)

    @property
    def alpha(self) -> float:
        return quantum_integer(3, self.m)


def quantum_integer(n: int, m: int) -> float:
    """[n]_q = sin(n pi / m) / sin(pi / m) for q = exp(i pi / m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if n == 1:
        return 1.0
    if m == 1:
        # q = -1: [n] is the limit (-1)^(n-1) n
        return float((-1) ** (n - 1) * n)
    return math.sin(n * math.pi / m) / math.sin(math.pi / m)


def root_of_unity(n, order) -> complex:
    return cmath.exp(2j * math.pi * n / order)


def chop(x, tol=1e-12):
    """Zero out real/imaginary parts below tol (display helper)."""
    x = np.asarray(x, dtype=complex)
    re = np.where(np.abs(x.real) < tol, 0.0, x.real)
    im = np.where(np.abs(x.imag) < tol, 0.0, x.imag)
    return re + 1j * im


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0
