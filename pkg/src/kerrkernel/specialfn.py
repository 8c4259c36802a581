"""Special functions for Fock-space formulas.

Factorials are kept in log space so that ratios such as sqrt(m!/n!) can be
formed for cutoffs well beyond 170 without overflow. Polynomials are
evaluated with three-term recurrences.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CutoffExceededError, DomainError

DEFAULT_NMAX = 200


@dataclass(frozen=True)
class LogFactorialTable:
    """Table of ln(n!) for n = 0..nmax."""

    nmax: int = DEFAULT_NMAX
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.nmax < 0:
            raise DomainError("nmax must be non-negative")
        logs = np.zeros(self.nmax + 1)
        if self.nmax > 0:
            logs[1:] = np.cumsum(np.log(np.arange(1, self.nmax + 1, dtype=float)))
        logs.setflags(write=False)
        object.__setattr__(self, "values", logs)

    def __getitem__(self, n):
        return self.values[n]

    def log_ratio(self, m, n):
        """ln(m!/n!) elementwise."""
        return self.values[m] - self.values[n]


@lru_cache(maxsize=8)
def log_factorial_table(nmax: int = DEFAULT_NMAX) -> LogFactorialTable:
    return LogFactorialTable(nmax)


def log_factorial(n) -> np.ndarray:
    n = np.asarray(n)
    nmax = int(n.max()) if n.size else 0
    return log_factorial_table(max(nmax, DEFAULT_NMAX))[n]


def hermite(n: int, z, nmax: int = DEFAULT_NMAX):
    """Physicists' Hermite polynomial H_n(z) for real or complex ``z``.

    Uses H_{k+1} = 2 z H_k - 2 k H_{k-1}. ``z`` may be an array.
    """
    if n < 0:
        raise DomainError(f"hermite order must be >= 0, got {n}")
    if n > nmax:
        raise CutoffExceededError(f"hermite order {n} exceeds N_max={nmax}")
    z = np.asarray(z)
    h_prev = np.ones_like(z, dtype=np.result_type(z, float))
    if n == 0:
        return h_prev[()] if h_prev.ndim == 0 else h_prev
    h = 2 * z * h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * z * h - 2 * k * h_prev
    return h[()] if np.ndim(h) == 0 else h


def hermite_all(nmax: int, z) -> np.ndarray:
    """H_0(z), ..., H_nmax(z) stacked along the first axis."""
    z = np.asarray(z)
    out = np.empty((nmax + 1,) + z.shape, dtype=np.result_type(z, float))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2 * z
    for k in range(1, nmax):
        out[k + 1] = 2 * z * out[k] - 2 * k * out[k - 1]
    return out


def assoc_laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial L_n^k(x).

    Recurrence in n:
    (j+1) L_{j+1} = (2j + 1 + k - x) L_j - (j + k) L_{j-1}.
    Negative ``k`` is allowed as long as ``n + k >= 0``.
    """
    if n < 0 or n + k < 0:
        raise DomainError(f"invalid Laguerre indices n={n}, k={k}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("assoc_laguerre requires x >= 0")
    l_prev = np.ones_like(x)
    if n == 0:
        return l_prev[()] if l_prev.ndim == 0 else l_prev
    l_cur = 1.0 + k - x
    for j in range(1, n):
        l_prev, l_cur = l_cur, ((2 * j + 1 + k - x) * l_cur - (j + k) * l_prev) / (j + 1)
    return l_cur[()] if np.ndim(l_cur) == 0 else l_cur
