"""Kerr kernels: closed forms, the generic fidelity kernel, and Gram matrices."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from . import _backend
from .encode import two_mode_amplitudes
from .errors import DomainError, ShapeMismatchError
from .fock import (
    ANALYTIC_POLICY,
    EXPERIMENT_POLICY,
    FockVector,
    TruncationPolicy,
    coherent_amplitudes,
    fiducial_amplitudes,
)

KernelKind = Literal[
    "kerr-coherent-1mode", "kerr-coherent-2mode", "kerr-squeezed-2mode", "fidelity-generic", "rbf"
]
KERNEL_KINDS = (
    "kerr-coherent-1mode",
    "kerr-coherent-2mode",
    "kerr-squeezed-2mode",
    "fidelity-generic",
    "rbf",
)


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "kerr-coherent-2mode"
    alpha0: complex = 1.0
    r0: float = 0.0
    gamma_rbf: float | str = "scale"
    policy: TruncationPolicy = EXPERIMENT_POLICY

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if not np.isfinite(complex(self.alpha0)):
            raise DomainError("alpha0 must be finite")
        if isinstance(self.gamma_rbf, str):
            if self.gamma_rbf != "scale":
                raise DomainError(f"gamma must be a positive number or 'scale', got {self.gamma_rbf!r}")
        elif not self.gamma_rbf > 0:
            raise DomainError("gamma must be positive")

    def resolved(self, points: np.ndarray) -> "KernelSpec":
        """Copy with gamma='scale' replaced by its value on ``points``."""
        if self.kind == "rbf" and self.gamma_rbf == "scale":
            return replace(self, gamma_rbf=resolve_gamma_scale(points))
        return self


@dataclass
class GramMatrix:
    entries: np.ndarray
    provenance: str = "exact"
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.entries.shape

    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.entries + self.entries.T)
        return float(np.linalg.eigvalsh(sym)[0])

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        e = self.entries
        return e.shape[0] == e.shape[1] and bool(np.abs(e - e.T).max() <= tol)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.entries:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, provenance: str = "exact") -> "GramMatrix":
        with open(path, newline="") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        return cls(np.array(rows), provenance)


# -- closed forms -------------------------------------------------------------


def _level_weights(alpha0: complex, r0: float, policy: TruncationPolicy) -> np.ndarray:
    """|f_n|^2 of the (renormalized) fiducial state."""
    return np.abs(fiducial_amplitudes(alpha0, r0, policy)) ** 2


def kernel_1mode(x, y, alpha0: complex = 1.0, policy: TruncationPolicy = ANALYTIC_POLICY):
    """e^{-2|a|^2} |sum_n |a|^{2n}/n! exp(-i pi (x - y) n^2)|^2.

    Broadcasts over ``x`` and ``y``.
    """
    w = np.abs(coherent_amplitudes(alpha0, policy).amps) ** 2
    diff = np.subtract.outer(np.asarray(x, float), 0.0) - np.asarray(y, float)
    n2 = np.arange(policy.cutoff + 1, dtype=float) ** 2
    s = np.exp(-1j * np.pi * np.multiply.outer(diff, n2)) @ w
    out = s.real**2 + s.imag**2
    return float(out) if np.ndim(out) == 0 else out


def kernel_2mode_coherent(x, y, alpha0: complex = 1.0, policy: TruncationPolicy = EXPERIMENT_POLICY) -> float:
    """Closed-form two-mode coherent Kerr kernel for one pair of points."""
    w = _level_weights(alpha0, 0.0, policy)
    a = np.asarray(x, float).reshape(1, 2)
    b = np.asarray(y, float).reshape(1, 2)
    return float(_backend.kerr2_closed_gram(a, b, w)[0, 0])


def kernel_2mode_squeezed(
    x, y, alpha0: complex = 1.0, r0: float = 0.0, policy: TruncationPolicy = EXPERIMENT_POLICY
) -> float:
    """Closed-form kernel with displaced-squeezed fiducial states.

    Normalized by the x = y value of the same truncated series.
    """
    if r0 < 0:
        raise DomainError("r0 must be >= 0")
    w = _level_weights(alpha0, r0, policy)
    a = np.asarray(x, float).reshape(1, 2)
    b = np.asarray(y, float).reshape(1, 2)
    return float(_backend.kerr2_closed_gram(a, b, w)[0, 0] / np.sum(w) ** 4)


def fidelity_kernel(a: FockVector, b: FockVector) -> float:
    """|<a|b>|^2."""
    return abs(a.inner(b)) ** 2


def rbf_kernel(x, y, gamma: float) -> float:
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    d = np.asarray(x, float) - np.asarray(y, float)
    return float(np.exp(-gamma * np.dot(d, d)))


def resolve_gamma_scale(points) -> float:
    """1 / (d * mean per-feature variance)."""
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(len(pts), -1)
    var = float(np.mean(pts.var(axis=0)))
    if var <= 0:
        raise DomainError("cannot resolve gamma='scale' on a dataset with zero variance")
    return 1.0 / (pts.shape[1] * var)


# -- Gram matrices ------------------------------------------------------------


def _as_points(points, kind: str) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if kind == "kerr-coherent-1mode":
        return pts.reshape(-1)
    pts = pts.reshape(len(pts), -1)
    if kind != "rbf" and pts.shape[1] != 2:
        raise ShapeMismatchError(f"{kind} expects two coordinates per point")
    return pts


def _cross_entries(a: np.ndarray, b: np.ndarray, spec: KernelSpec, symmetric: bool) -> np.ndarray:
    kind = spec.kind
    if kind == "kerr-coherent-1mode":
        return kernel_1mode(a[:, None], b[None, :], spec.alpha0, spec.policy)
    if kind in ("kerr-coherent-2mode", "kerr-squeezed-2mode"):
        r0 = spec.r0 if kind == "kerr-squeezed-2mode" else 0.0
        w = _level_weights(spec.alpha0, r0, spec.policy)
        return _backend.kerr2_closed_gram(a, b, w, symmetric) / np.sum(w) ** 4
    if kind == "fidelity-generic":
        sa = two_mode_amplitudes(a, spec.alpha0, spec.r0, spec.policy).reshape(len(a), -1)
        sb = sa if symmetric else two_mode_amplitudes(b, spec.alpha0, spec.r0, spec.policy).reshape(len(b), -1)
        ov = sa.conj() @ sb.T
        return ov.real**2 + ov.imag**2
    gamma = spec.gamma_rbf
    if gamma == "scale":
        raise DomainError("resolve gamma='scale' before building an RBF Gram matrix")
    sq = (a**2).sum(1)[:, None] + (b**2).sum(1)[None, :] - 2 * a @ b.T
    return np.exp(-float(gamma) * np.maximum(sq, 0.0))


def gram_exact(points, spec: KernelSpec) -> GramMatrix:
    pts = _as_points(points, spec.kind)
    if len(pts) == 0:
        raise DomainError("gram_exact needs at least one point")
    spec = spec.resolved(pts)
    k = _cross_entries(pts, pts, spec, symmetric=True)
    k = 0.5 * (k + k.T)
    np.fill_diagonal(k, 1.0)
    return GramMatrix(k, "exact", {"kind": spec.kind, "gamma": spec.gamma_rbf})


def gram_cross(points_a, points_b, spec: KernelSpec) -> GramMatrix:
    """Rectangular matrix k(a_i, b_j); gamma must already be resolved for RBF."""
    a = _as_points(points_a, spec.kind)
    b = _as_points(points_b, spec.kind)
    return GramMatrix(_cross_entries(a, b, spec, symmetric=False), "exact", {"kind": spec.kind})


def _row_generator(seed: int, row: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise DomainError("seed must fit in 64 bits")
    return np.random.Generator(np.random.Philox(key=[row, seed]))


def sample_entries(exact: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Shot-sampled estimate of a symmetric kernel matrix.

    Entry (i, j), i <= j, is the fraction of ``shots`` Bernoulli trials that
    succeed with probability k_ij; row i draws from its own keyed stream.
    """
    if shots < 1:
        raise DomainError("shots must be >= 1")
    n = exact.shape[0]
    out = np.empty_like(exact, dtype=float)
    p = np.clip(exact, 0.0, 1.0)
    for i in range(n):
        counts = _row_generator(seed, i).binomial(shots, p[i, i:])
        out[i, i:] = counts / shots
        out[i:, i] = out[i, i:]
    return out


def gram_sampled(points, spec: KernelSpec, shots: int, seed: int) -> GramMatrix:
    exact = gram_exact(points, spec)
    sampled = sample_entries(exact.entries, shots, seed)
    return GramMatrix(sampled, f"sampled(M={shots}, seed={seed})", {"kind": spec.kind, "shots": shots, "seed": seed})


def kernel_normalization_check(
    y: float = 0.0,
    alpha0: complex = 1.0,
    quadrature_n: int = 4096,
    policy: TruncationPolicy = ANALYTIC_POLICY,
) -> float:
    """(1/2) * integral over x in [0, 2) of k(y, x), by the periodic trapezoid rule."""
    x = 2.0 * np.arange(quadrature_n) / quadrature_n
    return float(np.mean(kernel_1mode(x, y, alpha0, policy)))
