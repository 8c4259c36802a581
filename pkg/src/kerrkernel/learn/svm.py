"""Soft-margin dual SVM on a precomputed Gram matrix.

The solver itself lives in the compiled core (with a NumPy fallback); this
module wraps it with input checks, the PSD guard, KKT verification and
(de)serialization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import warnings

import numpy as np

from .._backend import smo_solve
from ..errors import DomainError, ShapeMismatchError
from ..kernels import GramMatrix, KernelSpec

PSD_TOL = 1e-8
RIDGE = 1e-8


@dataclass
class SvmModel:
    support_indices: np.ndarray
    dual_coeffs: np.ndarray  # y_j alpha_j on the support
    bias: float
    C: float
    kernel: KernelSpec | None = None
    alpha: np.ndarray | None = None
    support_points: np.ndarray | None = None
    iterations: int = 0
    converged: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def n_support(self) -> int:
        return int(self.support_indices.size)

    def to_json(self) -> dict:
        k = self.kernel
        return {
            "support_indices": self.support_indices.tolist(),
            "dual_coeffs": self.dual_coeffs.tolist(),
            "bias": self.bias,
            "C": self.C,
            "kernel": None if k is None else {
                "kind": k.kind,
                "alpha0": [complex(k.alpha0).real, complex(k.alpha0).imag],
                "r0": k.r0,
                "gamma": k.gamma_rbf,
                "cutoff": k.policy.cutoff,
                "tail_tol": k.policy.tail_tol,
            },
            "support_points": None if self.support_points is None else self.support_points.tolist(),
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SvmModel":
        from ..fock import TruncationPolicy

        with open(path) as fh:
            d = json.load(fh)
        k = d["kernel"]
        spec = None
        if k is not None:
            spec = KernelSpec(
                k["kind"], complex(*k["alpha0"]), k["r0"], k["gamma"],
                TruncationPolicy(k["cutoff"], k["tail_tol"]),
            )
        sp = d.get("support_points")
        return cls(
            np.asarray(d["support_indices"], dtype=int),
            np.asarray(d["dual_coeffs"], dtype=float),
            float(d["bias"]),
            float(d["C"]),
            spec,
            support_points=None if sp is None else np.asarray(sp, dtype=float),
        )


def _entries(gram) -> np.ndarray:
    return np.asarray(gram.entries if isinstance(gram, GramMatrix) else gram, dtype=float)


def _check_labels(labels, n: int) -> np.ndarray:
    y = np.asarray(labels, dtype=float).ravel()
    if y.size != n:
        raise ShapeMismatchError(f"{y.size} labels for a {n}x{n} Gram matrix")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DomainError("labels must be +1 or -1")
    return y


def dual_objective(alpha, K, y) -> float:
    """sum(alpha) - 0.5 alpha^T Q alpha with Q_ij = y_i y_j K_ij."""
    ya = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ya @ np.asarray(K) @ ya)


def kkt_gap(alpha, K, y, C) -> float:
    """max over I_up of -y grad minus min over I_low (zero or negative at optimum)."""
    alpha, y = np.asarray(alpha), np.asarray(y, dtype=float)
    grad = y * (np.asarray(K) @ (alpha * y)) - 1.0
    yg = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    if not up.any() or not low.any():
        return 0.0
    return float(yg[up].max() - yg[low].min())


def smo_train(
    gram,
    labels,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
    kernel: KernelSpec | None = None,
    points=None,
    check_psd: bool = True,
) -> SvmModel:
    K = _entries(gram)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeMismatchError(f"Gram matrix must be square, got {K.shape}")
    y = _check_labels(labels, K.shape[0])
    if not C > 0:
        raise DomainError("C must be positive")
    if check_psd and K.shape[0] > 0:
        lam = float(np.linalg.eigvalsh(0.5 * (K + K.T))[0])
        if lam < -PSD_TOL:
            warnings.warn(
                f"Gram matrix has eigenvalue {lam:.3g}; adding {RIDGE} * I", RuntimeWarning, stacklevel=2
            )
            K = K + RIDGE * np.eye(K.shape[0])
    max_iter = max(max_passes * K.shape[0], 1_000_000)
    alpha, b, it, _ = smo_solve(K, y, float(C), tol, max_iter)
    converged = kkt_gap(alpha, K, y, C) < tol + 1e-12
    if not converged:
        warnings.warn(f"SMO stopped after {it} iterations without meeting tol={tol}", RuntimeWarning, stacklevel=2)
    sv = np.flatnonzero(alpha > 0)
    pts = None if points is None else np.asarray(points, dtype=float)[sv]
    return SvmModel(sv, (alpha * y)[sv], float(b), float(C), kernel, alpha, pts, it, converged)


def svm_decision(model: SvmModel, gram_cross) -> np.ndarray:
    """sum_j y_j alpha_j k(x, x_j) - b for each row of the cross Gram.

    Columns may cover the full training set or only the support points.
    """
    K = _entries(gram_cross)
    if K.ndim == 1:
        K = K[None, :]
    n_sv = model.support_indices.size
    if K.shape[1] == n_sv:
        cols = K
    elif n_sv == 0 or K.shape[1] > int(model.support_indices.max()):
        cols = K[:, model.support_indices]
    else:
        raise ShapeMismatchError(f"cross Gram has {K.shape[1]} columns, model needs the training set")
    return cols @ model.dual_coeffs - model.bias


def svm_predict(model: SvmModel, gram_cross) -> np.ndarray:
    return np.where(svm_decision(model, gram_cross) >= 0, 1, -1).astype(int)
