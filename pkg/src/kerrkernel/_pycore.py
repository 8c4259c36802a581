"""Pure-Python/NumPy implementations of the hot kernels.

These are the reference versions; ``_core.pyx`` mirrors them line for line in
Cython. ``kerrkernel._backend`` picks one at import time.
"""
from __future__ import annotations

import numpy as np

TAU = 1e-12
_CHUNK = 4096


def kerr2_closed_gram(a, b, weights, symmetric=False):
    """|sum_{n,m} w_n w_m exp(i pi [n^2 d1 + m^2 d2 + 2 n m d3])|^2 for all row pairs.

    d1 = b1 - a1, d2 = b2 - a2, d3 = b1 b2 - a1 a2.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    n = np.arange(w.size, dtype=np.float64)
    sq = n**2
    cross = 2.0 * np.outer(n, n)
    ww = np.outer(w, w)
    out = np.empty((a.shape[0], b.shape[0]))
    if symmetric:
        rows, cols = np.triu_indices(a.shape[0])
    else:
        rows, cols = np.indices(out.shape)
        rows, cols = rows.ravel(), cols.ravel()
    for start in range(0, rows.size, _CHUNK):
        i = rows[start:start + _CHUNK]
        j = cols[start:start + _CHUNK]
        d1 = b[j, 0] - a[i, 0]
        d2 = b[j, 1] - a[i, 1]
        d3 = b[j, 0] * b[j, 1] - a[i, 0] * a[i, 1]
        phase = (
            sq[None, :, None] * d1[:, None, None]
            + sq[None, None, :] * d2[:, None, None]
            + cross[None] * d3[:, None, None]
        )
        s = np.einsum("pnm,nm->p", np.exp(1j * np.pi * phase), ww)
        out[i, j] = s.real**2 + s.imag**2
    if symmetric:
        out[cols, rows] = out[rows, cols]
    return out


def smo_solve(K, y, C, tol=1e-3, max_iter=1_000_000, track_objective=False):
    """Dual soft-margin SVM by SMO with second-order working-set selection.

    Minimizes 0.5 a^T Q a - sum(a), Q_ij = y_i y_j K_ij, subject to
    0 <= a <= C and y^T a = 0. Returns (alpha, b, iterations, objective
    history) where the decision function is sum_j y_j a_j K(x, x_j) - b and
    the history holds the maximization-form dual objective after each step.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.size
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    history = []
    it = 0
    while it < max_iter:
        yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        if yg[i] - yg[low].min() < tol:
            break
        # second-order choice of j: largest guaranteed decrease b^2 / a
        b = yg[i] - yg
        a = K[i, i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        gain = np.where(low & (b > 0), b * b / a, -np.inf)
        j = int(np.argmax(gain))
        it += 1
        quad = a[j]
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        di, dj = ai - old_i, aj - old_j
        grad += y * (K[:, i] * (y[i] * di) + K[:, j] * (y[j] * dj))
        if track_objective:
            history.append(-0.5 * float(alpha @ (grad - 1.0)))
    b = _bias(alpha, grad, y, C)
    return alpha, b, it, history


def _bias(alpha, grad, y, C):
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(yg[free].mean())
    ub, lb = np.inf, -np.inf
    for t in range(y.size):
        if (alpha[t] >= C and y[t] < 0) or (alpha[t] <= 0 and y[t] > 0):
            ub = min(ub, yg[t])
        else:
            lb = max(lb, yg[t])
    if not np.isfinite(ub):
        return float(lb)
    if not np.isfinite(lb):
        return float(ub)
    return float(0.5 * (ub + lb))
