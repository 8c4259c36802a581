"""Kerr-unitary data encodings.

Every encoding is a diagonal phase on a product fiducial state,

    |phi(x)> = sum_n f_{n_1} ... f_{n_P} exp(-i pi phi(x) . g(n)) |n>,

where g(n) are the Kerr generators n_k^2 and cross-Kerr generators
2 n_j n_k evaluated on occupation numbers. Two feature maps are provided:

* the experimental map used for all two-mode runs, phi = (x1, x2, x1 x2),
  giving the phase pi [n^2 x1 + m^2 x2 + 2 n m x1 x2];
* the general P-mode map, phi = (x_k^2 ..., (1 - x_j)(1 - x_k) ...).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ShapeMismatchError
from .fock import (
    EXPERIMENT_POLICY,
    ANALYTIC_POLICY,
    DensityMatrix,
    FockVector,
    TruncationPolicy,
    coherent_amplitudes,
    fiducial_amplitudes,
)

MAX_MODES = 3


@dataclass(frozen=True)
class DataPoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in np.atleast_1d(self.coords))
        if any(not 0.0 <= c <= 1.0 for c in coords):
            raise DomainError(f"data coordinates must lie in [0, 1], got {coords}")
        object.__setattr__(self, "coords", coords)

    def __len__(self):
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True)
class KerrPhaseSpec:
    """Feature map phi(x) paired with Kerr generators g(n).

    ``pairs`` lists the mode pairs carrying a cross-Kerr generator 2 n_j n_k;
    ``feature_map`` returns the P self-Kerr weights followed by one weight per
    pair.
    """

    num_modes: int
    pairs: tuple[tuple[int, int], ...]
    feature_map: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    @property
    def num_features(self) -> int:
        return self.num_modes + len(self.pairs)

    def generators(self, cutoff: int) -> np.ndarray:
        """g(n) for every basis index, shape (K, N+1, ..., N+1)."""
        grids = np.meshgrid(*([np.arange(cutoff + 1)] * self.num_modes), indexing="ij")
        gens = [g.astype(float) ** 2 for g in grids]
        gens += [2.0 * grids[j] * grids[k] for j, k in self.pairs]
        return np.stack(gens)

    def phase(self, x, cutoff: int) -> np.ndarray:
        """Total phase phi(x) . g(n) (without the factor pi) on the basis grid."""
        phi = np.asarray(self.feature_map(np.asarray(x, dtype=float)))
        return np.tensordot(phi, self.generators(cutoff), axes=1)


def _experimental_features(x: np.ndarray) -> np.ndarray:
    return np.array([x[0], x[1], x[0] * x[1]])


def experimental_phase_spec() -> KerrPhaseSpec:
    return KerrPhaseSpec(2, ((0, 1),), _experimental_features, name="experimental")


def general_phase_spec(num_modes: int) -> KerrPhaseSpec:
    """phi_k = x_k^2 and phi_{P+k} = (1 - x_k)(1 - x_{k+1}), neighbours taken cyclically."""
    if not 1 <= num_modes <= MAX_MODES:
        raise DomainError(f"general encoding supports 1..{MAX_MODES} modes, got {num_modes}")
    if num_modes == 1:
        pairs: tuple[tuple[int, int], ...] = ()
    elif num_modes == 2:
        pairs = ((0, 1),)
    else:
        pairs = tuple((k, (k + 1) % num_modes) for k in range(num_modes))

    def features(x):
        squares = [x[k] ** 2 for k in range(num_modes)]
        cross = [(1 - x[j]) * (1 - x[k]) for j, k in pairs]
        return np.array(squares + cross)

    return KerrPhaseSpec(num_modes, pairs, features, name=f"general-{num_modes}")


def _check_unit_box(x, num_modes: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (num_modes,):
        raise ShapeMismatchError(f"expected {num_modes} coordinates, got shape {x.shape}")
    if np.any((x < 0) | (x > 1)):
        raise DomainError(f"data coordinates must lie in [0, 1], got {x}")
    return x


def encode_state(
    x,
    spec: KerrPhaseSpec,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
    check_domain: bool = True,
) -> FockVector:
    x = _check_unit_box(x, spec.num_modes) if check_domain else np.atleast_1d(np.asarray(x, float))
    f = fiducial_amplitudes(alpha0, r0, policy)
    amps = f
    for _ in range(spec.num_modes - 1):
        amps = np.multiply.outer(amps, f)
    amps = amps * np.exp(-1j * np.pi * spec.phase(x, policy.cutoff))
    return FockVector(spec.num_modes, policy.cutoff, amps)


def encode_one_mode(x: float, alpha0: complex = 1.0, policy: TruncationPolicy = ANALYTIC_POLICY) -> FockVector:
    """exp(-i pi x n^2)|alpha0>.

    ``x`` is not range-checked: the phase is 2-periodic in x and the
    sequential protocol refers to x = 3/2.
    """
    base = coherent_amplitudes(alpha0, policy).amps
    n = np.arange(policy.cutoff + 1)
    return FockVector(1, policy.cutoff, base * np.exp(-1j * np.pi * x * n**2))


def encode_two_mode(
    x, alpha0: complex = 1.0, r0: float = 0.0, policy: TruncationPolicy = EXPERIMENT_POLICY
) -> FockVector:
    return encode_state(x, experimental_phase_spec(), alpha0, r0, policy)


def encode_p_mode(
    x, alpha0: complex = 1.0, r0: float = 0.0, policy: TruncationPolicy = EXPERIMENT_POLICY
) -> FockVector:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size > MAX_MODES:
        raise DomainError(f"at most {MAX_MODES} modes are supported, got {x.size}")
    return encode_state(x, general_phase_spec(x.size), alpha0, r0, policy)


def two_mode_amplitudes(
    points: np.ndarray,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> np.ndarray:
    """Batch version of encode_two_mode: array of shape (n_points, N+1, N+1)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    f = fiducial_amplitudes(alpha0, r0, policy)
    n = np.arange(policy.cutoff + 1, dtype=float)
    sq = n**2
    nm = 2.0 * np.outer(n, n)
    x1 = points[:, 0, None, None]
    x2 = points[:, 1, None, None]
    phase = sq[None, :, None] * x1 + sq[None, None, :] * x2 + nm[None] * (x1 * x2)
    return np.outer(f, f)[None] * np.exp(-1j * np.pi * phase)


def bias(x: float, alpha0: complex = 1.0) -> complex:
    """Mean amplitude <phi(x)|a|phi(x)> of the one-mode encoding.

    alpha0 exp(-i pi x) exp(-|alpha0|^2 (1 - exp(-2 pi i x))).
    """
    return complex(
        alpha0 * np.exp(-1j * np.pi * x) * np.exp(-abs(alpha0) ** 2 * (1 - np.exp(-2j * np.pi * x)))
    )


def mean_amplitude(state: FockVector) -> complex:
    """<a> evaluated in the number basis."""
    c = state.amps
    n = np.arange(1, state.cutoff + 1)
    return complex(np.sum(c[:-1].conj() * np.sqrt(n) * c[1:]) / np.vdot(c, c).real)


def reduced_state_two_mode(
    x, alpha0: complex = 1.0, policy: TruncationPolicy = EXPERIMENT_POLICY, mode: int = 0
) -> DensityMatrix:
    """Reduced density matrix of one mode of the coherent two-mode encoding."""
    psi = encode_two_mode(x, alpha0, 0.0, policy).tensor()
    if mode == 1:
        psi = psi.T
    return DensityMatrix(policy.cutoff, psi @ psi.conj().T)


def points_array(points: Sequence) -> np.ndarray:
    """Coerce DataPoints / sequences into a float array of shape (n, P)."""
    arr = np.asarray([np.asarray(p, dtype=float) for p in points], dtype=float)
    return arr.reshape(len(arr), -1)
