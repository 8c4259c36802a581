"""Displaced-parity measurement: decision functions, Wigner values, sampling, labels."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
import json
import math
import warnings

import numpy as np

from .encode import encode_one_mode, two_mode_amplitudes
from .errors import DomainError
from .fock import (
    ANALYTIC_POLICY,
    EXPERIMENT_POLICY,
    DensityMatrix,
    FockVector,
    TruncationPolicy,
    displacement_matrix,
)

CLAMP_SLACK = 1e-9
_LABEL_CHUNK = 8192


@dataclass(frozen=True)
class DisplacementPair:
    mu: complex
    nu: complex = 0j
    name: str = ""

    def __neg__(self) -> "DisplacementPair":
        return DisplacementPair(-self.mu, -self.nu, self.name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mu": [self.mu.real, self.mu.imag],
            "nu": [self.nu.real, self.nu.imag],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DisplacementPair":
        return cls(complex(*obj["mu"]), complex(*obj["nu"]), obj.get("name", ""))


@dataclass(frozen=True)
class ParitySample:
    empirical_mean: float
    outcomes: np.ndarray


def load_displacement_sets(path=None) -> dict[str, DisplacementPair]:
    """Displacement sets from JSON; defaults to the bundled munu1..munu4."""
    if path is None:
        text = resources.files("kerrkernel").joinpath("data/munu.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    obj = json.loads(text)
    if isinstance(obj, dict):
        obj = [obj]
    pairs = [DisplacementPair.from_json(o) for o in obj]
    return {p.name: p for p in pairs}


def save_displacement_sets(pairs, path) -> None:
    with open(path, "w") as fh:
        json.dump([p.to_json() for p in pairs], fh, indent=2, sort_keys=True)
        fh.write("\n")


def _guard(mu: complex, policy: TruncationPolicy) -> None:
    if abs(mu) > math.sqrt(policy.cutoff) / 2:
        warnings.warn(
            f"displacement beyond sqrt(cutoff)/2 = {math.sqrt(policy.cutoff) / 2:.3g}; "
            "truncation may bias the parity sum",
            RuntimeWarning,
            stacklevel=3,
        )


def _clamp(d: np.ndarray | float):
    d = np.asarray(d, dtype=float)
    if np.any(np.abs(d) > 1 + CLAMP_SLACK):
        warnings.warn("decision value outside [-1, 1] beyond rounding slack", RuntimeWarning, stacklevel=3)
    out = np.clip(d, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def _parity_signs(cutoff: int) -> np.ndarray:
    return 1.0 - 2.0 * (np.arange(cutoff + 1) % 2)


def displaced_parity(
    state: FockVector, mu: complex, policy: TruncationPolicy | None = None, output_pad: int = 0
) -> float:
    """<psi| D(mu) Pi D^dag(mu) |psi> for a single-mode pure state.

    With ``output_pad`` > 0 the displaced state keeps that many extra number
    levels, so the parity sum is not cut where D^dag(mu) pushes weight past
    the cutoff; the input state itself stays truncated.
    """
    policy = policy or TruncationPolicy(state.cutoff)
    _guard(mu, policy)
    wide = TruncationPolicy(policy.cutoff + output_pad, policy.tail_tol)
    shifted = displacement_matrix(-mu, wide).entries[:, : state.cutoff + 1] @ state.amps
    return _clamp(np.sum(_parity_signs(wide.cutoff) * np.abs(shifted) ** 2))


def displaced_parity_dm(rho: DensityMatrix, mu: complex) -> float:
    """tr[rho D(mu) Pi D^dag(mu)], imaginary residue discarded."""
    policy = TruncationPolicy(rho.cutoff)
    dm = displacement_matrix(-mu, policy).entries
    shifted = dm @ rho.entries @ dm.conj().T
    val = np.sum(_parity_signs(rho.cutoff) * np.diag(shifted))
    return complex(val)


def decision_1mode(mu: complex, x: float, alpha0: complex = 1.0, policy: TruncationPolicy = ANALYTIC_POLICY) -> float:
    """Expected displaced parity d(mu, x) of the one-mode encoding; equals (pi/2) W(mu)."""
    return displaced_parity(encode_one_mode(x, alpha0, policy), mu, policy, policy.cutoff)


def decision_1mode_grid(mus, x: float, alpha0: complex = 1.0, policy: TruncationPolicy = ANALYTIC_POLICY) -> np.ndarray:
    state = encode_one_mode(x, alpha0, policy)
    vals = [displaced_parity(state, complex(m), policy, policy.cutoff) for m in np.ravel(mus)]
    return np.array(vals).reshape(np.shape(mus))


def wigner_1mode(mu: complex, x: float, alpha0: complex = 1.0, policy: TruncationPolicy = ANALYTIC_POLICY) -> float:
    return 2.0 / math.pi * decision_1mode(mu, x, alpha0, policy)


def _two_mode_parity(psi: np.ndarray, mu: complex, nu: complex, policy: TruncationPolicy) -> np.ndarray:
    """sum_{n,m} (-1)^{n+m} |(D(-mu) x D(-nu) psi)_{nm}|^2 for a batch of tensors."""
    dmu = displacement_matrix(-mu, policy).entries
    dnu = displacement_matrix(-nu, policy).entries
    shifted = dmu @ psi @ dnu.T
    signs = np.outer(_parity_signs(policy.cutoff), _parity_signs(policy.cutoff))
    return np.einsum("pnm,nm->p", shifted.real**2 + shifted.imag**2, signs)


def decision_2mode(
    pair: DisplacementPair,
    x,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> float:
    """(pi^2/4) W(mu, nu) of the two-mode encoded state."""
    return float(decision_2mode_batch(pair, np.asarray(x, float).reshape(1, 2), alpha0, r0, policy)[0])


def decision_2mode_batch(
    pair: DisplacementPair,
    points,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    _guard(pair.mu, policy)
    _guard(pair.nu, policy)
    out = np.empty(len(points))
    for start in range(0, len(points), _LABEL_CHUNK):
        chunk = points[start:start + _LABEL_CHUNK]
        psi = two_mode_amplitudes(chunk, alpha0, r0, policy)
        out[start:start + len(chunk)] = _two_mode_parity(psi, pair.mu, pair.nu, policy)
    return _clamp(out) if out.size > 1 else np.atleast_1d(_clamp(out))


def labelling_function(
    pair: DisplacementPair,
    points,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> np.ndarray:
    """L(x) = <Phi(x)| D^dag(mu, nu) Pi D(mu, nu) |Phi(x)> for each point.

    D(mu, nu) acts on the state before the parity, so this is the decision
    function at (-mu, -nu).
    """
    return decision_2mode_batch(-pair, points, alpha0, r0, policy)


def sign_label(values) -> np.ndarray:
    """+1 for values >= 0 (exact zeros included), -1 otherwise."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(int)


def label_points(
    points,
    pair: DisplacementPair,
    alpha0: complex = 1.0,
    r0: float = 0.0,
    policy: TruncationPolicy = EXPERIMENT_POLICY,
) -> np.ndarray:
    return sign_label(labelling_function(pair, points, alpha0, r0, policy))


def label_point(x, pair: DisplacementPair, alpha0: complex = 1.0, r0: float = 0.0,
                policy: TruncationPolicy = EXPERIMENT_POLICY) -> int:
    return int(label_points(np.asarray(x, float).reshape(1, 2), pair, alpha0, r0, policy)[0])


def sample_parity(d: float, shots: int, seed: int | np.random.Generator) -> ParitySample:
    """Draw ``shots`` parity outcomes with P(+1) = (1 + d)/2."""
    if abs(d) > 1 + CLAMP_SLACK:
        raise DomainError(f"decision value {d} is not a valid parity expectation")
    if shots < 1:
        raise DomainError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p_plus = min(max((1.0 + d) / 2.0, 0.0), 1.0)
    outcomes = np.where(rng.random(shots) < p_plus, 1, -1).astype(np.int8)
    return ParitySample(float(outcomes.mean()), outcomes)


def sample_parity_mean(d: float, shots: int, rng: np.random.Generator) -> float:
    """Empirical mean of ``shots`` outcomes via a single binomial draw."""
    if abs(d) > 1 + CLAMP_SLACK:
        raise DomainError(f"decision value {d} is not a valid parity expectation")
    p_plus = min(max((1.0 + d) / 2.0, 0.0), 1.0)
    plus = rng.binomial(shots, p_plus)
    return (2.0 * plus - shots) / shots


def sample_displacements(
    sigma: float, count: int, seed: int, max_abs2: float = 3.0
) -> list[DisplacementPair]:
    """Gaussian (mu, nu) pairs, components of variance ``sigma``, rejecting |.|^2 >= max_abs2."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    rng = np.random.default_rng(seed)
    std = math.sqrt(sigma)
    out = []
    while len(out) < count:
        re_mu, im_mu, re_nu, im_nu = rng.normal(0.0, std, size=4)
        mu, nu = complex(re_mu, im_mu), complex(re_nu, im_nu)
        if abs(mu) ** 2 < max_abs2 and abs(nu) ** 2 < max_abs2:
            out.append(DisplacementPair(mu, nu, f"sample{len(out) + 1}"))
    return out


def true_label_1mode(x: float) -> int:
    """sign(cos(pi x)), with the tie at x = 1/2 sent to +1."""
    return 1 if math.cos(math.pi * x) >= 0 or abs(x - 0.5) < 1e-15 else -1
