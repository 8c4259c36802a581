"""Kerr evolution with photon loss and phase diffusion (single mode).

The closed-form solution of

    d rho/dt = -i chi [n^2, rho] + gamma (a rho a^dag - {a^dag a, rho}/2)

for an initial coherent state is, with f_nm = exp(-gamma t - 2 i chi t (n - m))
and delta_nm = 2 chi (n - m)/gamma,

    rho_nm(t) = rho_nm(0) f_nm^{(n+m)/2} exp[|alpha0|^2 (1 - f_nm)/(1 + i delta_nm)].

The power f_nm^{(n+m)/2} must use the unwrapped exponent
(n+m)/2 * (-gamma t - 2 i chi t (n - m)); the principal branch is wrong
whenever chi t (n - m)(n + m) leaves (-pi, pi].
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
import math

import numpy as np

from .encode import encode_one_mode
from .errors import DomainError, NumericalInconsistencyError
from .fock import ANALYTIC_POLICY, DensityMatrix, TruncationPolicy, coherent_amplitudes
from .measure import displaced_parity_dm

IMAG_TOL = 1e-6

__all__ = [
    "DensityMatrix",
    "LossParams",
    "damped_state",
    "damped_decision",
    "short_time_coherence",
    "exact_coherence",
    "phase_diffused_state",
    "phase_diffused_state_analytic",
    "decision_cross_section",
    "write_cross_section_csv",
]


@dataclass(frozen=True)
class LossParams:
    chi: float = 1.0
    gamma: float = 0.0
    t: float = math.pi / 4

    def __post_init__(self):
        if self.gamma < 0 or self.t < 0:
            raise DomainError("gamma and t must be non-negative")

    @classmethod
    def for_encoding(cls, x: float, gamma_over_chi: float = 0.0, chi: float = 1.0) -> "LossParams":
        """Parameters whose lossless limit is the encoding at ``x`` (chi t = pi x)."""
        return cls(chi=chi, gamma=gamma_over_chi * chi, t=math.pi * x / chi)


def _initial(alpha0: complex, policy: TruncationPolicy) -> np.ndarray:
    c = coherent_amplitudes(alpha0, policy).amps
    return np.outer(c, c.conj())


def damped_state(
    alpha0: complex, params: LossParams, policy: TruncationPolicy = ANALYTIC_POLICY
) -> DensityMatrix:
    rho0 = _initial(alpha0, policy)
    n = np.arange(policy.cutoff + 1, dtype=float)
    nn, mm = np.meshgrid(n, n, indexing="ij")
    diff = nn - mm
    chi_t = params.chi * params.t
    if params.gamma == 0:
        rho = rho0 * np.exp(-1j * chi_t * (nn**2 - mm**2))
    else:
        gamma_t = params.gamma * params.t
        log_f = -gamma_t - 2j * chi_t * diff
        one_minus_f = -np.expm1(log_f)
        # (1 - f) / (1 + 2i chi (n-m) / gamma), written without dividing by gamma
        denom = params.gamma + 2j * params.chi * diff
        off = diff != 0
        ratio = one_minus_f.copy()
        ratio[off] = params.gamma * one_minus_f[off] / denom[off]
        rho = rho0 * np.exp(0.5 * (nn + mm) * log_f) * np.exp(abs(alpha0) ** 2 * ratio)
    rho = rho / np.trace(rho).real
    return DensityMatrix(policy.cutoff, rho)


def damped_decision(
    alpha: complex,
    params: LossParams,
    alpha0: complex = 1.0,
    policy: TruncationPolicy = ANALYTIC_POLICY,
    rho: DensityMatrix | None = None,
) -> float:
    """d(alpha, t) = sum_k (-1)^k sum_{n,m} d_mk(alpha) d_kn(-alpha) rho_nm(t)."""
    if rho is None:
        rho = damped_state(alpha0, params, policy)
    val = displaced_parity_dm(rho, alpha)
    if abs(val.imag) > IMAG_TOL:
        raise NumericalInconsistencyError(f"decision value has imaginary part {val.imag:.3g}")
    return float(np.clip(val.real, -1.0, 1.0))


def short_time_coherence(alpha_i: complex, alpha_j: complex, gamma: float, t: float) -> float:
    """exp(-gamma t |alpha_i - alpha_j|^2), valid for gamma t << 1."""
    return math.exp(-gamma * t * abs(alpha_i - alpha_j) ** 2)


def exact_coherence(alpha_i: complex, alpha_j: complex, gamma: float, t: float) -> float:
    """|<alpha_i|alpha_j>|^{2(1 - exp(-gamma t))}."""
    return math.exp(-(1 - math.exp(-gamma * t)) * abs(alpha_i - alpha_j) ** 2)


def phase_diffused_state(
    alpha0: complex,
    Gamma: float,
    t: float,
    n_samples: int,
    seed: int,
    x: float = 0.0,
    policy: TruncationPolicy = ANALYTIC_POLICY,
) -> DensityMatrix:
    """Monte-Carlo mixture over fiducial phases theta ~ N(0, 2 Gamma t)."""
    if Gamma < 0:
        raise DomainError("Gamma must be non-negative")
    if Gamma == 0 or t == 0:
        return DensityMatrix.from_state(encode_one_mode(x, alpha0, policy))
    rng = np.random.default_rng(seed)
    thetas = rng.normal(0.0, math.sqrt(2 * Gamma * t), size=n_samples)
    base = encode_one_mode(x, alpha0, policy).amps
    n = np.arange(policy.cutoff + 1)
    # |alpha0 e^{i theta}> has amplitudes e^{i n theta} times those of |alpha0>
    states = base[None, :] * np.exp(1j * np.outer(thetas, n))
    rho = states.T @ states.conj() / n_samples
    return DensityMatrix(policy.cutoff, rho)


def phase_diffused_state_analytic(
    alpha0: complex, Gamma: float, t: float, x: float = 0.0, policy: TruncationPolicy = ANALYTIC_POLICY
) -> DensityMatrix:
    """Solution of d rho/dt = -Gamma [n, [n, rho]]: rho_nm scaled by exp(-Gamma t (n - m)^2)."""
    pure = encode_one_mode(x, alpha0, policy).projector()
    n = np.arange(policy.cutoff + 1)
    env = np.exp(-Gamma * t * np.subtract.outer(n, n) ** 2)
    return DensityMatrix(policy.cutoff, pure * env)


def decision_cross_section(
    alphas_real,
    gammas,
    x: float = 0.25,
    alpha0: complex = 1.0,
    chi: float = 1.0,
    policy: TruncationPolicy = ANALYTIC_POLICY,
) -> list[tuple[float, float, float]]:
    """Rows (alpha_real, d_value, gamma) along the real axis for each loss rate."""
    rows = []
    for gamma in gammas:
        params = LossParams(chi=chi, gamma=float(gamma), t=math.pi * x / chi)
        rho = damped_state(alpha0, params, policy)
        for a in alphas_real:
            rows.append((float(a), damped_decision(complex(a), params, alpha0, policy, rho=rho), float(gamma)))
    return rows


def write_cross_section_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha_real", "d_value", "gamma"])
        for a, d, g in rows:
            writer.writerow([repr(a), repr(d), repr(g)])
