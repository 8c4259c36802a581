"""Sequential learning: tune the displacement mu by parity feedback.

Each epoch measures the displaced parity K times at the current mu, scores
the average error (1 - y d)/2 and moves mu down the error gradient. Writing
mu = u + i v, the error gradient is -y/2 grad d, so the step is

    (u, v) <- (u, v) + (eta y / 2) (d_u d, d_v d)

and to first order the error changes by -(eta/4) |grad d|^2.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
import math

import numpy as np

from ..encode import bias
from ..errors import DivergenceError, DomainError
from ..fock import ANALYTIC_POLICY, TruncationPolicy
from ..measure import decision_1mode, sample_parity_mean

FD_PROBE = 0.05
EXACT_PROBE = 1e-5
GRADIENT_MODES = ("empirical-fd", "analytic", "exact")


@dataclass(frozen=True)
class EpochRecord:
    epoch_index: int
    mu: complex
    empirical_d: float
    avg_error: float
    shots: int
    exact_d: float = float("nan")
    true_y: int = 1

    @property
    def exact_error(self) -> float:
        return error_of(self.exact_d, self.true_y)


def error_of(d: float, y: int) -> float:
    """Average error (1 - y d)/2, the epoch mean of (y - y_k)^2 / 4."""
    return 0.5 * (1.0 - y * d)


def exact_gradient(mu: complex, x: float, alpha0: complex = 1.0,
                   policy: TruncationPolicy = ANALYTIC_POLICY, h: float = EXACT_PROBE) -> tuple[float, float]:
    """(d_u d, d_v d) by central differences of the exact decision function."""
    f = lambda m: decision_1mode(m, x, alpha0, policy)  # noqa: E731
    du = (f(mu + h) - f(mu - h)) / (2 * h)
    dv = (f(mu + 1j * h) - f(mu - 1j * h)) / (2 * h)
    return du, dv


def analytic_gradient_conj(mu: complex, p: float, x: float, alpha0: complex = 1.0) -> complex:
    """The closed-form rule dp/dmu* = mu (1 - p) - b(x), with b the mean amplitude."""
    return mu * (1.0 - p) - bias(x, alpha0)


def step(mu: complex, grad: tuple[float, float], y: int, eta: float) -> complex:
    du, dv = grad
    return mu + 0.5 * eta * y * complex(du, dv)


def sequential_run(
    x: float,
    true_y: int,
    alpha0: complex = 1.0,
    mu0: complex = 0.0,
    epochs: int = 200,
    shots: int = 10_000,
    eta: float = 0.1,
    seed: int = 0,
    gradient_mode: str = "empirical-fd",
    probe: float = FD_PROBE,
    policy: TruncationPolicy = ANALYTIC_POLICY,
) -> list[EpochRecord]:
    """Run the feedback loop; one record per epoch, taken before that epoch's update.

    ``exact`` mode uses exact decision values and gradients (no sampling
    noise); the records still carry an empirical mean drawn with the seed.
    """
    if shots < 1:
        raise DomainError("shots must be >= 1")
    if not eta > 0:
        raise DomainError("eta must be positive")
    if true_y not in (-1, 1):
        raise DomainError("true_y must be +1 or -1")
    if gradient_mode not in GRADIENT_MODES:
        raise DomainError(f"gradient_mode must be one of {GRADIENT_MODES}")
    rng = np.random.default_rng(seed)
    limit = math.sqrt(policy.cutoff)
    d_at = lambda m: decision_1mode(m, x, alpha0, policy)  # noqa: E731
    sampled = lambda d: sample_parity_mean(d, shots, rng)  # noqa: E731

    mu = complex(mu0)
    records = []
    for k in range(epochs):
        if abs(mu) > limit:
            raise DivergenceError(
                f"|mu| = {abs(mu):.3f} exceeds sqrt(cutoff) = {limit:.3f} at epoch {k}; lower eta"
            )
        d = d_at(mu)
        d_emp = sampled(d)
        err = d if gradient_mode == "exact" else d_emp
        records.append(EpochRecord(k, mu, d_emp, error_of(err, true_y), shots, d, true_y))
        if gradient_mode == "exact":
            grad = exact_gradient(mu, x, alpha0, policy)
        elif gradient_mode == "empirical-fd":
            vals = [sampled(d_at(mu + s)) for s in (probe, -probe, 1j * probe, -1j * probe)]
            grad = ((vals[0] - vals[1]) / (2 * probe), (vals[2] - vals[3]) / (2 * probe))
        else:
            g = analytic_gradient_conj(mu, d_emp, x, alpha0)
            grad = (2 * g.real, 2 * g.imag)
        mu = step(mu, grad, true_y, eta)
    return records


def write_trace_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mu_re", "mu_im", "empirical_d", "avg_error"])
        for r in records:
            writer.writerow([r.epoch_index, repr(r.mu.real), repr(r.mu.imag), repr(r.empirical_d), repr(r.avg_error)])
