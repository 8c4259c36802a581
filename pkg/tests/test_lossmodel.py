import csv
import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from kerrkernel.encode import encode_one_mode
from kerrkernel.errors import DomainError, NumericalInconsistencyError
from kerrkernel.fock import DensityMatrix, TruncationPolicy, coherent_amplitudes
from kerrkernel.lossmodel import (
    LossParams,
    damped_decision,
    damped_state,
    decision_cross_section,
    exact_coherence,
    phase_diffused_state,
    phase_diffused_state_analytic,
    short_time_coherence,
    write_cross_section_csv,
)
from kerrkernel.measure import decision_1mode
from oracles import master_equation_rk

P20 = TruncationPolicy(20, 1e-8)


def test_params_validation():
    with pytest.raises(DomainError):
        LossParams(1.0, -0.1, 1.0)
    p = LossParams.for_encoding(0.25, 0.1)
    assert p.chi * p.t == pytest.approx(math.pi / 4)
    assert p.gamma == pytest.approx(0.1)


@pytest.mark.parametrize("x", [0.0, 0.25, 0.6])
def test_lossless_limit(x):
    rho = damped_state(1.0, LossParams.for_encoding(x))
    pure = encode_one_mode(x).projector()
    assert np.max(np.abs(rho.entries - pure)) < 1e-8


def test_tiny_gamma_matches_lossless():
    rho = damped_state(1.0, LossParams(1.0, 1e-9, math.pi / 4))
    assert np.max(np.abs(rho.entries - encode_one_mode(0.25).projector())) < 1e-8


def test_decay_to_vacuum():
    rho = damped_state(1.0, LossParams(1.0, 1.0, 60.0))
    assert rho.entries[0, 0].real == pytest.approx(1.0, abs=1e-12)
    off = rho.entries.copy()
    off[0, 0] = 0
    assert np.max(np.abs(off)) < 1e-12


@pytest.mark.parametrize("gamma_t", [0.1, 0.5, 1.0])
def test_against_master_equation(gamma_t):
    chi_t = math.pi / 4
    params = LossParams(chi=chi_t, gamma=gamma_t, t=1.0)
    rho = damped_state(1.0, params, P20)
    assert rho.trace() == pytest.approx(1.0, abs=1e-9)
    c = coherent_amplitudes(1.0, P20).amps
    ref = master_equation_rk(np.outer(c, c.conj()), chi_t, gamma_t, 1.0)
    assert np.max(np.abs(rho.entries - ref)) < 1e-5


@given(st.floats(0, 2), st.floats(0, 3), st.floats(0, 2), st.floats(0.1, 1.5))
def test_density_matrix_invariants(chi, gamma, t, alpha):
    rho = damped_state(alpha, LossParams(chi, gamma, t), P20)
    assert abs(rho.trace() - 1) < 1e-9
    assert np.max(np.abs(rho.entries - rho.entries.conj().T)) < 1e-10
    assert rho.eigenvalues().min() >= -1e-8


@given(st.complex_numbers(max_magnitude=2.0), st.floats(0, 1))
def test_damped_decision_lossless(mu, x):
    assert abs(damped_decision(mu, LossParams.for_encoding(x)) - decision_1mode(mu, x)) < 1e-8


def test_negativity_shrinks_with_gamma():
    alphas = np.linspace(-2.5, 2.5, 201)
    rows = decision_cross_section(alphas, [0.0, 0.05, 0.1, 0.2])
    minima = [min(d for _, d, g in rows if g == gam) for gam in (0.0, 0.05, 0.1, 0.2)]
    assert minima[0] < 0
    assert all(b >= a for a, b in zip(minima, minima[1:]))


def test_large_loss_vacuum_parity():
    assert damped_decision(0.0, LossParams(1.0, 1.0, 60.0)) == pytest.approx(1.0, abs=1e-10)


def test_imaginary_residue_guard():
    bad = np.zeros((31, 31), complex)
    bad[0, 1] = 0.5
    bad[0, 0] = 1.0
    with pytest.raises(NumericalInconsistencyError):
        damped_decision(0.3 + 0.2j, LossParams(), rho=DensityMatrix(30, bad))


def test_short_time_coherence():
    assert short_time_coherence(0.4 + 0.1j, 0.4 + 0.1j, 0.3, 2.0) == 1.0
    assert short_time_coherence(1.0, -1.0, 0.01, 1.0) == pytest.approx(math.exp(-0.04), abs=1e-12)
    assert short_time_coherence(1.0, -1.0, 0.01, 1.0) == pytest.approx(0.9608, abs=1e-4)
    st_, ex = short_time_coherence(1.0, -1.0, 0.01, 1.0), exact_coherence(1.0, -1.0, 0.01, 1.0)
    # compare decay exponents
    assert abs(math.log(st_) - math.log(ex)) / abs(math.log(ex)) < 0.05


def test_cat_coherence_decay_outpaces_amplitude_decay():
    gamma, t = 0.01, 0.1
    ratios = []
    for a0 in (0.5, 1.0, 2.0):
        coherence_rate = -math.log(short_time_coherence(a0, -a0, gamma, t)) / t
        amplitude_rate = gamma / 2
        ratios.append(coherence_rate / amplitude_rate)
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] / ratios[1] == pytest.approx(4.0, rel=1e-9)


def test_phase_diffusion_limits():
    pure = encode_one_mode(0.25).projector()
    assert np.allclose(phase_diffused_state(1.0, 0.0, 1.0, 10, seed=0, x=0.25).entries, pure)
    rho = phase_diffused_state_analytic(1.0, 50.0, 1.0, x=0.25)
    off = rho.entries - np.diag(np.diag(rho.entries))
    assert np.max(np.abs(off)) < 1e-12
    poisson = np.abs(coherent_amplitudes(1.0).amps) ** 2
    assert np.allclose(np.diag(rho.entries).real, poisson, atol=1e-12)


def test_phase_diffusion_monte_carlo_matches_envelope():
    n_samples = 10_000
    mc = phase_diffused_state(1.0, 0.05, 1.0, n_samples, seed=3, x=0.25).entries
    an = phase_diffused_state_analytic(1.0, 0.05, 1.0, x=0.25).entries
    pure = encode_one_mode(0.25).projector()
    n = np.arange(31)
    dn2 = np.subtract.outer(n, n) ** 2
    # E|X - EX|^2 for X = rho_nm e^{i (n-m) theta}
    var = 1 - np.exp(-2 * 0.05 * dn2)
    sigma = np.abs(pure) * np.sqrt(var / n_samples)
    assert np.all(np.abs(mc - an) <= 3 * sigma + 1e-12)
    assert abs(np.trace(mc).real - 1) < 1e-12


def test_phase_diffusion_seeded():
    a = phase_diffused_state(1.0, 0.1, 1.0, 200, seed=5).entries
    b = phase_diffused_state(1.0, 0.1, 1.0, 200, seed=5).entries
    assert np.array_equal(a, b)


def test_cross_section_csv(tmp_path):
    rows = decision_cross_section([-1.0, 0.0, 1.0], [0.0, 0.1])
    write_cross_section_csv(rows, tmp_path / "c.csv")
    with open(tmp_path / "c.csv") as fh:
        got = list(csv.reader(fh))
    assert got[0] == ["alpha_real", "d_value", "gamma"]
    assert len(got) == 7
    assert float(got[1][1]) == rows[0][1]


def test_subnormal_gamma_at_zero_time():
    rho = damped_state(1.0, LossParams(1.0, 5e-324, 0.0), P20)
    c = coherent_amplitudes(1.0, P20).amps
    assert np.all(np.isfinite(rho.entries))
    assert np.max(np.abs(rho.entries - np.outer(c, c.conj()))) < 1e-12
