import math

from hypothesis import given, strategies as st
import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import i0

from kerrkernel.encode import encode_one_mode, encode_two_mode
from kerrkernel.errors import DomainError, ShapeMismatchError
from kerrkernel.fock import EXPERIMENT_POLICY, TruncationPolicy, coherent_amplitudes
from kerrkernel.kernels import (
    GramMatrix,
    KernelSpec,
    fidelity_kernel,
    gram_cross,
    gram_exact,
    gram_sampled,
    kernel_1mode,
    kernel_2mode_coherent,
    kernel_2mode_squeezed,
    kernel_normalization_check,
    rbf_kernel,
    resolve_gamma_scale,
)
from oracles import coherent, kerr_two_mode, ladder, overlap_kernel

P20 = TruncationPolicy(20, 1e-8)
unit = st.floats(0, 1)
points = st.tuples(unit, unit)


def test_one_mode_special_values():
    assert kernel_1mode(0.3, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert abs(kernel_1mode(1.0, 0.0) - math.exp(-4)) < 1e-9
    assert abs(kernel_1mode(0.1, 2.1) - 1.0) < 1e-12


@given(unit, unit, st.floats(-3, 3))
def test_one_mode_stationary(x, y, s):
    assert abs(kernel_1mode(x, y) - kernel_1mode(x + s, y + s)) < 1e-12


@given(unit, unit)
def test_one_mode_matches_states(x, y):
    ref = overlap_kernel(encode_one_mode(x).amps, encode_one_mode(y).amps)
    assert abs(kernel_1mode(x, y) - ref) < 1e-12


def test_one_mode_broadcasts():
    vals = kernel_1mode(np.array([0.0, 0.5, 1.0]), 0.0)
    assert vals.shape == (3,)
    assert vals[0] == pytest.approx(1.0)


def _coherent_oracle(x, y, cutoff):
    f = coherent(1.0, cutoff)
    f = f / np.linalg.norm(f)
    return overlap_kernel(kerr_two_mode(x, f), kerr_two_mode(y, f))


def test_two_mode_coherent_basic():
    x, y = (0.2, 0.9), (0.6, 0.1)
    assert kernel_2mode_coherent(x, x) == pytest.approx(1.0, abs=1e-14)
    assert abs(kernel_2mode_coherent(x, y) - kernel_2mode_coherent(y, x)) < 1e-12
    assert abs(kernel_2mode_coherent(x, y, 1.0, P20) - _coherent_oracle(x, y, 20)) < 1e-8


def test_two_mode_coherent_hundred_pairs():
    rng = np.random.default_rng(4)
    for _ in range(100):
        x, y = rng.random(2), rng.random(2)
        assert abs(kernel_2mode_coherent(x, y) - _coherent_oracle(x, y, 10)) < 1e-7


def _squeezed_oracle_state(alpha, r, cutoff):
    big = 70
    a = ladder(big)
    ad = a.conj().T
    psi = (expm(alpha * ad - np.conj(alpha) * a) @ expm(r * (a @ a - ad @ ad) / 2))[:, 0]
    f = psi[: cutoff + 1]
    return f / np.linalg.norm(f)


def test_two_mode_squeezed():
    x, y = (0.3, 0.8), (0.55, 0.2)
    assert kernel_2mode_squeezed(x, x, 1.0, 0.3, P20) == pytest.approx(1.0, abs=1e-13)
    assert abs(kernel_2mode_squeezed(x, y, 1.0, 0.0) - kernel_2mode_coherent(x, y)) < 1e-9
    f = _squeezed_oracle_state(1.0, 0.3, 20)
    rng = np.random.default_rng(8)
    for _ in range(20):
        x, y = rng.random(2), rng.random(2)
        ref = overlap_kernel(kerr_two_mode(x, f), kerr_two_mode(y, f))
        assert abs(kernel_2mode_squeezed(x, y, 1.0, 0.3, P20) - ref) < 1e-8


def test_fidelity_kernel():
    a = encode_one_mode(0.3)
    assert fidelity_kernel(a, a) == pytest.approx(1.0)
    vac = coherent_amplitudes(0.0, TruncationPolicy(30, 1e-8))
    assert fidelity_kernel(vac, coherent_amplitudes(1.0)) == pytest.approx(math.exp(-1), abs=1e-12)
    # derived from the number-basis cats: P_even^2 + P_odd^2
    val = fidelity_kernel(encode_one_mode(0.25), encode_one_mode(0.75))
    assert val == pytest.approx((1 + math.exp(-4)) / 2, abs=1e-8)
    with pytest.raises(ShapeMismatchError):
        fidelity_kernel(a, encode_two_mode((0.1, 0.2)))


def test_gram_single_and_duplicates():
    g = gram_exact([(0.4, 0.4)], KernelSpec())
    assert np.array_equal(g.entries, [[1.0]])
    pts = np.array([[0.1, 0.2], [0.5, 0.9], [0.1, 0.2]])
    g = gram_exact(pts, KernelSpec())
    assert np.allclose(g.entries[0], g.entries[2])
    assert np.linalg.matrix_rank(g.entries, tol=1e-10) < 3


def test_gram_fifty_points_psd():
    pts = np.random.default_rng(0).random((50, 2))
    g = gram_exact(pts, KernelSpec())
    assert g.is_symmetric()
    assert np.all(np.diag(g.entries) == 1.0)
    assert g.entries.min() >= 0 and g.entries.max() <= 1 + 1e-12
    assert g.min_eigenvalue() >= -1e-8


def test_gram_generic_matches_closed_form():
    pts = np.random.default_rng(2).random((15, 2))
    closed = gram_exact(pts, KernelSpec()).entries
    generic = gram_exact(pts, KernelSpec("fidelity-generic")).entries
    assert np.max(np.abs(closed - generic)) < 1e-12


def test_gram_cross_shape_and_values():
    a = np.random.default_rng(3).random((4, 2))
    b = np.random.default_rng(5).random((6, 2))
    g = gram_cross(a, b, KernelSpec())
    assert g.shape == (4, 6)
    assert g.entries[1, 2] == pytest.approx(kernel_2mode_coherent(a[1], b[2]), abs=1e-13)


def test_gram_one_mode_and_rbf_kinds():
    pts = np.array([[0.1], [0.6], [0.95]])
    g = gram_exact(pts, KernelSpec("kerr-coherent-1mode", policy=TruncationPolicy(30, 1e-8)))
    assert g.entries[0, 1] == pytest.approx(kernel_1mode(0.1, 0.6), abs=1e-12)
    p2 = np.random.default_rng(1).random((5, 2))
    spec = KernelSpec("rbf", gamma_rbf=2.0)
    assert gram_exact(p2, spec).entries[0, 3] == pytest.approx(rbf_kernel(p2[0], p2[3], 2.0))


def test_sampled_gram_properties():
    pts = np.random.default_rng(6).random((6, 2))
    g1 = gram_sampled(pts, KernelSpec(), 1, seed=3)
    assert set(np.unique(g1.entries)) <= {0.0, 1.0}
    a = gram_sampled(pts, KernelSpec(), 500, seed=9).entries
    b = gram_sampled(pts, KernelSpec(), 500, seed=9).entries
    assert np.array_equal(a, b)
    assert np.array_equal(a, a.T)


def test_sampled_entry_large_m():
    pts = [(0.0, 0.0), (1.0, 0.0)]
    exact = gram_exact(pts, KernelSpec()).entries[0, 1]
    assert exact == pytest.approx(math.exp(-4), abs=1e-7)
    est = gram_sampled(pts, KernelSpec(), 10**6, seed=1).entries[0, 1]
    assert abs(est - exact) < 5e-4


def test_normalization_check_derived_value():
    # period average keeps sum_n P(n)^2 = e^{-2|a|^2} I0(2|a|^2)
    ref = math.exp(-2) * i0(2.0)
    assert kernel_normalization_check(0.0, 1.0) == pytest.approx(ref, abs=1e-6)
    assert kernel_normalization_check(0.37, 1.0) == pytest.approx(ref, abs=1e-6)
    assert kernel_normalization_check(0.0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_rbf():
    assert rbf_kernel((0.2, 0.3), (0.2, 0.3), 4.0) == 1.0
    assert rbf_kernel((0.0, 0.0), (1.0, 0.0), 1.0) == pytest.approx(math.exp(-1))
    with pytest.raises(DomainError):
        rbf_kernel((0, 0), (1, 1), 0.0)


def test_gamma_scale():
    pts = np.random.default_rng(0).random((100_000, 2))
    assert resolve_gamma_scale(pts) == pytest.approx(1 / (2 * pts.var(axis=0).mean()))
    assert 1 / (2 * 0.289**2) == pytest.approx(5.99, abs=0.01)
    assert resolve_gamma_scale(pts) == pytest.approx(6.0, abs=0.05)
    with pytest.raises(DomainError):
        resolve_gamma_scale(np.ones((5, 2)))


def test_kernel_spec_validation():
    with pytest.raises(DomainError):
        KernelSpec("poly")
    with pytest.raises(DomainError):
        KernelSpec("rbf", gamma_rbf=-1.0)
    assert KernelSpec().policy == EXPERIMENT_POLICY


def test_gram_csv_roundtrip(tmp_path):
    g = gram_exact(np.random.default_rng(7).random((5, 2)), KernelSpec())
    g.to_csv(tmp_path / "g.csv")
    back = GramMatrix.from_csv(tmp_path / "g.csv")
    assert np.array_equal(back.entries, g.entries)


@given(points, points)
def test_kernel_bounds(x, y):
    for v in (kernel_2mode_coherent(x, y), kernel_1mode(x[0], y[0])):
        assert -1e-15 <= v <= 1 + 1e-12
