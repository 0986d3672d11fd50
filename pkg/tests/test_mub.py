import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from quditmbqc.errors import DecompositionFailed, UnsupportedDimensionError
from quditmbqc.mub import (
    b_vector,
    build_mub_family,
    compile_gate,
    compiled_product,
    eigenbasis_residual,
    eigenphase_relation_check,
    eigenphase_relation_residual,
    euler_universality_demo,
    gate_fidelity,
    rephased_zx_eigenbasis,
    solve_alpha,
    spanning_rank,
    x_phase_gate,
    zx_eigenbasis,
    zx_phase_gate,
    zx_phase_gate_factored,
    zx_power,
)
from quditmbqc.qudit_math import fourier_gate, fourier_state, omega_power, phase_gate, z_gate

from conftest import random_phases, random_state

PRIMES = [2, 3, 5, 7, 11]


def eig_oracle(op, vec):
    """Eigenvalue of ``vec`` under ``op`` or None if it is not an eigenvector."""
    w = op @ vec
    lam = np.vdot(vec, w)
    return lam if np.allclose(w, lam * vec, atol=1e-10) else None


def test_alpha_small_examples():
    assert solve_alpha(3, 1) == (0, 0, 2)
    assert solve_alpha(3, 2) == (0, 1, 0)
    assert np.allclose(b_vector(3, 1), [0, 0, 4 * np.pi / 3])
    assert np.allclose(b_vector(3, 2), [0, 2 * np.pi / 3, 0])


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_alpha_satisfies_recurrence(d):
    for k in range(1, d):
        alpha = solve_alpha(d, k)
        assert alpha[0] == 0
        for l in range(d):
            assert (alpha[(l + k) % d] + l - alpha[l]) % d == 0


def test_alpha_rejects_bad_input():
    for d, k in [(2, 1), (9, 1), (4, 1), (5, 0), (5, 5)]:
        with pytest.raises(UnsupportedDimensionError):
            solve_alpha(d, k)


def test_b1_diagonalises_zx_for_d5():
    d = 5
    u = phase_gate(b_vector(d, 1)) @ fourier_gate(d)
    for j in range(d):
        lam = eig_oracle(zx_power(d, 1), u[:, j])
        assert lam is not None
        assert abs(lam - omega_power(j, d)) < 1e-10


def test_d3_tables():
    w = omega_power(1, 3)
    fam = build_mub_family(3)
    s3 = np.sqrt(3)
    assert np.allclose(fam.basis("ZX")[:, 0], np.array([1, 1, w**2]) / s3)
    assert np.allclose(fam.basis("ZX^2")[:, 1], np.array([1, 1, w]) / s3)


def test_qubit_family():
    fam = build_mub_family(2)
    assert fam.labels == ("Z", "X", "ZX")
    zx = fam.basis("ZX")
    plus = np.array([1, 1j]) / np.sqrt(2)
    minus = np.array([1, -1j]) / np.sqrt(2)
    cols = [zx[:, 0], zx[:, 1]]
    assert any(abs(abs(np.vdot(c, plus)) - 1) < 1e-12 for c in cols)
    assert any(abs(abs(np.vdot(c, minus)) - 1) < 1e-12 for c in cols)


@pytest.mark.parametrize("d", PRIMES)
def test_family_is_mutually_unbiased(d):
    fam = build_mub_family(d)
    assert len(fam.bases) == d + 1
    assert fam.max_orthonormality_error() < 1e-12
    assert fam.max_overlap_error() < 1e-10


@pytest.mark.parametrize("d,rank", [(2, 4), (3, 9), (5, 25), (7, 49)])
def test_spanning_rank(d, rank):
    assert spanning_rank(build_mub_family(d)) == rank


def test_spanning_rank_drops_without_a_basis():
    fam = build_mub_family(3)
    partial = type(fam)(3, fam.bases[:-1], fam.labels[:-1])
    assert spanning_rank(partial) == 7


@pytest.mark.parametrize("d", PRIMES)
def test_bases_are_eigenbases(d):
    for k in range(1, d):
        assert eigenbasis_residual(d, k) < 1e-10
        basis = zx_eigenbasis(d, k)
        for m in range(d):
            assert eig_oracle(zx_power(d, k), basis[:, m]) is not None


def test_eigenphase_examples_d3():
    w = omega_power(1, 3)
    zx1 = zx_eigenbasis(3, 1)
    zx2 = zx_eigenbasis(3, 2)
    assert np.allclose(phase_gate(b_vector(3, 1)) @ fourier_state(1, 3), w * zx1[:, 1])
    assert np.allclose(phase_gate(b_vector(3, 2)) @ fourier_state(1, 3), w**2 * zx2[:, 2])


@pytest.mark.parametrize("d", [3, 5, 7, 11])
def test_eigenphase_relation_all_k(d):
    for k in range(1, d):
        assert eigenphase_relation_check(d, k)
        assert eigenphase_relation_residual(d, k) < 1e-10


def test_eigenphase_relation_needs_odd_dimension():
    with pytest.raises(UnsupportedDimensionError):
        eigenphase_relation_residual(2, 1)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_rephased_basis_removes_phase(d):
    for k in range(1, d):
        basis = rephased_zx_eigenbasis(d, k)
        zb = phase_gate(b_vector(d, k))
        for j in range(d):
            assert np.allclose(zb @ fourier_state(j, d), basis[:, (j * k) % d])


@pytest.mark.parametrize("d", [4, 6, 9, 1])
def test_non_prime_dimensions_rejected(d):
    with pytest.raises((UnsupportedDimensionError, ValueError)):
        build_mub_family(d)


def test_x_phase_gate_definition(rng):
    a = random_phases(rng, 3)
    expected = sum(np.exp(1j * a[k]) * np.outer(fourier_state(k, 3), fourier_state(k, 3).conj()) for k in range(3))
    assert np.allclose(x_phase_gate(a), expected)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_zx_phase_gate_factorisation(d, rng):
    for k in range(1, d):
        a = random_phases(rng, d)
        assert np.allclose(zx_phase_gate(a, k), zx_phase_gate_factored(a, k))


def test_zx_factorisation_d3_uses_plain_angles(rng):
    a = random_phases(rng, 3)
    zb = phase_gate(b_vector(3, 1))
    assert np.allclose(zx_phase_gate(a, 1), zb @ x_phase_gate(a) @ zb.conj().T)


def test_compile_zero_phase_is_identity(rng):
    gp = compile_gate("Z", np.zeros(3))
    assert len(gp.pattern) == 2
    assert np.allclose(gp.expected, np.eye(3))
    assert gp.soundness(random_state(rng, 3)) >= 1 - 1e-9


def test_compile_x_on_three_qudit_cluster(rng):
    a = random_phases(rng, 3)
    gp = compile_gate("X", a)
    assert gp.graph.n == 3
    assert np.allclose(gp.expected, x_phase_gate(a))
    assert gp.soundness(random_state(rng, 3)) >= 1 - 1e-9


@pytest.mark.parametrize("d", [2, 3, 5])
def test_compiled_patterns_are_sound(d, rng):
    for _ in range(5):
        psi = random_state(rng, d)
        a = random_phases(rng, d)
        assert compile_gate("Z", a).soundness(psi) >= 1 - 1e-9
        assert compile_gate("X", a).soundness(psi) >= 1 - 1e-9
        for k in range(1, d):
            gp = compile_gate("ZX", a, k)
            assert len(gp.pattern) == 4
            assert gp.soundness(psi) >= 1 - 1e-9


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 2**32 - 1))
def test_compiled_zx_sound_property(d, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, d))
    gp = compile_gate("ZX", random_phases(rng, d), k)
    assert gp.soundness(random_state(rng, d)) >= 1 - 1e-9


def test_compile_gate_errors():
    with pytest.raises(UnsupportedDimensionError):
        compile_gate("ZX", np.zeros(3), 0)
    with pytest.raises(UnsupportedDimensionError):
        compile_gate("ZX", np.zeros(3))
    with pytest.raises(UnsupportedDimensionError):
        compile_gate("Z", np.zeros(4))
    with pytest.raises(ValueError):
        compile_gate("Y", np.zeros(3))


def test_euler_fourier_qubit_is_single_step():
    patterns = euler_universality_demo(fourier_gate(2))
    assert len(patterns) == 1 and len(patterns[0].pattern) == 1
    assert gate_fidelity(compiled_product(patterns), fourier_gate(2)) >= 1 - 1e-12


def test_euler_diagonal_is_single_factor():
    patterns = euler_universality_demo(z_gate(3))
    assert [p.label for p in patterns] == ["Z(a)"]
    assert np.allclose(patterns[0].expected, z_gate(3))


@pytest.mark.parametrize("d", [2, 3])
def test_euler_random_unitary(d):
    u = unitary_group.rvs(d, random_state=7)
    patterns = euler_universality_demo(u, seed=1)
    assert len(patterns) <= 12
    assert gate_fidelity(compiled_product(patterns), u) >= 1 - 1e-6
    psi = random_state(np.random.default_rng(3), d)
    for p in patterns:
        assert p.soundness(psi) >= 1 - 1e-9


def test_euler_reports_exhausted_budget():
    u = unitary_group.rvs(3, random_state=11)
    with pytest.raises(DecompositionFailed):
        euler_universality_demo(u, max_factors=2, restarts=1)


def test_euler_rejects_non_unitary():
    with pytest.raises(ValueError):
        euler_universality_demo(np.ones((3, 3)))
