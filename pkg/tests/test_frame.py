import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditmbqc.errors import NotAUnitError, ShapeMismatchError
from quditmbqc.frame import (
    AdaptationRule,
    ErrorFrame,
    FrameEntry,
    absorb_adaptive_fc,
    absorb_swap,
    absorb_teleport,
    classical_readout_correct,
    commute_frame_through_cz,
    mub_index_phase_vector,
    permutation_operator,
    realize_frame,
    scale_phase_vector,
    shift_phase_vector,
    verify_swap_identities,
)
from quditmbqc.qudit_math import (
    basis_state,
    controlled_z,
    equal_up_to_phase,
    fourier_c,
    fourier_gate,
    kron_all,
    perm_gate_sc,
    phase_gate,
    swap_gate,
    units,
    x_gate,
    z_gate,
)

from conftest import random_phases, random_state


def test_shift_phase_vector_definition():
    a = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    assert np.allclose(shift_phase_vector(a, 2), [a[(k - 2) % 5] for k in range(5)])
    assert np.allclose(shift_phase_vector(a, -1), [1, 2, 3, 4, 0])


def test_scale_phase_vector_definition():
    a = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    assert np.allclose(scale_phase_vector(a, 2), [a[(2 * k) % 5] for k in range(5)])
    with pytest.raises(NotAUnitError):
        scale_phase_vector(np.zeros(4), 2)


def test_mub_index_phase_vector_definition():
    a = np.arange(7.0)
    # a^(x,k)_l = a_(k^-1 l) with 3^-1 = 5 mod 7
    assert np.allclose(mub_index_phase_vector(a, 3), [a[(5 * l) % 7] for l in range(7)])


@pytest.mark.parametrize("d", [2, 3, 5])
def test_index_maps_realise_commutation(d, rng):
    a = random_phases(rng, d)
    for l in range(d):
        assert np.allclose(phase_gate(a) @ x_gate(d, l), x_gate(d, l) @ phase_gate(shift_phase_vector(a, l)))
    for c in units(d):
        s = perm_gate_sc(c, d)
        assert np.allclose(phase_gate(a) @ s, s @ phase_gate(scale_phase_vector(a, c)))


def test_adaptation_rule_round_trip(rng):
    a = random_phases(rng, 5)
    rule = AdaptationRule.from_entry(FrameEntry(2, 1, 3), 5)
    assert np.allclose(rule.invert(rule.apply(a)), a)
    assert rule.shift == 3 and rule.scale == 2


def test_zero_frame_adaptation_is_identity(rng):
    a = random_phases(rng, 3)
    assert np.allclose(ErrorFrame.zero(3, 2).adaptation(1).apply(a), a)


def test_frame_normalises_and_validates():
    f = ErrorFrame(3, (FrameEntry(4, -1, 5),))
    assert f.entries[0] == FrameEntry(1, 2, 2)
    with pytest.raises(NotAUnitError):
        ErrorFrame(4, (FrameEntry(0, 0, 2),))
    with pytest.raises(ShapeMismatchError):
        ErrorFrame(3, (FrameEntry(), FrameEntry()), perm=(0, 0))


def test_absorb_teleport_update():
    f = ErrorFrame(5, (FrameEntry(2, 3, 2),))
    g = absorb_teleport(f, 0, 4)
    # x' = m + z, z' = -x, c' = c^-1
    assert g.entries[0] == FrameEntry((4 + 3) % 5, (-2) % 5, 3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 2**32 - 1))
def test_absorb_teleport_is_sound(d, seed):
    rng = np.random.default_rng(seed)
    x, z, m = (int(v) for v in rng.integers(0, d, 3))
    c = int(rng.choice(units(d)))
    a = random_phases(rng, d)
    f = ErrorFrame(d, (FrameEntry(x, z, c),))
    adapted = f.adaptation(0).apply(a)
    lhs = x_gate(d, m) @ fourier_gate(d) @ phase_gate(adapted) @ realize_frame(f)
    rhs = realize_frame(absorb_teleport(f, 0, m)) @ fourier_gate(d) @ phase_gate(a)
    assert equal_up_to_phase(lhs, rhs, 1e-10)


@pytest.mark.parametrize("d", [3, 5])
def test_absorb_adaptive_fc(d):
    f = ErrorFrame(d, (FrameEntry(1, 2, 2),))
    g = absorb_adaptive_fc(f, 0, d - 1)
    assert g.entries[0] == FrameEntry(1, 2, (2 * (d - 1)) % d)
    # S_c F_c = F so the physical operator is unchanged
    for c in units(d):
        assert np.allclose(perm_gate_sc(c, d) @ fourier_c(c, d), fourier_gate(d))
    with pytest.raises(NotAUnitError):
        absorb_adaptive_fc(ErrorFrame.zero(4, 1), 0, 2)


def test_commute_zero_frame():
    f = ErrorFrame.zero(3, 2)
    g, p = commute_frame_through_cz(f, 0, 1)
    assert g == f and p == 1


def test_commute_pauli_example():
    f = ErrorFrame(3, (FrameEntry(1, 0), FrameEntry(2, 0)))
    g, p = commute_frame_through_cz(f, 0, 1)
    assert (g.entries[0].z, g.entries[1].z) == (1, 2)
    assert (g.entries[0].x, g.entries[1].x) == (1, 2)
    assert p == 1


def test_commute_sc_changes_interaction_power():
    d = 3
    f = ErrorFrame(d, (FrameEntry(), FrameEntry(0, 0, 2)))
    g, p = commute_frame_through_cz(f, 0, 1)
    assert p == 2
    lhs = controlled_z(d) @ np.kron(np.eye(d), perm_gate_sc(2, d))
    rhs = np.kron(np.eye(d), perm_gate_sc(2, d)) @ controlled_z(d, 2)
    assert np.allclose(lhs, rhs)
    assert np.allclose(controlled_z(d) @ realize_frame(f), realize_frame(g) @ controlled_z(d, p))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32 - 1))
def test_commute_through_cz_is_sound(d, seed):
    rng = np.random.default_rng(seed)
    entries = tuple(FrameEntry(int(rng.integers(d)), int(rng.integers(d)), int(rng.choice(units(d)))) for _ in range(2))
    f = ErrorFrame(d, entries)
    g, p = commute_frame_through_cz(f, 0, 1)
    assert equal_up_to_phase(controlled_z(d) @ realize_frame(f), realize_frame(g) @ controlled_z(d, p), 1e-10)


def test_commute_same_wire_rejected():
    with pytest.raises(ShapeMismatchError):
        commute_frame_through_cz(ErrorFrame.zero(3, 2), 1, 1)


def test_realize_frame_examples():
    assert np.allclose(realize_frame(ErrorFrame.zero(3, 2)), np.eye(9))
    assert np.allclose(realize_frame(ErrorFrame(3, (FrameEntry(1, 1, 1),))), x_gate(3) @ z_gate(3))
    f = ErrorFrame(5, (FrameEntry(2, 1, 3), FrameEntry(0, 4, 1)))
    expected = np.kron(x_gate(5, 2) @ z_gate(5, 1) @ perm_gate_sc(3, 5), z_gate(5, 4))
    assert np.allclose(realize_frame(f), expected)


def test_permutation_operator_moves_wires(rng):
    d = 2
    states = [random_state(rng, d) for _ in range(3)]
    perm = (2, 0, 1)
    out = permutation_operator(perm, d) @ kron_all(states)
    # logical wire w ends on register position perm[w]
    placed = [None] * 3
    for w, p in enumerate(perm):
        placed[p] = states[w]
    assert np.allclose(out, kron_all(placed))


def test_absorb_swap_matches_swap_gate(rng):
    d = 3
    f = absorb_swap(ErrorFrame.zero(d, 2), 0, 1)
    assert f.perm == (1, 0)
    assert np.allclose(realize_frame(f), swap_gate(d))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_classical_readout_correct(d, rng):
    for _ in range(10):
        x, z = (int(v) for v in rng.integers(0, d, 2))
        c = int(rng.choice(units(d)))
        j = int(rng.integers(d))
        f = ErrorFrame(d, (FrameEntry(x, z, c),))
        physical = realize_frame(f) @ basis_state(j, d)
        k = int(np.argmax(np.abs(physical)))
        assert classical_readout_correct(f, [k]) == [j]


def test_classical_readout_follows_permutation():
    d = 3
    f = ErrorFrame(d, (FrameEntry(1, 0, 1), FrameEntry(0, 0, 2)), perm=(1, 0))
    logical = [2, 1]
    physical = realize_frame(f) @ np.kron(basis_state(2, d), basis_state(1, d))
    k = np.unravel_index(int(np.argmax(np.abs(physical))), (d, d))
    assert classical_readout_correct(f, list(k)) == logical


def test_classical_readout_length_check():
    with pytest.raises(ShapeMismatchError):
        classical_readout_correct(ErrorFrame.zero(3, 2), [0])


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_swap_identities(d):
    assert verify_swap_identities(d)
