"""Invariant suites: named numerical checks grouped by topic.

Each check yields a ``Check`` with a residual (distance from exact equality,
or ``1 - fidelity``) and a pass flag against the given tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .cluster import (
    random_graph,
    stabilizer_residuals,
    z_measure_removal_fidelity,
)
from .errors import UnsupportedDimensionError
from .frame import (
    ErrorFrame,
    FrameEntry,
    absorb_teleport,
    commute_frame_through_cz,
    realize_frame,
    scale_phase_vector,
    shift_phase_vector,
)
from .qudit_math import (
    DEFAULT_TOL,
    check_dimension,
    controlled_z,
    embed,
    equal_up_to_phase,
    fourier_c,
    fourier_gate,
    fourier_state,
    is_prime,
    omega_power,
    perm_gate_sc,
    phase_gate,
    swap_gate,
    unit_inverse,
    units,
    x_gate,
    z_gate,
)


@dataclass(frozen=True)
class Check:
    check: str
    dim: int
    residual: float
    passed: bool

    def as_dict(self) -> dict:
        return {"check": self.check, "dim": self.dim, "residual": self.residual, "pass": self.passed}


def _diff(u, v) -> float:
    return float(np.max(np.abs(np.asarray(u) - np.asarray(v))))


def _phase_diff(u, v) -> float:
    return equal_up_to_phase(u, v).value


def _random_phases(rng, d):
    return rng.uniform(0, 2 * np.pi, d)


def _random_state(rng, d, n=1):
    v = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return v / np.linalg.norm(v)


# --------------------------------------------------------------------------
# identities


def identity_residuals(d: int, rng: np.random.Generator, trials: int = 5) -> Iterator[tuple[str, float]]:
    """Matrix identities behind teleportation, frame tracking and adaptive computation."""
    X, Z, F = x_gate(d), z_gate(d), fourier_gate(d)
    Fd = F.conj().T
    eye = np.eye(d)
    cz = controlled_z(d)
    w = omega_power(1, d)

    yield "pauli.xz_commutation", _diff(X @ Z, w * Z @ X)
    yield "fourier.basis_states", max(
        _diff(F[:, j], omega_power(j * np.arange(d), d) / np.sqrt(d)) for j in range(d)
    )
    yield "fourier.z_shifts_plus", max(
        _diff(np.linalg.matrix_power(Z, j) @ fourier_state(k, d), fourier_state(j + k, d))
        for j in range(d) for k in range(d)
    )
    yield "fourier.x_phases_plus", max(
        _diff(np.linalg.matrix_power(X, j) @ fourier_state(k, d), omega_power(j * k, d) * fourier_state(k, d))
        for j in range(d) for k in range(d)
    )
    yield "fourier.conjugates_z", _diff(F @ Z, X @ F)
    yield "fourier.conjugates_x", _diff(F @ X, np.linalg.inv(Z) @ F)

    worst = {k: 0.0 for k in (
        "phase.commutes_with_x", "phase.commutes_with_z", "teleport.error_pull_through",
        "teleport.adapted_measurement", "frame.teleport_rule", "frame.cz_rule", "cz.pauli_pull_through",
        "sc.phase_reindex",
    )}
    for _ in range(trials):
        a = _random_phases(rng, d)
        worst["phase.commutes_with_x"] = max(worst["phase.commutes_with_x"],
                                             _diff(phase_gate(a) @ X, X @ phase_gate(shift_phase_vector(a, 1))))
        worst["phase.commutes_with_z"] = max(worst["phase.commutes_with_z"], _diff(phase_gate(a) @ Z, Z @ phase_gate(a)))
        m, x, z = (int(v) for v in rng.integers(0, d, 3))
        Xp = lambda p: x_gate(d, p)  # noqa: E731
        Zp = lambda p: z_gate(d, p)  # noqa: E731
        lhs = Xp(m) @ F @ phase_gate(a) @ Xp(x) @ Zp(z)
        rhs = Xp(m + z) @ Zp(-x) @ F @ phase_gate(shift_phase_vector(a, x))
        worst["teleport.error_pull_through"] = max(worst["teleport.error_pull_through"], _phase_diff(lhs, rhs))
        lhs = Xp(m) @ F @ phase_gate(shift_phase_vector(a, -x)) @ Xp(x) @ Zp(z)
        rhs = Xp(m + z) @ Zp(-x) @ F @ phase_gate(a)
        worst["teleport.adapted_measurement"] = max(worst["teleport.adapted_measurement"], _phase_diff(lhs, rhs))

        c = int(rng.choice(units(d)))
        frame = ErrorFrame(d, (FrameEntry(x, z, c),))
        adapted = frame.adaptation(0).apply(a)
        lhs = Xp(m) @ F @ phase_gate(adapted) @ realize_frame(frame)
        rhs = realize_frame(absorb_teleport(frame, 0, m)) @ F @ phase_gate(a)
        worst["frame.teleport_rule"] = max(worst["frame.teleport_rule"], _phase_diff(lhs, rhs))

        x1, z1, x2, z2 = (int(v) for v in rng.integers(0, d, 4))
        c1, c2 = (int(v) for v in rng.choice(units(d), 2))
        pair = ErrorFrame(d, (FrameEntry(x1, z1, c1), FrameEntry(x2, z2, c2)))
        moved, p = commute_frame_through_cz(pair, 0, 1)
        worst["frame.cz_rule"] = max(worst["frame.cz_rule"], _phase_diff(
            cz @ realize_frame(pair), realize_frame(moved) @ controlled_z(d, p)))
        lhs = cz @ np.kron(Xp(x1) @ Zp(z1), Xp(x2) @ Zp(z2))
        rhs = np.kron(Xp(x1) @ Zp(z1 - x2), Xp(x2) @ Zp(z2 - x1)) @ cz
        worst["cz.pauli_pull_through"] = max(worst["cz.pauli_pull_through"], _phase_diff(lhs, rhs))
        worst["sc.phase_reindex"] = max(worst["sc.phase_reindex"], _diff(
            phase_gate(a) @ perm_gate_sc(c, d), perm_gate_sc(c, d) @ phase_gate(scale_phase_vector(a, c))))
    yield from worst.items()

    Zi = np.linalg.inv(Z)
    yield "cz.commutes_with_z", max(_diff(cz @ np.kron(Z, eye), np.kron(Z, eye) @ cz),
                                    _diff(cz @ np.kron(eye, Z), np.kron(eye, Z) @ cz))
    yield "cz.conjugates_x", max(_diff(cz @ np.kron(X, eye), np.kron(X, Zi) @ cz),
                                 _diff(cz @ np.kron(eye, X), np.kron(Zi, X) @ cz))

    sc_fourier = sc_split = sc_def = sc_cz = sc_pauli = 0.0
    for c in units(d):
        S, Sinv = perm_gate_sc(c, d), perm_gate_sc(unit_inverse(c, d), d)
        fc = fourier_c(c, d)
        target = sum(np.outer(fourier_state(c * l, d), np.eye(d)[l]) for l in range(d))
        sc_def = max(sc_def, _diff(fc, target))
        sc_split = max(sc_split, _diff(F, S @ fc))
        sc_fourier = max(sc_fourier, _diff(F @ S, Sinv @ F))
        czc = controlled_z(d, c)
        sc_cz = max(sc_cz, _diff(cz @ np.kron(S, eye), np.kron(S, eye) @ czc),
                    _diff(cz @ np.kron(eye, S), np.kron(eye, S) @ czc))
        sc_pauli = max(sc_pauli, _diff(S @ X, x_gate(d, c) @ S),
                       _diff(S @ Z, z_gate(d, unit_inverse(c, d)) @ S))
    yield "sc.fourier_c_definition", sc_def
    yield "sc.fourier_split", sc_split
    yield "sc.fourier_conjugation", sc_fourier
    yield "sc.cz_power", sc_cz
    yield "sc.pauli_conjugation", sc_pauli
    yield "fourier.dagger_is_f_minus_one", _diff(fourier_c(d - 1, d), Fd)

    v = swap_gate(d)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    yield "swap.exchanges_factors", _diff(v @ np.kron(A, B), np.kron(B, A) @ v)
    yield "swap.involution", _diff(v @ v, np.eye(d * d))
    if d <= 5:
        cz12 = embed(cz, [0, 1], 3, d)
        cz13 = embed(cz, [0, 2], 3, d)
        v23 = embed(v, [1, 2], 3, d)
        yield "swap.moves_cz", _diff(cz12 @ v23, v23 @ cz13)


def teleport_residuals(d: int, rng: np.random.Generator, trials: int = 5) -> Iterator[tuple[str, float]]:
    from .teleport import one_dit_teleport_branches, teleport_target

    fid_err = prob_err = 0.0
    for _ in range(trials):
        psi = _random_state(rng, d)
        a = _random_phases(rng, d)
        branches = one_dit_teleport_branches(psi, a)
        if len(branches) != d:
            prob_err = 1.0
        for rec, post in branches:
            fid = equal_up_to_phase(post.amplitudes, teleport_target(psi, a, rec.outcome)).value
            fid_err = max(fid_err, 1 - fid)
            prob_err = max(prob_err, abs(rec.probability - 1 / d))
    yield "teleport.one_dit_fidelity", fid_err
    yield "teleport.one_dit_probability", prob_err


def suite_identities(d: int, tol: float, seed: int) -> list[Check]:
    d = check_dimension(d)
    rng = np.random.default_rng(seed)
    items = list(identity_residuals(d, rng)) + list(teleport_residuals(d, rng))
    return [Check(name, d, float(r), r <= tol) for name, r in items]


# --------------------------------------------------------------------------
# MUBs


def suite_mub(d: int, tol: float, seed: int) -> list[Check]:
    from . import mub

    d = check_dimension(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(f"the MUB suite needs a prime dimension, got {d}")
    rng = np.random.default_rng(seed)
    fam = mub.build_mub_family(d)
    out = [
        Check("mub.cross_overlaps", d, fam.max_overlap_error(), fam.max_overlap_error() <= tol),
        Check("mub.orthonormal", d, fam.max_orthonormality_error(), fam.max_orthonormality_error() <= tol),
    ]
    rank = mub.spanning_rank(fam)
    out.append(Check("mub.spanning_rank", d, float(abs(rank - d * d)), rank == d * d))
    for k in range(1, d):
        r = mub.eigenbasis_residual(d, k)
        out.append(Check(f"mub.eigenbasis[k={k}]", d, r, r <= tol))
        if d > 2:
            alpha = mub.solve_alpha(d, k)
            bad = sum((alpha[(l + k) % d] + l - alpha[l]) % d != 0 for l in range(d)) + (alpha[0] != 0)
            out.append(Check(f"mub.alpha_recurrence[k={k}]", d, float(bad), bad == 0))
            r = mub.eigenphase_relation_residual(d, k)
            out.append(Check(f"mub.eigenphase_relation[k={k}]", d, r, r <= tol))
        a = _random_phases(rng, d)
        r = _diff(mub.zx_phase_gate(a, k), mub.zx_phase_gate_factored(a, k))
        out.append(Check(f"mub.zx_gate_factorisation[k={k}]", d, r, r <= tol))
    if d == 3:
        r = d3_table_residual()
        out.append(Check("mub.d3_tables", d, r, r <= tol))
    worst = 0.0
    for kind, k in [("Z", None), ("X", None)] + [("ZX", k) for k in range(1, d)]:
        gp = mub.compile_gate(kind, _random_phases(rng, d), k)
        worst = max(worst, 1 - gp.soundness(_random_state(rng, d)))
    out.append(Check("mub.compiled_patterns_sound", d, worst, worst <= max(tol, 1e-9)))
    return out


def d3_table_residual() -> float:
    """Distance from the tabulated d = 3 eigenvectors and ``b_1, b_2``."""
    from . import mub

    w = omega_power(1, 3)
    s = 1 / np.sqrt(3)
    zx = np.array([[1, 1, w**2], [w**2, 1, 1], [1, w**2, 1]]).T * s
    zx2 = np.array([[1, w, 1], [1, 1, w], [w, 1, 1]]).T * s
    r = max(_diff(mub.zx_eigenbasis(3, 1), zx), _diff(mub.zx_eigenbasis(3, 2), zx2))
    r = max(r, _diff(mub.b_vector(3, 1), [0, 0, 4 * np.pi / 3]), _diff(mub.b_vector(3, 2), [0, 2 * np.pi / 3, 0]))
    return r


# --------------------------------------------------------------------------
# Clifford


def suite_clifford(d: int, tol: float, seed: int) -> list[Check]:
    from . import clifford as cl

    d = check_dimension(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(f"the Clifford suite needs a prime dimension, got {d}")
    gens = {"X": x_gate(d), "Z": z_gate(d), "F": fourier_gate(d), "P": cl.p_gate(d)}
    for c in units(d):
        gens[f"S_{c}"] = perm_gate_sc(c, d)
    labels = [cl.PauliLabel(d, b, c) for b, c in itertools.product(range(d), repeat=2)]
    out = []
    for name, u in sorted(gens.items()):
        failures = 0
        images = {}
        for p in labels:
            try:
                images[p] = cl.conjugate_pauli(u, p, projective=True)
            except Exception:
                failures += 1
        if not failures:
            failures = sum(
                cl.commutator_exponent(images[p], images[q]) != cl.commutator_exponent(p, q)
                for p in labels for q in labels
            )
        out.append(Check(f"clifford.generator[{name}]", d, float(failures), failures == 0))
    bad = 0
    for i in units(d):
        for m, n in itertools.product(range(d), repeat=2):
            if cl.action_of(cl.build_c_imn(i, m, n, d), d, projective=True) != cl.c_imn_action(i, m, n, d):
                bad += 1
    out.append(Check("clifford.c_imn_action", d, float(bad), bad == 0))
    report = cl.verify_generation(d)
    out.append(Check("clifford.generation_failures", d, float(len(report.failures)), report.passed))
    count_err = abs(len(report) - d * (d * d - 1))
    out.append(Check("clifford.action_count", d, float(count_err), count_err == 0))
    order_err = abs(cl.affine_group_order(d) - d * (d - 1))
    out.append(Check("clifford.affine_group_order", d, float(order_err), order_err == 0))
    return out


# --------------------------------------------------------------------------
# stabilisers


def suite_stabilizer(d: int, tol: float, seed: int, graphs: int = 10, max_n: int = 5) -> list[Check]:
    d = check_dimension(d)
    rng = np.random.default_rng(seed)
    stab = removal = 0.0
    for _ in range(graphs):
        n = int(rng.integers(1, max_n + 1))
        g = random_graph(d, n, rng)
        stab = max(stab, max(stabilizer_residuals(g)))
        for q in range(n):
            for j in range(d):
                removal = max(removal, 1 - z_measure_removal_fidelity(g, q, j))
    return [
        Check("stabilizer.fixed_by_all", d, stab, stab <= tol),
        Check("stabilizer.z_measurement_removal", d, removal, removal <= tol),
    ]


SUITES: dict[str, Callable[[int, float, int], list[Check]]] = {
    "identities": suite_identities,
    "mub": suite_mub,
    "clifford": suite_clifford,
    "stabilizer": suite_stabilizer,
}


def run_suite(name: str, d: int, tol: float = DEFAULT_TOL, seed: int = 0) -> list[Check]:
    if name == "all":
        checks = [c for s in SUITES.values() for c in s(d, tol, seed)]
    elif name in SUITES:
        checks = SUITES[name](d, tol, seed)
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return sorted(checks, key=lambda c: (c.check, c.dim))


__all__ = ["Check", "SUITES", "run_suite", "identity_residuals", "d3_table_residual"]

