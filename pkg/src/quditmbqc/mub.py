"""Mutually unbiased bases in prime dimension and the single-qudit gate compiler.

The ``d + 1`` bases are the eigenbases of ``Z, X, ZX, ZX^2, ..., ZX^(d-1)``.
For ``ZX^k`` the eigenvector with eigenvalue ``w^m`` is
``|psi^k_m> = X^-m |psi^k_0>``, and ``|psi^k_0> = sum_l w^(alpha_l) |l> / sqrt(d)``
with ``alpha`` solving ``alpha_(l+k) + l = alpha_l``. The diagonal gate
``Z(b_k)``, ``b_k = 2 pi alpha / d``, maps the Fourier basis onto this one:
``Z(b_k)|+_j> = w^(j(j+1)k/2) |psi^k_(jk)>``.

Every phase gate diagonal in one of these bases compiles to a short teleport
chain on a linear cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .cluster import ClusterGraph, StateVector
from .errors import DecompositionFailed, UnsupportedDimensionError
from .frame import mub_index_phase_vector
from .qudit_math import (
    as_phase_vector,
    check_dimension,
    fourier_gate,
    fourier_state,
    half,
    is_prime,
    is_unit,
    is_unitary,
    omega_power,
    phase_gate,
    unit_inverse,
    x_gate,
    z_gate,
)
from .teleport import MeasurementPattern, PatternResult, run_pattern


def _require_prime(d: int) -> int:
    d = check_dimension(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(f"MUB construction needs a prime dimension, got {d}")
    return d


def _require_unit_k(k: int, d: int) -> int:
    if not 1 <= k < d:
        raise UnsupportedDimensionError(f"basis index k must lie in [1, {d - 1}], got {k}")
    return int(k)


# --------------------------------------------------------------------------
# phase vectors b_k


def solve_alpha(d: int, k: int) -> tuple[int, ...]:
    """Exponents with ``alpha_0 = 0`` and ``alpha_(l+k) = alpha_l - l`` (mod d)."""
    d = _require_prime(d)
    if d == 2:
        raise UnsupportedDimensionError("the recurrence is inconsistent for d = 2")
    k = _require_unit_k(k, d)
    alpha = [0] * d
    l = 0
    for _ in range(d - 1):
        alpha[(l + k) % d] = (alpha[l] - l) % d
        l = (l + k) % d
    return tuple(alpha)


def b_vector(d: int, k: int) -> np.ndarray:
    """Phase vector with ``Z(b_k) F`` diagonalising ``ZX^k`` (``d = 2``: ``b = (0, pi/2)``)."""
    d = _require_prime(d)
    if d == 2:
        _require_unit_k(k, d)
        return np.array([0.0, np.pi / 2])
    return 2 * np.pi * np.array(solve_alpha(d, k)) / d


def zx_power(d: int, k: int) -> np.ndarray:
    """``Z X^k``."""
    return z_gate(d) @ x_gate(d, k)


# --------------------------------------------------------------------------
# the family


@dataclass(frozen=True, eq=False)
class MubFamily:
    d: int
    bases: tuple[np.ndarray, ...] = field(repr=False)
    labels: tuple[str, ...]

    def basis(self, label: str) -> np.ndarray:
        return self.bases[self.labels.index(label)]

    def max_overlap_error(self) -> float:
        """Largest deviation of ``|<u|v>|`` from ``1/sqrt(d)`` over all cross-basis pairs."""
        err = 0.0
        target = 1 / np.sqrt(self.d)
        for i, u in enumerate(self.bases):
            for v in self.bases[i + 1:]:
                err = max(err, float(np.max(np.abs(np.abs(u.conj().T @ v) - target))))
        return err

    def max_orthonormality_error(self) -> float:
        eye = np.eye(self.d)
        return max(float(np.max(np.abs(u.conj().T @ u - eye))) for u in self.bases)


def _label(k: int) -> str:
    return "ZX" if k == 1 else f"ZX^{k}"


def zx_eigenbasis(d: int, k: int) -> np.ndarray:
    """Columns ``m = 0..d-1`` are ``|psi^k_m>``, the ``w^m`` eigenvectors of ``ZX^k``."""
    d = _require_prime(d)
    if d == 2:
        psi0 = np.array([1, 1j]) / np.sqrt(2)
    else:
        psi0 = omega_power(np.array(solve_alpha(d, k)), d) / np.sqrt(d)
    return np.stack([x_gate(d, -m) @ psi0 for m in range(d)], axis=1)


def build_mub_family(d: int) -> MubFamily:
    d = _require_prime(d)
    bases = [np.eye(d, dtype=complex), fourier_gate(d)]
    labels = ["Z", "X"]
    for k in range(1, d):
        bases.append(zx_eigenbasis(d, k))
        labels.append(_label(k))
    return MubFamily(d, tuple(bases), tuple(labels))


def rephased_zx_eigenbasis(d: int, k: int) -> np.ndarray:
    """``|psi^k_m> -> w^(m(m k^-1 + 1)/2) |psi^k_m>``, after which
    ``Z(b_k)|+_j> = |psi^k_(jk)>`` with no phase."""
    d = _require_prime(d)
    basis = zx_eigenbasis(d, k)
    if d == 2:
        return basis
    h, kinv = half(d), unit_inverse(k, d)
    m = np.arange(d)
    return basis * omega_power(h * m * (m * kinv + 1), d)[None, :]


def eigenphase_relation_residual(d: int, k: int) -> float:
    """Max over ``j`` of ``|Z(b_k)|+_j> - w^(j(j+1)k/2)|psi^k_(jk)>|``."""
    d = _require_prime(d)
    if d == 2:
        raise UnsupportedDimensionError("the half-integer phase relation needs odd d")
    k = _require_unit_k(k, d)
    basis = zx_eigenbasis(d, k)
    zb = phase_gate(b_vector(d, k))
    h = half(d)
    worst = 0.0
    for j in range(d):
        lhs = zb @ fourier_state(j, d)
        rhs = omega_power(h * j * (j + 1) * k, d) * basis[:, (j * k) % d]
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def eigenphase_relation_check(d: int, k: int, tol: float = 1e-10) -> bool:
    return eigenphase_relation_residual(d, k) <= tol


def eigenbasis_residual(d: int, k: int) -> float:
    """Max over ``m`` of ``|ZX^k |psi^k_m> - lambda_m |psi^k_m>|`` with ``lambda_m = w^m``
    (``i w^m`` for the qubit, whose ``ZX`` has eigenvalues ``+-i``)."""
    basis = zx_eigenbasis(d, k)
    op = zx_power(d, k)
    scale = 1j if d == 2 else 1.0
    return max(float(np.linalg.norm(op @ basis[:, m] - scale * omega_power(m, d) * basis[:, m])) for m in range(d))


def spanning_rank(family: MubFamily, threshold: float = 1e-8) -> int:
    """Real rank of the ``d(d+1)`` basis projectors inside the Hermitian matrices."""
    rows = []
    for basis in family.bases:
        for v in basis.T:
            p = np.outer(v, v.conj()).ravel()
            rows.append(np.concatenate([p.real, p.imag]))
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(s > threshold))


# --------------------------------------------------------------------------
# gates diagonal in a MUB


def x_phase_gate(a) -> np.ndarray:
    """``X(a) = sum_k e^(i a_k) |+_k><+_k| = F Z(a) F^dagger``."""
    a = as_phase_vector(a)
    f = fourier_gate(a.shape[0])
    return f @ phase_gate(a) @ f.conj().T


def zx_phase_gate(a, k: int) -> np.ndarray:
    """``ZX^k(a) = sum_m e^(i a_m) |psi^k_m><psi^k_m|``."""
    a = as_phase_vector(a)
    basis = zx_eigenbasis(a.shape[0], k)
    return basis @ np.diag(np.exp(1j * a)) @ basis.conj().T


def zx_phase_gate_factored(a, k: int) -> np.ndarray:
    """``Z(b_k) X(a') Z(b_k)^dagger`` with ``a'_j = a_(jk)``; equals ``zx_phase_gate``."""
    a = as_phase_vector(a)
    d = a.shape[0]
    zb = phase_gate(b_vector(d, k))
    return zb @ x_phase_gate(fourier_index_angles(a, k)) @ zb.conj().T


def fourier_index_angles(a, k: int) -> np.ndarray:
    """``a'_j = a_(jk)``: relabels eigenvalue-indexed angles by Fourier index."""
    a = as_phase_vector(a)
    d = a.shape[0]
    if d == 2:
        return a.copy()
    return mub_index_phase_vector(a, unit_inverse(k, d))


@dataclass(eq=False)
class GatePattern:
    label: str
    pattern: MeasurementPattern
    expected: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.expected.shape[0]

    @property
    def graph(self) -> ClusterGraph:
        return ClusterGraph.linear(self.d, len(self.pattern) + 1)

    def run(self, psi, mode: str = "exhaustive", seed=None):
        state = psi if isinstance(psi, StateVector) else StateVector(psi, self.d, 1)
        return run_pattern(state, self.graph, self.pattern, mode=mode, seed=seed)

    def soundness(self, psi, tol: float = 1e-9) -> float:
        """Worst fidelity over all branches between corrected output and ``expected @ psi``."""
        state = psi if isinstance(psi, StateVector) else StateVector(psi, self.d, 1)
        results: list[PatternResult] = self.run(state)
        target = self.expected @ state.amplitudes
        worst = 1.0
        for r in results:
            worst = min(worst, float(abs(np.vdot(target, r.corrected_state()))))
        return worst


def _pattern(steps) -> MeasurementPattern:
    """Steps are given in operator order (leftmost gate first) as ``(a, fc)``."""
    return MeasurementPattern.chain([a for a, _ in reversed(steps)], [fc for _, fc in reversed(steps)])


def compile_gate(kind: str, a, k: int | None = None) -> GatePattern:
    """Compile ``Z(a)``, ``X(a)`` or ``ZX^k(a)`` (``kind`` in ``"Z"``, ``"X"``, ``"ZX"``).

    Every ``F^dagger`` is the adaptive-computation variant ``F_(-1)``:
    ``Z(a) = F^dagger . FZ(a)``, ``X(a) = FZ(a) . F^dagger`` and
    ``ZX^k(a) = F^dagger . FZ(b_k) . FZ(a') . F^dagger Z(-b_k)``.
    """
    a = as_phase_vector(a)
    d = _require_prime(a.shape[0])
    zero = np.zeros(d)
    minus = d - 1
    if kind == "Z":
        return GatePattern("Z(a)", _pattern([(zero, minus), (a, None)]), phase_gate(a))
    if kind == "X":
        return GatePattern("X(a)", _pattern([(a, None), (zero, minus)]), x_phase_gate(a))
    if kind == "ZX":
        if k is None or not is_unit(k, d) or k % d == 0:
            raise UnsupportedDimensionError(f"ZX^k needs a unit k, got {k}")
        k %= d
        b = b_vector(d, k)
        steps = [(zero, minus), (b, None), (fourier_index_angles(a, k), None), (np.mod(-b, 2 * np.pi), minus)]
        return GatePattern(f"{_label(k)}(a)", _pattern(steps), zx_phase_gate(a, k))
    raise ValueError(f"unknown gate class {kind!r}")


# --------------------------------------------------------------------------
# numeric decomposition into MUB phase gates


def _factor_classes(d: int) -> list[tuple[str, int | None]]:
    return [("Z", None), ("X", None)] + [("ZX", k) for k in range(1, d)]


def _factor_unitary(kind: str, k, a) -> np.ndarray:
    if kind == "Z":
        return phase_gate(a)
    if kind == "X":
        return x_phase_gate(a)
    return zx_phase_gate(a, k)


def _product(seq, params, d):
    u = np.eye(d, dtype=complex)
    for (kind, k), a in zip(seq, params.reshape(len(seq), d)):
        u = u @ _factor_unitary(kind, k, a)
    return u


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])


def euler_universality_demo(
    u: np.ndarray,
    d: int | None = None,
    max_factors: int = 12,
    restarts: int = 8,
    budget: int = 10_000,
    target_fidelity: float = 1 - 1e-6,
    seed: int = 0,
) -> list[GatePattern]:
    """Write ``u`` as a product of MUB phase gates and compile each factor.

    Factors cycle through ``Z, X, ZX, ZX^2, ...``; their number grows until
    a BFGS fit over all angles reaches ``target_fidelity``. The returned
    patterns are in operator order (the first acts last on the state).
    Raises ``DecompositionFailed`` when the budget runs out.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0] if d is None else d
    _require_prime(d)
    if u.shape != (d, d) or not is_unitary(u):
        raise ValueError("expected a d x d unitary")
    f = fourier_gate(d)
    diag = np.diag(u)
    if np.allclose(u, np.diag(diag), atol=1e-12):
        return [compile_gate("Z", np.angle(diag))]
    w = f.conj().T @ u
    if np.allclose(w, np.diag(np.diag(w)), atol=1e-12):
        # u = F Z(a): a single teleport step
        a = np.angle(np.diag(w))
        return [GatePattern("FZ(a)", MeasurementPattern.chain([a]), u)]

    rng = np.random.default_rng(seed)
    classes = _factor_classes(d)
    evaluations = 0
    best = 0.0
    for n_factors in range(2, max_factors + 1):
        seq = [classes[i % len(classes)] for i in range(n_factors)]

        def loss(x):
            return 1.0 - gate_fidelity(u, _product(seq, x, d)) ** 2

        for _ in range(restarts):
            x0 = rng.uniform(0, 2 * np.pi, n_factors * d)
            res = minimize(loss, x0, method="BFGS", options={"maxiter": 500, "gtol": 1e-12})
            evaluations += res.nfev
            fid = gate_fidelity(u, _product(seq, res.x, d))
            best = max(best, fid)
            if fid >= target_fidelity:
                params = res.x.reshape(n_factors, d)
                return [compile_gate(kind, a, k) for (kind, k), a in zip(seq, params)]
            if evaluations >= budget:
                raise DecompositionFailed(f"budget of {budget} evaluations exhausted, best fidelity {best:.3g}")
    raise DecompositionFailed(f"no decomposition with {max_factors} factors, best fidelity {best:.3g}")


def compiled_product(patterns: list[GatePattern]) -> np.ndarray:
    out = np.eye(patterns[0].d, dtype=complex)
    for p in patterns:
        out = out @ p.expected
    return out
