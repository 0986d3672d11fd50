"""Linear algebra core: qudit gates, tensor helpers and arithmetic over Z_d.

Conventions used throughout the package:

* ``X|k> = |k-1 mod d>`` and ``Z|k> = w^k |k>`` with ``w = exp(2 pi i / d)``,
  so that ``XZ = w ZX``.
* ``|+_j> = F|j>`` is normalised.
* Qudit 0 is the leftmost tensor factor; ``|k_0 ... k_{n-1}>`` has flat index
  ``sum_i k_i d^(n-1-i)`` (C order).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidDimensionError, NotAUnitError, ShapeMismatchError

DEFAULT_TOL = 1e-10


def check_dimension(d: int) -> int:
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def omega_power(m, d: int):
    """``w^m`` with the exponent reduced mod d before the trig call."""
    return np.exp(2j * np.pi * (np.mod(m, d) / d))


# --------------------------------------------------------------------------
# modular arithmetic


def is_unit(c: int, d: int) -> bool:
    return gcd(int(c) % d, d) == 1


def units(d: int) -> list[int]:
    return [c for c in range(1, d) if is_unit(c, d)] if d > 2 else [1]


def unit_inverse(c: int, d: int) -> int:
    """Multiplicative inverse of ``c`` modulo ``d``."""
    if not is_unit(c, d):
        raise NotAUnitError(f"{c} is not a unit in Z_{d}")
    return pow(int(c) % d, -1, d)


def half(d: int) -> int:
    """The inverse of 2 in Z_d, for odd d."""
    return unit_inverse(2, d)


@dataclass(frozen=True)
class ModUnit:
    value: int
    modulus: int

    def __post_init__(self):
        check_dimension(self.modulus)
        if not is_unit(self.value, self.modulus):
            raise NotAUnitError(f"{self.value} is not a unit in Z_{self.modulus}")
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def inverse(self) -> "ModUnit":
        return ModUnit(unit_inverse(self.value, self.modulus), self.modulus)

    def __mul__(self, other: "ModUnit") -> "ModUnit":
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")
        return ModUnit(self.value * other.value, self.modulus)

    def __int__(self):
        return self.value


def _unit_value(c, d: int) -> int:
    if isinstance(c, ModUnit):
        if c.modulus != d:
            raise ValueError(f"unit is modulo {c.modulus}, expected {d}")
        return c.value
    if not is_unit(c, d):
        raise NotAUnitError(f"{c} is not a unit in Z_{d}")
    return int(c) % d


# --------------------------------------------------------------------------
# gates


def fourier_gate(d: int) -> np.ndarray:
    """The d-dimensional Fourier gate ``F = d^-1/2 sum_jk w^(jk) |j><k|``."""
    d = check_dimension(d)
    j = np.arange(d)
    return omega_power(np.outer(j, j), d) / np.sqrt(d)


def x_gate(d: int, power: int = 1) -> np.ndarray:
    d = check_dimension(d)
    k = np.arange(d)
    x = np.zeros((d, d), dtype=complex)
    x[(k - power) % d, k] = 1.0
    return x


def z_gate(d: int, power: int = 1) -> np.ndarray:
    d = check_dimension(d)
    return np.diag(omega_power(power * np.arange(d), d))


def pauli_gates(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the generalised Pauli pair ``(X, Z)``."""
    return x_gate(d), z_gate(d)


def pauli_matrix(d: int, x: int, z: int, phase: int = 0) -> np.ndarray:
    """``w^phase X^x Z^z``."""
    return omega_power(phase, d) * (x_gate(d, x) @ z_gate(d, z))


def as_phase_vector(a, d: int | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise ShapeMismatchError("phase vector must be one-dimensional")
    if d is not None and a.shape[0] != d:
        raise ShapeMismatchError(f"phase vector has length {a.shape[0]}, expected {d}")
    return a


def phase_gate(a) -> np.ndarray:
    """Diagonal gate ``Z(a) = sum_k exp(i a_k) |k><k|``."""
    a = as_phase_vector(a)
    check_dimension(a.shape[0])
    return np.diag(np.exp(1j * a))


def z_phase_vector(k: int, d: int) -> np.ndarray:
    """Phase vector of ``Z^k``: entries ``2 pi k l / d`` (reduced mod 2 pi)."""
    return 2 * np.pi * ((k * np.arange(d)) % d) / d


def perm_gate_sc(c, d: int) -> np.ndarray:
    """Multiplication permutation ``S_c = sum_k |ck><k|`` for a unit c."""
    d = check_dimension(d)
    c = _unit_value(c, d)
    k = np.arange(d)
    s = np.zeros((d, d), dtype=complex)
    s[(c * k) % d, k] = 1.0
    return s


def fourier_c(c, d: int) -> np.ndarray:
    """``F_c = S_{c^-1} F``, the gate implemented when ``F = S_c F_c`` is used."""
    c = _unit_value(c, d)
    return perm_gate_sc(unit_inverse(c, d), d) @ fourier_gate(d)


def controlled_z(d: int, power: int = 1) -> np.ndarray:
    """Two-qudit ``C[Z^power]`` with entry ``w^(power k l)`` at ``|kl>``."""
    d = check_dimension(d)
    k = np.arange(d)
    return np.diag(omega_power(power * np.outer(k, k), d).ravel())


def swap_gate(d: int) -> np.ndarray:
    d = check_dimension(d)
    v = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1.0
    return v


def basis_state(k: int, d: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[k % d] = 1.0
    return e


def fourier_state(j: int, d: int) -> np.ndarray:
    """Normalised ``|+_j> = F|j>``."""
    return omega_power(j * np.arange(d), d) / np.sqrt(d)


# --------------------------------------------------------------------------
# tensor helpers


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, targets: Sequence[int], n: int, d: int) -> np.ndarray:
    """Lift an operator on ``targets`` (in the given order) to the full n-qudit register."""
    k = len(targets)
    if op.shape != (d**k, d**k):
        raise ShapeMismatchError(f"operator shape {op.shape} does not act on {k} qudits")
    if len(set(targets)) != k or any(not 0 <= t < n for t in targets):
        raise ShapeMismatchError(f"bad target qudits {targets} for an {n}-qudit register")
    rest = [q for q in range(n) if q not in targets]
    full = np.kron(op, np.eye(d ** len(rest), dtype=complex))
    # axes of `full` are ordered (targets..., rest...); permute back to 0..n-1
    order = list(targets) + rest
    inv = np.argsort(order)
    full = full.reshape((d,) * (2 * n))
    full = full.transpose(list(inv) + [n + i for i in inv])
    return full.reshape(d**n, d**n)


def is_unitary(u: np.ndarray, tol: float = 1e-8) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))) <= tol


class PhaseMatch(NamedTuple):
    """Outcome of a phase-insensitive comparison.

    ``value`` is the fidelity ``|<u,v>|/(|u||v|)`` for vectors and the
    Frobenius residual ``min_theta |U - e^(i theta) V|`` for matrices.
    """

    equal: bool
    value: float

    def __bool__(self):
        return self.equal


def equal_up_to_phase(u, v, tol: float = DEFAULT_TOL) -> PhaseMatch:
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ShapeMismatchError(f"shapes differ: {u.shape} vs {v.shape}")
    if u.ndim == 2 and u.shape[0] > 1 and u.shape[1] > 1:
        overlap = np.vdot(v, u)  # tr(V^dagger U)
        theta = np.angle(overlap) if abs(overlap) > 0 else 0.0
        residual = float(np.linalg.norm(u - np.exp(1j * theta) * v))
        return PhaseMatch(residual <= tol, residual)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ShapeMismatchError("cannot compare zero vectors")
    fid = float(abs(np.vdot(u.ravel(), v.ravel())) / (nu * nv))
    return PhaseMatch(fid >= 1 - tol, fid)


def permutation_closure(generators: Sequence[Sequence[int]]) -> set[tuple[int, ...]]:
    """All permutations reachable by composing the given ones (breadth first)."""
    gens = [tuple(int(x) for x in g) for g in generators]
    n = len(gens[0])
    identity = tuple(range(n))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(n))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def affine_permutation_group(d: int, multipliers: Sequence[int] | None = None) -> set[tuple[int, ...]]:
    """Closure of the label maps of X (``k -> k-1``) and ``S_c`` (``k -> ck``)."""
    d = check_dimension(d)
    cs = units(d) if multipliers is None else [_unit_value(c, d) for c in multipliers]
    gens = [[(k - 1) % d for k in range(d)]]
    gens += [[(c * k) % d for k in range(d)] for c in cs]
    return permutation_closure(gens)
