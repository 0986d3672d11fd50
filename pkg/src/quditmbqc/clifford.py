"""Conjugation actions on the generalised Pauli group and generation of the
Clifford group in prime dimension.

Up to phase, a Clifford unitary acts as ``X -> X^i Z^j``, ``Z -> X^k Z^l`` with
``il - jk = 1``. Every such action is realised by a word in ``F``, ``S_c`` and
``P``: ``C(i, m, n) = S_i P^m Q^n`` (``Q = F P F^dagger``) sends
``X -> X^i Z^(-i^-1 m)`` and ``Z -> X^(in) Z^(i^-1 (1 - mn))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotAUnitError, NotCliffordError, UnsupportedDimensionError
from .qudit_math import (
    affine_permutation_group,
    check_dimension,
    fourier_gate,
    half,
    is_prime,
    is_unit,
    omega_power,
    perm_gate_sc,
    unit_inverse,
    x_gate,
    z_gate,
)


@dataclass(frozen=True)
class PauliLabel:
    """``w^a X^b Z^c``."""

    d: int
    b: int
    c: int
    a: int = 0

    def __post_init__(self):
        check_dimension(self.d)
        for name in ("b", "c", "a"):
            object.__setattr__(self, name, int(getattr(self, name)) % self.d)

    def matrix(self) -> np.ndarray:
        return omega_power(self.a, self.d) * (x_gate(self.d, self.b) @ z_gate(self.d, self.c))

    def projective(self) -> tuple[int, int]:
        return self.b, self.c


@dataclass(frozen=True)
class SymplecticAction:
    """``X -> X^i Z^j``, ``Z -> X^k Z^l`` up to phase."""

    d: int
    i: int
    j: int
    k: int
    l: int

    @property
    def determinant(self) -> int:
        return (self.i * self.l - self.j * self.k) % self.d

    def key(self) -> tuple[int, int, int, int]:
        return self.i, self.j, self.k, self.l


def conjugate_pauli(u: np.ndarray, p: PauliLabel, projective: bool = False, tol: float = 1e-10) -> PauliLabel:
    """Identify ``u P u^dagger`` as a Pauli label.

    Exact mode matches all ``d^3`` labels ``w^a X^b Z^c``. Projective mode
    accepts any unit-modulus prefactor (needed for the qubit phase gate,
    whose images carry a factor ``i``) and reports ``a = 0`` unless the
    prefactor is itself a power of ``w``.
    """
    d = p.d
    image = u @ p.matrix() @ u.conj().T
    for b, c in itertools.product(range(d), repeat=2):
        base = x_gate(d, b) @ z_gate(d, c)
        lam = np.trace(base.conj().T @ image) / d
        if abs(abs(lam) - 1) > 1e-8:
            continue
        if np.max(np.abs(image - lam * base)) > tol:
            continue
        a = int(np.rint(np.angle(lam) * d / (2 * np.pi))) % d
        if abs(lam - omega_power(a, d)) <= tol:
            return PauliLabel(d, b, c, a)
        if projective:
            return PauliLabel(d, b, c, 0)
    raise NotCliffordError(f"conjugate of X^{p.b} Z^{p.c} is not a Pauli operator")


def commutator_exponent(p: PauliLabel, q: PauliLabel) -> int:
    """``alpha`` with ``P Q = w^alpha Q P``: ``b1 c2 - b2 c1`` (so ``alpha(X, Z) = 1``)."""
    if p.d != q.d:
        raise ValueError("labels of different dimensions")
    return (p.b * q.c - q.b * p.c) % p.d


def action_of(u: np.ndarray, d: int, projective: bool = False) -> SymplecticAction:
    x = conjugate_pauli(u, PauliLabel(d, 1, 0), projective)
    z = conjugate_pauli(u, PauliLabel(d, 0, 1), projective)
    return SymplecticAction(d, x.b, x.c, z.b, z.c)


# --------------------------------------------------------------------------
# generators


def p_gate(d: int) -> np.ndarray:
    """``P|j> = w^(j(j+1)/2)|j>`` for odd d; the qubit uses ``diag(1, i)``.

    For d = 2 the integer exponent ``j(j+1)/2`` gives ``Z``, which cannot
    reach all qubit actions, so the square root of ``Z`` is used instead.
    """
    d = check_dimension(d)
    if d == 2:
        return np.diag([1, 1j])
    j = np.arange(d)
    return np.diag(omega_power(half(d) * j * (j + 1), d))


def q_gate(d: int) -> np.ndarray:
    f = fourier_gate(d)
    return f @ p_gate(d) @ f.conj().T


def _require_prime(d: int) -> int:
    d = check_dimension(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(f"Clifford generation is only handled for prime d, got {d}")
    return d


def build_c_imn(i: int, m: int, n: int, d: int) -> np.ndarray:
    """``C(i, m, n) = S_i P^m Q^n``."""
    d = _require_prime(d)
    if not is_unit(i, d):
        raise NotAUnitError(f"{i} is not a unit in Z_{d}")
    return perm_gate_sc(i, d) @ np.linalg.matrix_power(p_gate(d), m % d if d > 2 else m % 4) \
        @ np.linalg.matrix_power(q_gate(d), n % d if d > 2 else n % 4)


def c_imn_action(i: int, m: int, n: int, d: int) -> SymplecticAction:
    """The closed-form action of ``C(i, m, n)``."""
    ii = unit_inverse(i, d)
    return SymplecticAction(d, i % d, (-ii * m) % d, (i * n) % d, (ii * (1 - m * n)) % d)


def generator_matrix(name: str, d: int) -> np.ndarray:
    """``"F"``, ``"F^-1"``, ``"P"``, ``"X"``, ``"Z"`` or ``"S_c"`` for an integer c."""
    if name == "F":
        return fourier_gate(d)
    if name == "F^-1":
        return fourier_gate(d).conj().T
    if name == "P":
        return p_gate(d)
    if name == "X":
        return x_gate(d)
    if name == "Z":
        return z_gate(d)
    if name.startswith("S_"):
        return perm_gate_sc(int(name[2:]), d)
    raise ValueError(f"unknown generator {name!r}")


def evaluate_word(word, d: int) -> np.ndarray:
    u = np.eye(d, dtype=complex)
    for name in word:
        u = u @ generator_matrix(name, d)
    return u


def _c_word(i: int, m: int, n: int, d: int) -> list[str]:
    # Q^n = F P^n F^-1; the qubit P has order 4
    order = 4 if d == 2 else d
    m, n = m % order, n % order
    word = [] if i % d == 1 else [f"S_{i % d}"]
    word += ["P"] * m
    if n:
        word += ["F"] + ["P"] * n + ["F^-1"]
    return word


def realizing_word(action: SymplecticAction) -> list[str]:
    """A generator word whose conjugation action is ``action``."""
    d = action.d
    i, j, k, l = action.key()
    if action.determinant != 1:
        raise ValueError(f"il - jk = {action.determinant}, not 1")
    if i % d:
        ii = unit_inverse(i, d)
        return _c_word(i, -i * j, ii * k, d)
    # i = 0 forces jk = -1: reach X -> X^-j, Z -> X^-l Z^k, then conjugate by F
    return ["F"] + _c_word(-j, 0, unit_inverse(j, d) * l, d)


def enumerate_actions(d: int) -> list[SymplecticAction]:
    d = _require_prime(d)
    out = []
    for i, j, k, l in itertools.product(range(d), repeat=4):
        if (i * l - j * k) % d == 1:
            out.append(SymplecticAction(d, i, j, k, l))
    return out


@dataclass(frozen=True)
class ActionRecord:
    action: SymplecticAction
    word: tuple[str, ...]
    realized: SymplecticAction | None
    passed: bool

    @property
    def word_length(self) -> int:
        return len(self.word)

    def as_dict(self) -> dict:
        return {
            "action": list(self.action.key()),
            "word": list(self.word),
            "word_length": self.word_length,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class GenerationReport:
    d: int
    records: tuple[ActionRecord, ...]

    @property
    def failures(self) -> list[ActionRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __len__(self):
        return len(self.records)


def verify_generation(d: int) -> GenerationReport:
    """Realise every action with ``il - jk = 1`` by a generator word and check it."""
    d = _require_prime(d)
    records = []
    for action in enumerate_actions(d):
        word = tuple(realizing_word(action))
        try:
            realized = action_of(evaluate_word(word, d), d, projective=True)
        except NotCliffordError:
            realized = None
        records.append(ActionRecord(action, word, realized, realized == action))
    records.sort(key=lambda r: r.action.key())
    return GenerationReport(d, tuple(records))


def affine_group_order(d: int, multipliers=None) -> int:
    """Order of the permutation group generated by ``X`` and ``S_c`` on basis labels."""
    return len(affine_permutation_group(d, multipliers))
