"""Classical error-frame tracking.

Each logical wire ``q`` carries a correctable byproduct ``X^x Z^z S_c`` (in that
order, left to right). The physical register equals
``realize_frame(frame) @ logical`` up to a global phase, where ``realize_frame``
also applies the recorded register permutation. Global phases are never tracked.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NotAUnitError, ShapeMismatchError
from .qudit_math import (
    DEFAULT_TOL,
    check_dimension,
    controlled_z,
    embed,
    is_unit,
    kron_all,
    perm_gate_sc,
    swap_gate,
    unit_inverse,
    x_gate,
    z_gate,
)


# --------------------------------------------------------------------------
# phase-vector index maps


def shift_phase_vector(a, l: int) -> np.ndarray:
    """``a^(l)`` with ``a^(l)_k = a_{k-l}``; satisfies ``Z(a) X^l = X^l Z(a^(l))``."""
    return np.roll(np.asarray(a, dtype=float), int(l))


def scale_phase_vector(a, c: int) -> np.ndarray:
    """``a'_k = a_{ck}``; satisfies ``Z(a) S_c = S_c Z(a')``."""
    a = np.asarray(a, dtype=float)
    d = a.shape[0]
    if not is_unit(c, d):
        raise NotAUnitError(f"{c} is not a unit in Z_{d}")
    return a[(int(c) * np.arange(d)) % d]


def mub_index_phase_vector(a, k: int) -> np.ndarray:
    """``a^(x,k)_l = a_{k^-1 l}``."""
    a = np.asarray(a, dtype=float)
    return scale_phase_vector(a, unit_inverse(k, a.shape[0]))


# --------------------------------------------------------------------------
# frame types


@dataclass(frozen=True)
class FrameEntry:
    x: int = 0
    z: int = 0
    c: int = 1


@dataclass(frozen=True)
class AdaptationRule:
    """Adapted angles are ``shift_phase_vector(scale_phase_vector(a, scale), shift)``."""

    shift: int = 0
    scale: int = 1

    @classmethod
    def from_entry(cls, entry: FrameEntry, d: int) -> "AdaptationRule":
        # undo Z(a) -> Z(a^(x)) then Z(a) S_c -> S_c Z(a') when pulled through X^x Z^z S_c
        return cls(shift=(-entry.x) % d, scale=unit_inverse(entry.c, d))

    def apply(self, a) -> np.ndarray:
        return shift_phase_vector(scale_phase_vector(a, self.scale), self.shift)

    def invert(self, a) -> np.ndarray:
        d = len(a)
        return scale_phase_vector(shift_phase_vector(a, -self.shift), unit_inverse(self.scale, d))


@dataclass(frozen=True)
class ErrorFrame:
    d: int
    entries: tuple[FrameEntry, ...]
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        check_dimension(self.d)
        fixed = []
        for e in self.entries:
            if not is_unit(e.c, self.d):
                raise NotAUnitError(f"frame factor S_{e.c} is not a unit in Z_{self.d}")
            fixed.append(FrameEntry(e.x % self.d, e.z % self.d, e.c % self.d))
        object.__setattr__(self, "entries", tuple(fixed))
        n = len(self.entries)
        perm = tuple(range(n)) if self.perm is None else tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(n)):
            raise ShapeMismatchError(f"{perm} is not a permutation of {n} wires")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def zero(cls, d: int, n: int) -> "ErrorFrame":
        return cls(d, (FrameEntry(),) * n)

    @property
    def n(self) -> int:
        return len(self.entries)

    def with_entry(self, q: int, entry: FrameEntry) -> "ErrorFrame":
        entries = list(self.entries)
        entries[q] = entry
        return replace(self, entries=tuple(entries))

    def adaptation(self, q: int) -> AdaptationRule:
        return AdaptationRule.from_entry(self.entries[q], self.d)

    def is_identity(self) -> bool:
        return all(e == FrameEntry() for e in self.entries) and self.perm == tuple(range(self.n))


# --------------------------------------------------------------------------
# frame updates


def absorb_teleport(frame: ErrorFrame, q: int, m: int) -> ErrorFrame:
    """Record a one-dit teleport with outcome ``m`` on wire ``q``.

    With the measurement adapted by ``frame.adaptation(q)``,
    ``X^m F Z(a~) X^x Z^z S_c = X^(m+z) Z^(-x) S_(c^-1) F Z(a)`` up to phase.
    """
    e = frame.entries[q]
    d = frame.d
    return frame.with_entry(q, FrameEntry((m + e.z) % d, (-e.x) % d, unit_inverse(e.c, d)))


def absorb_adaptive_fc(frame: ErrorFrame, q: int, c: int) -> ErrorFrame:
    """Rewrite the last ``F`` on wire ``q`` as ``S_c F_c`` and keep ``S_c`` as error."""
    d = frame.d
    if not is_unit(c, d):
        raise NotAUnitError(f"{c} is not a unit in Z_{d}")
    e = frame.entries[q]
    return frame.with_entry(q, replace(e, c=(e.c * c) % d))


def commute_frame_through_cz(frame: ErrorFrame, q1: int, q2: int) -> tuple[ErrorFrame, int]:
    """Move a CZ between wires ``q1``, ``q2`` to the right of the frame.

    Returns the new frame and the power ``p`` of the logical interaction
    ``C[Z^p]`` that the CZ has become (``p = c1 c2``).
    """
    if q1 == q2:
        raise ShapeMismatchError("controlled-Z needs two distinct wires")
    d = frame.d
    e1, e2 = frame.entries[q1], frame.entries[q2]
    new = frame.with_entry(q1, replace(e1, z=(e1.z - e2.x) % d))
    new = new.with_entry(q2, replace(e2, z=(e2.z - e1.x) % d))
    return new, (e1.c * e2.c) % d


def absorb_swap(frame: ErrorFrame, q1: int, q2: int) -> ErrorFrame:
    """Write ``E L = (E V)(V L)``: the logical register gains a swap of wires ``q1, q2``."""
    perm = list(frame.perm)
    perm[q1], perm[q2] = perm[q2], perm[q1]
    return replace(frame, perm=tuple(perm))


# --------------------------------------------------------------------------
# realisation and readout


def permutation_operator(perm, d: int) -> np.ndarray:
    """Operator sending logical wire ``w`` to register position ``perm[w]``."""
    n = len(perm)
    eye = np.eye(d**n, dtype=complex).reshape((d,) * n + (d**n,))
    inv = np.argsort(perm)
    return np.transpose(eye, list(inv) + [n]).reshape(d**n, d**n)


def realize_frame(frame: ErrorFrame) -> np.ndarray:
    """Explicit unitary ``(prod_q X^x Z^z S_c) P_perm`` on the register."""
    d = frame.d
    if frame.n == 0:
        return np.ones((1, 1), dtype=complex)
    local = [x_gate(d, e.x) @ z_gate(d, e.z) @ perm_gate_sc(e.c, d) for e in frame.entries]
    op = kron_all(local)
    if frame.perm != tuple(range(frame.n)):
        op = op @ permutation_operator(frame.perm, d)
    return op


def classical_readout_correct(frame: ErrorFrame, outcomes) -> list[int]:
    """Map computational outcomes of the physical register to logical labels.

    Register ``q`` measured as ``k`` came from ``X^x Z^z S_c |j>`` with
    ``j = c^-1 (k + x)``; logical wire ``w`` is read from register ``perm[w]``.
    """
    d = frame.d
    outcomes = [int(k) for k in outcomes]
    if len(outcomes) != frame.n:
        raise ShapeMismatchError(f"expected {frame.n} outcomes, got {len(outcomes)}")
    physical = [(unit_inverse(e.c, d) * (k + e.x)) % d for e, k in zip(frame.entries, outcomes)]
    return [physical[frame.perm[w]] for w in range(frame.n)]


def verify_swap_identities(d: int, rng: np.random.Generator | None = None, tol: float = DEFAULT_TOL) -> bool:
    """Check ``V(A (x) B) = (B (x) A)V``, ``CZ_12 V_23 = V_23 CZ_13`` and ``V^2 = I``."""
    rng = np.random.default_rng(0) if rng is None else rng
    v = swap_gate(d)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    ok = np.allclose(v @ np.kron(a, b), np.kron(b, a) @ v, atol=tol, rtol=0)
    ok &= np.allclose(v @ v, np.eye(d * d), atol=tol, rtol=0)
    cz12 = embed(controlled_z(d), [0, 1], 3, d)
    cz13 = embed(controlled_z(d), [0, 2], 3, d)
    v23 = embed(v, [1, 2], 3, d)
    ok &= np.allclose(cz12 @ v23, v23 @ cz13, atol=tol, rtol=0)
    return bool(ok)
