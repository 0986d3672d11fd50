"""Cluster (graph) states on qudits: construction, measurement, stabilisers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import GraphError, NotUnitaryError, ParseError, ShapeMismatchError
from .qudit_math import (
    DEFAULT_TOL,
    check_dimension,
    equal_up_to_phase,
    fourier_state,
    is_unitary,
    kron_all,
    omega_power,
    x_gate,
    z_gate,
)

PRUNE_PROBABILITY = 1e-14


class StateVector:
    """Dense pure state of ``n`` qudits of dimension ``d``.

    Amplitudes are held as an array of shape ``(d,) * n``; axis ``i`` is qudit ``i``.
    Gate methods act in place and return ``self``.
    """

    def __init__(self, amplitudes, d: int, n: int | None = None):
        d = check_dimension(d)
        amps = np.asarray(amplitudes, dtype=complex)
        if n is None:
            n = int(round(np.log(amps.size) / np.log(d))) if amps.size > 1 else 0
        if amps.size != d**n:
            raise ShapeMismatchError(f"{amps.size} amplitudes do not describe {n} qudits of dimension {d}")
        self.d = d
        self.n = n
        self.tensor = amps.reshape((d,) * n).copy()

    @classmethod
    def from_product(cls, states: Sequence[np.ndarray], d: int) -> "StateVector":
        if not states:
            return cls(np.ones(1), d, 0)
        return cls(kron_all([np.asarray(s, dtype=complex) for s in states]), d, len(states))

    @classmethod
    def plus(cls, n: int, d: int) -> "StateVector":
        return cls.from_product([fourier_state(0, d)] * n, d)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def copy(self) -> "StateVector":
        return StateVector(self.tensor, self.d, self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def normalize(self) -> "StateVector":
        self.tensor /= self.norm()
        return self

    def apply(self, u: np.ndarray, q: int) -> "StateVector":
        """Apply a single-qudit operator to qudit ``q``."""
        t = np.tensordot(u, self.tensor, axes=([1], [q]))
        self.tensor = np.moveaxis(t, 0, q)
        return self

    def apply_cz(self, q1: int, q2: int, power: int = 1) -> "StateVector":
        """Apply ``C[Z^power]`` between qudits ``q1`` and ``q2`` (a diagonal phase)."""
        if q1 == q2:
            raise ShapeMismatchError("controlled-Z needs two distinct qudits")
        k = np.arange(self.d)
        phases = omega_power(power * np.outer(k, k), self.d)
        shape = [1] * self.n
        shape[q1] = shape[q2] = self.d
        if q1 > q2:
            phases = phases.T
        self.tensor = self.tensor * phases.reshape(shape)
        return self

    def apply_matrix(self, u: np.ndarray) -> "StateVector":
        """Apply an operator on the whole register."""
        self.tensor = (u @ self.amplitudes).reshape(self.tensor.shape)
        return self

    def transpose(self, order: Sequence[int]) -> "StateVector":
        """Reorder qudits so that new qudit ``i`` is old qudit ``order[i]``."""
        self.tensor = np.transpose(self.tensor, list(order))
        return self

    def __repr__(self):
        return f"StateVector(d={self.d}, n={self.n})"


@dataclass(frozen=True)
class ClusterGraph:
    """Which qudit pairs receive a CZ interaction.

    ``rows`` optionally fixes the logical wires (ordered left to right) for
    pattern execution; ``input_states`` overrides ``|+>`` on chosen vertices.
    """

    d: int
    n: int
    edges: frozenset = frozenset()
    input_states: Mapping[int, np.ndarray] = field(default_factory=dict)
    rows: tuple | None = None

    def __post_init__(self):
        check_dimension(self.d)
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        normalised = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            for w in (u, v):
                if not 0 <= w < self.n:
                    raise GraphError(f"vertex {w} out of range [0, {self.n})")
            normalised.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalised))
        for v, s in self.input_states.items():
            if not 0 <= v < self.n:
                raise GraphError(f"input vertex {v} out of range")
            if np.asarray(s).shape != (self.d,):
                raise ShapeMismatchError(f"input state on vertex {v} is not a single qudit")
        if self.rows is not None:
            object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))

    @classmethod
    def from_edges(cls, d: int, n: int, edges: Iterable[Sequence[int]], **kwargs) -> "ClusterGraph":
        """Build from an edge list; a repeated edge is an error."""
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {u}-{v}")
            seen.add(key)
        return cls(d, n, frozenset(seen), **kwargs)

    @classmethod
    def linear(cls, d: int, n: int) -> "ClusterGraph":
        return cls.from_edges(d, n, [(i, i + 1) for i in range(n - 1)], rows=(tuple(range(n)),))

    @classmethod
    def grid(cls, d: int, n_rows: int, n_cols: int, vertical: Iterable[tuple[int, int]] = ()) -> "ClusterGraph":
        """Rows of linear clusters; ``vertical`` lists ``(row, col)`` joined to ``(row+1, col)``.

        Vertex ``(r, c)`` has index ``r * n_cols + c``.
        """
        edges = [(r * n_cols + c, r * n_cols + c + 1) for r in range(n_rows) for c in range(n_cols - 1)]
        edges += [(r * n_cols + c, (r + 1) * n_cols + c) for r, c in vertical]
        rows = tuple(tuple(r * n_cols + c for c in range(n_cols)) for r in range(n_rows))
        return cls.from_edges(d, n_rows * n_cols, edges, rows=rows)

    def neighbours(self, a: int) -> list[int]:
        self._check_vertex(a)
        return sorted({v for e in self.edges if a in e for v in e if v != a})

    def remove_vertex(self, q: int) -> "ClusterGraph":
        """The graph with ``q`` and its edges deleted; higher vertices shift down by one."""
        self._check_vertex(q)

        def relabel(v):
            return v - 1 if v > q else v

        edges = frozenset((relabel(u), relabel(v)) for u, v in self.edges if q not in (u, v))
        inputs = {relabel(v): s for v, s in self.input_states.items() if v != q}
        return ClusterGraph(self.d, self.n - 1, edges, inputs)

    def _check_vertex(self, a: int):
        if not 0 <= a < self.n:
            raise GraphError(f"vertex {a} out of range [0, {self.n})")


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    qudit: int
    basis: np.ndarray = field(repr=False)
    outcome: int
    probability: float


# --------------------------------------------------------------------------
# construction


def build_cluster_state(g: ClusterGraph, initial: StateVector | None = None) -> StateVector:
    """Apply CZ along every edge of ``g`` to the product of the vertex input states.

    ``initial`` may replace the product input with an arbitrary (entangled) register.
    """
    if initial is None:
        plus = fourier_state(0, g.d)
        initial = StateVector.from_product([g.input_states.get(v, plus) for v in range(g.n)], g.d)
    elif (initial.d, initial.n) != (g.d, g.n):
        raise ShapeMismatchError("initial register does not match the graph")
    s = initial.copy()
    for u, v in sorted(g.edges):
        s.apply_cz(u, v)
    return s


# --------------------------------------------------------------------------
# measurement


def _check_basis(u: np.ndarray, d: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (d, d):
        raise ShapeMismatchError(f"basis must be {d}x{d}, got {u.shape}")
    if not is_unitary(u, 1e-8):
        raise NotUnitaryError("measurement basis is not unitary")
    return u


def measure_in_basis(s: StateVector, q: int, u: np.ndarray) -> list[tuple[MeasurementRecord, StateVector]]:
    """Every outcome of measuring qudit ``q`` in the basis of the columns of ``u``.

    The measured qudit is removed; qudits above ``q`` shift down by one.
    Branches with probability below ``1e-14`` are dropped.
    """
    if not 0 <= q < s.n:
        raise ShapeMismatchError(f"qudit {q} not in a register of {s.n}")
    u = _check_basis(u, s.d)
    # row k of proj is <u_k| contracted against axis q
    proj = np.tensordot(u.conj().T, s.tensor, axes=([1], [q]))
    branches = []
    for k in range(s.d):
        amp = proj[k]
        p = float(np.vdot(amp, amp).real)
        if p < PRUNE_PROBABILITY:
            continue
        post = StateVector(amp / np.sqrt(p), s.d, s.n - 1)
        branches.append((MeasurementRecord(q, u, k, p), post))
    return branches


def measure_outcome(s: StateVector, q: int, u: np.ndarray, outcome: int) -> tuple[MeasurementRecord, StateVector]:
    """Post-select a single outcome (which must have non-negligible probability)."""
    for rec, post in measure_in_basis(s, q, u):
        if rec.outcome == outcome:
            return rec, post
    raise ValueError(f"outcome {outcome} has zero probability")


def measure_sampled(s: StateVector, q: int, u: np.ndarray, seed: int | np.random.Generator):
    """Sample one branch by its Born probability with a seeded generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    branches = measure_in_basis(s, q, u)
    p = np.array([rec.probability for rec, _ in branches])
    idx = rng.choice(len(branches), p=p / p.sum())
    return branches[idx]


# --------------------------------------------------------------------------
# stabilisers and maximal connectedness


def stabilizer_operator(g: ClusterGraph, a: int) -> np.ndarray:
    """``S(a) = X_a^dagger (x) prod_{b in N(a)} Z_b`` on the full register."""
    nbrs = g.neighbours(a)
    ops = [np.eye(g.d, dtype=complex)] * g.n
    ops[a] = x_gate(g.d).conj().T
    for b in nbrs:
        ops[b] = z_gate(g.d)
    return kron_all(ops)


def stabilizer_residuals(g: ClusterGraph, state: StateVector | None = None) -> list[float]:
    if state is None:
        state = build_cluster_state(g)
    psi = state.amplitudes
    out = []
    for a in range(g.n):
        nbrs = g.neighbours(a)
        t = StateVector(psi, g.d, g.n)
        t.apply(x_gate(g.d).conj().T, a)
        for b in nbrs:
            t.apply(z_gate(g.d), b)
        out.append(float(np.linalg.norm(t.amplitudes - psi)))
    return out


def verify_stabilizers(g: ClusterGraph, state: StateVector | None = None, tol: float = DEFAULT_TOL) -> bool:
    """True iff every ``S(a)`` fixes the state (by default the cluster state of ``g``)."""
    return all(r <= tol for r in stabilizer_residuals(g, state))


def z_measure_removal_check(g: ClusterGraph, q: int, outcome: int, tol: float = DEFAULT_TOL) -> bool:
    """Measuring vertex ``q`` computationally with result ``j`` leaves
    ``prod_{b in N(q)} Z_b^j`` applied to the cluster state of ``g - q``."""
    return z_measure_removal_fidelity(g, q, outcome) >= 1 - tol


def z_measure_removal_fidelity(g: ClusterGraph, q: int, outcome: int) -> float:
    state = build_cluster_state(g)
    _, post = measure_outcome(state, q, np.eye(g.d), outcome)
    smaller = g.remove_vertex(q)
    expected = build_cluster_state(smaller)
    for b in g.neighbours(q):
        expected.apply(z_gate(g.d, outcome), b - 1 if b > q else b)
    return equal_up_to_phase(post.amplitudes, expected.amplitudes).value


def random_graph(d: int, n: int, rng: np.random.Generator, p_edge: float = 0.5) -> ClusterGraph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p_edge]
    return ClusterGraph.from_edges(d, n, edges)


# --------------------------------------------------------------------------
# graph file format


def parse_graph(text: str) -> ClusterGraph:
    """Parse ``d=<int> n=<int>`` followed by one ``<u> <v>`` edge per line."""
    header = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            fields = dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
            try:
                header = (int(fields["d"]), int(fields["n"]))
            except (KeyError, ValueError):
                raise ParseError(f"expected header 'd=<int> n=<int>', got {line!r}", lineno) from None
            if len(line.split()) != 2:
                raise ParseError(f"unexpected tokens in header {line!r}", lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<u> <v>', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"edge endpoints must be integers, got {line!r}", lineno) from None
        d, n = header
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge {u}-{v} has a vertex outside [0, {n})", lineno)
        if u == v:
            raise ParseError(f"self-loop on vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {u}-{v} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append(key)
    if header is None:
        raise ParseError("missing header 'd=<int> n=<int>'")
    d, n = header
    return ClusterGraph.from_edges(d, n, edges)


def load_graph(path: str | Path) -> ClusterGraph:
    return parse_graph(Path(path).read_text())


def format_graph(g: ClusterGraph) -> str:
    lines = [f"d={g.d} n={g.n}"] + [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"
