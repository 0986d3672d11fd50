"""One-dit teleportation and measurement-pattern execution on cluster states.

A cluster is split into *wires*: rows of a linear cluster, each carrying one
logical qudit from left to right. Measuring the current head of a wire in the
basis ``(F Z(a~))^dagger`` teleports the logical qudit one vertex along the row
and applies ``F Z(a)`` (or ``F_c Z(a)`` with adaptive computation), where
``a~`` is ``a`` adapted to the live error frame. Edges between rows are
interaction gates declared by ``interact`` steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .cluster import (
    ClusterGraph,
    MeasurementRecord,
    StateVector,
    build_cluster_state,
    measure_in_basis,
    measure_outcome,
)
from .errors import ParseError, PatternError, ShapeMismatchError, UnsupportedTopologyError
from .frame import ErrorFrame, absorb_adaptive_fc, absorb_teleport, commute_frame_through_cz, realize_frame
from .qudit_math import (
    as_phase_vector,
    controlled_z,
    embed,
    equal_up_to_phase,
    fourier_c,
    fourier_gate,
    fourier_state,
    is_unit,
    kron_all,
    phase_gate,
    x_gate,
)


@dataclass(frozen=True, eq=False)
class MeasureStep:
    qudit: int
    angles: np.ndarray
    fc: int | None = None

    def gate(self, d: int) -> np.ndarray:
        """The logical gate ``F_c Z(a)`` this step implements."""
        return fourier_c(self.fc or 1, d) @ phase_gate(self.angles)


@dataclass(frozen=True)
class InteractStep:
    q1: int
    q2: int


Step = Union[MeasureStep, InteractStep]


@dataclass(frozen=True)
class MeasurementPattern:
    steps: tuple = ()

    @classmethod
    def chain(cls, vectors: Sequence, fcs: Sequence[int | None] | None = None, start: int = 0) -> "MeasurementPattern":
        """Measure ``start, start+1, ...`` of a linear cluster with the given angle vectors."""
        fcs = fcs or [None] * len(vectors)
        return cls(tuple(MeasureStep(start + i, np.asarray(a, float), c) for i, (a, c) in enumerate(zip(vectors, fcs))))

    @property
    def measured(self) -> list[int]:
        return [s.qudit for s in self.steps if isinstance(s, MeasureStep)]

    def __len__(self):
        return len(self.steps)


@dataclass(eq=False)
class PatternResult:
    state: StateVector
    frame: ErrorFrame
    records: tuple[MeasurementRecord, ...]
    intended: np.ndarray = field(repr=False)
    wires: tuple[tuple[int, ...], ...] = ()
    cz_powers: tuple[int, ...] = ()

    @property
    def outcomes(self) -> tuple[int, ...]:
        return tuple(r.outcome for r in self.records)

    @property
    def probability(self) -> float:
        return float(np.prod([r.probability for r in self.records]))

    def corrected_state(self) -> np.ndarray:
        """``realize(frame)^dagger`` applied to the final register."""
        return realize_frame(self.frame).conj().T @ self.state.amplitudes

    def soundness(self, input_state: StateVector, tol: float = 1e-9):
        """Compare the corrected output with ``intended @ input`` up to phase."""
        return equal_up_to_phase(self.corrected_state(), self.intended @ input_state.amplitudes, tol)


# --------------------------------------------------------------------------
# single teleport


def one_dit_teleport_branches(psi, a) -> list[tuple[MeasurementRecord, StateVector]]:
    """All outcomes of teleporting a single-qudit ``psi`` through ``CZ(psi (x) |+>)``."""
    psi = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    a = as_phase_vector(a, d)
    state = StateVector.from_product([psi / np.linalg.norm(psi), fourier_state(0, d)], d)
    state.apply_cz(0, 1)
    basis = (fourier_gate(d) @ phase_gate(a)).conj().T
    return measure_in_basis(state, 0, basis)


def one_dit_teleport(psi, a, m: int) -> StateVector:
    """Post-selected teleport: the output qudit after outcome ``m``, equal to
    ``X^m F Z(a) psi`` up to phase."""
    psi = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    if not 0 <= m < d:
        raise ValueError(f"outcome {m} outside [0, {d})")
    for rec, post in one_dit_teleport_branches(psi, a):
        if rec.outcome == m:
            return post
    raise ValueError(f"outcome {m} has zero probability")


def teleport_target(psi, a, m: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    return x_gate(d, m) @ fourier_gate(d) @ phase_gate(a) @ psi


# --------------------------------------------------------------------------
# wires and static validation


def _row_is_path(g: ClusterGraph, row: Sequence[int]) -> bool:
    return all((min(u, v), max(u, v)) in g.edges for u, v in zip(row, row[1:]))


def resolve_wires(g: ClusterGraph, pattern: MeasurementPattern):
    """Split ``g`` into left-to-right wires and the set of interaction edges.

    Uses ``g.rows`` when present; otherwise edges named by ``interact`` steps
    are interactions and the remaining edges must form disjoint paths.
    """
    declared = {(min(s.q1, s.q2), max(s.q1, s.q2)) for s in pattern.steps if isinstance(s, InteractStep)}
    if g.rows is not None:
        rows = [list(r) for r in g.rows]
        flat = [v for r in rows for v in r]
        if sorted(flat) != list(range(g.n)):
            raise UnsupportedTopologyError("rows must partition the vertices")
        for r in rows:
            if not _row_is_path(g, r):
                raise UnsupportedTopologyError(f"row {r} is not a path in the graph")
        consecutive = {(min(u, v), max(u, v)) for r in rows for u, v in zip(r, r[1:])}
        row_of = {v: i for i, r in enumerate(rows) for v in r}
        vertical = set()
        for e in g.edges - consecutive:
            if row_of[e[0]] == row_of[e[1]]:
                raise UnsupportedTopologyError(f"edge {e} joins non-adjacent vertices of one row")
            vertical.add(e)
        return [tuple(r) for r in rows], vertical

    vertical = declared & g.edges
    horizontal = g.edges - vertical
    adj = {v: [] for v in range(g.n)}
    for u, v in horizontal:
        adj[u].append(v)
        adj[v].append(u)
    order = {v: i for i, v in enumerate(pattern.measured)}
    seen, rows = set(), []
    for start in range(g.n):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        n_edges = sum(len(adj[v]) for v in comp) // 2
        ends = [v for v in comp if len(adj[v]) <= 1]
        if any(len(adj[v]) > 2 for v in comp) or n_edges != len(comp) - 1:
            raise UnsupportedTopologyError(
                f"vertices {sorted(comp)} do not form a single wire: a logical row must be a path "
                "and every other edge must be declared as an interaction"
            )
        measured_ends = sorted((order[v], v) for v in ends if v in order)
        head = measured_ends[0][1] if measured_ends else min(ends)
        row, prev = [head], None
        while len(row) < len(comp):
            nxt = [w for w in adj[row[-1]] if w != prev]
            prev = row[-1]
            row.append(nxt[0])
        rows.append(tuple(row))
    rows.sort(key=lambda r: r[0])
    return rows, vertical


@dataclass
class _Plan:
    rows: list
    vertical: set
    ops: list  # ("measure", wire, vertex, step) | ("interact", w1, w2, edge)


def plan_pattern(g: ClusterGraph, pattern: MeasurementPattern) -> _Plan:
    """Walk the pattern without simulating it and reject anything that is not a
    left-to-right wire computation."""
    rows, vertical = resolve_wires(g, pattern)
    wire_of = {v: w for w, r in enumerate(rows) for v in r}
    pos = [0] * len(rows)
    pending = set(vertical)
    ops = []
    for step in pattern.steps:
        if isinstance(step, MeasureStep):
            v = step.qudit
            if v not in wire_of:
                raise PatternError(f"qudit {v} is not in the cluster")
            w = wire_of[v]
            row = rows[w]
            if row.index(v) < pos[w]:
                raise PatternError(f"qudit {v} was already measured")
            if row[pos[w]] != v:
                raise PatternError(f"qudit {v} measured out of order: wire {w} is at qudit {row[pos[w]]}")
            if pos[w] == len(row) - 1:
                raise PatternError(f"qudit {v} is the end of its wire and has no neighbour to teleport into")
            blocking = sorted(e for e in pending if v in e)
            if blocking:
                raise PatternError(f"interaction {blocking[0]} must be applied before measuring qudit {v}")
            if len(step.angles) != g.d:
                raise PatternError(f"qudit {v}: phase vector has {len(step.angles)} entries, expected {g.d}")
            if step.fc is not None and not is_unit(step.fc, g.d):
                raise PatternError(f"qudit {v}: fc={step.fc} is not a unit in Z_{g.d}")
            ops.append(("measure", w, v, step))
            pos[w] += 1
        else:
            e = (min(step.q1, step.q2), max(step.q1, step.q2))
            if e not in vertical:
                raise PatternError(f"{e} is not an interaction edge of the cluster")
            if e not in pending:
                raise PatternError(f"interaction {e} applied twice")
            w1, w2 = wire_of[step.q1], wire_of[step.q2]
            if rows[w1][pos[w1]] != step.q1 or rows[w2][pos[w2]] != step.q2:
                raise PatternError(f"interaction {e} must join the current heads of two wires")
            pending.discard(e)
            ops.append(("interact", w1, w2, e))
    for w, r in enumerate(rows):
        if pos[w] != len(r) - 1:
            raise PatternError(f"wire {w} ends with unmeasured qudits {list(r[pos[w]:-1])}")
    if pending:
        raise PatternError(f"interaction edges {sorted(pending)} have no interact step")
    return _Plan(rows, vertical, ops)


# --------------------------------------------------------------------------
# execution


def _initial_register(g: ClusterGraph, rows, input_state: StateVector | None) -> StateVector:
    heads = [r[0] for r in rows]
    plus = fourier_state(0, g.d)
    if input_state is None:
        input_state = StateVector.from_product([g.input_states.get(h, plus) for h in heads], g.d)
    if (input_state.d, input_state.n) != (g.d, len(rows)):
        raise ShapeMismatchError(f"input must be {len(rows)} qudits of dimension {g.d}")
    others = [v for v in range(g.n) if v not in heads]
    amps = kron_all([input_state.amplitudes] + [g.input_states.get(v, plus) for v in others])
    full = StateVector(amps, g.d, g.n)
    # axes currently ordered heads + others; move to vertex order
    order = heads + others
    full.transpose(list(np.argsort(order)))
    return build_cluster_state(g, full)


def intended_unitary(plan: _Plan, d: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """The logical unitary of the pattern, with CZ powers taken from a zero-``c`` run.

    Interaction powers depend only on the ``S_c`` parts of the frame, which are
    outcome-independent, so this is the same for every branch.
    """
    n_w = len(plan.rows)
    u = np.eye(d**n_w, dtype=complex)
    frame = ErrorFrame.zero(d, n_w)
    powers = []
    for op in plan.ops:
        if op[0] == "measure":
            _, w, _, step = op
            u = embed(step.gate(d), [w], n_w, d) @ u
            frame = absorb_teleport(frame, w, 0)
            if step.fc is not None:
                frame = absorb_adaptive_fc(frame, w, step.fc)
        else:
            _, w1, w2, _ = op
            frame, p = commute_frame_through_cz(frame, w1, w2)
            powers.append(p)
            u = embed(controlled_z(d, p), [w1, w2], n_w, d) @ u
    return u, tuple(powers)


def run_pattern(
    input_state: StateVector | None,
    g: ClusterGraph,
    pattern: MeasurementPattern,
    mode: str = "exhaustive",
    seed: int | None = None,
    outcomes: Sequence[int] | None = None,
):
    """Execute ``pattern`` on the cluster of ``g`` with ``input_state`` on the wire heads.

    ``mode="exhaustive"`` returns a list with one ``PatternResult`` per
    non-zero-probability branch, sorted by outcome tuple. ``mode="sampled"``
    follows one branch drawn with ``seed``; passing ``outcomes`` post-selects.
    """
    plan = plan_pattern(g, pattern)
    d = g.d
    intended, powers = intended_unitary(plan, d)
    state = _initial_register(g, plan.rows, input_state)
    alive = list(range(g.n))
    frame = ErrorFrame.zero(d, len(plan.rows))
    rows = tuple(plan.rows)

    def finish(state, alive, frame, records):
        tails = [r[-1] for r in rows]
        state = state.copy().transpose([alive.index(t) for t in tails])
        return PatternResult(state, frame, tuple(records), intended, rows, powers)

    if mode == "exhaustive" and outcomes is None:
        results = []

        def recurse(i, state, alive, frame, records):
            if i == len(plan.ops):
                results.append(finish(state, alive, frame, records))
                return
            op = plan.ops[i]
            if op[0] == "interact":
                frame, _ = commute_frame_through_cz(frame, op[1], op[2])
                recurse(i + 1, state, alive, frame, records)
                return
            _, w, v, step = op
            basis = _adapted_basis(frame, w, step, d)
            rest = [q for q in alive if q != v]
            for rec, post in measure_in_basis(state, alive.index(v), basis):
                rec = MeasurementRecord(v, rec.basis, rec.outcome, rec.probability)
                recurse(i + 1, post, rest, _absorb(frame, w, rec.outcome, step), records + [rec])

        recurse(0, state, alive, frame, [])
        results.sort(key=lambda r: r.outcomes)
        return results

    if mode not in ("sampled", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    records = []
    forced = list(outcomes) if outcomes is not None else None
    for op in plan.ops:
        if op[0] == "interact":
            frame, _ = commute_frame_through_cz(frame, op[1], op[2])
            continue
        _, w, v, step = op
        basis = _adapted_basis(frame, w, step, d)
        q = alive.index(v)
        if forced is not None:
            if not forced:
                raise PatternError("fewer outcomes supplied than measurements in the pattern")
            rec, state = measure_outcome(state, q, basis, forced.pop(0))
        else:
            branches = measure_in_basis(state, q, basis)
            p = np.array([b[0].probability for b in branches])
            rec, state = branches[rng.choice(len(branches), p=p / p.sum())]
        rec = MeasurementRecord(v, rec.basis, rec.outcome, rec.probability)
        records.append(rec)
        alive.remove(v)
        frame = _absorb(frame, w, rec.outcome, step)
    return finish(state, alive, frame, records)


def run_grid_pattern(inputs, g: ClusterGraph, pattern: MeasurementPattern, mode: str = "exhaustive", seed=None,
                     outcomes=None):
    """``run_pattern`` for several logical rows; ``inputs`` may be a register or
    a list of single-qudit states, one per row (top to bottom)."""
    if inputs is not None and not isinstance(inputs, StateVector):
        inputs = StateVector.from_product([np.asarray(s, dtype=complex) for s in inputs], g.d)
    return run_pattern(inputs, g, pattern, mode=mode, seed=seed, outcomes=outcomes)


def _adapted_basis(frame: ErrorFrame, w: int, step: MeasureStep, d: int) -> np.ndarray:
    adapted = frame.adaptation(w).apply(step.angles)
    return (fourier_gate(d) @ phase_gate(adapted)).conj().T


def _absorb(frame: ErrorFrame, w: int, m: int, step: MeasureStep) -> ErrorFrame:
    frame = absorb_teleport(frame, w, m)
    if step.fc is not None:
        frame = absorb_adaptive_fc(frame, w, step.fc)
    return frame


# --------------------------------------------------------------------------
# pattern file format


def parse_pattern(text: str) -> MeasurementPattern:
    """Parse ``measure <q> a=<r0,r1,...> [fc=<unit>]`` and ``interact <q1> <q2>`` lines.

    A single angle after ``a=`` is broadcast to every level.
    """
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "measure":
                if len(parts) < 3:
                    raise ParseError("expected 'measure <qudit> a=<angles> [fc=<unit>]'", lineno)
                q = int(parts[1])
                opts = {}
                for tok in parts[2:]:
                    if "=" not in tok:
                        raise ParseError(f"unexpected token {tok!r}", lineno)
                    k, v = tok.split("=", 1)
                    if k not in ("a", "fc") or k in opts:
                        raise ParseError(f"unexpected or repeated option {k!r}", lineno)
                    opts[k] = v
                if "a" not in opts:
                    raise ParseError("missing a=<angles>", lineno)
                angles = np.array([float(x) for x in opts["a"].split(",")])
                fc = int(opts["fc"]) if "fc" in opts else None
                steps.append(MeasureStep(q, angles, fc))
            elif kind == "interact":
                if len(parts) != 3:
                    raise ParseError("expected 'interact <q1> <q2>'", lineno)
                steps.append(InteractStep(int(parts[1]), int(parts[2])))
            else:
                raise ParseError(f"unknown step {kind!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    return MeasurementPattern(tuple(steps))


def broadcast_angles(pattern: MeasurementPattern, d: int) -> MeasurementPattern:
    steps = []
    for s in pattern.steps:
        if isinstance(s, MeasureStep) and len(s.angles) == 1 and d != 1:
            s = MeasureStep(s.qudit, np.full(d, s.angles[0]), s.fc)
        steps.append(s)
    return MeasurementPattern(tuple(steps))


def load_pattern(path: str | Path) -> MeasurementPattern:
    return parse_pattern(Path(path).read_text())


def format_pattern(pattern: MeasurementPattern) -> str:
    lines = []
    for s in pattern.steps:
        if isinstance(s, MeasureStep):
            line = f"measure {s.qudit} a=" + ",".join(repr(float(x)) for x in s.angles)
            if s.fc is not None:
                line += f" fc={s.fc}"
        else:
            line = f"interact {s.q1} {s.q2}"
        lines.append(line)
    return "\n".join(lines) + "\n"
