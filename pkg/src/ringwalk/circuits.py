"""Walk-to-circuit compiler: coin layers, increment/decrement cascades,
bounded-rank CkX decomposition, and movement markers.

Wire layout is fixed: position qubits x1..xn first (x1 is the most
significant position bit), then the coin qubit(s), then any ancillas the
decomposition needs. Circuits carry gate labels, not matrices; the
executor decides whether a label resolves to an ideal or an effective
matrix.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

_CKX_LABEL = re.compile(r"^C(\d+)X$")


@dataclass(frozen=True)
class GateApplication:
    """One gate: a label, target wires (controls first, target last), and
    for RY the rotation angle."""

    label: str
    targets: tuple[int, ...]
    theta: float | None = None

    def serial_label(self) -> str:
        if self.label == "RY":
            return f"RY({self.theta:.12g})"
        return self.label

    @property
    def rank(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class MoveMarker:
    """Atom rearrangement point; every qubit waits out tau_move here."""


CircuitOp = Union[GateApplication, MoveMarker]


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    ops: tuple[CircuitOp, ...]
    ancilla_indices: tuple[int, ...] = ()

    def serialize(self) -> str:
        lines = [f"QUBITS {self.qubit_count}"]
        if self.ancilla_indices:
            lines.append("ANCILLAS " + " ".join(str(q) for q in self.ancilla_indices))
        for op in self.ops:
            if isinstance(op, MoveMarker):
                lines.append("MOVE")
            else:
                lines.append(f"GATE {op.serial_label()} " + " ".join(str(q) for q in op.targets))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WalkSpec:
    """A coined walk on a ring of 2**position_qubits nodes.

    coin_qubits=1 is the standard walk (coin 0 steps down, 1 steps up);
    coin_qubits=2 is the lazy walk whose second coin qubit gates movement
    (c2=0 rests, then c1 picks the direction). Schedules give the coin
    angles per step; phi_schedule exists exactly for the lazy walk.
    """

    position_qubits: int
    coin_qubits: int
    theta_schedule: tuple[float, ...]
    phi_schedule: tuple[float, ...] | None
    steps: int

    def __post_init__(self) -> None:
        if not 2 <= self.position_qubits <= 20:
            raise ValueError(f"position_qubits {self.position_qubits} outside [2, 20]")
        if self.coin_qubits not in (1, 2):
            raise ValueError(f"coin_qubits must be 1 or 2, got {self.coin_qubits}")
        if self.steps < 1:
            raise ValueError("need at least one step")
        if len(self.theta_schedule) != self.steps:
            raise ValueError("theta_schedule length must equal steps")
        if self.coin_qubits == 2:
            if self.phi_schedule is None or len(self.phi_schedule) != self.steps:
                raise ValueError("phi_schedule must cover every step of a 2q-coin walk")
        elif self.phi_schedule is not None:
            raise ValueError("phi_schedule is only meaningful for a 2q-coin walk")

    @property
    def node_count(self) -> int:
        return 2**self.position_qubits

    @property
    def data_qubit_count(self) -> int:
        return self.position_qubits + self.coin_qubits

    @property
    def position_indices(self) -> tuple[int, ...]:
        return tuple(range(self.position_qubits))

    @property
    def coin_indices(self) -> tuple[int, ...]:
        return tuple(range(self.position_qubits, self.data_qubit_count))


def uniform_spec(position_qubits: int, coin_qubits: int, steps: int = 21,
                 theta: float = math.pi / 2, phi: float = math.pi / 2) -> WalkSpec:
    """WalkSpec with a constant coin schedule (the default experiment)."""
    return WalkSpec(
        position_qubits=position_qubits,
        coin_qubits=coin_qubits,
        theta_schedule=(theta,) * steps,
        phi_schedule=(phi,) * steps if coin_qubits == 2 else None,
        steps=steps,
    )


@dataclass(frozen=True)
class NativeGateSet:
    """Hardware gate menu: multiqubit gates up to max_rank.

    With param_a unset, CZ/CCZ/C3Z use the published effective matrices.
    With param_a set, CZ and CCZ come from the tunable family at that
    effort; rank 4 has no published tuning curve and keeps its fixed
    matrix.
    """

    max_rank: int = 3
    param_a: float | None = None

    def __post_init__(self) -> None:
        if self.max_rank not in (3, 4):
            raise ValueError(f"max_rank must be 3 or 4, got {self.max_rank}")
        if self.param_a is not None and self.param_a < 0:
            raise ValueError("param_a must be nonnegative")

    def effective_ckz(self, k: int):
        from . import gates as _g

        if not 1 <= k <= self.max_rank - 1:
            raise ValueError(f"C{k}Z is outside this gate set (max_rank {self.max_rank})")
        if k == 1:
            return _g.param_gate("CZ", self.param_a) if self.param_a is not None else _g.cz_eff()
        if k == 2:
            return _g.param_gate("CCZ", self.param_a) if self.param_a is not None else _g.ccz_eff()
        return _g.c3z_eff()


def ckx_rank(label: str) -> int | None:
    """Rank of a C..X label ("C3X" -> 4), or None for other labels."""
    m = _CKX_LABEL.match(label)
    return int(m.group(1)) + 1 if m else None


def build_coin(spec: WalkSpec, step_index: int) -> tuple[GateApplication, ...]:
    """Coin layer for one step: RY(theta) on c1, and RY(phi) on c2 if lazy."""
    if not 0 <= step_index < spec.steps:
        raise ValueError(f"step_index {step_index} outside schedule")
    c1 = spec.coin_indices[0]
    ops = [GateApplication("RY", (c1,), theta=spec.theta_schedule[step_index])]
    if spec.coin_qubits == 2:
        ops.append(GateApplication("RY", (spec.coin_indices[1],), theta=spec.phi_schedule[step_index]))
    return tuple(ops)


def build_shift_abstract(spec: WalkSpec) -> tuple[GateApplication, ...]:
    """Coin-conditioned shift, before rank bounding: an increment cascade
    for the step-up coin value followed by its X-conjugated mirror for the
    step-down value.

    Increment: for j = 1..n a CkX onto x_j controlled on every lower
    position bit x_{j+1}..x_n plus the coin (both coin qubits for the lazy
    walk), widest gate first so each gate still sees pre-carry bits.
    Decrement: flip c1 and x_2..x_n, run the same cascade with each x_j
    restored just before the gate that targets it, then restore c1. The
    rest branch of the lazy walk needs nothing: c2 stays an ordinary
    control, so c2=0 blocks both cascades.
    """
    n = spec.position_qubits
    coins = spec.coin_indices
    c1 = coins[0]

    def cascade() -> list[GateApplication]:
        out = []
        for j in range(1, n + 1):
            controls = tuple(range(j, n)) + coins
            k = len(controls)
            out.append(GateApplication(f"C{k}X", controls + (j - 1,)))
        return out

    ops: list[GateApplication] = list(cascade())
    decrement = cascade()
    ops.append(GateApplication("X", (c1,)))
    for j in range(2, n + 1):
        ops.append(GateApplication("X", (j - 1,)))
    ops.append(decrement[0])
    for j in range(2, n + 1):
        ops.append(GateApplication("X", (j - 1,)))
        ops.append(decrement[j - 1])
    ops.append(GateApplication("X", (c1,)))
    return tuple(ops)


def decompose_ckx(k: int, max_rank: int) -> tuple[tuple[GateApplication, ...], int]:
    """Rewrite a CkX as a ladder of gates of rank <= max_rank.

    Local wire convention: controls 0..k-1, target k, ancillas k+1 onward.
    The ladder zig-zags carries down a chain of ancillas and runs twice, so
    every ancilla is returned to its incoming value (dirty ancillas are
    fine) and no phase is left behind. A CkX at rank r > max_rank = rho
    costs 4m gates and m = ceil((k - rho + 1)/(rho - 2)) ancillas.
    """
    if k < 1:
        raise ValueError("need at least one control")
    if max_rank < 3:
        raise ValueError("decomposition needs native rank >= 3")
    if k + 1 <= max_rank:
        return (GateApplication(f"C{k}X", tuple(range(k + 1))),), 0

    rho = max_rank
    width = rho - 2  # controls consumed per rung beyond the carried ancilla
    m = math.ceil((k - (rho - 1)) / width)
    q = k - width * m
    target = k
    anc = [k + 1 + i for i in range(m)]

    rungs: list[GateApplication] = []
    for j in range(m):
        controls = tuple(range(width * j, width * (j + 1)))
        sink = target if j == 0 else anc[j - 1]
        rungs.append(GateApplication(f"C{rho - 1}X", controls + (anc[j], sink)))
    deep_controls = tuple(range(width * m, k))
    assert len(deep_controls) == q and 2 <= q <= rho - 1
    rungs.append(GateApplication(f"C{q}X", deep_controls + (anc[m - 1],)))

    # Compute the ancilla chain from the deepest rung up, fire onto the
    # target, then unwind; running the half twice cancels the garbage each
    # rung left on its carried ancilla.
    half = rungs[::-1] + rungs[1:-1]  # gm..g0 then g1..gm-1
    return tuple(half + half), m


def ancilla_requirement(spec: WalkSpec, max_rank: int) -> int:
    """Scratch qubits needed to compile one step (ancillas are pooled)."""
    worst_k = spec.position_qubits - 1 + spec.coin_qubits
    if worst_k + 1 <= max_rank:
        return 0
    return decompose_ckx(worst_k, max_rank)[1]


def _with_move_markers(ops: Iterable[CircuitOp]) -> tuple[CircuitOp, ...]:
    """Insert a MoveMarker before each multiqubit gate whose wires are not
    already covered by the previous multiqubit gate. The first multiqubit
    gate of a step starts from the layout the previous step left behind,
    so it gets no marker."""
    out: list[CircuitOp] = []
    previous: set[int] | None = None
    for op in ops:
        if isinstance(op, GateApplication) and op.rank >= 2:
            wires = set(op.targets)
            if previous is not None and not wires.issubset(previous):
                out.append(MoveMarker())
            previous = wires
        out.append(op)
    return tuple(out)


def build_step_circuit(spec: WalkSpec, gates: NativeGateSet, step_index: int) -> Circuit:
    """Compile one full walk step (coin + shift) to the native gate set."""
    pool = ancilla_requirement(spec, gates.max_rank)
    n_data = spec.data_qubit_count
    ancillas = tuple(range(n_data, n_data + pool))

    compiled: list[CircuitOp] = list(build_coin(spec, step_index))
    for op in build_shift_abstract(spec):
        k = ckx_rank(op.label)
        if k is None or k <= gates.max_rank:
            compiled.append(op)
            continue
        local_ops, used = decompose_ckx(k - 1, gates.max_rank)
        wire_map = dict(enumerate(op.targets))
        for i in range(used):
            wire_map[k + i] = ancillas[i]
        for local in local_ops:
            compiled.append(GateApplication(local.label, tuple(wire_map[w] for w in local.targets)))

    return Circuit(
        qubit_count=n_data + pool,
        ops=_with_move_markers(compiled),
        ancilla_indices=ancillas,
    )


def count_multiqubit_gates(spec: WalkSpec, gates: NativeGateSet | int) -> dict[int, int]:
    """Per-step census of multiqubit gates (rank >= 2) after rank bounding.

    Takes a NativeGateSet or a bare max rank; the latter admits rank 5 for
    the forward-looking gate-set comparison. Pure arithmetic on ladder
    sizes, so ring exponents up to 20 cost nothing.
    """
    max_rank = gates if isinstance(gates, int) else gates.max_rank
    if max_rank < 3:
        raise ValueError("native rank must be at least 3")
    counts: dict[int, int] = {}
    for j in range(1, spec.position_qubits + 1):
        k = spec.position_qubits - j + spec.coin_qubits
        # Each CkX appears once in the increment and once in the decrement.
        if k + 1 <= max_rank:
            counts[k + 1] = counts.get(k + 1, 0) + 2
            continue
        width = max_rank - 2
        m = math.ceil((k - (max_rank - 1)) / width)
        q = k - width * m
        counts[max_rank] = counts.get(max_rank, 0) + 2 * (2 + 4 * (m - 1))
        counts[q + 1] = counts.get(q + 1, 0) + 2 * 2
    return dict(sorted(counts.items()))
