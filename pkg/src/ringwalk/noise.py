"""Scalar noise channels: SPAM and passive T1 waiting error.

Every channel here multiplies the whole statevector by a real factor in
(0, 1], so channels commute with everything and the accumulated factor is
auditable. The rates are population losses: a qubit exposed to error eps
keeps probability 1 - eps, so the statevector is scaled by
(1 - eps) ** (count / 2). The factor helpers are the single source of
truth; the apply_* wrappers scale a state and the simulation loop logs the
same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .statevector import StateVector, scale_amplitudes


@dataclass(frozen=True)
class NoiseParams:
    """Error rates and timing constants, defaulting to the published values.

    eps_init and eps_read are per-qubit population losses at preparation
    and at each readout evaluation. T1 drives the waiting error
    1 - exp(-dt/T1) during gates (idle qubits only) and movements (all
    qubits). moves_per_step, when set, replaces marker-driven movement
    counting with a fixed number of rearrangements per step.
    """

    eps_init: float = 0.003
    eps_read: float = 0.0017
    t1: float = 4.0
    tau_gate: float = 1.8e-6
    tau_move: float = 100e-6
    gate_errors_enabled: bool = True
    passive_enabled: bool = True
    spam_enabled: bool = True
    moves_per_step: int | None = None

    def __post_init__(self) -> None:
        for name in ("eps_init", "eps_read"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} = {value} outside [0, 1]")
        for name in ("t1", "tau_gate", "tau_move"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.moves_per_step is not None and self.moves_per_step < 0:
            raise ValueError("moves_per_step must be nonnegative")


IDEAL = NoiseParams(gate_errors_enabled=False, passive_enabled=False, spam_enabled=False)


def wait_error(dt: float, t1: float) -> float:
    """Population decay probability 1 - exp(-dt/T1) for an idle interval."""
    if dt < 0:
        raise ValueError("idle interval cannot be negative")
    if t1 <= 0:
        raise ValueError("T1 must be positive")
    return -math.expm1(-dt / t1)


def state_prep_factor(params: NoiseParams, qubit_count: int) -> float:
    if not params.spam_enabled:
        return 1.0
    return (1.0 - params.eps_init) ** (0.5 * qubit_count)


def readout_factor(params: NoiseParams, qubit_count: int) -> float:
    if not params.spam_enabled:
        return 1.0
    return (1.0 - params.eps_read) ** (0.5 * qubit_count)


def idle_factor(params: NoiseParams, qubit_count: int, active_count: int) -> float:
    """Damping for the qubits that sit out one multiqubit gate."""
    if not params.passive_enabled:
        return 1.0
    if active_count > qubit_count:
        raise ValueError("more active qubits than qubits")
    eps = wait_error(params.tau_gate, params.t1)
    return (1.0 - eps) ** (0.5 * (qubit_count - active_count))


def movement_factor(params: NoiseParams, qubit_count: int) -> float:
    """Damping for one rearrangement; every qubit rides out tau_move."""
    if not params.passive_enabled:
        return 1.0
    eps = wait_error(params.tau_move, params.t1)
    return (1.0 - eps) ** (0.5 * qubit_count)


def apply_state_prep(state: StateVector, params: NoiseParams) -> StateVector:
    """Per-qubit preparation loss, applied once to the fresh register."""
    return scale_amplitudes(state, state_prep_factor(params, state.qubit_count))


def apply_readout(state: StateVector, params: NoiseParams) -> StateVector:
    """Per-qubit readout loss on an evaluation snapshot.

    Returns a new state; callers keep evolving the original, since the
    walk is not actually interrupted by the per-step evaluations.
    """
    return scale_amplitudes(state, readout_factor(params, state.qubit_count))


def idle_damping_for_gate(state: StateVector, active_qubits: Iterable[int], params: NoiseParams) -> StateVector:
    active = tuple(active_qubits)
    if any(not 0 <= q < state.qubit_count for q in active):
        raise ValueError("active qubit out of range")
    return scale_amplitudes(state, idle_factor(params, state.qubit_count, len(active)))


def movement_damping(state: StateVector, params: NoiseParams) -> StateVector:
    return scale_amplitudes(state, movement_factor(params, state.qubit_count))
