"""Gate-level realization of the weak interaction on four qubits.

Qubit layout: qubits 0, 1 are the first copy (whose basis state selects the
interaction), qubits 2, 3 the second copy; qubit 0 is the most significant
bit of the 16-dimensional index. The closed-form conditional unitary is

    U = |0><0| (x) 1 (x) 1 (x) Rx(-eps)
      + |10><10| (x) Rx(-eps) (x) 1
      + |11><11| (x) exp(-i eps X(x)X)

with Rx(-eps) = exp(-i eps X). The two-qubit block factors over the X
eigenbasis, exp(-i eps X(x)X) = |+><+| (x) Rx(-eps) + |-><-| (x) Rx(+eps),
so a Hadamard sandwich on qubit 2 turns it into two controlled single-qubit
rotations. The assembled gate list must reproduce U exactly for every eps,
not just in the weak regime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .protocol import build_hamiltonian

N_QUBITS = 4
DIM = 16

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

# H_D = |0><+| + |1><-|: swaps the |+>,|-> basis with |0>,|1>.
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate: unitary ``matrix`` on ``targets``, fired when every
    (qubit, value) control matches."""

    label: str
    targets: tuple[int, ...]
    matrix: np.ndarray
    controls: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    gates: tuple[Gate, ...]
    epsilon: float


def x_rotation(epsilon: float) -> np.ndarray:
    """exp(-i epsilon X) = cos(eps) 1 - i sin(eps) X."""
    return qmat.expm_hermitian(_SIGMA_X, -1j * epsilon)


def weak_interaction_unitary(epsilon: float) -> np.ndarray:
    """The closed-form 16x16 conditional unitary generated by the
    conditional-flip Hamiltonian at coupling epsilon."""
    eye2 = np.eye(2, dtype=complex)
    rx = x_rotation(epsilon)
    rxx = qmat.expm_hermitian(np.kron(_SIGMA_X, _SIGMA_X), -1j * epsilon)
    proj0 = np.diag([1.0, 0.0]).astype(complex)
    proj10 = np.zeros((4, 4), dtype=complex)
    proj10[2, 2] = 1.0
    proj11 = np.zeros((4, 4), dtype=complex)
    proj11[3, 3] = 1.0
    return (
        np.kron(proj0, np.kron(eye2, np.kron(eye2, rx)))
        + np.kron(proj10, np.kron(rx, eye2))
        + np.kron(proj11, rxx)
    )


def build_detection_circuit(epsilon: float) -> CircuitSpec:
    """Gate list implementing the conditional unitary.

    * Rx(-eps) on qubit 3, anti-controlled on qubit 0 = 0 (covers the |00>
      and |01> branches).
    * Rx(-eps) on qubit 2, controlled on qubit 0 = 1, qubit 1 = 0.
    * The |11> branch as a Hadamard sandwich on qubit 2 around a pair of
      triply-controlled rotations on qubit 3: Rx(-eps) when qubit 2 = 0
      (the |+> branch after the basis change), Rx(+eps) when qubit 2 = 1.
      The Hadamards carry no controls; outside the |11> branch they cancel.
    """
    rx_minus = x_rotation(epsilon)
    rx_plus = x_rotation(-epsilon)
    gates = (
        Gate("RX(-eps)", (3,), rx_minus, controls=((0, 0),)),
        Gate("RX(-eps)", (2,), rx_minus, controls=((0, 1), (1, 0))),
        Gate("H_D", (2,), HADAMARD),
        Gate("RX(-eps)", (3,), rx_minus, controls=((0, 1), (1, 1), (2, 0))),
        Gate("RX(+eps)", (3,), rx_plus, controls=((0, 1), (1, 1), (2, 1))),
        Gate("H_D", (2,), HADAMARD),
    )
    return CircuitSpec(gates=gates, epsilon=epsilon)


def embed_gate(gate: Gate) -> np.ndarray:
    """Expand a gate into the full 16-dimensional unitary."""
    d = gate.matrix.shape[0]
    if gate.matrix.shape != (d, d) or d != 2 ** len(gate.targets):
        raise ValueError(f"gate {gate.label}: matrix shape {gate.matrix.shape} "
                         f"does not match {len(gate.targets)} target(s)")
    deviation = float(np.max(np.abs(gate.matrix.conj().T @ gate.matrix - np.eye(d))))
    if deviation > 1e-12:
        raise ValueError(f"gate {gate.label} is not unitary ({deviation:.3e})")
    control_qubits = {c for c, _ in gate.controls}
    if control_qubits & set(gate.targets):
        raise ValueError(f"gate {gate.label}: controls overlap targets")
    if any(not 0 <= t < N_QUBITS for t in list(gate.targets) + list(control_qubits)):
        raise ValueError(f"gate {gate.label}: qubit index out of range")

    def bit(state: int, qubit: int) -> int:
        return (state >> (N_QUBITS - 1 - qubit)) & 1

    def set_bits(state: int, local: int) -> int:
        for pos, qubit in enumerate(gate.targets):
            bitval = (local >> (len(gate.targets) - 1 - pos)) & 1
            mask = 1 << (N_QUBITS - 1 - qubit)
            state = (state | mask) if bitval else (state & ~mask)
        return state

    full = np.zeros((DIM, DIM), dtype=complex)
    for col in range(DIM):
        if any(bit(col, q) != v for q, v in gate.controls):
            full[col, col] = 1.0
            continue
        local_in = 0
        for qubit in gate.targets:
            local_in = (local_in << 1) | bit(col, qubit)
        for local_out in range(d):
            row = set_bits(col, local_out)
            full[row, col] += gate.matrix[local_out, local_in]
    return full


def assemble_unitary(spec: CircuitSpec) -> np.ndarray:
    """Product of the gate embeddings in application order."""
    total = np.eye(DIM, dtype=complex)
    for gate in spec.gates:
        total = embed_gate(gate) @ total
    return total


def verify_equivalence(epsilon: float) -> float:
    """Max-entry deviation between the assembled circuit and the
    closed-form conditional unitary."""
    assembled = assemble_unitary(build_detection_circuit(epsilon))
    return float(np.max(np.abs(assembled - weak_interaction_unitary(epsilon))))


def unitary_vs_hamiltonian(epsilon: float) -> float:
    """Max-entry deviation between U(eps) and exp(-i eps H)."""
    direct = weak_interaction_unitary(epsilon)
    exponential = qmat.expm_hermitian(build_hamiltonian().matrix, -1j * epsilon)
    return float(np.max(np.abs(direct - exponential)))


def format_circuit(spec: CircuitSpec) -> str:
    """Plain-text gate list: label, controls, targets."""
    lines = [f"circuit (epsilon = {spec.epsilon!r})"]
    for i, gate in enumerate(spec.gates, start=1):
        controls = (
            ", ".join(f"q{c}={v}" for c, v in gate.controls) if gate.controls else "-"
        )
        targets = ", ".join(f"q{t}" for t in gate.targets)
        lines.append(f"{i}. {gate.label:10s} controls: {controls:24s} targets: {targets}")
    return "\n".join(lines)
