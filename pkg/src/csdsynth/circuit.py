"""
Elementary-gate circuits: CNOT, Ry, Rz and a global phase.

Qubits are numbered from 1 and qubit 1 is the most significant bit of a
basis-state index. Rotations use the ``+i`` sign convention
``R_a(phi) = exp(+i a.sigma phi / 2)``, so that

    Rz(phi) = diag(e^{i phi/2}, e^{-i phi/2})
    Ry(phi) = [[cos phi/2,  sin phi/2],
               [-sin phi/2, cos phi/2]]

Gates are listed in application order: ``gates[0]`` acts on the state first.
"""
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .exceptions import IndexOutOfRangeError, ShapeMismatchError
from .matcore import UnitaryMatrix

PRUNE_TOL = 1e-12


def rz_matrix(phi):
    return np.array([[np.exp(0.5j * phi), 0.0], [0.0, np.exp(-0.5j * phi)]])


def ry_matrix(phi):
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def rotation_matrix(axis, phi):
    if axis == "Y":
        return ry_matrix(phi)
    if axis == "Z":
        return rz_matrix(phi)
    raise ValueError(f"unsupported rotation axis {axis!r}")


@dataclass(frozen=True)
class Cnot:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("CNOT control and target must differ")


@dataclass(frozen=True)
class Rot:
    axis: str
    qubit: int
    angle: float

    def __post_init__(self):
        if self.axis not in ("Y", "Z"):
            raise ValueError(f"rotation axis must be 'Y' or 'Z', got {self.axis!r}")


@dataclass(frozen=True)
class GlobalPhase:
    angle: float


Gate = Union[Cnot, Rot, GlobalPhase]


def gate_qubits(g):
    if isinstance(g, Cnot):
        return (g.control, g.target)
    if isinstance(g, Rot):
        return (g.qubit,)
    return ()


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        phases = 0
        for g in self.gates:
            for q in gate_qubits(g):
                if not 1 <= q <= self.n:
                    raise IndexOutOfRangeError(f"qubit {q} outside 1..{self.n} in {g}")
            phases += isinstance(g, GlobalPhase)
        if phases > 1:
            raise ValueError("a circuit holds at most one global phase gate")

    def __len__(self):
        return len(self.gates)

    def inverse(self):
        inv = []
        for g in reversed(self.gates):
            if isinstance(g, Rot):
                inv.append(Rot(g.axis, g.qubit, -g.angle))
            elif isinstance(g, GlobalPhase):
                inv.append(GlobalPhase(-g.angle))
            else:
                inv.append(g)
        return Circuit(self.n, inv)


class GateCounts(NamedTuple):
    cnot: int
    one_qubit: int

    def __add__(self, other):
        return GateCounts(self.cnot + other.cnot, self.one_qubit + other.one_qubit)


def _apply_inplace(psi, n, g):
    # psi has shape (2,)*n + (batch,)
    if isinstance(g, GlobalPhase):
        psi *= np.exp(1j * g.angle)
    elif isinstance(g, Rot):
        ax = g.qubit - 1
        s0 = psi[(slice(None),) * ax + (0,)]
        s1 = psi[(slice(None),) * ax + (1,)]
        if g.axis == "Z":
            s0 *= np.exp(0.5j * g.angle)
            s1 *= np.exp(-0.5j * g.angle)
        else:
            c, s = np.cos(g.angle / 2), np.sin(g.angle / 2)
            tmp = s0.copy()
            s0 *= c
            s0 += s * s1
            s1 *= c
            s1 -= s * tmp
    else:
        idx = [slice(None)] * (n + 1)
        idx[g.control - 1] = 1
        idx[g.target - 1] = 0
        a = tuple(idx)
        idx[g.target - 1] = 1
        b = tuple(idx)
        tmp = psi[a].copy()
        psi[a] = psi[b]
        psi[b] = tmp


def apply_gate(state, g, n=None):
    """Apply one gate to a state vector of length ``2^n`` and return the result."""
    state = np.asarray(state, dtype=np.complex128)
    dim = state.shape[0]
    if n is None:
        n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ShapeMismatchError(f"state of length {dim} does not match {n} qubits")
    for q in gate_qubits(g):
        if not 1 <= q <= n:
            raise IndexOutOfRangeError(f"qubit {q} outside 1..{n}")
    psi = state.reshape((dim, -1)).copy()
    _apply_inplace(psi.reshape((2,) * n + (psi.shape[1],)), n, g)
    return psi.reshape(state.shape)


def _target_of(g):
    if isinstance(g, Cnot):
        return g.target
    if isinstance(g, Rot):
        return g.qubit
    return None


def _runs(gates):
    """Split into maximal runs of gates that all act on the same target qubit."""
    run, target = [], None
    for g in gates:
        t = _target_of(g)
        if run and (t is None or t != target):
            yield target, run
            run = []
        run.append(g)
        target = t
    if run:
        yield target, run


def _fused_blocks(n, target, run):
    """Per-configuration 2x2 operators on ``target`` for a run of gates.

    Configurations enumerate the other qubits in ascending order.
    """
    others = [q for q in range(1, n + 1) if q != target]
    config = np.arange(1 << (n - 1))
    w = np.zeros((1 << (n - 1), 2, 2), dtype=np.complex128)
    w[:, 0, 0] = w[:, 1, 1] = 1.0
    for g in run:
        if isinstance(g, Cnot):
            pos = others.index(g.control)
            on = ((config >> (n - 2 - pos)) & 1).astype(bool)
            w[on] = w[on][:, ::-1, :]
        elif g.axis == "Z":
            w[:, 0, :] *= np.exp(0.5j * g.angle)
            w[:, 1, :] *= np.exp(-0.5j * g.angle)
        else:
            c, s = np.cos(g.angle / 2), np.sin(g.angle / 2)
            top = w[:, 0, :].copy()
            w[:, 0, :] = c * top + s * w[:, 1, :]
            w[:, 1, :] = -s * top + c * w[:, 1, :]
    return w


def simulate(circuit, states, fuse=True):
    """Apply ``circuit`` to the columns of ``states`` (shape ``(2^n, batch)``).

    With ``fuse`` each run of gates sharing a target qubit (a rotation /
    CNOT ladder) is first multiplied into one uniformly controlled 2x2
    operator and applied in a single pass; ``fuse=False`` applies gates one
    at a time.
    """
    n = circuit.n
    psi = np.array(states, dtype=np.complex128, copy=True)
    if psi.shape[0] != 1 << n:
        raise ShapeMismatchError(f"states have leading dimension {psi.shape[0]}, expected {1 << n}")
    cols = psi.reshape(1 << n, -1).shape[1]
    view = psi.reshape((2,) * n + (cols,))
    if not fuse:
        for g in circuit.gates:
            _apply_inplace(view, n, g)
        return psi
    flat = psi.reshape(1 << n, cols)
    for target, run in _runs(circuit.gates):
        if target is None or len(run) == 1:
            for g in run:
                _apply_inplace(view, n, g)
            continue
        w = _fused_blocks(n, target, run).reshape(1 << (target - 1), 1 << (n - target), 2, 2)
        v = flat.reshape(1 << (target - 1), 2, 1 << (n - target), cols)
        v[...] = np.einsum("abij,ajbc->aibc", w, v)
    return psi


def reconstruct(circuit):
    """The exact ``2^n x 2^n`` matrix of the circuit, global phase included."""
    m = simulate(circuit, np.eye(1 << circuit.n, dtype=np.complex128))
    m.flags.writeable = False
    return UnitaryMatrix(m)


def count_gates(circuit):
    cnot = sum(isinstance(g, Cnot) for g in circuit.gates)
    return GateCounts(cnot, len(circuit.gates) - cnot)


def cancel_adjacent_cnots(circuit):
    """Remove pairs of identical CNOTs that are consecutive in the gate list.

    Cancellation cascades: removing a pair can make its neighbours adjacent.
    """
    out = []
    for g in circuit.gates:
        if isinstance(g, Cnot) and out and out[-1] == g:
            out.pop()
        else:
            out.append(g)
    return Circuit(circuit.n, out)


def prune_small_rotations(circuit, tol=PRUNE_TOL):
    """Drop rotations and phases with ``|angle| < tol``, then cancel exposed CNOT pairs."""
    kept = [g for g in circuit.gates if isinstance(g, Cnot) or abs(g.angle) >= tol]
    return cancel_adjacent_cnots(Circuit(circuit.n, kept))
