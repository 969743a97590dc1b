"""
Decomposition of 2x2-block-diagonal unitaries (blocks act on the last qubit,
selected by the value of qubits ``1..n-1``) into uniformly controlled Z and
Y rotations, plus the diagonal-gate cascade.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .circuit import ry_matrix, rz_matrix
from .exceptions import NotPowerOfTwoError, NotUnitaryError
from .matcore import DEFAULT_UNITARITY_TOL, is_power_of_two
from .ucr import UCRotation

DEGENERATE_TOL = 1e-14


class ZYZAngles(NamedTuple):
    """``u = e^{i phase} Rz(z1) Ry(y) Rz(z2)``."""

    phase: float
    z1: float
    y: float
    z2: float


def _zyz_many(blocks):
    """Vectorised ZYZ angles for a stack of 2x2 unitaries, shape (K, 2, 2)."""
    det = blocks[:, 0, 0] * blocks[:, 1, 1] - blocks[:, 0, 1] * blocks[:, 1, 0]
    phase = np.angle(det) / 2
    rot = np.exp(-1j * phase)
    a = blocks[:, 0, 0] * rot
    b = blocks[:, 0, 1] * rot
    abs_a, abs_b = np.abs(a), np.abs(b)
    y = 2 * np.arctan2(abs_b, abs_a)
    arg_a, arg_b = np.angle(a), np.angle(b)
    z1 = arg_a + arg_b
    z2 = arg_a - arg_b
    # ZYZ is not unique when y is 0 or pi; put the whole z content in z1
    no_b = abs_b <= DEGENERATE_TOL
    no_a = abs_a <= DEGENERATE_TOL
    z1 = np.where(no_b, 2 * arg_a, np.where(no_a, 2 * arg_b, z1))
    z2 = np.where(no_a | no_b, 0.0, z2)
    return phase, z1, y, z2


def _check_blocks_unitary(blocks, tol):
    gram = np.einsum("kji,kjl->kil", blocks.conj(), blocks)
    dev = float(np.max(np.abs(gram - np.eye(2)))) if len(blocks) else 0.0
    if dev > tol:
        raise NotUnitaryError(dev, tol)


def zyz_decompose(u, tol=DEFAULT_UNITARITY_TOL):
    """Euler angles with ``y`` in ``[0, pi]`` and ``phase`` in ``(-pi/2, pi/2]``."""
    blocks = np.asarray(u, dtype=np.complex128).reshape(1, 2, 2)
    _check_blocks_unitary(blocks, tol)
    phase, z1, y, z2 = _zyz_many(blocks)
    return ZYZAngles(float(phase[0]), float(z1[0]), float(y[0]), float(z2[0]))


def zyz_matrix(angles):
    phase, z1, y, z2 = angles
    return np.exp(1j * phase) * rz_matrix(z1) @ ry_matrix(y) @ rz_matrix(z2)


@dataclass(frozen=True, eq=False)
class BlockDiagUnitary:
    n: int
    blocks: np.ndarray

    def __post_init__(self):
        blocks = np.array(self.blocks, dtype=np.complex128)
        if blocks.shape != (1 << (self.n - 1), 2, 2):
            raise ValueError(f"expected {1 << (self.n - 1)} blocks of 2x2, got shape {blocks.shape}")
        blocks.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_matrix(cls, m, tol=1e-12):
        m = np.asarray(m, dtype=np.complex128)
        d = m.shape[0]
        n = d.bit_length() - 1
        blocks = np.stack([m[2 * k:2 * k + 2, 2 * k:2 * k + 2] for k in range(d // 2)])
        if np.linalg.norm(m - _block_diag_matrix(blocks)) > tol:
            raise ValueError("matrix is not 2x2 block diagonal")
        return cls(n, blocks)

    def matrix(self):
        return _block_diag_matrix(self.blocks)

    def left_phase(self, phases):
        """``diag(e^{i phases}) @ self`` as a new block-diagonal unitary."""
        return BlockDiagUnitary(self.n, self.blocks * np.exp(1j * np.asarray(phases)).reshape(-1, 2, 1))

    def right_phase(self, phases):
        return BlockDiagUnitary(self.n, self.blocks * np.exp(1j * np.asarray(phases)).reshape(-1, 1, 2))


def _block_diag_matrix(blocks):
    k = blocks.shape[0]
    m = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    idx = np.arange(k)
    for a in range(2):
        for b in range(2):
            m[2 * idx + a, 2 * idx + b] = blocks[:, a, b]
    return m


@dataclass(frozen=True, eq=False)
class PhasePattern:
    """Diagonal phase matrix at recursion level ``level`` whose phase vector is
    unchanged when bit ``level`` of the basis index flips.

    ``free_angles`` holds the ``2^(n-1)`` phases of the basis states with
    that bit cleared, in index order.
    """

    n: int
    level: int
    free_angles: np.ndarray

    def expand(self):
        """Full length ``2^n`` phase vector."""
        return _insert_bit_pair(np.asarray(self.free_angles, dtype=float), self.n, self.level)

    def matrix(self):
        return np.diag(np.exp(1j * self.expand()))


def _insert_bit_pair(values, n, qubit):
    # duplicate each value across both settings of `qubit`
    high = 1 << (qubit - 1)
    v = values.reshape(high, 1, -1)
    return np.concatenate([v, v], axis=1).reshape(1 << n)


def split_phases(phases, n, qubit):
    """Split a phase vector into parts symmetric and antisymmetric under flipping ``qubit``."""
    v = np.asarray(phases, dtype=float).reshape(1 << (qubit - 1), 2, -1)
    sym = (v[:, 0, :] + v[:, 1, :]) / 2
    anti = (v[:, 0, :] - v[:, 1, :]) / 2
    return sym.reshape(-1), anti.reshape(-1)


def all_but(n, qubit):
    return tuple(q for q in range(1, n + 1) if q != qubit)


def _residual_phases(phase, z2):
    # diag_k(e^{i phase_k} Rz(z2_k)) as a length-2^n phase vector
    return np.stack([phase + z2 / 2, phase - z2 / 2], axis=1).reshape(-1)


def decompose_bj(u, level, tol=DEFAULT_UNITARITY_TOL):
    """Split a block-diagonal factor into three uniformly controlled rotations.

    Returns ``(z_n, y_n, z_level, pattern)`` with

        u @ pattern.matrix() == ucr(z_n) @ ucr(y_n) @ ucr(z_level)

    ``pattern`` is the phase matrix to be cancelled by its inverse in the
    neighbouring factor.
    """
    n = u.n
    if not 1 <= level <= n - 1:
        raise ValueError(f"level {level} out of range 1..{n - 1}")
    _check_blocks_unitary(u.blocks, tol)
    phase, z1, y, z2 = _zyz_many(u.blocks)
    controls = tuple(range(1, n))
    sym, anti = split_phases(_residual_phases(phase, z2), n, level)
    z_n = UCRotation("Z", n, controls, z1)
    y_n = UCRotation("Y", n, controls, y)
    z_level = UCRotation("Z", level, all_but(n, level), 2 * anti)
    return z_n, y_n, z_level, PhasePattern(n, level, -sym)


def decompose_last_block(u, tol=DEFAULT_UNITARITY_TOL):
    """``u = ucr(z_n) @ ucr(y_n) @ ucr(z2_n) @ diag_k(e^{i phases_k} I_2)``."""
    _check_blocks_unitary(u.blocks, tol)
    phase, z1, y, z2 = _zyz_many(u.blocks)
    controls = tuple(range(1, u.n))
    return (
        UCRotation("Z", u.n, controls, z1),
        UCRotation("Y", u.n, controls, y),
        UCRotation("Z", u.n, controls, z2),
        phase,
    )


def decompose_diagonal(phases):
    """Cascade of uniformly controlled Z rotations for ``diag(e^{i phases})``.

    ``phases`` has length ``2^m`` and acts on qubits ``1..m``. Returns the
    rotations with targets ``m, m-1, ..., 1`` (target ``t`` controlled by
    ``1..t-1``) and the leftover global phase.
    """
    v = np.asarray(phases, dtype=float).reshape(-1)
    if not is_power_of_two(v.shape[0]):
        raise NotPowerOfTwoError(f"{v.shape[0]} phases is not a power of two")
    m = v.shape[0].bit_length() - 1
    cascade = []
    for t in range(m, 0, -1):
        pairs = v.reshape(-1, 2)
        cascade.append(UCRotation("Z", t, tuple(range(1, t)), pairs[:, 0] - pairs[:, 1]))
        v = pairs.mean(axis=1)
    return cascade, float(v[0])
