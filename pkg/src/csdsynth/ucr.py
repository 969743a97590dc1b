"""
Uniformly controlled (multiplexed) Y and Z rotations and their expansion into
alternating rotation / CNOT sequences with Gray-code control placement.
"""
from dataclasses import dataclass

import numpy as np

from .circuit import Cnot, Rot, rotation_matrix
from .exceptions import IndexOutOfRangeError
from .graycode import binary_reflected_gray, solve_rotation_angles, transition_positions
from .matcore import UnitaryMatrix


@dataclass(frozen=True, eq=False)
class UCRotation:
    """Rotation of ``target`` about ``axis`` by ``angles[c]``, where ``c`` is the
    classical value of ``controls`` read as a binary number (first control is
    the most significant bit).
    """

    axis: str
    target: int
    controls: tuple
    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        angles = np.array(self.angles, dtype=float).reshape(-1)
        angles.flags.writeable = False
        object.__setattr__(self, "angles", angles)
        if self.axis not in ("Y", "Z"):
            raise ValueError(f"axis must be 'Y' or 'Z', got {self.axis!r}")
        if len(set(self.controls)) != len(self.controls) or self.target in self.controls:
            raise ValueError("controls must be distinct and exclude the target")
        if angles.shape[0] != 1 << self.k:
            raise ValueError(f"{self.k} controls need {1 << self.k} angles, got {angles.shape[0]}")

    @property
    def k(self):
        return len(self.controls)

    def qubits(self):
        return self.controls + (self.target,)


def _check_width(f, n):
    for q in f.qubits():
        if not 1 <= q <= n:
            raise IndexOutOfRangeError(f"qubit {q} outside 1..{n}")


def control_values(controls, n):
    """Classical value of ``controls`` for every basis index of an n-qubit register."""
    idx = np.arange(1 << n)
    value = np.zeros(1 << n, dtype=np.int64)
    for c in controls:
        value = (value << 1) | ((idx >> (n - c)) & 1)
    return value


def ucr_matrix(f, n):
    """Full ``2^n x 2^n`` matrix of a uniformly controlled rotation."""
    _check_width(f, n)
    d = 1 << n
    tbit = 1 << (n - f.target)
    idx = np.arange(d)
    lo = idx[(idx & tbit) == 0]
    hi = lo | tbit
    ctrl = control_values(f.controls, n)[lo]
    half = f.angles[ctrl] / 2
    m = np.zeros((d, d), dtype=np.complex128)
    if f.axis == "Z":
        m[lo, lo] = np.exp(1j * half)
        m[hi, hi] = np.exp(-1j * half)
    else:
        c, s = np.cos(half), np.sin(half)
        m[lo, lo] = c
        m[lo, hi] = s
        m[hi, lo] = -s
        m[hi, hi] = c
    return UnitaryMatrix(m)


def ucr_matrix_bruteforce(f, n, order=None):
    """Product of the ``2^k`` individually k-fold controlled rotations.

    Slow reference used by tests; ``order`` permutes the factors.
    """
    _check_width(f, n)
    d = 1 << n
    ctrl = control_values(f.controls, n)
    tbit = 1 << (n - f.target)
    out = np.eye(d, dtype=np.complex128)
    for value in (range(1 << f.k) if order is None else order):
        r = rotation_matrix(f.axis, f.angles[value])
        g = np.eye(d, dtype=np.complex128)
        for x in range(d):
            if ctrl[x] != value:
                continue
            b = 1 if x & tbit else 0
            base = x & ~tbit
            g[x, base] = r[b, 0]
            g[x, base | tbit] = r[b, 1]
        out = g @ out
    return out


def expand_ucr(f, code=None, mirrored=False):
    """Rotation / CNOT sequence implementing ``f``.

    The normal form is ``R(t1) CX(c1) R(t2) CX(c2) ... R(tN) CX(cN)``, where
    ``c_l`` is the control sitting at the l-th Gray-code transition. The
    mirrored form lists the same gates in reverse order with the same angles:
    the reversed list is the inverse of the normal circuit built from
    ``-theta``, which implements the inverse of ``f`` with negated angles,
    i.e. ``f`` itself.

    Returns
    -------
    list of Gate
    """
    code = binary_reflected_gray(f.k) if code is None else code
    if code.k != f.k:
        raise ValueError(f"Gray code has {code.k} bits but the rotation has {f.k} controls")
    if f.k == 0:
        return [Rot(f.axis, f.target, float(f.angles[0]))]
    thetas = solve_rotation_angles(f.angles, code)
    positions = transition_positions(code)
    gates = []
    for theta, pos in zip(thetas, positions):
        gates.append(Rot(f.axis, f.target, float(theta)))
        gates.append(Cnot(f.controls[pos - 1], f.target))
    if mirrored:
        gates.reverse()
    return gates


def expand_ucr_mirrored(f, code=None):
    return expand_ucr(f, code, mirrored=True)
