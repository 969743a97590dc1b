"""
Full synthesis: recursive cosine-sine decomposition down to 2x2-block-diagonal
factors, phase-pattern absorption, and emission of the elementary-gate circuit.

For ``N = 2^(n-1)`` the unitary is factored as

    U = B_1 A_1 B_2 A_2 ... B_{N-1} A_{N-1} B_N

where ``A_j`` is a cosine-sine factor acting on qubit ``gamma(j)`` and every
``B_j`` is 2x2-block-diagonal on qubit ``n``.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .blockdiag import (
    BlockDiagUnitary,
    PhasePattern,
    all_but,
    decompose_bj,
    decompose_diagonal,
    decompose_last_block,
    zyz_decompose,
)
from .circuit import Circuit, GateCounts, GlobalPhase, Rot, cancel_adjacent_cnots, count_gates, prune_small_rotations
from .circuit import reconstruct
from .csd import cs_decompose_stack
from .exceptions import NotPowerOfTwoError, PlanVerificationFailure
from .graycode import binary_reflected_gray, gamma
from .matcore import (
    DEFAULT_UNITARITY_TOL,
    frobenius_distance,
    is_power_of_two,
    nearest_unitary,
    unitarity_deviation,
    validate_unitary,
)
from .ucr import UCRotation, expand_ucr

PLAN_TOL = 1e-9
# inputs further than this from unitary are projected before decomposition
PROJECTION_TOL = 1e-12


def expected_cnot_count(n):
    return 4 ** n - 2 ** (n + 1)


def expected_one_qubit_count(n):
    return 4 ** n


def cnot_lower_bound(n):
    """Ceiling of ``(4^n - 3n - 1) / 4``."""
    return -((-(4 ** n - 3 * n - 1)) // 4)


@dataclass(frozen=True, eq=False)
class AFactor:
    position: int
    level: int
    thetas: np.ndarray

    def ucr(self, n):
        """The factor as a uniformly controlled Y rotation; ``[[c, s], [-s, c]]`` is ``Ry(2 theta)``."""
        return UCRotation("Y", self.level, all_but(n, self.level), 2 * self.thetas)


@dataclass(frozen=True, eq=False)
class DecompositionPlan:
    """Factor chain of a unitary after phase absorption.

    ``b_factors[j]`` already includes both its own phase pattern and the
    inverse pattern pushed in from the factor on its left, so the plain
    product ``B_1 A_1 ... B_N`` reconstructs the input.
    """

    n: int
    a_factors: list
    b_factors: list
    patterns: list
    section_ucrs: list
    last_ucrs: tuple
    diagonal_cascade: list
    global_phase: float

    def factors(self):
        """Interleaved factor list in matrix-product order."""
        out = []
        for j, b in enumerate(self.b_factors):
            out.append(b)
            if j < len(self.a_factors):
                out.append(self.a_factors[j])
        return out


def apply_factor(factor, m, n):
    """``factor @ m`` for a block-diagonal or cosine-sine factor, without forming it densely."""
    m = np.asarray(m, dtype=np.complex128)
    cols = m.shape[1]
    if isinstance(factor, BlockDiagUnitary):
        v = m.reshape(-1, 2, cols)
        return np.einsum("kab,kbc->kac", factor.blocks, v).reshape(m.shape)
    lvl = factor.level
    v = m.reshape(1 << (lvl - 1), 2, 1 << (n - lvl), cols)
    th = factor.thetas.reshape(1 << (lvl - 1), 1 << (n - lvl), 1)
    c, s = np.cos(th), np.sin(th)
    out = np.empty_like(v)
    out[:, 0] = c * v[:, 0] + s * v[:, 1]
    out[:, 1] = -s * v[:, 0] + c * v[:, 1]
    return out.reshape(m.shape)


def factor_product(factors, n):
    m = np.eye(1 << n, dtype=np.complex128)
    for f in reversed(factors):
        m = apply_factor(f, m, n)
    return m


def csd_factor_chain(u):
    """Raw recursive factorisation before any phase absorption.

    All blocks at one recursion level are decomposed together. Returns
    ``(b_factors, a_factors)`` in matrix-product order, ``len(b) == len(a) + 1``.
    """
    a = validate_unitary(u).matrix
    n = a.shape[0].bit_length() - 1
    if n < 2:
        raise ValueError("the factor chain needs at least two qubits")
    # blocks[i] has shape (factors, blocks per factor, d, d) at recursion level i
    blocks = {0: a[np.newaxis, np.newaxis]}
    thetas = {}
    for i in range(1, n):
        prev = blocks[i - 1]
        nf, nb, d = prev.shape[0], prev.shape[1], prev.shape[2]
        h = d // 2
        f = cs_decompose_stack(prev.reshape(nf * nb, d, d))
        nxt = np.empty((2 * nf, 2 * nb, h, h), dtype=np.complex128)
        nxt[0::2] = np.stack([f.u11, f.u12], axis=1).reshape(nf, 2 * nb, h, h)
        nxt[1::2] = np.stack([f.u21, f.u22], axis=1).reshape(nf, 2 * nb, h, h)
        blocks[i] = nxt
        thetas[i] = f.thetas.reshape(nf, nb * h)

    chain = []

    def walk(i, idx):
        if i == n - 1:
            chain.append(BlockDiagUnitary(n, blocks[i][idx]))
            return
        walk(i + 1, 2 * idx)
        chain.append((i + 1, thetas[i + 1][idx]))
        walk(i + 1, 2 * idx + 1)

    walk(0, 0)
    b_factors = chain[0::2]
    a_factors = []
    for j, (level, th) in enumerate(chain[1::2], start=1):
        if level != gamma(j, n):
            raise AssertionError(f"factor {j} sits at level {level}, expected {gamma(j, n)}")
        a_factors.append(AFactor(j, level, th))
    return b_factors, a_factors


def build_plan(u, verify=True):
    """Recursive decomposition with phase absorption, swept left to right.

    The phase pattern freed while decomposing ``B_j`` commutes with ``A_j``,
    so its inverse is multiplied into ``B_{j+1}`` before that factor is
    decomposed.
    """
    u = validate_unitary(u)
    n = u.n_qubits
    raw_b, a_factors = csd_factor_chain(u)
    b_factors, patterns, sections = [], [], []
    carry = None
    for j, a in enumerate(a_factors, start=1):
        b = raw_b[j - 1] if carry is None else raw_b[j - 1].left_phase(-carry)
        z_n, y_n, z_lvl, pattern = decompose_bj(b, a.level)
        carry = pattern.expand()
        b_factors.append(b.right_phase(carry))
        patterns.append(pattern)
        sections.append((z_n, y_n, z_lvl))
    last = raw_b[-1] if carry is None else raw_b[-1].left_phase(-carry)
    b_factors.append(last)
    z_n, y_n, z2_n, phases = decompose_last_block(last)
    cascade, gphase = decompose_diagonal(phases)
    plan = DecompositionPlan(n, a_factors, b_factors, patterns, sections, (z_n, y_n, z2_n), cascade, gphase)
    if verify:
        residual = np.linalg.norm(factor_product(plan.factors(), n) - u.matrix)
        if not residual <= PLAN_TOL:
            raise PlanVerificationFailure(residual, PLAN_TOL)
    return plan


@dataclass
class SynthesisReport:
    n: int
    counts: GateCounts
    expected_cnot: int
    expected_one_qubit: int
    lower_bound_cnot: int
    reconstruction_error: float = float("nan")
    elapsed: float = 0.0
    sections: list = field(default_factory=list)

    def as_dict(self):
        return {
            "cnot": self.counts.cnot,
            "one_qubit": self.counts.one_qubit,
            "expected_cnot": self.expected_cnot,
            "expected_one_qubit": self.expected_one_qubit,
            "lower_bound": self.lower_bound_cnot,
            "frobenius_error": self.reconstruction_error,
            "elapsed_ms": self.elapsed * 1e3,
        }

    def format(self):
        lines = []
        for key, value in self.as_dict().items():
            if isinstance(value, float):
                value = "skipped" if math.isnan(value) else f"{value:.3e}" if key != "elapsed_ms" else f"{value:.1f}"
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"


def _gray_for(gray):
    if gray is None:
        return binary_reflected_gray
    if callable(gray):
        return gray
    raise TypeError("gray must be None or a callable mapping bit count k to a GrayCode")


def _emit(ucr, gray, mirrored=False):
    return expand_ucr(ucr, gray(ucr.k), mirrored=mirrored)


def _section(n, gates):
    c = cancel_adjacent_cnots(Circuit(n, gates))
    return list(c.gates), count_gates(c)


def _finish(n, sections, u_matrix, prune_zero, verify, start, expected):
    gates = [g for s, _ in sections for g in s]
    circuit = cancel_adjacent_cnots(Circuit(n, gates))
    if prune_zero:
        circuit = prune_small_rotations(circuit)
    report = SynthesisReport(
        n=n,
        counts=count_gates(circuit),
        expected_cnot=expected[0],
        expected_one_qubit=expected[1],
        lower_bound_cnot=cnot_lower_bound(n),
        sections=[counts for _, counts in sections],
    )
    if verify:
        report.reconstruction_error = frobenius_distance(reconstruct(circuit), u_matrix)
    report.elapsed = time.perf_counter() - start
    return circuit, report


def synthesize(u, mirror=True, prune_zero=False, gray=None, verify=True, tol=DEFAULT_UNITARITY_TOL):
    """Synthesize a circuit whose matrix equals ``u`` exactly, global phase included.

    Gates are emitted in application order, i.e. the factor chain read from
    right to left: the last block (phase cascade, then Z, Y, Z rotations on
    qubit n) first, then one section per cosine-sine factor. With ``mirror``
    each pair of same-target rotations is emitted normal then mirrored, which
    puts two identical CNOTs next to each other at the seam; these are
    removed per section.

    Parameters
    ----------
    u : array-like or UnitaryMatrix, shape (2^n, 2^n)
    mirror : bool
        Emit every second same-target rotation mirrored so seam CNOTs cancel.
    prune_zero : bool
        Drop rotations with ``|angle| < 1e-12`` afterwards.
    gray : callable, optional
        ``k -> GrayCode`` used for control placement; binary reflected by default.
    verify : bool
        Reconstruct the circuit and record the Frobenius error in the report.
    tol : float
        Unitarity tolerance for ``u``. Inputs that pass only a loose ``tol``
        are replaced by their nearest unitary before decomposition; the
        reported error is still measured against ``u`` itself.

    Returns
    -------
    circuit : Circuit
    report : SynthesisReport
        ``report.sections`` lists counts per section in emission order; the
        last block comes first.
    """
    start = time.perf_counter()
    u = validate_unitary(u, tol)
    target = u.matrix
    if unitarity_deviation(target) > PROJECTION_TOL:
        # accepted at a loose tol; decompose the closest exact unitary
        u = validate_unitary(nearest_unitary(target))
    n = u.n_qubits
    gray = _gray_for(gray)
    expected = (expected_cnot_count(n), expected_one_qubit_count(n))
    if n == 1:
        phase, z1, y, z2 = zyz_decompose(u.matrix)
        gates = [Rot("Z", 1, z2), Rot("Y", 1, y), Rot("Z", 1, z1), GlobalPhase(phase)]
        return _finish(n, [_section(n, gates)], target, prune_zero, verify, start, expected)

    plan = build_plan(u)
    sections = []
    z_n, y_n, z2_n = plan.last_ucrs
    gates = [GlobalPhase(plan.global_phase)]
    for f in reversed(plan.diagonal_cascade):
        gates += _emit(f, gray)
    gates += _emit(z2_n, gray)
    gates += _emit(y_n, gray, mirrored=mirror)
    gates += _emit(z_n, gray)
    sections.append(_section(n, gates))
    for a, (z_n, y_n, z_lvl) in zip(reversed(plan.a_factors), reversed(plan.section_ucrs)):
        gates = _emit(a.ucr(n), gray)
        gates += _emit(z_lvl, gray, mirrored=mirror)
        gates += _emit(y_n, gray)
        gates += _emit(z_n, gray, mirrored=mirror)
        sections.append(_section(n, gates))
    return _finish(n, sections, target, prune_zero, verify, start, expected)


def synthesize_diagonal(phases, prune_zero=False, gray=None, verify=True):
    """Circuit for ``diag(exp(i * phases))`` with ``2^n - 2`` CNOTs and ``2^n`` one-qubit gates."""
    start = time.perf_counter()
    phases = np.asarray(phases, dtype=float).reshape(-1)
    d = phases.shape[0]
    if d < 2 or not is_power_of_two(d):
        raise NotPowerOfTwoError(f"{d} phases is not a power of two >= 2")
    if not np.all(np.isfinite(phases)):
        raise ValueError("phases contain NaN or Inf")
    n = d.bit_length() - 1
    gray = _gray_for(gray)
    cascade, gphase = decompose_diagonal(phases)
    gates = [GlobalPhase(gphase)]
    for f in reversed(cascade):
        gates += _emit(f, gray)
    target = np.diag(np.exp(1j * phases))
    return _finish(n, [_section(n, gates)], target, prune_zero, verify, start, (d - 2, d))
