"""
Synthesis of n-qubit unitaries into CNOT, Ry, Rz and global-phase gates by
recursive cosine-sine decomposition and Gray-code uniformly controlled
rotations.

>>> from csdsynth import haar_random_unitary, synthesize
>>> circuit, report = synthesize(haar_random_unitary(3, seed=1))
>>> report.counts
GateCounts(cnot=48, one_qubit=64)
"""
from .circuit import (
    Circuit,
    Cnot,
    GateCounts,
    GlobalPhase,
    Rot,
    apply_gate,
    cancel_adjacent_cnots,
    count_gates,
    prune_small_rotations,
    reconstruct,
    simulate,
)
from .csd import CSDFactors, cs_decompose, reconstruct_csd
from .estimator import CSDSynthesizer, DiagonalSynthesizer
from .exceptions import (
    CircuitSyntaxError,
    DimTooSmallError,
    IndexOutOfRangeError,
    NoConvergenceError,
    NotGrayError,
    NotPowerOfTwoError,
    NotSquareError,
    NotUnitaryError,
    PlanVerificationFailure,
    ReconstructionFailure,
    ShapeMismatchError,
    SynthesisError,
    UnknownGateError,
)
from .formats import emit_matrix, emit_text, parse_matrix, parse_text
from .graycode import GrayCode, binary_reflected_gray, fwht, gamma, m_matrix, solve_rotation_angles, transition_positions, zeta
from .matcore import UnitaryMatrix, frobenius_distance, haar_random_unitary, svd, validate_unitary
from .synth import (
    SynthesisReport,
    build_plan,
    cnot_lower_bound,
    expected_cnot_count,
    expected_one_qubit_count,
    synthesize,
    synthesize_diagonal,
)
from .ucr import UCRotation, expand_ucr, ucr_matrix

__version__ = "0.1.0"
