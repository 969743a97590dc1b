"""
Gray codes, the CNOT control placement they induce, and the angle transform
of uniformly controlled rotations.

Bit position 1 is the most significant bit of a k-bit word, so qubit ``m``
of a register maps to bit ``m`` of the basis index.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import NotGrayError, NotPowerOfTwoError
from .matcore import is_power_of_two


@dataclass(frozen=True)
class GrayCode:
    """A cyclic sequence of ``2^k`` distinct k-bit words stored as integers."""

    k: int
    words: tuple

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("bit count must be nonnegative")
        if len(self.words) != 1 << self.k:
            raise NotGrayError(f"expected {1 << self.k} words, got {len(self.words)}")
        if sorted(self.words) != list(range(1 << self.k)):
            raise NotGrayError("words are not a permutation of all k-bit strings")

    def bitstrings(self):
        return [format(w, f"0{self.k}b") if self.k else "" for w in self.words]

    def rotated(self, shift):
        """The same cycle started at a different word; still a cyclic Gray code."""
        s = shift % len(self.words)
        return GrayCode(self.k, self.words[s:] + self.words[:s])


def binary_reflected_gray(k):
    if not 0 <= k <= 16:
        raise ValueError(f"bit count must be in [0, 16], got {k}")
    return GrayCode(k, tuple(j ^ (j >> 1) for j in range(1 << k)))


def _bit_position(diff, k):
    # 1-based from the most significant end
    return k - diff.bit_length() + 1


def transition_positions(code):
    """Bit positions flipped between consecutive words, cyclic closure last.

    >>> transition_positions(binary_reflected_gray(3))
    [3, 2, 3, 1, 3, 2, 3, 1]
    """
    words = code.words
    n = len(words)
    out = []
    for l in range(n):
        diff = words[l] ^ words[(l + 1) % n]
        if diff == 0 and n == 1:
            continue
        if diff == 0 or diff & (diff - 1):
            raise NotGrayError(f"words {l} and {(l + 1) % n} differ in {bin(diff).count('1')} bits")
        out.append(_bit_position(diff, code.k))
    return out


def _popcount_parity(x):
    return bin(x).count("1") & 1


def m_matrix_entry(k, i, j, code=None):
    """Entry ``(-1)^(b_{i-1} . g_{j-1})`` of the angle matrix, 1-based indices."""
    code = binary_reflected_gray(k) if code is None else code
    n = 1 << k
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"indices ({i}, {j}) out of range for k={k}")
    g = code.words[j - 1] ^ code.words[0]
    return -1 if _popcount_parity((i - 1) & g) else 1


def m_matrix(k, code=None):
    """Dense ``2^k x 2^k`` angle matrix built entry by entry."""
    n = 1 << k
    return np.array([[m_matrix_entry(k, i, j, code) for j in range(1, n + 1)] for i in range(1, n + 1)],
                    dtype=float)


def fwht(x):
    """Unnormalised Walsh-Hadamard transform in natural (Hadamard) order.

    Computes ``H x`` with ``H[i, j] = (-1)^popcount(i & j)`` using
    log2(len(x)) butterfly stages.
    """
    a = np.array(x, dtype=float)
    n = a.shape[0]
    if not is_power_of_two(n):
        raise NotPowerOfTwoError(f"length {n} is not a power of two")
    h = 1
    while h < n:
        v = a.reshape(-1, 2, h)
        top = v[:, 0, :] + v[:, 1, :]
        bot = v[:, 0, :] - v[:, 1, :]
        v[:, 0, :] = top
        v[:, 1, :] = bot
        h *= 2
    return a


def solve_rotation_angles(alphas, code=None):
    """Rotation-slot angles ``theta`` with ``M theta = alphas``.

    Uses ``M^-1 = 2^-k M^T``: a Walsh-Hadamard transform of ``alphas``
    read out at the Gray-code word of each slot.
    """
    alphas = np.asarray(alphas, dtype=float)
    n = alphas.shape[0]
    if alphas.ndim != 1 or not is_power_of_two(n):
        raise NotPowerOfTwoError(f"angle vector length {n} is not a power of two")
    k = n.bit_length() - 1
    code = binary_reflected_gray(k) if code is None else code
    if code.k != k:
        raise ValueError(f"Gray code has {code.k} bits, angle vector needs {k}")
    rel = np.array(code.words) ^ code.words[0]
    return fwht(alphas)[rel] / n


def zeta(i, j, n):
    """Global position of the cosine-sine factor at recursion level ``i``, index ``j``."""
    if not (1 <= i <= n - 1 and 1 <= j <= 1 << (i - 1)):
        raise ValueError(f"invalid recursion coordinates (i={i}, j={j}) for n={n}")
    return (1 << (n - i - 1)) * (2 * j - 1)


def gamma(j, n):
    """Recursion level of the cosine-sine factor at global position ``j``."""
    if not 1 <= j <= (1 << (n - 1)) - 1:
        raise ValueError(f"position {j} out of range for n={n}")
    lowest = (j & -j).bit_length()
    return n - lowest
