"""
Dense complex matrix helpers: unitarity checks, a one-sided Jacobi SVD,
Haar-random unitaries and distance metrics.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .exceptions import (
    NoConvergenceError,
    NotPowerOfTwoError,
    NotSquareError,
    NotUnitaryError,
    ShapeMismatchError,
)

DEFAULT_UNITARITY_TOL = 1e-10
JACOBI_MAX_SWEEPS = 60
JACOBI_TOL = 1e-14


def is_power_of_two(d):
    return d >= 1 and (d & (d - 1)) == 0


def unitarity_deviation(m):
    """Return ``max |m^H m - I|`` entrywise."""
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """A ``2^n x 2^n`` complex matrix certified unitary to ``tol``.

    Build instances through :func:`validate_unitary`; the wrapped array is
    marked read-only.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_UNITARITY_TOL

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_qubits(self):
        return self.dim.bit_length() - 1

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_complex_matrix(m):
    """Convert to a finite 2-D complex128 array or raise ValueError."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def validate_unitary(m, tol=DEFAULT_UNITARITY_TOL):
    """Certify that ``m`` is a unitary of power-of-two dimension >= 2.

    Parameters
    ----------
    m : array-like, shape (d, d)
    tol : float
        Bound on ``max|m^H m - I|``.

    Returns
    -------
    UnitaryMatrix

    Raises
    ------
    NotSquareError, NotPowerOfTwoError, NotUnitaryError
    """
    if isinstance(m, UnitaryMatrix):
        m = m.matrix
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"matrix is {a.shape[0]}x{a.shape[1]}, not square")
    d = a.shape[0]
    if d < 2 or not is_power_of_two(d):
        raise NotPowerOfTwoError(f"dimension {d} is not a power of two >= 2")
    dev = unitarity_deviation(a)
    if dev > tol:
        raise NotUnitaryError(dev, tol)
    a = a.copy()
    a.flags.writeable = False
    return UnitaryMatrix(a, float(tol))


class SvdResult(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


@lru_cache(maxsize=None)
def _round_robin(d):
    """Pairings for one parallel Jacobi sweep; every pair (p, q) appears once."""
    m = d + (d % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        pairs = [(players[i], players[m - 1 - i]) for i in range(half)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < d and q < d]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_orthogonalize(a, v, allowed=None, max_sweeps=JACOBI_MAX_SWEEPS, tol=JACOBI_TOL):
    """Rotate column pairs of a stack ``a`` (B, rows, cols) in place until they
    are mutually orthogonal relative to their norms, accumulating the same
    rotations into ``v`` (B, cols, cols).

    ``allowed`` (B, cols) restricts rotations to pairs of allowed columns.
    """
    cols = a.shape[-1]
    rounds = _round_robin(cols)
    tiny = np.finfo(float).tiny
    # columns below tol * ||a||_F are numerically zero; rotating them cannot converge
    floor = tol * tol * np.einsum("bij,bij->b", a.conj(), a).real[:, None]
    for _ in range(max_sweeps):
        rotated = False
        for p, q in rounds:
            ap, aq = a[:, :, p], a[:, :, q]
            alpha = np.einsum("bij,bij->bj", ap.conj(), ap).real
            beta = np.einsum("bij,bij->bj", aq.conj(), aq).real
            gamma = np.einsum("bij,bij->bj", ap.conj(), aq)
            g = np.abs(gamma)
            act = (g > tol * np.sqrt(alpha) * np.sqrt(beta)) & (g > tiny) & (np.minimum(alpha, beta) > floor)
            if allowed is not None:
                act &= allowed[:, p] & allowed[:, q]
            if not act.any():
                continue
            rotated = True
            g_safe = np.where(act, g, 1.0)
            phase = np.where(act, gamma / g_safe, 1.0)
            zeta = (beta - alpha) / (2.0 * g_safe)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(act, t, 0.0)
            c = (1.0 / np.sqrt(1.0 + t * t))[:, None, :]
            s = c * t[:, None, :]
            ph = phase.conj()[:, None, :]
            aq_ph = aq * ph
            a[:, :, p] = c * ap - s * aq_ph
            a[:, :, q] = s * ap + c * aq_ph
            vp, vq_ph = v[:, :, p], v[:, :, q] * ph
            v[:, :, p] = c * vp - s * vq_ph
            v[:, :, q] = s * vp + c * vq_ph
        if not rotated:
            return
    raise NoConvergenceError(max_sweeps)


def qr_unit_columns(b, sign=1.0):
    """Householder QR ``b ~ sign * Q diag(norms)`` for a stack with near-orthogonal columns.

    Returns the square unitary ``Q``, whose first columns are rephased so the
    triangular diagonal becomes ``sign * norms``, and the nonnegative column
    norms.
    """
    q, t = np.linalg.qr(b, mode="complete")
    k = b.shape[-1]
    diag = np.diagonal(t, axis1=-2, axis2=-1)[..., :k]
    norms = np.abs(diag)
    ok = norms > np.finfo(float).tiny
    phase = np.where(ok, sign * diag / np.where(ok, norms, 1.0), 1.0)
    q = q.copy()
    q[..., :k] *= phase[..., None, :]
    return q, norms


def svd(m, max_sweeps=JACOBI_MAX_SWEEPS, tol=JACOBI_TOL):
    """Full SVD ``m = L diag(s) R^H`` by one-sided (Hestenes) Jacobi.

    Column pairs are orthogonalised in round-robin order so that each round
    rotates disjoint pairs at once; a stack of matrices (B, rows, cols) is
    processed in one pass. The left factor is finished with a Householder QR
    of the orthogonalised columns, which keeps it exactly unitary even when
    some singular values vanish.

    Returns
    -------
    SvdResult
        ``left`` and ``right`` are square unitary, ``singular_values``
        is sorted descending.

    Raises
    ------
    NoConvergenceError
        If off-diagonal Gram entries stay above ``tol`` relative to the
        column norms after ``max_sweeps`` sweeps.
    """
    a = np.asarray(m, dtype=np.complex128)
    single = a.ndim == 2
    if single:
        a = a[np.newaxis]
    if a.ndim != 3 or not np.all(np.isfinite(a)):
        raise ValueError("svd expects a finite matrix or stack of matrices")
    rows, cols = a.shape[-2:]
    if rows < cols:
        res = svd(np.conj(np.swapaxes(a, -1, -2)), max_sweeps, tol)
        res = SvdResult(res.right, res.singular_values, res.left)
    else:
        # power-of-two scaling is exact and keeps squared norms away from under/overflow
        _, expo = np.frexp(np.max(np.abs(a), axis=(-2, -1)))
        a = np.ldexp(a.real, -expo[:, None, None]) + 1j * np.ldexp(a.imag, -expo[:, None, None])
        v = np.broadcast_to(np.eye(cols, dtype=np.complex128), (a.shape[0], cols, cols)).copy()
        jacobi_orthogonalize(a, v, max_sweeps=max_sweeps, tol=tol)
        order = np.argsort(-np.linalg.norm(a, axis=-2), axis=-1, kind="stable")
        a = np.take_along_axis(a, order[:, None, :], axis=-1)
        v = np.take_along_axis(v, order[:, None, :], axis=-1)
        left, sv = qr_unit_columns(a)
        # |r_ll| can break exact ordering at rounding level
        order = np.argsort(-sv, axis=-1, kind="stable")
        left[..., :cols] = np.take_along_axis(left[..., :cols], order[:, None, :], axis=-1)
        sv = np.ldexp(sv, expo[:, None])
        res = SvdResult(left, np.take_along_axis(sv, order, axis=-1), np.take_along_axis(v, order[:, None, :], axis=-1))
    if single:
        return SvdResult(res.left[0], res.singular_values[0], res.right[0])
    return res


def haar_random_unitary(n, seed=None):
    """Haar-distributed ``2^n x 2^n`` unitary from a seeded complex Ginibre QR.

    The diagonal of the triangular factor is rotated to be real positive,
    which makes the distribution exactly Haar.
    """
    if not 1 <= n <= 12:
        raise ValueError(f"qubit count must be in [1, 12], got {n}")
    d = 1 << n
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return validate_unitary(q, tol=DEFAULT_UNITARITY_TOL)


def nearest_unitary(m):
    """Unitary polar factor ``L R^H`` of ``m``, the closest unitary in Frobenius norm."""
    res = svd(as_complex_matrix(m))
    return res.left @ res.right.conj().T


def frobenius_distance(a, b):
    a = np.asarray(a.matrix if isinstance(a, UnitaryMatrix) else a)
    b = np.asarray(b.matrix if isinstance(b, UnitaryMatrix) else b)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def check_state_batch(X, dim):
    """Validate a batch of state vectors, shape ``(n_samples, dim)``; 1-D input is promoted."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise ShapeMismatchError(f"expected states of length {dim}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("states contain NaN or Inf entries")
    return X
