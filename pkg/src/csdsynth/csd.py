"""
Cosine-sine decomposition of an even-dimensional unitary

    U = diag(u11, u12) @ [[C, S], [-S, C]] @ diag(u21, u22)

with ``C = diag(cos theta)``, ``S = diag(sin theta)`` and ``theta`` ascending
in ``[0, pi/2]``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import DimTooSmallError, ReconstructionFailure
from .matcore import DEFAULT_UNITARITY_TOL, UnitaryMatrix, jacobi_orthogonalize, qr_unit_columns, svd, validate_unitary

GAUGE_TOL = 1e-12
SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True, eq=False)
class CSDFactors:
    u11: np.ndarray
    u12: np.ndarray
    u21: np.ndarray
    u22: np.ndarray
    thetas: np.ndarray

    @property
    def left(self):
        return block_diag(self.u11, self.u12)

    @property
    def right(self):
        return block_diag(self.u21, self.u22)

    def cs_matrix(self):
        return cs_matrix(self.thetas)


def block_diag(*blocks):
    d = sum(b.shape[0] for b in blocks)
    out = np.zeros((d, d), dtype=np.complex128)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def cs_matrix(thetas):
    c, s = np.diag(np.cos(thetas)), np.diag(np.sin(thetas))
    return np.block([[c, s], [-s, c]]).astype(np.complex128)


def _phase_of_first_nonzero(cols):
    # phase of the first entry per column whose magnitude exceeds GAUGE_TOL
    mags = np.abs(cols)
    first = np.argmax(mags > GAUGE_TOL, axis=-2)
    entry = np.take_along_axis(cols, first[..., None, :], axis=-2)[..., 0, :]
    mag = np.abs(entry)
    return np.where(mag > 0, entry / np.where(mag > 0, mag, 1.0), 1.0)


def _dagger(x):
    return np.conj(np.swapaxes(x, -1, -2))


def cs_decompose_stack(a):
    """Cosine-sine decomposition of every unitary in a stack (B, dim, dim).

    Returns a :class:`CSDFactors` whose fields carry a leading batch axis.
    Inputs are assumed unitary; see :func:`cs_decompose` for the checks and
    the method.
    """
    a = np.asarray(a, dtype=np.complex128)
    batch, dim = a.shape[0], a.shape[-1]
    if dim < 4:
        raise DimTooSmallError(f"cosine-sine decomposition needs dim >= 4, got {dim}")
    h = dim // 2
    x11, x12, x21, x22 = a[:, :h, :h], a[:, :h, h:], a[:, h:, :h], a[:, h:, h:]

    _, cos_est, r = svd(x11)
    small = cos_est > SQRT_HALF
    if small.any():
        # re-resolve the right vectors where cosines cluster near 1
        z = x21 @ r
        w = np.broadcast_to(np.eye(h, dtype=np.complex128), (batch, h, h)).copy()
        jacobi_orthogonalize(z, w, allowed=small)
        # ascending sines first so the reversed QR below meets large sines first
        key = np.where(small, np.linalg.norm(z, axis=-2), 10.0 + np.arange(h))
        order = np.argsort(key, axis=-1, kind="stable")
        r = np.take_along_axis(r @ w, order[:, None, :], axis=-1)

    u11, cosines = qr_unit_columns(x11 @ r)
    ph = _phase_of_first_nonzero(u11).conj()[:, None, :]
    u11 = u11 * ph
    r = r * ph

    # reversing rows and columns makes Householder visit large sines first
    u12, sines = qr_unit_columns((x21 @ r)[:, ::-1, ::-1], sign=-1.0)
    u12, sines = u12[:, ::-1, ::-1], sines[:, ::-1]

    thetas = np.arctan2(sines, cosines)
    c, s = np.cos(thetas)[:, :, None], np.sin(thetas)[:, :, None]
    u21 = _dagger(r)
    u22 = c * (_dagger(u12) @ x22) + s * (_dagger(u11) @ x12)

    order = np.argsort(thetas, axis=-1, kind="stable")
    col = order[:, None, :]
    row = order[:, :, None]
    f = CSDFactors(
        np.take_along_axis(u11, col, axis=-1),
        np.take_along_axis(u12, col, axis=-1),
        np.take_along_axis(u21, row, axis=-2),
        np.take_along_axis(u22, row, axis=-2),
        np.take_along_axis(thetas, order, axis=-1),
    )
    residual = np.linalg.norm(reconstruct_csd(f) - a, axis=(-2, -1))
    limit = 1e-9 * dim
    worst = float(np.max(residual))
    if not worst <= limit:
        raise ReconstructionFailure(worst, limit)
    return f


def cs_decompose(u, tol=DEFAULT_UNITARITY_TOL):
    """One level of the cosine-sine decomposition.

    Right vectors come from an SVD of ``X11``, except on the subspace where
    ``cos theta > 1/sqrt(2)``: there cosines cluster near 1 and the vectors
    are re-resolved by Jacobi rotations of ``X21 R`` restricted to that
    subspace. One-sided Jacobi keeps the transformed columns orthogonal
    relative to their norms, so Householder QRs of ``X11 R`` (large cosines
    first) and ``X21 R`` (large sines first) give exactly unitary ``u11`` and
    ``u12`` with accurate cosines and sines at both ends of ``[0, pi/2]``.
    The last block follows from ``u22 = C u12^H X22 + S u11^H X12``, which is
    exact since ``C^2 + S^2 = I``.

    Raises
    ------
    NotUnitaryError, DimTooSmallError
    ReconstructionFailure
        When the factors fail to reproduce ``u`` within ``1e-9 * dim``.
    """
    a = validate_unitary(u, tol).matrix
    if a.shape[0] < 4:
        raise DimTooSmallError(f"cosine-sine decomposition needs dim >= 4, got {a.shape[0]}")
    f = cs_decompose_stack(a[np.newaxis])
    return CSDFactors(f.u11[0], f.u12[0], f.u21[0], f.u22[0], f.thetas[0])


def reconstruct_csd(f):
    """Product ``diag(u11, u12) @ CS(thetas) @ diag(u21, u22)``; works on stacked factors."""
    c, s = np.cos(f.thetas)[..., :, None], np.sin(f.thetas)[..., :, None]
    # CS @ right, row by row
    top = np.concatenate([c * f.u21, s * f.u22], axis=-1)
    bot = np.concatenate([-s * f.u21, c * f.u22], axis=-1)
    return np.concatenate([f.u11 @ top, f.u12 @ bot], axis=-2)


def reconstruct_csd_unitary(f):
    return UnitaryMatrix(reconstruct_csd(f))
