"""Complex matrix decompositions used by the geometry layer.

Thin contracts over LAPACK (via numpy/scipy) with the conventions the rest
of the package relies on: descending singular values, eigenphases in
``(-pi, pi]``, phase-fixed QR and polar projection with a rank guard.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "NumericError",
    "DegenerateInputError",
    "NoUniqueProjectionError",
    "svd",
    "unitary_eig",
    "qr_unitary",
    "polar_factor",
]


class NumericError(ArithmeticError):
    """A decomposition failed to converge; ``matrix`` holds the input."""

    def __init__(self, message: str, matrix: np.ndarray | None = None):
        super().__init__(message)
        self.matrix = matrix


class DegenerateInputError(ValueError):
    """Input violates a decomposition's rank or unitarity precondition."""


class NoUniqueProjectionError(DegenerateInputError):
    """The polar projection is not unique (rank-deficient argument)."""


def _as_complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def svd(a):
    """Thin SVD ``A = U @ diag(S) @ V^H`` with ``S`` descending.

    Returns
    -------
    U : (m, k) ndarray
    S : (k,) ndarray
    V : (n, k) ndarray
        Note that ``V`` is returned, not ``V^H``.
    """
    a = _as_complex(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}", matrix=a) from exc
    return u, s, vh.conj().T


def unitary_eig(u, tol: float = 1e-8):
    """Eigendecomposition of a unitary matrix.

    Uses the complex Schur form, which is diagonal for normal matrices and
    always yields an orthonormal eigenbasis, including for repeated phases.

    Returns
    -------
    omega : (n, n) ndarray
        Unitary eigenbasis.
    theta : (n,) ndarray
        Eigenphases in ``(-pi, pi]`` such that
        ``u = omega @ diag(exp(1j*theta)) @ omega^H``.
    """
    u = _as_complex(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise DegenerateInputError(f"unitary_eig needs a square matrix, got {u.shape}")
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > tol:
        raise DegenerateInputError("unitary_eig: input is not unitary")
    try:
        t, z = scipy.linalg.schur(u, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"Schur decomposition failed: {exc}", matrix=u) from exc
    theta = np.angle(np.diag(t))
    # np.angle returns [-pi, pi]; fold -pi onto +pi
    theta = np.where(theta <= -np.pi, np.pi, theta)
    return z, theta


def qr_unitary(a):
    """Q factor of ``a`` with the R diagonal made real positive.

    The phase convention makes ``a -> Q`` a well-defined map, so Haar samples
    are a deterministic function of the Gaussian draw. Accepts a stack of
    matrices with shape ``(..., n, p)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-2] < a.shape[-1]:
        raise ValueError(f"qr_unitary needs n >= p, got shape {a.shape}")
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    scale = np.linalg.norm(a, axis=(-2, -1))
    if np.any(np.abs(d) <= 1e-12 * scale[..., None]):
        raise DegenerateInputError("qr_unitary: input is rank deficient")
    phase = d / np.abs(d)
    return q * phase[..., None, :]


def polar_factor(a):
    """Closest semi-unitary matrix to ``a`` in Frobenius norm (``U V^H``).

    Raises
    ------
    NoUniqueProjectionError
        If the smallest singular value is below ``1e-10 (1 + ||a||_F)``.
    """
    a = _as_complex(a)
    if a.shape[0] < a.shape[1]:
        raise ValueError(f"polar_factor needs n >= p, got shape {a.shape}")
    u, s, v = svd(a)
    if s[-1] <= 1e-10 * (1.0 + np.linalg.norm(a)):
        raise NoUniqueProjectionError("no unique projection: argument is rank deficient")
    return u @ v.conj().T
