"""Dense-matrix building blocks: validation, column centering, the leading left
singular direction of a cross-product matrix, and small least-squares solves."""

from dataclasses import dataclass

import numpy as np

from .exceptions import AllZeroCrossProduct, DimensionMismatch, RankDeficient

ZERO_MATRIX_TOL = 1e-14
_POWER_TOL = 1e-12
_POWER_MAX_ITER = 10_000

CENTERING_MODES = ("mean", "none")


def as_matrix(a, name="matrix"):
    """Coerce ``a`` to a finite, non-empty 2-d float64 array."""
    M = np.asarray(a, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got {M.ndim}-d")
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise ValueError(f"{name} must be non-empty, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise ValueError(f"{name} contains non-finite entries")
    return M


def as_vector(a, name="vector"):
    """Coerce ``a`` to a finite, non-empty 1-d float64 array."""
    v = np.asarray(a, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class CenteringInfo:
    """Per-column offsets removed from a matrix, plus the mode that produced them."""

    column_centers: np.ndarray
    mode: str


def center_columns(M, mode="mean"):
    """Shift each column of ``M`` by its center.

    Returns the shifted matrix and a :class:`CenteringInfo`. With
    ``mode="none"`` the matrix is copied unchanged and the recorded centers
    are all zero, so downstream arithmetic needs no special casing.
    """
    M = as_matrix(M, "M")
    if mode == "mean":
        centers = M.mean(axis=0)
        return M - centers, CenteringInfo(centers, "mean")
    if mode == "none":
        return M.copy(), CenteringInfo(np.zeros(M.shape[1]), "none")
    raise ValueError(f"unknown centering mode {mode!r}; expected one of {CENTERING_MODES}")


def _fix_sign(w):
    # Deterministic orientation: the largest-magnitude entry is positive,
    # first index winning ties (np.argmax returns the first maximum).
    idx = int(np.argmax(np.abs(w)))
    if w[idx] < 0:
        return -w
    return w


def _dense_leading(A):
    evals, evecs = np.linalg.eigh(A)
    return evecs[:, -1], float(evals[-1])


def _power_iteration(A):
    start = A.sum(axis=1)
    nrm = np.linalg.norm(start)
    if nrm == 0.0:
        return _dense_leading(A)
    v = start / nrm
    for _ in range(_POWER_MAX_ITER):
        Av = A @ v
        nrm = np.linalg.norm(Av)
        if nrm == 0.0:
            return _dense_leading(A)
        v_next = Av / nrm
        if np.linalg.norm(v_next - v) < _POWER_TOL:
            return v_next, float(v_next @ (A @ v_next))
        v = v_next
    # Slow spectral gap; the dense solve is exact and still cheap here.
    return _dense_leading(A)


def leading_left_singular_vector(S):
    """Unit vector ``w`` maximizing ``||S.T @ w||^2`` and the attained maximum.

    Parameters
    ----------
    S : array, shape (m, l)
        Cross-product matrix between predictor and response columns.

    Returns
    -------
    w : array, shape (m,)
        Leading left singular direction with a deterministic sign.
    value : float
        The leading eigenvalue of ``S @ S.T``.

    Raises
    ------
    AllZeroCrossProduct
        If ``||S||_F`` is at or below the zero cutoff.
    """
    S = as_matrix(S, "S")
    if np.linalg.norm(S) <= ZERO_MATRIX_TOL:
        raise AllZeroCrossProduct("cross-product matrix is numerically zero")
    m, l = S.shape
    if l < m:
        # The small Gram matrix has the same nonzero spectrum, so the
        # leading direction comes from an l x l eigenproblem.
        evals, evecs = np.linalg.eigh(S.T @ S)
        value = float(evals[-1])
        sv = S @ evecs[:, -1]
        nrm = np.linalg.norm(sv)
        if nrm == 0.0:
            raise AllZeroCrossProduct("cross-product matrix is numerically zero")
        w = sv / nrm
    else:
        w, value = _power_iteration(S @ S.T)
    return _fix_sign(w), max(value, 0.0)


def least_squares(T, Y):
    """Coefficient matrix minimizing ``||Y - T @ G||_F``.

    ``T`` must have full column rank; a column with squared norm at or below
    1e-14 raises :class:`RankDeficient` before any solve is attempted.
    """
    T = as_matrix(T, "T")
    Y = as_matrix(Y, "Y")
    if T.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"T has {T.shape[0]} rows, Y has {Y.shape[0]}")
    norms = (T * T).sum(axis=0)
    if np.any(norms <= 1e-14):
        bad = int(np.argmax(norms <= 1e-14))
        raise RankDeficient(f"score column {bad} has numerically zero norm")
    G, *_ = np.linalg.lstsq(T, Y, rcond=None)
    return G
