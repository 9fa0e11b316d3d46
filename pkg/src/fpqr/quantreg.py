"""Linear quantile regression for a single response, solved as the check-loss
linear program, plus the scalar pieces it is built from (check loss, its
subgradient weight, empirical quantiles)."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .exceptions import (
    DegenerateDesignWarning,
    EmptyInput,
    LengthMismatch,
    SolverFailure,
)


def validate_tau(tau):
    """Return ``tau`` as a float after checking it lies strictly inside (0, 1)."""
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in the open interval (0, 1), got {tau}")
    return tau


def check_loss(u, tau):
    """Tilted absolute loss ``u * (tau - 1[u < 0])``, elementwise."""
    tau = validate_tau(tau)
    u = np.asarray(u, dtype=float)
    out = u * (tau - (u < 0.0))
    if out.ndim == 0:
        return float(out)
    return out


def psi(u, tau):
    """Check-loss subgradient weight ``tau - 1[u < 0]``; at 0 the value is ``tau``."""
    tau = validate_tau(tau)
    u = np.asarray(u, dtype=float)
    out = tau - (u < 0.0).astype(float)
    if out.ndim == 0:
        return float(out)
    return out


def empirical_quantile(v, tau):
    """Lower empirical quantile: the ceil(n*tau)-th order statistic of ``v``.

    Always returns an element of ``v``, which keeps the check-loss weights
    well defined at the quantile itself.
    """
    tau = validate_tau(tau)
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("cannot take a quantile of an empty vector")
    if not np.isfinite(v).all():
        raise ValueError("v contains non-finite entries")
    # The small backoff keeps n*tau that is mathematically an integer from
    # rounding up one rank under floating-point error.
    k = int(np.ceil(v.size * tau - 1e-12))
    k = min(max(k, 1), v.size)
    return float(np.sort(v)[k - 1])


@dataclass(frozen=True)
class QrFit:
    """Result of a quantile-regression fit.

    ``objective`` is the mean check loss of the training residuals, recomputed
    directly from ``coefficients`` and ``intercept``.
    """

    coefficients: np.ndarray
    intercept: float
    objective: float
    iterations: int


def _solve_lp(D, y, tau):
    # Split the residual into positive and negative parts; the check loss is
    # then linear: minimize tau*sum(u) + (1-tau)*sum(v) with D@b + u - v = y.
    n, k = D.shape
    c = np.concatenate([np.zeros(k), np.full(n, tau), np.full(n, 1.0 - tau)])
    eye = sparse.eye(n, format="csc")
    A = sparse.hstack([sparse.csc_matrix(D), eye, -eye], format="csc")
    bounds = [(None, None)] * k + [(0.0, None)] * (2 * n)
    res = linprog(c, A_eq=A, b_eq=y, bounds=bounds, method="highs")
    if not res.success:
        raise SolverFailure(f"quantile-regression program did not solve: {res.message}")
    return res.x[:k], int(res.nit)


def fit_quantile_regression(X, y, tau, with_intercept=True):
    """Minimize the mean check loss of ``y - X @ coef - intercept``.

    Parameters
    ----------
    X : array, shape (n, p) or None
        Predictor columns. ``None`` or a zero-column array fits an
        intercept-only model.
    y : array, shape (n,)
        Response vector.
    tau : float
        Quantile level, strictly between 0 and 1.
    with_intercept : bool
        Fit a free intercept (the default). When False the line is forced
        through the origin.

    Returns
    -------
    QrFit

    Notes
    -----
    With an intercept present, a constant predictor column is collinear with
    it; such columns are dropped, reported through
    :class:`DegenerateDesignWarning`, and given coefficient 0.
    """
    tau = validate_tau(tau)
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise EmptyInput("y is empty")
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite entries")
    if X is None:
        X = np.empty((y.size, 0))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got {X.ndim}-d")
    if X.shape[0] != y.size:
        raise LengthMismatch(f"X has {X.shape[0]} rows, y has {y.size}")
    if X.size and not np.isfinite(X).all():
        raise ValueError("X contains non-finite entries")
    n, p = X.shape
    n_params = p + int(with_intercept)
    if n < n_params:
        raise ValueError(f"need at least {n_params} observations for {n_params} parameters, got {n}")

    active = np.ones(p, dtype=bool)
    if with_intercept and p:
        constant = np.all(X == X[0], axis=0)
        if constant.any():
            dropped = np.flatnonzero(constant).tolist()
            warnings.warn(
                f"constant predictor column(s) {dropped} dropped; their coefficients are 0",
                DegenerateDesignWarning,
                stacklevel=2,
            )
            active &= ~constant

    blocks = []
    if active.any():
        blocks.append(X[:, active])
    if with_intercept:
        blocks.append(np.ones((n, 1)))

    coefficients = np.zeros(p)
    intercept = 0.0
    iterations = 0
    if blocks:
        D = np.hstack(blocks)
        params, iterations = _solve_lp(D, y, tau)
        n_active = int(active.sum())
        coefficients[active] = params[:n_active]
        if with_intercept:
            intercept = float(params[-1])

    residuals = y - X @ coefficients - intercept
    objective = float(np.mean(check_loss(residuals, tau)))
    return QrFit(coefficients=coefficients, intercept=intercept, objective=objective, iterations=iterations)
