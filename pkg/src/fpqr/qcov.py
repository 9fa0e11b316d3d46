"""Dependence metrics between data columns at a chosen quantile level.

Three quantile metrics are provided next to the classical covariance:

* ``li``: the check-loss weight of one variable at its own quantile,
  correlated against the centered other variable. Cheap and vectorizable.
* ``dodge``: variance of the first variable times the quantile-regression
  slope of the second on the first. Not symmetric.
* ``choi``: a symmetrized geometric mean of the two directional ``dodge``
  values (and the matching correlation).

All variance and covariance style quantities are normalized by ``n``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    DiscordantSlopesWarning,
    LengthMismatch,
    ZeroVarianceWarning,
)
from .linalg import as_matrix
from .quantreg import empirical_quantile, fit_quantile_regression, psi, validate_tau

METRIC_KINDS = ("classical", "li", "dodge", "choi")
_VAR_TOL = 1e-14


@dataclass(frozen=True)
class QcovMetric:
    """A metric tag plus the quantile level it is evaluated at.

    ``classical`` carries no level; every other kind requires one.
    """

    kind: str
    tau: float = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {METRIC_KINDS}")
        if self.kind != "classical":
            if self.tau is None:
                raise ValueError(f"metric {self.kind!r} requires a quantile level")
            object.__setattr__(self, "tau", validate_tau(self.tau))


def _pair(z1, z2):
    a = np.asarray(z1, dtype=float).ravel()
    b = np.asarray(z2, dtype=float).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"z1 has length {a.size}, z2 has length {b.size}")
    if a.size < 2:
        raise ValueError("need at least 2 paired observations")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("inputs contain non-finite entries")
    return a, b


def qcov_li(z1, z2, tau):
    """Mean of ``psi_tau(z2 - Q_tau(z2)) * (z1 - mean(z1))``."""
    z1, z2 = _pair(z1, z2)
    tau = validate_tau(tau)
    q = empirical_quantile(z2, tau)
    return float(np.mean(psi(z2 - q, tau) * (z1 - z1.mean())))


def _slope(x, y, tau):
    return float(fit_quantile_regression(x[:, None], y, tau).coefficients[0])


def _dodge_value(z1, z2, tau, where=""):
    var1 = float(z1.var())
    if var1 <= _VAR_TOL:
        warnings.warn(
            f"first argument has zero variance{where}; value set to 0",
            ZeroVarianceWarning,
            stacklevel=3,
        )
        return 0.0
    return var1 * _slope(z1, z2, tau)


def qcov_dodge(z1, z2, tau):
    """Variance of ``z1`` times the quantile slope of ``z2`` regressed on ``z1``."""
    z1, z2 = _pair(z1, z2)
    tau = validate_tau(tau)
    return _dodge_value(z1, z2, tau)


def _choi_value(z1, z2, tau, correlation, where=""):
    var1 = float(z1.var())
    var2 = float(z2.var())
    if min(var1, var2) <= _VAR_TOL:
        warnings.warn(
            f"an argument has zero variance{where}; value set to 0",
            ZeroVarianceWarning,
            stacklevel=3,
        )
        return 0.0
    b21 = _slope(z1, z2, tau)
    b12 = _slope(z2, z1, tau)
    product = b21 * b12
    if product < 0.0:
        warnings.warn(
            f"directional quantile slopes disagree in sign{where}; value set to 0",
            DiscordantSlopesWarning,
            stacklevel=3,
        )
        return 0.0
    if correlation:
        return float(np.sign(b21) * np.sqrt(product))
    return float(np.sign(b21) * np.sqrt((var1 * b21) * (var2 * b12)))


def qcor_choi(z1, z2, tau):
    """Signed geometric mean of the two directional quantile slopes."""
    z1, z2 = _pair(z1, z2)
    tau = validate_tau(tau)
    return _choi_value(z1, z2, tau, correlation=True)


def qcov_choi(z1, z2, tau):
    """Covariance-scaled version of :func:`qcor_choi`."""
    z1, z2 = _pair(z1, z2)
    tau = validate_tau(tau)
    return _choi_value(z1, z2, tau, correlation=False)


def qcov_matrix(X, Y, metric):
    """Metric values between every column of ``X`` and every column of ``Y``.

    Parameters
    ----------
    X : array, shape (n, m)
    Y : array, shape (n, l)
    metric : QcovMetric

    Returns
    -------
    array, shape (m, l)

    Notes
    -----
    The ``li`` kind is computed in one pass of matrix algebra; ``dodge`` and
    ``choi`` fall back to one univariate quantile regression per column pair
    (two for ``choi``). Degenerate entries are reported with their ``(j, k)``
    coordinates and set to 0.
    """
    if not isinstance(metric, QcovMetric):
        raise TypeError(f"metric must be a QcovMetric, got {type(metric).__name__}")
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
    n, m = X.shape
    l = Y.shape[1]
    if n < 2:
        raise ValueError("need at least 2 rows")

    if metric.kind == "classical":
        Xc = X - X.mean(axis=0)
        Yc = Y - Y.mean(axis=0)
        return (Xc.T @ Yc) / n

    tau = metric.tau
    if metric.kind == "li":
        Xc = X - X.mean(axis=0)
        quantiles = np.array([empirical_quantile(Y[:, k], tau) for k in range(l)])
        weights = psi(Y - quantiles, tau)
        return (Xc.T @ weights) / n

    values = np.empty((m, l))
    for j in range(m):
        xj = X[:, j]
        for k in range(l):
            where = f" at entry ({j}, {k})"
            if metric.kind == "dodge":
                values[j, k] = _dodge_value(xj, Y[:, k], tau, where)
            else:
                values[j, k] = _choi_value(xj, Y[:, k], tau, correlation=False, where=where)
    return values
