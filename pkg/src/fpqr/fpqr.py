"""Quantile-linked latent-component regression.

Same deflation loop as the mean-based fit, with two substitutions: the
component directions come from a quantile dependence metric instead of the
covariance, and the inner coefficients come from per-response quantile
regressions on the scores instead of least squares. The result estimates a
conditional quantile of each response rather than its mean, which keeps
heavy-tailed response noise from steering the fit.
"""

import numpy as np

from .exceptions import DimensionMismatch
from .linalg import as_matrix, center_columns, least_squares
from .pls import FittedModel, back_project, extract_components, resolve_components
from .qcov import QcovMetric, qcov_matrix
from .quantreg import fit_quantile_regression, validate_tau

FPQR_METRICS = ("li", "dodge", "choi")


def fit_fpqr(X, Y, n_components=None, tau=0.5, metric="li", center="mean", least_squares_gamma=False):
    """Fit a latent-component model for the ``tau`` conditional quantile.

    Parameters
    ----------
    X : array, shape (n, m)
    Y : array, shape (n, l)
    n_components : int, optional
        Defaults to ``min(10, m, n - 1)``.
    tau : float
        Quantile level, strictly between 0 and 1.
    metric : str or callable
        One of ``"li"``, ``"dodge"``, ``"choi"``, or a callable
        ``(X_a, Y_a) -> (m, l) array`` supplying custom component directions.
        ``"classical"`` is accepted only together with
        ``least_squares_gamma=True``; that pairing reproduces :func:`fit_pls`
        through this code path and exists for equivalence checking.
    center : {"mean", "none"}
    least_squares_gamma : bool
        Replace the inner quantile regressions with least squares. Only
        useful for the equivalence check described above.

    Returns
    -------
    FittedModel
        With ``tau`` set, so :func:`predict_quantile` accepts it.
    """
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
    tau = validate_tau(tau)
    n, m = X.shape
    l = Y.shape[1]

    if callable(metric):
        kind = "custom"
        cross_product = metric
    else:
        kind = metric.kind if isinstance(metric, QcovMetric) else str(metric)
        if kind == "classical":
            if not least_squares_gamma:
                raise ValueError(
                    "the classical covariance reproduces the mean-based fit; "
                    "use fit_pls, or pass least_squares_gamma=True for the equivalence path"
                )
            qm = QcovMetric("classical")
        elif kind in FPQR_METRICS:
            qm = QcovMetric(kind, tau)
        else:
            raise ValueError(f"unknown metric {metric!r}; expected one of {FPQR_METRICS} or a callable")
        cross_product = lambda Xa, Ya: qcov_matrix(Xa, Ya, qm)

    h = resolve_components(n_components, n, m)
    Xc, x_info = center_columns(X, center)
    Yc, y_info = center_columns(Y, center)
    decomposition = extract_components(Xc, Yc, h, cross_product)
    n_eff = decomposition.n_components

    if least_squares_gamma:
        if n_eff:
            gamma = least_squares(decomposition.scores, Yc)
        else:
            gamma = np.zeros((0, l))
        intercepts = np.zeros(l)
    else:
        gamma = np.zeros((n_eff, l))
        intercepts = np.zeros(l)
        scores = decomposition.scores
        for k in range(l):
            fit = fit_quantile_regression(scores, Yc[:, k], tau, with_intercept=True)
            gamma[:, k] = fit.coefficients
            intercepts[k] = fit.intercept

    coefficients = back_project(decomposition, gamma, m, l)
    return FittedModel(
        decomposition=decomposition,
        gamma=gamma,
        intercepts=intercepts,
        coefficients=coefficients,
        x_centering=x_info,
        y_centering=y_info,
        metric=kind,
        tau=tau,
        requested_components=h,
    )


def predict_quantile(model, X):
    """Predicted ``tau`` conditional quantiles from a quantile-linked model."""
    if model.tau is None:
        raise ValueError("model carries no quantile level; it was fitted with fit_pls")
    return model.predict(X)
