"""Evaluation metrics, cross-validation, and the synthetic benchmark studies."""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import InvalidSpec, ShapeMismatch
from .fpqr import FPQR_METRICS, fit_fpqr
from .linalg import as_matrix
from .pls import fit_pls
from .quantreg import check_loss, validate_tau

# ---------------------------------------------------------------------------
# metrics


def _as_2d(a, name):
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-d or 2-d")
    return arr


def beta_distance(b_estimated, b_true):
    """Frobenius distance between two coefficient matrices."""
    A = _as_2d(b_estimated, "b_estimated")
    B = _as_2d(b_true, "b_true")
    if A.shape != B.shape:
        raise ShapeMismatch(f"coefficient shapes differ: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B))


def test_mse(y_true, y_pred):
    """Mean squared prediction error over all response entries."""
    T = _as_2d(y_true, "y_true")
    P = _as_2d(y_pred, "y_pred")
    if T.shape != P.shape:
        raise ShapeMismatch(f"response shapes differ: {T.shape} vs {P.shape}")
    return float(np.mean((T - P) ** 2))


def quantile_error(y_true, y_pred, tau):
    """Check loss of the prediction errors, summed over response columns and
    averaged over rows."""
    tau = validate_tau(tau)
    T = _as_2d(y_true, "y_true")
    P = _as_2d(y_pred, "y_pred")
    if T.shape != P.shape:
        raise ShapeMismatch(f"response shapes differ: {T.shape} vs {P.shape}")
    return float(check_loss(T - P, tau).sum() / T.shape[0])


# ---------------------------------------------------------------------------
# model recipes


@dataclass(frozen=True)
class ModelRecipe:
    """A named, parameter-complete way to fit a model, used by studies and CV."""

    tag: str
    method: str
    metric: Optional[str] = None
    tau: Optional[float] = None

    def fit(self, X, Y, n_components, center="mean"):
        if self.method == "pls":
            return fit_pls(X, Y, n_components, center=center)
        return fit_fpqr(X, Y, n_components, tau=self.tau, metric=self.metric, center=center)


def parse_recipe(text):
    """Parse ``"pls"`` or ``"fpqr-<metric>[@tau]"`` into a :class:`ModelRecipe`."""
    tag = str(text).strip()
    base, _, level = tag.partition("@")
    if base == "pls":
        if level:
            raise ValueError("the pls recipe takes no quantile level")
        return ModelRecipe(tag, "pls")
    if base.startswith("fpqr-"):
        kind = base[len("fpqr-"):]
        if kind not in FPQR_METRICS:
            raise ValueError(f"unknown recipe metric {kind!r}; expected one of {FPQR_METRICS}")
        tau = validate_tau(level) if level else 0.5
        return ModelRecipe(tag, "fpqr", kind, tau)
    raise ValueError(f"unknown recipe {text!r}; expected 'pls' or 'fpqr-<li|dodge|choi>[@tau]'")


# ---------------------------------------------------------------------------
# cross-validation

_CV_STREAM = 8


@dataclass
class CvResult:
    """Per-candidate mean held-out error and the selected component count."""

    candidate_components: list
    mean_cv_error: list
    chosen_components: int
    invalid_candidates: dict = field(default_factory=dict)


def _validate_seed(seed):
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed


def cross_validate(X, Y, candidates, folds=5, fitter=None, seed=0):
    """Pick a component count by k-fold prediction error.

    Rows are shuffled once with a generator keyed by ``seed`` and split into
    ``folds`` contiguous blocks. Centering happens inside each training fit,
    so no statistic of the held-out rows leaks into it. A candidate whose fit
    or prediction fails in any fold is excluded and recorded. Exact error
    ties go to the smaller component count.
    """
    X = as_matrix(X, "X")
    Y = _as_2d(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ShapeMismatch(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
    if fitter is None:
        raise ValueError("fitter is required: a ModelRecipe or a callable (X, Y, h) -> model")
    folds = int(folds)
    n = X.shape[0]
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if folds > n:
        raise ValueError(f"folds must not exceed the {n} available rows")
    candidates = sorted({int(h) for h in candidates})
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if candidates[0] < 1:
        raise ValueError("candidate component counts must be positive")
    seed = _validate_seed(seed)

    rng = np.random.default_rng(np.random.SeedSequence((seed, _CV_STREAM)))
    order = rng.permutation(n)
    blocks = np.array_split(order, folds)

    def fit_one(Xtr, Ytr, h):
        if isinstance(fitter, ModelRecipe):
            return fitter.fit(Xtr, Ytr, h)
        return fitter(Xtr, Ytr, h)

    errors = {}
    invalid = {}
    for h in candidates:
        fold_errors = []
        for i, held_out in enumerate(blocks):
            mask = np.ones(n, dtype=bool)
            mask[held_out] = False
            try:
                model = fit_one(X[mask], Y[mask], h)
                predicted = model.predict(X[~mask])
            except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
                invalid[h] = f"fold {i}: {exc}"
                break
            fold_errors.append(test_mse(Y[~mask], predicted))
        else:
            errors[h] = float(np.mean(fold_errors))

    if not errors:
        raise ValueError(f"every candidate failed cross-validation: {invalid}")
    valid = sorted(errors)
    chosen = min(valid, key=lambda h: (errors[h], h))
    return CvResult(valid, [errors[h] for h in valid], chosen, invalid)


# ---------------------------------------------------------------------------
# simulation schemes

_SCHEME_DIMS = {
    "sim1": (100, 100, 1, 30),
    "sim2": (100, 100, 3, 30),
    "sim3-low": (100, 10, 1, 2),
    "sim3-high": (15, 60, 1, 4),
}
_SCHEME_ERRORS = {
    "sim1": ("chi2_3",),
    "sim2": ("chi2_3",),
    "sim3-low": ("normal", "t1", "slash"),
    "sim3-high": ("normal", "t1", "slash"),
}
_DEFAULT_TEST_SIZE = {"sim1": 500, "sim2": 500, "sim3-low": 100, "sim3-high": 100}
_RELEVANT_PREDICTORS = 30  # sim1/sim2: leading rows of the coefficient matrix
_SIM3_COEF_SCALE = 0.001

_STREAMS = {
    "x_train": 0,
    "coefficients": 1,
    "noise_train": 2,
    "x_test": 3,
    "noise_test": 4,
    "scores_train": 5,
    "loadings": 6,
    "scores_test": 7,
}


@dataclass(frozen=True)
class SimulationSpec:
    """Dimensions, noise law, and bookkeeping for one benchmark scheme."""

    scheme: str
    error_law: str
    n_train: int
    n_features: int
    n_responses: int
    n_components: int
    test_size: int
    repetitions: int
    seed: int

    def __post_init__(self):
        if self.scheme not in _SCHEME_DIMS:
            raise InvalidSpec(f"unknown scheme {self.scheme!r}; expected one of {sorted(_SCHEME_DIMS)}")
        dims = _SCHEME_DIMS[self.scheme]
        given = (self.n_train, self.n_features, self.n_responses, self.n_components)
        if given != dims:
            raise InvalidSpec(f"scheme {self.scheme} fixes (n, m, l, h) = {dims}, got {given}")
        allowed = _SCHEME_ERRORS[self.scheme]
        if self.error_law not in allowed:
            raise InvalidSpec(
                f"scheme {self.scheme} supports error laws {allowed}, got {self.error_law!r}"
            )
        if self.test_size < 1:
            raise InvalidSpec("test_size must be positive")
        if self.repetitions < 1:
            raise InvalidSpec("repetitions must be positive")
        if self.seed < 0:
            raise InvalidSpec("seed must be non-negative")


def make_simulation_spec(scheme, error_law=None, repetitions=100, seed=0, test_size=None):
    """Build a :class:`SimulationSpec`, filling in the scheme's fixed sizes."""
    if scheme not in _SCHEME_DIMS:
        raise InvalidSpec(f"unknown scheme {scheme!r}; expected one of {sorted(_SCHEME_DIMS)}")
    if error_law is None:
        error_law = _SCHEME_ERRORS[scheme][0]
    n, m, l, h = _SCHEME_DIMS[scheme]
    if test_size is None:
        test_size = _DEFAULT_TEST_SIZE[scheme]
    return SimulationSpec(scheme, error_law, n, m, l, h, int(test_size), int(repetitions), int(seed))


def _stream(spec, repetition, role):
    return np.random.default_rng(np.random.SeedSequence((spec.seed, repetition, _STREAMS[role])))


def _draw_noise(rng, law, shape):
    if law == "chi2_3":
        return rng.chisquare(3.0, shape)
    if law == "normal":
        return rng.standard_normal(shape)
    if law == "t1":
        return rng.standard_t(1.0, shape)
    if law == "slash":
        return rng.standard_normal(shape) / rng.uniform(size=shape)
    raise InvalidSpec(f"unknown error law {law!r}")


def generate_simulation(spec, repetition):
    """Draw one repetition of a scheme.

    Every matrix comes from its own generator keyed by
    ``(seed, repetition, role)``, so any single piece can be reproduced
    without replaying the others.

    Returns
    -------
    (X_train, Y_train, X_test, Y_test, B_true)
    """
    repetition = int(repetition)
    if repetition < 0:
        raise ValueError("repetition must be non-negative")
    n, m, l = spec.n_train, spec.n_features, spec.n_responses
    n_test = spec.test_size

    if spec.scheme in ("sim1", "sim2"):
        B = np.zeros((m, l))
        B[:_RELEVANT_PREDICTORS] = _stream(spec, repetition, "coefficients").uniform(
            size=(_RELEVANT_PREDICTORS, l)
        )
        X = _stream(spec, repetition, "x_train").standard_normal((n, m))
        E = _draw_noise(_stream(spec, repetition, "noise_train"), spec.error_law, (n, l))
        X_test = _stream(spec, repetition, "x_test").standard_normal((n_test, m))
        E_test = _draw_noise(_stream(spec, repetition, "noise_test"), spec.error_law, (n_test, l))
    else:
        h = spec.n_components
        T = _stream(spec, repetition, "scores_train").standard_normal((n, h))
        P = _stream(spec, repetition, "loadings").standard_normal((m, h))
        X = T @ P.T
        B = _stream(spec, repetition, "coefficients").normal(0.0, _SIM3_COEF_SCALE, (m, l))
        E = _draw_noise(_stream(spec, repetition, "noise_train"), spec.error_law, (n, l))
        T_test = _stream(spec, repetition, "scores_test").standard_normal((n_test, h))
        X_test = T_test @ P.T
        E_test = _draw_noise(_stream(spec, repetition, "noise_test"), spec.error_law, (n_test, l))

    Y = X @ B + E
    Y_test = X_test @ B + E_test
    return X, Y, X_test, Y_test, B


# ---------------------------------------------------------------------------
# study driver


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one recipe on one repetition. Wall time covers fit and predict."""

    model_tag: str
    repetition: int
    seed: int
    beta_distance: float
    test_mse: float
    quantile_error: float
    wall_time_seconds: float


@dataclass(frozen=True)
class StudyAggregate:
    """Mean and sample standard deviation of each metric for one recipe."""

    model_tag: str
    included: int
    excluded: int
    beta_distance_mean: float
    beta_distance_std: float
    test_mse_mean: float
    test_mse_std: float
    quantile_error_mean: float
    quantile_error_std: float
    wall_time_mean: float
    wall_time_std: float


@dataclass
class StudyResult:
    spec: SimulationSpec
    reports: list
    excluded: list
    aggregates: list


def _mean_std(values):
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def run_study(spec, recipes):
    """Run every recipe on every repetition of a scheme and aggregate.

    A repetition where any recipe fails is recorded in ``excluded`` and
    dropped from every recipe's aggregate, so the aggregates always compare
    recipes on identical data. Fits run sequentially; data generation stays
    outside the timed region.
    """
    recipes = [parse_recipe(r) if isinstance(r, str) else r for r in recipes]
    if not recipes:
        raise ValueError("recipes must be non-empty")
    tags = [r.tag for r in recipes]
    if len(set(tags)) != len(tags):
        raise ValueError(f"recipe tags must be unique, got {tags}")

    reports = []
    excluded = []
    for repetition in range(spec.repetitions):
        X, Y, X_test, Y_test, B_true = generate_simulation(spec, repetition)
        rep_reports = []
        failure = None
        for recipe in recipes:
            started = time.perf_counter()
            try:
                model = recipe.fit(X, Y, spec.n_components)
                predicted = model.predict(X_test)
            except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
                failure = (repetition, recipe.tag, str(exc))
                break
            elapsed = time.perf_counter() - started
            tau = recipe.tau if recipe.tau is not None else 0.5
            rep_reports.append(
                EvalReport(
                    model_tag=recipe.tag,
                    repetition=repetition,
                    seed=spec.seed,
                    beta_distance=beta_distance(model.coefficients, B_true),
                    test_mse=test_mse(Y_test, predicted),
                    quantile_error=quantile_error(Y_test, predicted, tau),
                    wall_time_seconds=elapsed,
                )
            )
        if failure is not None:
            excluded.append(failure)
        else:
            reports.extend(rep_reports)

    n_excluded = len(excluded)
    aggregates = []
    for recipe in recipes:
        rows = [r for r in reports if r.model_tag == recipe.tag]
        if not rows:
            continue
        bd = _mean_std([r.beta_distance for r in rows])
        mse = _mean_std([r.test_mse for r in rows])
        qe = _mean_std([r.quantile_error for r in rows])
        wall = _mean_std([r.wall_time_seconds for r in rows])
        aggregates.append(
            StudyAggregate(
                model_tag=recipe.tag,
                included=len(rows),
                excluded=n_excluded,
                beta_distance_mean=bd[0],
                beta_distance_std=bd[1],
                test_mse_mean=mse[0],
                test_mse_std=mse[1],
                quantile_error_mean=qe[0],
                quantile_error_std=qe[1],
                wall_time_mean=wall[0],
                wall_time_std=wall[1],
            )
        )
    return StudyResult(spec=spec, reports=reports, excluded=excluded, aggregates=aggregates)


__all__ = [
    "CvResult",
    "EvalReport",
    "ModelRecipe",
    "SimulationSpec",
    "StudyAggregate",
    "StudyResult",
    "beta_distance",
    "cross_validate",
    "generate_simulation",
    "make_simulation_spec",
    "parse_recipe",
    "quantile_error",
    "run_study",
    "test_mse",
]
