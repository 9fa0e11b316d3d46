import numpy as np
import pytest
from numpy.testing import assert_allclose

from fpqr import (
    ModelRecipe,
    beta_distance,
    cross_validate,
    fit_pls,
    generate_simulation,
    make_simulation_spec,
    parse_recipe,
    quantile_error,
    run_study,
)
from fpqr import test_mse as mse_metric
from fpqr.exceptions import InvalidSpec, ShapeMismatch


class TestMetrics:
    def test_beta_distance_frobenius(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0]])
        B = np.array([[0.0, 0.0], [0.0, 0.0]])
        assert beta_distance(A, B) == pytest.approx(np.sqrt(2.0))

    def test_beta_distance_zero_on_equal(self):
        A = np.arange(6.0).reshape(3, 2)
        assert beta_distance(A, A.copy()) == 0.0

    def test_test_mse_is_per_entry_mean(self):
        y_true = np.array([[0.0, 0.0], [0.0, 0.0]])
        y_pred = np.array([[1.0, 1.0], [3.0, 1.0]])
        # squared errors 1, 1, 9, 1 over 4 entries
        assert mse_metric(y_true, y_pred) == pytest.approx(3.0)

    def test_quantile_error_sums_columns_averages_rows(self):
        y_true = np.array([[1.0, 2.0], [3.0, 4.0]])
        y_pred = np.zeros((2, 2))
        # residuals all positive: loss tau*u, summed 10*tau, over 2 rows
        assert quantile_error(y_true, y_pred, 0.3) == pytest.approx(0.3 * 10.0 / 2.0)

    def test_quantile_error_median_halves_absolute_error(self):
        rng = np.random.default_rng(0)
        y_true = rng.normal(size=(20, 1))
        y_pred = rng.normal(size=(20, 1))
        expected = 0.5 * np.abs(y_true - y_pred).mean()
        assert quantile_error(y_true, y_pred, 0.5) == pytest.approx(expected)

    def test_vector_inputs_accepted(self):
        assert mse_metric([0.0, 0.0], [2.0, 0.0]) == pytest.approx(2.0)

    @pytest.mark.parametrize("fn", [beta_distance, mse_metric])
    def test_shape_mismatch(self, fn):
        with pytest.raises(ShapeMismatch):
            fn(np.ones((2, 2)), np.ones((3, 2)))


class TestParseRecipe:
    def test_pls(self):
        r = parse_recipe("pls")
        assert (r.method, r.metric, r.tau) == ("pls", None, None)

    def test_default_level(self):
        r = parse_recipe("fpqr-li")
        assert (r.method, r.metric, r.tau) == ("fpqr", "li", 0.5)

    def test_explicit_level(self):
        r = parse_recipe("fpqr-dodge@0.25")
        assert (r.method, r.metric, r.tau) == ("fpqr", "dodge", 0.25)
        assert r.tag == "fpqr-dodge@0.25"

    @pytest.mark.parametrize("bad", ["pls@0.5", "fpqr-kendall", "ridge", "fpqr-li@1.5"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_recipe(bad)


def rank3_data(seed=0, n=60, m=12, l=2):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(n, 3))
    P = rng.normal(size=(m, 3))
    Q = rng.normal(size=(l, 3))
    return T @ P.T, T @ Q.T


class TestCrossValidate:
    def test_noiseless_rank3_selects_three(self):
        X, Y = rank3_data()
        result = cross_validate(X, Y, range(1, 7), folds=5, fitter=ModelRecipe("pls", "pls"), seed=0)
        assert result.chosen_components in (3, 4)
        assert result.candidate_components == [1, 2, 3, 4, 5, 6]
        # past the true rank the held-out error is numerically zero
        by_h = dict(zip(result.candidate_components, result.mean_cv_error))
        assert by_h[3] < 1e-16
        assert by_h[1] > by_h[2] > by_h[3]

    def test_chosen_attains_minimum(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(50, 8))
        Y = X @ rng.normal(size=(8, 1)) + rng.normal(size=(50, 1))
        result = cross_validate(X, Y, [1, 2, 3, 4], fitter=ModelRecipe("pls", "pls"), seed=1)
        best = min(result.mean_cv_error)
        chosen_idx = result.candidate_components.index(result.chosen_components)
        assert result.mean_cv_error[chosen_idx] == best

    def test_deterministic_given_seed(self):
        X, Y = rank3_data(seed=5)
        a = cross_validate(X, Y, [1, 2, 3], fitter=ModelRecipe("pls", "pls"), seed=7)
        b = cross_validate(X, Y, [1, 2, 3], fitter=ModelRecipe("pls", "pls"), seed=7)
        assert a.mean_cv_error == b.mean_cv_error
        assert a.chosen_components == b.chosen_components

    def test_callable_fitter(self):
        X, Y = rank3_data(seed=6)
        result = cross_validate(
            X, Y, [2, 3], fitter=lambda Xtr, Ytr, h: fit_pls(Xtr, Ytr, h), seed=0
        )
        assert result.chosen_components == 3

    def test_infeasible_candidate_excluded(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(10, 4))
        Y = rng.normal(size=(10, 1))
        # 8 training rows per fold support at most 7 components, and m=4 caps it at 4
        result = cross_validate(X, Y, [1, 2, 6], folds=5, fitter=ModelRecipe("pls", "pls"), seed=0)
        assert 6 not in result.candidate_components
        assert 6 in result.invalid_candidates
        assert "fold" in result.invalid_candidates[6]

    def test_all_candidates_failing_raises(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(10, 2))
        Y = rng.normal(size=(10, 1))
        with pytest.raises(ValueError, match="every candidate failed"):
            cross_validate(X, Y, [5], fitter=ModelRecipe("pls", "pls"), seed=0)

    def test_requires_fitter(self):
        X, Y = rank3_data(seed=10)
        with pytest.raises(ValueError, match="fitter"):
            cross_validate(X, Y, [1, 2])

    def test_folds_bounds(self):
        X, Y = rank3_data(seed=11, n=10)
        with pytest.raises(ValueError, match="folds"):
            cross_validate(X, Y, [1], folds=1, fitter=ModelRecipe("pls", "pls"))
        with pytest.raises(ValueError, match="folds"):
            cross_validate(X, Y, [1], folds=11, fitter=ModelRecipe("pls", "pls"))

    def test_negative_seed_rejected(self):
        X, Y = rank3_data(seed=12)
        with pytest.raises(ValueError, match="seed"):
            cross_validate(X, Y, [1], fitter=ModelRecipe("pls", "pls"), seed=-1)


class TestSimulationSpec:
    def test_fixed_dimensions_filled_in(self):
        spec = make_simulation_spec("sim1", repetitions=3, seed=1)
        assert (spec.n_train, spec.n_features, spec.n_responses, spec.n_components) == (100, 100, 1, 30)
        assert spec.error_law == "chi2_3"
        assert spec.test_size == 500

    def test_sim3_defaults(self):
        spec = make_simulation_spec("sim3-high", error_law="slash", repetitions=2)
        assert (spec.n_train, spec.n_features) == (15, 60)
        assert spec.test_size == 100

    def test_unknown_scheme(self):
        with pytest.raises(InvalidSpec):
            make_simulation_spec("sim4")

    def test_error_law_must_match_scheme(self):
        with pytest.raises(InvalidSpec):
            make_simulation_spec("sim1", error_law="t1")
        with pytest.raises(InvalidSpec):
            make_simulation_spec("sim3-low", error_law="chi2_3")

    def test_negative_seed_rejected(self):
        with pytest.raises(InvalidSpec):
            make_simulation_spec("sim1", seed=-3)


class TestGenerateSimulation:
    def test_sim1_shapes_and_sparsity(self):
        spec = make_simulation_spec("sim1", repetitions=1, seed=0)
        X, Y, X_test, Y_test, B = generate_simulation(spec, 0)
        assert X.shape == (100, 100)
        assert Y.shape == (100, 1)
        assert X_test.shape == (500, 100)
        assert Y_test.shape == (500, 1)
        assert B.shape == (100, 1)
        assert (B[:30] > 0).all() and (B[:30] < 1).all()
        assert (B[30:] == 0).all()

    def test_sim2_three_responses(self):
        spec = make_simulation_spec("sim2", repetitions=1, seed=0)
        _, Y, _, Y_test, B = generate_simulation(spec, 0)
        assert Y.shape == (100, 3)
        assert B.shape == (100, 3)

    def test_chi2_noise_is_uncentered(self):
        spec = make_simulation_spec("sim1", repetitions=1, seed=2)
        X, Y, _, _, B = generate_simulation(spec, 0)
        noise = Y - X @ B
        assert (noise > 0).all()
        assert noise.mean() == pytest.approx(3.0, abs=0.8)

    def test_sim3_predictors_have_latent_rank(self):
        spec = make_simulation_spec("sim3-high", error_law="normal", repetitions=1, seed=0)
        X, _, X_test, _, B = generate_simulation(spec, 0)
        assert X.shape == (15, 60)
        assert np.linalg.matrix_rank(X) == 4
        assert np.linalg.matrix_rank(np.vstack([X, X_test])) == 4  # shared loadings
        assert np.abs(B).max() < 0.01

    def test_repetitions_reproducible_and_distinct(self):
        spec = make_simulation_spec("sim3-low", error_law="t1", repetitions=2, seed=3)
        a0 = generate_simulation(spec, 0)
        b0 = generate_simulation(spec, 0)
        a1 = generate_simulation(spec, 1)
        for left, right in zip(a0, b0):
            assert_allclose(left, right)
        assert not np.allclose(a0[0], a1[0])

    def test_seed_changes_data(self):
        s3 = make_simulation_spec("sim1", repetitions=1, seed=3)
        s4 = make_simulation_spec("sim1", repetitions=1, seed=4)
        assert not np.allclose(generate_simulation(s3, 0)[0], generate_simulation(s4, 0)[0])

    def test_slash_noise_has_heavy_tails(self):
        spec = make_simulation_spec("sim3-low", error_law="slash", repetitions=1, seed=5)
        X, Y, _, _, B = generate_simulation(spec, 0)
        noise = Y - X @ B
        # a slash draw exceeds 3 in absolute value far more often than a normal
        assert np.abs(noise).max() > 3.0


class TestRunStudy:
    def test_rows_and_aggregates(self):
        spec = make_simulation_spec("sim3-low", error_law="normal", repetitions=3, seed=0)
        result = run_study(spec, ["pls", "fpqr-li"])
        assert len(result.reports) == 6
        assert [a.model_tag for a in result.aggregates] == ["pls", "fpqr-li"]
        for agg in result.aggregates:
            assert agg.included == 3
            assert agg.excluded == 0
            assert agg.wall_time_mean > 0
        by_tag = {a.model_tag: a for a in result.aggregates}
        li_rows = [r.beta_distance for r in result.reports if r.model_tag == "fpqr-li"]
        assert by_tag["fpqr-li"].beta_distance_mean == pytest.approx(np.mean(li_rows))
        assert by_tag["fpqr-li"].beta_distance_std == pytest.approx(np.std(li_rows, ddof=1))

    def test_duplicate_tags_rejected(self):
        spec = make_simulation_spec("sim3-low", error_law="normal", repetitions=1, seed=0)
        with pytest.raises(ValueError, match="unique"):
            run_study(spec, ["pls", "pls"])

    def test_failing_recipe_excludes_whole_repetition(self):
        spec = make_simulation_spec("sim3-low", error_law="normal", repetitions=2, seed=0)

        calls = {"count": 0}

        def flaky_fit(X, Y, h, center="mean"):
            calls["count"] += 1
            if calls["count"] == 2:  # fail on repetition 1
                raise ValueError("synthetic failure")
            return fit_pls(X, Y, h)

        recipes = [ModelRecipe("pls", "pls"), parse_recipe("fpqr-li")]
        flaky = ModelRecipe("flaky", "pls")
        object.__setattr__(flaky, "fit", flaky_fit)
        result = run_study(spec, [flaky, *recipes])
        assert len(result.excluded) == 1
        assert result.excluded[0][0] == 1
        assert result.excluded[0][1] == "flaky"
        for agg in result.aggregates:
            assert agg.included == 1
            assert agg.excluded == 1
