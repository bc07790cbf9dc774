import itertools
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from prosocial.stats import (
    ContingencyTable,
    DegenerateTableError,
    SeparationError,
    chi2_sf,
    chi_square_independence,
    gammaincc,
    log_likelihood,
    logistic_fit,
    mann_whitney_u,
    midranks,
    predictive_margin,
    score,
)

from oracles import central_difference, exact_mann_whitney, u_by_pairs


# -- chi-square ---------------------------------------------------------------

def test_identical_rows_give_zero_statistic():
    res = chi_square_independence(ContingencyTable(np.array([[10, 20, 30], [20, 40, 60]])))
    assert res.statistic == pytest.approx(0, abs=1e-12)
    assert res.pvalue == 1.0


def test_two_by_two_hand_computation():
    # E = 15 everywhere, so sum((O-E)^2/E) = 4 * 25/15
    res = chi_square_independence(ContingencyTable(np.array([[10, 20], [20, 10]])))
    assert res.statistic == pytest.approx(20 / 3, abs=1e-12)
    assert res.df == 1


@pytest.mark.parametrize(
    "stat,df,p",
    [(3.841, 1, 0.05), (5.991, 2, 0.05), (6.635, 1, 0.01), (11.070, 5, 0.05), (40.113, 27, 0.05)],
)
def test_textbook_quantiles(stat, df, p):
    assert chi2_sf(stat, df) == pytest.approx(p, abs=1e-3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 300), st.floats(0.05, 80))
def test_incomplete_gamma_matches_scipy(x, a):
    assert gammaincc(a, x) == pytest.approx(scipy.stats.gamma.sf(x, a), rel=1e-9, abs=1e-14)


def test_degenerate_table():
    with pytest.raises(DegenerateTableError):
        chi_square_independence(ContingencyTable(np.array([[0, 0], [3, 4]])))
    with pytest.raises(ValueError):
        ContingencyTable(np.array([[1, 2, 3]]))
    with pytest.raises(ValueError):
        ContingencyTable(np.array([[1, -2], [3, 4]]))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_chi_square_permutation_invariant(r, k, seed):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 50, size=(r, k))
    base = chi_square_independence(ContingencyTable(counts))
    perm = counts[rng.permutation(r)][:, rng.permutation(k)]
    other = chi_square_independence(ContingencyTable(perm))
    assert other.statistic == pytest.approx(base.statistic, rel=1e-12, abs=1e-12)
    ref = scipy.stats.chi2_contingency(counts, correction=False)
    assert base.statistic == pytest.approx(ref[0], rel=1e-10)
    assert base.pvalue == pytest.approx(ref[1], rel=1e-8, abs=1e-14)


# -- Mann-Whitney -------------------------------------------------------------

def test_midranks():
    assert midranks(np.array([3.0, 1.0, 3.0, 2.0])).tolist() == [3.5, 1.0, 3.5, 2.0]


def test_identical_samples_u_is_half_product():
    x = [1, 2, 2, 5]
    assert mann_whitney_u(x, list(x)).statistic == len(x) ** 2 / 2


def test_full_separation_gives_zero():
    assert mann_whitney_u([1, 2, 3], [4, 5, 6, 7]).statistic == 0


def test_small_exact_example():
    u, p = exact_mann_whitney([1, 2], [3, 4])
    assert u == 0
    assert p == pytest.approx(1 / 3)
    assert mann_whitney_u([1, 2], [3, 4]).statistic == 0


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        mann_whitney_u([], [1.0])


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 6), min_size=1, max_size=12),
    st.lists(st.integers(0, 6), min_size=1, max_size=12),
)
def test_u_counts_pairs_and_matches_scipy(x, y):
    res = mann_whitney_u(x, y)
    assert res.statistic == pytest.approx(u_by_pairs(x, y))
    assert 0.0 <= res.pvalue <= 1.0
    if len(set(x + y)) > 1:
        ref = scipy.stats.mannwhitneyu(x, y, alternative="two-sided", use_continuity=True, method="asymptotic")
        assert res.pvalue == pytest.approx(ref.pvalue, abs=1e-12)


def test_normal_approximation_close_to_exact_for_moderate_samples():
    # sizes from 5 upwards stay within 0.02 of the exact enumeration
    for n1, n2 in [(5, 5), (5, 6), (6, 6)]:
        values = np.arange(n1 + n2, dtype=float)
        worst = 0.0
        for idx in itertools.combinations(range(n1 + n2), n1):
            x = values[list(idx)]
            y = np.delete(values, list(idx))
            worst = max(worst, abs(mann_whitney_u(x, y).pvalue - exact_mann_whitney(x, y)[1]))
        assert worst <= 0.02


# -- logistic regression -----------------------------------------------------

def simulate_logit(beta, n, seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.normal(size=(n, len(beta) - 1))])
    p = 1 / (1 + np.exp(-(X @ beta)))
    return X, (rng.random(n) < p).astype(float)


def test_intercept_only_is_logit_of_mean():
    y = np.array([1, 0, 0, 0] * 50, dtype=float)
    fit = logistic_fit(np.ones((200, 1)), y, ["intercept"])
    assert fit["intercept"] == pytest.approx(math.log(0.25 / 0.75), abs=1e-9)
    assert fit.converged


def test_recovers_known_coefficients():
    beta = np.array([-1.0, 0.8])
    X, y = simulate_logit(beta, 50_000, seed=21)
    fit = logistic_fit(X, y, ["intercept", "x"])
    assert np.all(np.abs(fit.coef - beta) <= 3 * fit.stderr)


def test_loglik_non_decreasing_and_score_zero():
    X, y = simulate_logit(np.array([0.3, -1.2, 0.5, 2.0]), 5000, seed=4)
    fit = logistic_fit(X, y)
    hist = np.array(fit.loglik_history)
    assert (np.diff(hist) >= -1e-9).all()
    g = score(fit.coef, X, y)
    assert np.abs(g).max() <= 1e-6
    fd = central_difference(lambda b: log_likelihood(b, X, y), fit.coef)
    assert np.abs(fd - g).max() <= 1e-4 * max(1.0, np.abs(g).max())


def test_score_matches_finite_differences_away_from_optimum():
    X, y = simulate_logit(np.array([0.3, -1.2, 0.5]), 3000, seed=5)
    beta = np.array([0.1, 0.2, -0.3])
    g = score(beta, X, y)
    fd = central_difference(lambda b: log_likelihood(b, X, y), beta)
    assert np.allclose(fd, g, rtol=1e-4)


def test_matches_scipy_optimiser():
    from scipy.optimize import minimize

    X, y = simulate_logit(np.array([0.5, 1.0, -0.5]), 4000, seed=8)
    fit = logistic_fit(X, y)
    ref = minimize(lambda b: -log_likelihood(b, X, y), np.zeros(3), jac=lambda b: -score(b, X, y), method="BFGS",
                   options={"gtol": 1e-10})
    assert np.allclose(fit.coef, ref.x, atol=1e-5)


def test_constant_outcome_raises_separation():
    with pytest.raises(SeparationError):
        logistic_fit(np.ones((10, 1)), np.zeros(10))


def test_perfect_separation_detected():
    x = np.linspace(-1, 1, 200)
    X = np.column_stack([np.ones_like(x), x])
    with pytest.raises(SeparationError):
        logistic_fit(X, (x > 0).astype(float))


def test_collinear_columns_dropped_and_reported():
    X, y = simulate_logit(np.array([0.2, 0.7]), 2000, seed=9)
    X = np.column_stack([X, 2 * X[:, 1]])
    fit = logistic_fit(X, y, ["intercept", "x", "x_twice"])
    assert fit.dropped == ("x_twice",)
    assert fit.names == ("intercept", "x")


def test_non_binary_outcome_rejected():
    with pytest.raises(ValueError):
        logistic_fit(np.ones((4, 1)), np.array([0, 1, 2, 1]))


# -- predictive margins ------------------------------------------------------

def test_margin_of_intercept_only_fit_is_sample_mean():
    y = np.array([1, 0, 0, 1, 1] * 40, dtype=float)
    fit = logistic_fit(np.ones((200, 1)), y, ["intercept"])
    assert np.allclose(predictive_margin(fit, {}, "intercept", [1, 1, 1]), y.mean())


def test_margin_at_zero_profile_is_inverse_logit_intercept():
    X, y = simulate_logit(np.array([-0.4, 0.6, 0.3]), 3000, seed=10)
    fit = logistic_fit(X, y, ["intercept", "a", "b"])
    (p,) = predictive_margin(fit, {"b": 0.0}, "a", [0.0])
    assert p == pytest.approx(1 / (1 + math.exp(-fit["intercept"])))


def test_margin_slope_larger_with_positive_interaction():
    rng = np.random.default_rng(12)
    n = 40_000
    norm = rng.random(n)
    inc = (rng.random(n) < 0.5).astype(float)
    eta = -0.5 + 0.2 * norm + 0.1 * inc + 2.0 * norm * inc
    y = (rng.random(n) < 1 / (1 + np.exp(-eta))).astype(float)
    X = np.column_stack([np.ones(n), norm, inc, norm * inc])
    fit = logistic_fit(X, y, ["intercept", "norm", "inc", "norm:inc"])
    grid = np.linspace(0, 1, 11)
    with_inc = predictive_margin(fit, {"inc": 1.0}, "norm", grid)
    without = predictive_margin(fit, {"inc": 0.0}, "norm", grid)
    assert with_inc[-1] - with_inc[0] > without[-1] - without[0]
    assert ((with_inc > 0) & (with_inc < 1)).all()


def test_margin_rejects_unknown_covariate():
    fit = logistic_fit(np.ones((20, 1)), np.array([0, 1] * 10, dtype=float), ["intercept"])
    with pytest.raises(KeyError):
        predictive_margin(fit, {"height": 1.0}, "intercept", [1.0])
