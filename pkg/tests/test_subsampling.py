import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import chisquare

from sketchreg.diagnostics import empirical_effective_dim, projection_error_empirical
from sketchreg.errors import DegenerateScores, InvalidDimension, InvalidRegularization
from sketchreg.subsampling import (
    leverage_scores_approx,
    leverage_scores_approx_features,
    leverage_scores_exact,
    leverage_scores_features,
    nystrom_als,
    nystrom_uniform,
)

from .conftest import random_psd
from .oracles import gauss_jordan_inverse


def test_exact_small_cases():
    assert_allclose(leverage_scores_exact(np.eye(2), 1.0).scores, [0.5, 0.5])
    assert_allclose(leverage_scores_exact(np.diag([1.0, 0.0]), 1.0).scores, [0.5, 0.0])


def test_exact_against_gauss_jordan(rng):
    K = random_psd(rng, 6)
    lam = 0.3
    want = np.diag(K @ gauss_jordan_inverse(K + lam * np.eye(6)))
    assert_allclose(leverage_scores_exact(K, lam).scores, want, atol=1e-10)


def test_features_route_matches_gram(rng):
    X = rng.standard_normal((40, 5))
    lam = 0.05
    a = leverage_scores_features(X, lam).scores
    b = leverage_scores_exact(X @ X.T / 40, lam).scores
    assert_allclose(a, b, atol=1e-10)


def test_sum_equals_effective_dim(rng):
    K = random_psd(rng, 25, rank=10)
    for lam in (1e-3, 0.1, 2.0):
        s = leverage_scores_exact(K, lam).scores.sum()
        assert s == pytest.approx(empirical_effective_dim(K, lam), abs=1e-8)


def test_exact_monotone_in_lambda(rng):
    K = random_psd(rng, 15, decay=0.6)
    prev = None
    for lam in np.geomspace(1e-4, 10, 12):
        cur = leverage_scores_exact(K, lam).scores
        if prev is not None:
            assert np.all(cur <= prev + 1e-12)
        prev = cur


def test_bad_lambda():
    with pytest.raises(InvalidRegularization):
        leverage_scores_exact(np.eye(2), 0.0)


def test_approx_full_subsample_is_exact(rng):
    K = random_psd(rng, 30, rank=12)
    res = leverage_scores_approx(K, 0.1, 30, seed=1)
    assert_allclose(res.scores, leverage_scores_exact(K, 0.1).scores, atol=1e-8)
    assert res.als_factor == pytest.approx(1.0, abs=1e-8)


def test_approx_identity_gram():
    res = leverage_scores_approx(np.eye(10), 0.5, 4, seed=3)
    exact = 1 / 1.5
    assert np.all(np.maximum(res.scores / exact, exact / res.scores) <= res.als_factor + 1e-12)


def test_approx_factor_pinned_seed(rng):
    F = rng.standard_normal((512, 40)) * (0.8 ** np.arange(40))
    K = F @ F.T / 512
    res = leverage_scores_approx(K, 1e-3, 128, seed=0)
    assert res.als_factor <= 4


def test_approx_features_matches_gram_route(rng):
    X = rng.standard_normal((60, 4))
    a = leverage_scores_approx_features(X, 0.05, 20, seed=5)
    b = leverage_scores_approx(X @ X.T / 60, 0.05, 20, seed=5)
    assert_allclose(a.scores, b.scores, atol=1e-10)
    assert a.als_factor == pytest.approx(b.als_factor, rel=1e-8)


def test_approx_bounds():
    with pytest.raises(InvalidDimension):
        leverage_scores_approx(np.eye(4), 0.1, 5)


def test_uniform_full_and_single():
    G = nystrom_uniform(7, 7, seed=0)
    assert sorted(G.indices) == list(range(7))
    assert projection_error_empirical(random_psd(np.random.default_rng(0), 7), G) <= 1e-10
    assert list(nystrom_uniform(1, 1).indices) == [0]
    with pytest.raises(InvalidDimension):
        nystrom_uniform(3, 4)


def test_uniform_reproducible():
    a = nystrom_uniform(100, 30, seed=1).indices
    assert np.array_equal(a, nystrom_uniform(100, 30, seed=1).indices)
    assert not np.array_equal(np.sort(a), np.sort(nystrom_uniform(100, 30, seed=2).indices))


def test_als_uniform_scores_weights():
    G = nystrom_als(np.ones(10), 5, seed=0)
    assert_allclose(G.weights, np.sqrt(10 / 5))


def test_als_single_score():
    s = np.zeros(6)
    s[4] = 0.3
    assert np.all(nystrom_als(s, 9, seed=1).indices == 4)
    with pytest.raises(DegenerateScores):
        nystrom_als(np.zeros(3), 2)


def test_als_draw_frequencies(rng):
    X = rng.standard_normal((512, 3)) * [1.0, 0.3, 0.05]
    scores = leverage_scores_features(X, 1e-3)
    q = scores.scores / scores.scores.sum()
    G = nystrom_als(scores, 100_000, seed=8)
    counts = np.bincount(G.indices, minlength=512)
    # 3-sigma bands on each of 512 cells would be breached by chance; use a
    # Bonferroni-sized band per cell plus a joint goodness-of-fit test
    sd = np.sqrt(100_000 * q * (1 - q))
    assert np.all(np.abs(counts - 100_000 * q) <= 4.5 * sd + 1)
    assert chisquare(counts, 100_000 * q).pvalue > 1e-3


def test_als_unbiased():
    n = 16
    s = np.random.default_rng(1).uniform(0.1, 1.0, n)
    acc = np.zeros((n, n))
    for seed in range(2000):
        M = nystrom_als(s, 8, seed=seed).materialize()
        acc += M.T @ M
    assert np.max(np.abs(acc / 2000 - np.eye(n))) <= 0.1
