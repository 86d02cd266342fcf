import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sketchreg.errors import InvalidModel, InvalidNormSpec
from sketchreg.synthworld import (
    NormSpec,
    default_dimension,
    error_norm,
    excess_risk_mc,
    make_model,
    population_effective_dim,
    sample,
)


def _toy(sigma, w=None, zeta=1.0):
    base = make_model(1.0, zeta, 8)
    sigma = np.asarray(sigma, float)
    w = np.zeros_like(sigma) if w is None else np.asarray(w, float)
    return type(base)(1.0, zeta, 1.0, 0.0, 0.05, sigma, w)


def test_gamma_one_spectrum():
    assert_allclose(make_model(1.0, 0.5, 10).sigma[:3], [1, 1 / 2, 1 / 3])


def test_zeta_zero_source_norm():
    m = make_model(0.7, 0.0, 50, R=2.0)
    assert m.source_norm() == pytest.approx(2.0, rel=1e-12)
    i = np.arange(1, 51)
    assert_allclose(m.coefficients / m.coefficients[0], i ** (-0.55))


@pytest.mark.parametrize("zeta", [0.25, 0.5, 1.0, 2.0])
def test_source_certificate(zeta):
    m = make_model(0.5, zeta, 500, R=1.3, seed=4)
    assert m.source_norm() == pytest.approx(1.3, abs=1e-10)


def test_kappa_compensated_sum():
    m = make_model(0.5, 1.0, 1000)
    assert m.kappa_sq == pytest.approx(math.fsum(i ** -2.0 for i in range(1, 1001)), abs=1e-12)


def test_sample_properties():
    m = make_model(0.8, 0.5, 40)
    data = sample(m, 200, seed=1)
    assert_allclose(np.sum(data.points**2, axis=1), m.kappa_sq, rtol=1e-12)
    assert np.array_equal(data.points, sample(m, 200, seed=1).points)


def test_noiseless_zero_target():
    m = _toy(np.ones(8) / np.arange(1, 9))
    assert_allclose(sample(m, 30, seed=0).labels, 0.0)


def test_covariance_moments():
    m = make_model(1.0, 0.5, 20, noise_sigma=0.0)
    X = sample(m, 100_000, seed=2).points
    var = np.mean(X[:, :10] ** 2, axis=0)
    # x_i^2 = sigma_i exactly; the off-diagonal second moments are binomial
    assert_allclose(var, m.sigma[:10], rtol=1e-10)
    C = X[:, :10].T @ X[:, :10] / 100_000
    off = C[~np.eye(10, dtype=bool)]
    sd = np.sqrt(np.outer(m.sigma[:10], m.sigma[:10])[~np.eye(10, dtype=bool)] / 100_000)
    assert np.all(np.abs(off) <= 4.5 * sd)


def test_error_norm_examples():
    m = _toy([1.0, 0.25])
    assert error_norm(m, m.w_true) == 0.0
    assert error_norm(m, [1.0, 1.0], NormSpec(0.5)) == pytest.approx(math.sqrt(2))
    assert error_norm(m, [1.0, 1.0], NormSpec(0.0)) == pytest.approx(math.sqrt(1.25))


def test_norm_spec_validation():
    with pytest.raises(InvalidNormSpec):
        NormSpec(0.6)
    m = _toy([1.0, 0.25], zeta=0.2)
    with pytest.raises(InvalidNormSpec):
        error_norm(m, [0.0, 0.0], 0.3)


def test_model_validation():
    for kw in [dict(gamma=0.0, zeta=1, d=10), dict(gamma=1.5, zeta=1, d=10),
               dict(gamma=0.5, zeta=-1, d=10), dict(gamma=0.5, zeta=1, d=4)]:
        with pytest.raises(InvalidModel):
            make_model(**kw)
    with pytest.raises(InvalidModel):
        make_model(0.5, 1.0, 10, eps=0.0)


def test_excess_risk_mc_examples():
    m = make_model(1.0, 0.5, 30)
    assert excess_risk_mc(m, m.f_H, 1000) == 0.0
    val, se = excess_risk_mc(m, lambda X: m.f_H(X) + 1.0, 5000, return_se=True)
    assert val == pytest.approx(1.0)


def test_mc_matches_closed_form(rng):
    m = make_model(0.7, 0.5, 60)
    w = m.w_true + 0.3 * rng.standard_normal(60)
    mc, se = excess_risk_mc(m, lambda X: X @ w, 200_000, seed=3, return_se=True)
    assert abs(mc - error_norm(m, w) ** 2) <= 4 * se


def test_isometry(rng):
    m = make_model(0.6, 0.5, 40)
    w = rng.standard_normal(40)
    mc, se = excess_risk_mc(m, lambda X: X @ w + m.f_H(X), 100_000, seed=9, return_se=True)
    assert abs(mc - np.sum(m.sigma * w**2)) <= 4 * se


def test_population_effective_dim():
    m = _toy([1.0, 0.5])
    assert population_effective_dim(m, 0.5) == pytest.approx(7 / 6)
    big = make_model(0.5, 1.0, 300)
    assert population_effective_dim(big, 50.0) <= big.kappa_sq / 50.0


def test_effective_dim_summation_and_scaling():
    m = make_model(0.5, 1.0, 2000)
    want = math.fsum(s / (s + 0.01) for s in (i ** -2.0 for i in range(1, 2001)))
    assert population_effective_dim(m, 0.01) == pytest.approx(want, abs=1e-10)
    lams = np.geomspace(1e-3, 1e-1, 9)
    N = [population_effective_dim(m, lam) for lam in lams]
    slope = np.polyfit(np.log(1 / lams), np.log(N), 1)[0]
    assert abs(slope - 0.5) <= 0.1
    ratio = np.array(N) * lams**0.5
    assert ratio.max() / ratio.min() < 2.0


def test_attainable_tail_converges():
    sums = [np.sum(make_model(0.5, 0.5, d).w_true ** 2) for d in (500, 1000, 2000)]
    assert sums[2] - sums[1] < sums[1] - sums[0]


def test_default_dimension():
    assert default_dimension(1.0, 0.5, 8192) == 1000
    assert default_dimension(1.0, 0.0, 10**6) == 10 * 10**6
