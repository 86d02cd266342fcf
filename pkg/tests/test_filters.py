import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from sketchreg.errors import InvalidGrid, InvalidRegularization
from sketchreg.filters import FilterSpec, apply_filter, qualification_check, residual

LAM_GRID = np.geomspace(0.01, 1.0, 7)


def test_ridge_closed_form():
    u = np.array([0.0, 0.1, 1.0, 3.0])
    assert_allclose(apply_filter(FilterSpec.iterated_ridge(1), u, 0.5), 1.0 / (u + 0.5))


def test_iterated_ridge_at_zero():
    f = FilterSpec.iterated_ridge(4)
    assert apply_filter(f, np.array([0.0]), 0.2)[0] == pytest.approx(4 / 0.2)


def test_iterated_ridge_matches_closed_form():
    f = FilterSpec.iterated_ridge(3)
    u = np.geomspace(1e-3, 1.0, 20)
    lam = 0.1
    assert_allclose(apply_filter(f, u, lam), (1 - (lam / (lam + u)) ** 3) / u, rtol=1e-12)


def test_cutoff_values():
    f = FilterSpec.spectral_cutoff()
    assert_allclose(apply_filter(f, np.array([0.0, 0.05, 0.1, 0.5]), 0.1), [0, 0, 10, 2])
    assert_allclose(residual(f, np.array([0.05, 0.5]), 0.1), [1, 0])


def test_declared_constants():
    f = FilterSpec.iterated_ridge(3)
    assert (f.declared_E, f.declared_F) == (3, 1)
    g = FilterSpec.spectral_cutoff(2)
    assert (g.declared_E, g.declared_F) == (2, 4)


def test_qualification_examples():
    r = qualification_check(FilterSpec.iterated_ridge(1), 1.0, LAM_GRID, 200)
    assert r.passed and r.E_hat <= 1 + 1e-9 and r.F_hat <= 1 + 1e-9
    r = qualification_check(FilterSpec.spectral_cutoff(2), 1.0, LAM_GRID, 200)
    assert r.passed and r.E_hat <= 2 + 1e-9 and r.F_hat <= 4 + 1e-9


def test_qualification_forced_failure():
    f = FilterSpec.iterated_ridge(3, declared_F=0.5)
    assert not qualification_check(f, 1.0, LAM_GRID, 200).passed


@pytest.mark.parametrize("grid", [[], [0.0, 0.5], [1.5]])
def test_bad_grids(grid):
    with pytest.raises(InvalidGrid):
        qualification_check(FilterSpec.iterated_ridge(1), 1.0, grid, 10)


def test_nonpositive_lambda():
    with pytest.raises(InvalidRegularization):
        apply_filter(FilterSpec.iterated_ridge(1), np.ones(2), 0.0)


def test_bad_tau():
    with pytest.raises(ValueError):
        FilterSpec.iterated_ridge(1.5)
    with pytest.raises(ValueError):
        FilterSpec("tikhonov", 1)


@settings(max_examples=60, deadline=None)
@given(tau=st.integers(1, 6), lam=st.floats(1e-4, 1.0),
       u=st.lists(st.floats(0.0, 4.0), min_size=1, max_size=20))
def test_filter_plus_residual_is_one(tau, lam, u):
    u = np.array(u)
    for f in (FilterSpec.iterated_ridge(tau), FilterSpec.spectral_cutoff(tau)):
        assert_allclose(apply_filter(f, u, lam) * u + residual(f, u, lam), 1.0, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(tau=st.integers(1, 6), lam=st.floats(1e-4, 1.0))
def test_iterated_ridge_nonincreasing(tau, lam):
    u = np.linspace(0, 4, 400)
    g = apply_filter(FilterSpec.iterated_ridge(tau), u, lam)
    assert np.all(np.diff(g) <= 1e-12 * g[:-1])
