from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eos import (
    ContractViolationError,
    Dataset,
    EosConfig,
    GaussianModel,
    InitPolicy,
    InvalidConfigError,
    InvalidInputError,
    ModelError,
    SquaredEuclideanModel,
    Termination,
    effective_sample_size,
    fit,
    objective,
    shannon_entropy,
    w_step,
)

from conftest import grid_min_objective, grid_objective, planted_gaussian_2d, simplex_grid


# ---------------------------------------------------------------------------
# w_step
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("c", [0.0, -3.5, 1e4])
def test_w_step_constant_errors_is_uniform(c):
    w = w_step(np.full(4, c), 1.0)
    assert w == pytest.approx([0.25, 0.25, 0.25, 0.25], abs=1e-15)


def test_w_step_two_point_example():
    # Independent oracle: dense grid over the 1-simplex at step 1e-4.
    g = np.array([0.0, 1.0])
    grid = simplex_grid(2, 1e-4)
    values = grid_objective(grid, g, 1.0)
    argmin = grid[np.argmin(values)]

    w = w_step(g, 1.0)
    expected = 1.0 / (1.0 + math.exp(-1.0))  # 0.7310585786300049
    assert w[0] == pytest.approx(expected, abs=1e-12)
    assert w[1] == pytest.approx(1.0 - expected, abs=1e-12)
    assert np.abs(w - argmin).max() < 1e-4
    assert objective(g, w, 1.0) <= values.min() + 1e-6


def test_w_step_shift_invariance_example():
    g = np.array([0.3, -2.0, 5.5, 0.0, 1.1])
    base = w_step(g, 0.7)
    for c in (-100.0, -3.2, 41.0, 100.0):
        assert np.abs(w_step(g + c, 0.7) - base).max() <= 1e-12


def test_w_step_large_alpha_dominated_by_entropy():
    w = w_step(np.array([0.0, 5.0, 10.0]), 1e8)
    assert np.abs(w - 1.0 / 3.0).max() < 1e-7


def test_w_step_rejects_bad_inputs():
    with pytest.raises(InvalidInputError):
        w_step(np.array([0.0, np.nan]), 1.0)
    with pytest.raises(InvalidInputError):
        w_step(np.array([0.0, np.inf]), 1.0)
    with pytest.raises(InvalidConfigError):
        w_step(np.array([0.0, 1.0]), 0.0)
    with pytest.raises(InvalidConfigError):
        w_step(np.array([0.0, 1.0]), -2.0)
    with pytest.raises(InvalidInputError):
        w_step(np.array([]), 1.0)


@settings(deadline=None)
@given(
    st.lists(st.floats(-1e8, 1e8, allow_nan=False), min_size=1, max_size=40),
    st.floats(1e-3, 1e6, allow_nan=False),
)
def test_w_step_simplex_closure_adversarial(g_list, alpha):
    w = w_step(np.asarray(g_list), alpha)
    assert w.shape == (len(g_list),)
    assert np.all(w >= 0.0)
    assert abs(float(w.sum()) - 1.0) <= 1e-12
    assert np.all(np.isfinite(w))


@settings(deadline=None)
@given(
    st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=30),
    st.floats(-100, 100, allow_nan=False),
    st.floats(0.5, 10.0, allow_nan=False),
)
def test_w_step_shift_invariance_property(g_list, c, alpha):
    g = np.asarray(g_list)
    assert np.abs(w_step(g + c, alpha) - w_step(g, alpha)).max() <= 1e-12


@settings(deadline=None)
@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=30),
    st.floats(0.5, 20.0, allow_nan=False),
)
def test_w_step_temperature_scaling(g_list, alpha):
    g = np.asarray(g_list)
    assert np.abs(w_step(g, alpha) - w_step(g / alpha, 1.0)).max() <= 1e-12


def test_w_step_global_minimality_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        t = int(rng.integers(2, 4))
        g = rng.normal(0.0, 3.0, size=t)
        alpha = float(np.exp(rng.uniform(np.log(0.01), np.log(100.0))))
        value = objective(g, w_step(g, alpha), alpha)
        assert value <= grid_min_objective(g, alpha, 1e-3) + 1e-6


# ---------------------------------------------------------------------------
# objective / entropy
# ---------------------------------------------------------------------------

def test_objective_uniform_two_points():
    assert objective(np.zeros(2), np.array([0.5, 0.5]), 1.0) == pytest.approx(
        -math.log(2.0), abs=1e-12
    )


def test_objective_degenerate_weights_zero_entropy():
    # 0 * log(0) = 0, so only the weighted error remains.
    assert objective(np.ones(3), np.array([1.0, 0.0, 0.0]), 2.0) == pytest.approx(1.0, abs=1e-15)


def test_objective_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        objective(np.zeros(3), np.array([0.5, 0.5]), 1.0)


def test_objective_rejects_off_simplex_weights():
    with pytest.raises(InvalidInputError):
        objective(np.zeros(2), np.array([0.7, 0.7]), 1.0)
    with pytest.raises(InvalidInputError):
        objective(np.zeros(2), np.array([-0.1, 1.1]), 1.0)


def test_entropy_bounds():
    assert shannon_entropy(np.full(8, 0.125)) == pytest.approx(math.log(8), abs=1e-12)
    one_hot = np.zeros(5)
    one_hot[2] = 1.0
    assert shannon_entropy(one_hot) == 0.0
    assert effective_sample_size(np.full(10, 0.1)) == pytest.approx(10.0, rel=1e-12)


def test_entropy_monotone_in_alpha_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = rng.normal(size=int(rng.integers(2, 25)))
        a1, a2 = sorted(rng.uniform(0.05, 50.0, size=2))
        if a1 == a2:
            continue
        assert shannon_entropy(w_step(g, a1)) <= shannon_entropy(w_step(g, a2)) + 1e-12


def test_entropy_strictly_increasing_on_alpha_grid():
    g = np.random.default_rng(17).normal(size=50)
    alphas = np.logspace(-2, 2, 10)
    entropies = [shannon_entropy(w_step(g, a)) for a in alphas]
    assert all(e2 > e1 for e1, e2 in zip(entropies, entropies[1:]))


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def test_fit_identical_points_uniform_weights():
    data = Dataset(np.tile([1.5, -2.0], (30, 1)))
    result = fit(data, GaussianModel(), EosConfig(alpha=0.7))
    assert np.abs(result.weights - 1.0 / 30).max() <= 1e-10
    assert result.theta.mu == pytest.approx([1.5, -2.0], abs=1e-12)
    assert result.termination is Termination.CONVERGED


def test_fit_monotone_descent_random_runs():
    rng = np.random.default_rng(23)
    for _ in range(10):
        t = int(rng.integers(30, 300))
        d = int(rng.integers(1, 8))
        data = Dataset(rng.normal(size=(t, d)) * rng.uniform(0.5, 3.0))
        alpha = float(np.exp(rng.uniform(np.log(0.05), np.log(50.0))))
        result = fit(data, GaussianModel(), EosConfig(alpha=alpha))
        traj = result.objective_trajectory
        assert np.all(np.diff(traj) <= 1e-10 * np.abs(traj[:-1]) + 1e-15)
        assert result.termination in (Termination.CONVERGED, Termination.MAX_ITERS_REACHED)


def test_fit_planted_outliers_get_smallest_weights():
    data, planted = planted_gaussian_2d(seed=7)
    result = fit(data, GaussianModel(), EosConfig(alpha=1.0))
    bottom = frozenset(int(i) for i in np.argsort(result.weights)[: len(planted)])
    assert bottom == planted


def test_fit_bit_reproducible_with_uniform_init():
    data, _ = planted_gaussian_2d(seed=3)
    config = EosConfig(alpha=0.8)
    first = fit(data, GaussianModel(), config)
    second = fit(data, GaussianModel(), config)
    assert np.array_equal(first.weights, second.weights)
    assert np.array_equal(first.objective_trajectory, second.objective_trajectory)
    assert first.iterations == second.iterations


def test_fit_dirichlet_init_seeded():
    data, _ = planted_gaussian_2d(seed=3)
    config = EosConfig(alpha=0.8, init_policy=InitPolicy.SEEDED_DIRICHLET, seed=99)
    first = fit(data, GaussianModel(), config)
    second = fit(data, GaussianModel(), config)
    assert np.array_equal(first.weights, second.weights)


def test_fit_respects_iteration_cap():
    data, _ = planted_gaussian_2d(seed=3)
    result = fit(data, GaussianModel(), EosConfig(alpha=1.0, max_iters=1))
    assert result.iterations == 1
    assert result.termination is Termination.MAX_ITERS_REACHED


def test_fit_squared_euclidean_model():
    rng = np.random.default_rng(1)
    data = Dataset(rng.normal(size=(100, 3)))
    result = fit(data, SquaredEuclideanModel(), EosConfig(alpha=5.0))
    traj = result.objective_trajectory
    assert np.all(np.diff(traj) <= 1e-10 * np.abs(traj[:-1]) + 1e-15)
    assert result.theta.shape == (3,)


class _SabotagedModel:
    """Returns a wildly worse center on the second update."""

    def __init__(self):
        self.calls = 0

    def update_theta(self, dataset, weights):
        self.calls += 1
        if self.calls >= 2:
            return np.full(dataset.n_features, 1e6)
        return weights @ dataset.instances

    def evaluate(self, dataset, theta):
        diff = dataset.instances - theta
        return np.einsum("ij,ij->i", diff, diff)


def test_fit_aborts_on_objective_increase():
    rng = np.random.default_rng(2)
    data = Dataset(rng.normal(size=(50, 2)))
    with pytest.raises(ContractViolationError):
        fit(data, _SabotagedModel(), EosConfig(alpha=1.0))


class _FailingModel:
    def update_theta(self, dataset, weights):
        raise ModelError("synthetic failure")

    def evaluate(self, dataset, theta):  # pragma: no cover - never reached
        return np.zeros(dataset.n_instances)


def test_fit_wraps_model_errors_with_iteration():
    data = Dataset(np.zeros((5, 1)))
    with pytest.raises(ModelError, match="iteration 1"):
        fit(data, _FailingModel(), EosConfig(alpha=1.0))


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=0.0)
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=-1.0)
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=math.nan)
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=1.0, tol=0.0)
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=1.0, max_iters=0)
    with pytest.raises(InvalidConfigError):
        EosConfig(alpha=1.0, seed=-1)
