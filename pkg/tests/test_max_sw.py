import numpy as np
import pytest

from markovsw.exact_ot import exact_wasserstein
from markovsw.max_sw import AscentConfig, max_ksw, max_sw
from markovsw.measure import EmpiricalMeasure, project
from markovsw.ot1d import wasserstein_1d
from markovsw.sphere import RngStream, sample_uniform_sphere
from markovsw.sw import sliced_distance

from conftest import random_cloud

C = 3.0
MU0 = EmpiricalMeasure([[0.0, 0.0]])
MUC = EmpiricalMeasure([[C, 0.0]])


def angle_mod_sign(u, v):
    return np.arccos(min(1.0, abs(float(u @ v))))


def test_identical_measures(rng):
    mu = random_cloud(rng, 10, 3)
    assert max_sw(mu, mu, 2, AscentConfig(20, 0.1, 1))[0] == 0.0
    assert max_ksw(mu, mu, 2, 2, AscentConfig(20, 0.1, 1))[0] == 0.0


def test_point_masses_reach_grid_search_optimum():
    grid = np.linspace(0, np.pi, 10_000, endpoint=False)
    objective = [sliced_distance(MU0, MUC, [[np.cos(a), np.sin(a)]], 2) for a in grid]
    best = grid[int(np.argmax(objective))]
    target = np.array([np.cos(best), np.sin(best)])
    for seed in range(10):
        value, theta = max_sw(MU0, MUC, 2, AscentConfig(50, 0.1, seed))
        assert angle_mod_sign(theta, target) <= 0.01
        assert value == pytest.approx(max(objective), rel=1e-4)


def test_one_dimensional(rng):
    mu, nu = random_cloud(rng, 7, 1), random_cloud(rng, 7, 1, shift=1.0)
    exact = wasserstein_1d(project(mu, [1.0]), project(nu, [1.0]), 2)
    for steps in (1, 2, 10):
        assert max_sw(mu, nu, 2, AscentConfig(steps, 0.1, 3))[0] == pytest.approx(exact, abs=1e-12)


def test_max_ksw_k1_matches_max_sw_trajectory(rng):
    mu, nu = random_cloud(rng, 12, 3), random_cloud(rng, 12, 3, shift=[1, 0, 0])
    for seed in range(5):
        cfg = AscentConfig(15, 0.1, seed)
        v1, t1 = max_sw(mu, nu, 2, cfg)
        v2, t2 = max_ksw(mu, nu, 2, 1, cfg)
        assert v1 == v2
        assert t1.tobytes() == t2[0].tobytes()


def test_max_ksw_full_basis_on_point_masses():
    # any orthonormal 2D block gives ((C^2 cos^2 + C^2 sin^2)/2)^(1/2) = C/sqrt(2)
    grid = np.linspace(0, np.pi / 2, 2000)
    oracle = max(sliced_distance(MU0, MUC, [[np.cos(a), np.sin(a)], [-np.sin(a), np.cos(a)]], 2) for a in grid)
    value, block = max_ksw(MU0, MUC, 2, 2, AscentConfig(100, 0.1, 0))
    assert value == pytest.approx(oracle, rel=0.02)
    assert np.max(np.abs(block @ block.T - np.eye(2))) <= 1e-9


def test_sandwich_and_ascent(rng):
    for seed in range(15):
        mu = random_cloud(rng, 15, 4)
        nu = random_cloud(rng, 15, 4, shift=rng.standard_normal(4), scale=1.4)
        cfg = AscentConfig(20, 0.1, seed)
        value, theta = max_sw(mu, nu, 2, cfg)
        start = sample_uniform_sphere(4, RngStream(seed, 1).generator())
        assert value <= exact_wasserstein(mu, nu, 2) + 1e-9
        assert value >= sliced_distance(mu, nu, start[None, :], 2) - 1e-9
        assert abs(np.linalg.norm(theta) - 1) <= 1e-9
        kval, block = max_ksw(mu, nu, 2, 3, cfg)
        assert kval <= exact_wasserstein(mu, nu, 2) + 1e-9
        assert np.max(np.abs(block @ block.T - np.eye(3))) <= 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        AscentConfig(0, 0.1)
    with pytest.raises(ValueError):
        AscentConfig(5, 0.0)
    with pytest.raises(ValueError):
        AscentConfig(5, float("inf"))


def test_collapsed_block_is_redrawn():
    from markovsw.max_sw import _reorthonormalize

    block = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    fixed = _reorthonormalize(block, RngStream(0, 1).generator())
    np.testing.assert_array_equal(fixed[0], [1.0, 0.0, 0.0])
    assert np.max(np.abs(fixed @ fixed.T - np.eye(2))) <= 1e-9
