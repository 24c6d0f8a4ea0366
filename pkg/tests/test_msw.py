import numpy as np
import pytest

from markovsw.exact_ot import exact_wasserstein
from markovsw.measure import EmpiricalMeasure
from markovsw.msw import (InputAwareDeterministic, InputAwareVmf, InvalidConfig, MswConfig, OrthogonalBased,
                          RandomWalk, chain_directions, estimator_variance_report, kept_mask, loglog_slope,
                          msw_estimate, msw_estimate_burn_thin, msw_from_directions, sample_chain)
from markovsw.sw import sliced_distance, sw

from conftest import random_cloud, random_weighted

KERNELS = [RandomWalk(20.0), OrthogonalBased(), InputAwareDeterministic(0.1), InputAwareVmf(0.1, 50.0)]
SHARED = [RandomWalk(20.0), OrthogonalBased()]


def pair(rng, n=20, d=3):
    return random_cloud(rng, n, d), random_cloud(rng, n, d, shift=rng.standard_normal(d), scale=1.3)


def test_kept_mask():
    np.testing.assert_array_equal(kept_mask(5), [True] * 5)
    np.testing.assert_array_equal(kept_mask(6, 2, 2), [False, False, False, True, False, True])
    np.testing.assert_array_equal(kept_mask(5, 4, 1), [False] * 4 + [True])


def test_config_validation():
    with pytest.raises(InvalidConfig):
        MswConfig(T=3, burn=3)
    with pytest.raises(InvalidConfig):
        MswConfig(T=3, thin=4)
    with pytest.raises(InvalidConfig):
        MswConfig(L=0)
    with pytest.raises(InvalidConfig):
        InputAwareDeterministic(0.0)
    with pytest.raises(InvalidConfig):
        RandomWalk(-1.0)


@pytest.mark.parametrize("kind", KERNELS)
def test_single_step_chain(kind, rng):
    mu, nu = pair(rng)
    chain = sample_chain(mu, nu, MswConfig(L=1, T=1, transition=kind, seed=3), 1)
    assert chain.directions.shape == (1, 3)
    assert chain.kept.tolist() == [True]


@pytest.mark.parametrize("kind", KERNELS)
def test_chains_are_unit_and_deterministic(kind, rng):
    mu, nu = pair(rng)
    cfg = MswConfig(L=3, T=6, transition=kind, seed=11)
    a = sample_chain(mu, nu, cfg, 2)
    b = sample_chain(mu, nu, cfg, 2)
    assert a.directions.tobytes() == b.directions.tobytes()
    assert np.max(np.abs(np.linalg.norm(a.directions, axis=1) - 1)) <= 1e-9


def test_orthogonal_chain_in_2d_alternates(rng):
    chain = sample_chain(None, None, MswConfig(L=1, T=8, transition=OrthogonalBased(), seed=5), 1, d=2)
    th = chain.directions
    for t in range(len(th) - 1):
        assert abs(th[t] @ th[t + 1]) <= 1e-9
    for t in range(len(th) - 2):
        assert abs(abs(th[t] @ th[t + 2]) - 1) <= 1e-9


def test_input_aware_chain_is_constant_for_identical_measures(rng):
    mu = random_cloud(rng, 10, 3)
    th = sample_chain(mu, mu, MswConfig(L=1, T=6, transition=InputAwareDeterministic(0.1)), 1).directions
    assert np.all(th == th[0])


def test_input_aware_needs_measures():
    with pytest.raises(InvalidConfig):
        sample_chain(None, None, MswConfig(transition=InputAwareDeterministic()), 1, d=3)


@pytest.mark.parametrize("kind", KERNELS)
def test_identity(kind, rng):
    mu = random_cloud(rng, 10, 3)
    assert msw_estimate(mu, mu, MswConfig(L=3, T=4, transition=kind)) == 0.0
    assert msw_estimate_burn_thin(mu, mu, MswConfig(L=3, T=6, transition=kind, burn=2, thin=2)) == 0.0


@pytest.mark.parametrize("kind", KERNELS)
def test_t1_reduces_to_sw_bitwise(kind, rng):
    mu, nu = pair(rng)
    for seed in range(5):
        assert msw_estimate(mu, nu, MswConfig(L=7, T=1, transition=kind, seed=seed)) == sw(mu, nu, 2, 7, seed)


def test_input_aware_beats_sw_at_matched_budget():
    wins = 0
    for s in range(50):
        r = np.random.default_rng(100 + s)
        mu = EmpiricalMeasure(r.standard_normal((100, 2)))
        nu = EmpiricalMeasure(r.standard_normal((100, 2)) + [2.0, 0.0])
        m = msw_estimate(mu, nu, MswConfig(L=2, T=5, transition=InputAwareDeterministic(0.1), seed=s))
        wins += m >= sw(mu, nu, 2, 10, s)
    assert wins >= 45


@pytest.mark.parametrize("kind", KERNELS)
def test_burn_thin_noop_is_bitwise(kind, rng):
    mu, nu = pair(rng)
    for seed in range(5):
        cfg = MswConfig(L=3, T=5, transition=kind, seed=seed)
        assert msw_estimate_burn_thin(mu, nu, cfg) == msw_estimate(mu, nu, cfg)


def test_full_burn_is_endpoint_of_ascent(rng):
    from markovsw.max_sw import AscentConfig, max_sw

    mu, nu = pair(rng)
    for seed in range(5):
        cfg = MswConfig(L=1, T=6, transition=InputAwareDeterministic(0.1), burn=5, seed=seed)
        chain = sample_chain(mu, nu, cfg, 1)
        value = msw_estimate_burn_thin(mu, nu, cfg)
        assert value == sliced_distance(mu, nu, chain.directions[-1:], 2)
        assert value == max_sw(mu, nu, 2, AscentConfig(6, 0.1, seed))[0]


def test_thinning_normalizes_by_kept_count(rng):
    mu, nu = pair(rng)
    # T - M = 7 is not a multiple of N = 2: steps 2, 4, 6, 8 are kept
    cfg = MswConfig(L=2, T=8, transition=OrthogonalBased(), burn=1, thin=2, seed=3)
    chains = [sample_chain(mu, nu, cfg, l) for l in (1, 2)]
    kept = np.concatenate([c.directions[[1, 3, 5, 7]] for c in chains])
    assert msw_estimate_burn_thin(mu, nu, cfg) == pytest.approx(sliced_distance(mu, nu, kept, 2), abs=1e-15)


def test_msw_estimate_refuses_burn():
    mu = EmpiricalMeasure(np.zeros((2, 2)))
    with pytest.raises(InvalidConfig):
        msw_estimate(mu, mu, MswConfig(T=4, burn=1))


@pytest.mark.parametrize("kind", SHARED)
def test_metric_axioms_on_shared_directions(kind, rng):
    d = 3
    thetas = chain_directions(None, None, MswConfig(L=4, T=5, transition=kind, seed=2), d=d)
    for _ in range(30):
        a, b, c = (random_weighted(rng, int(rng.integers(1, 9)), d) for _ in range(3))
        ab, ba = msw_from_directions(a, b, thetas), msw_from_directions(b, a, thetas)
        assert ab == ba
        assert msw_from_directions(a, a, thetas) == 0.0
        assert msw_from_directions(a, c, thetas) <= ab + msw_from_directions(b, c, thetas) + 1e-9


@pytest.mark.parametrize("kind", [InputAwareDeterministic(0.1), InputAwareVmf(0.1, 50.0)])
def test_input_aware_symmetry(kind, rng):
    mu, nu = pair(rng)
    for seed in range(5):
        cfg = MswConfig(L=3, T=5, transition=kind, seed=seed)
        assert msw_estimate(mu, nu, cfg) == msw_estimate(nu, mu, cfg)


@pytest.mark.parametrize("kind", KERNELS)
def test_dominated_by_exact(kind, rng):
    for seed in range(5):
        mu, nu = pair(rng)
        assert msw_estimate(mu, nu, MswConfig(L=3, T=5, transition=kind, seed=seed)) <= exact_wasserstein(mu, nu) + 1e-9


@pytest.mark.parametrize("kind", KERNELS)
def test_weak_convergence_trend(kind, rng):
    mu = random_cloud(rng, 30, 3)
    v = np.array([1.0, -2.0, 0.5])
    values = [msw_estimate(mu.shifted(2.0 ** -k * v), mu, MswConfig(L=3, T=4, transition=kind, seed=7))
              for k in range(8)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_sample_complexity_trend():
    rng = np.random.default_rng(2024)
    cfg = MswConfig(L=10, T=5, transition=OrthogonalBased(), seed=1)
    values = [msw_estimate(random_cloud(rng, n, 20), random_cloud(rng, n, 20), cfg) for n in (50, 200, 800)]
    assert values[0] > values[1] > values[2]


def test_variance_report_degenerate_and_positive(rng):
    mu, nu = pair(rng)
    zero = estimator_variance_report(mu, mu, MswConfig(T=3, transition=RandomWalk(10.0)), 4, (2, 4))
    assert all(m == 0 and s == 0 for _, m, s in zero)
    rows = estimator_variance_report(mu, nu, MswConfig(T=3, transition=RandomWalk(10.0)), 4, (2, 4))
    assert [r[0] for r in rows] == [2, 4]
    assert all(s > 0 for _, _, s in rows)
    with pytest.raises(ValueError):
        estimator_variance_report(mu, nu, MswConfig(), 1)


@pytest.mark.slow
@pytest.mark.parametrize("kind", KERNELS)
def test_monte_carlo_rate(kind):
    rng = np.random.default_rng(1)
    mu = EmpiricalMeasure(rng.standard_normal((20, 5)))
    nu = EmpiricalMeasure(rng.standard_normal((20, 5)) * 1.5 + 0.5)
    rows = estimator_variance_report(mu, nu, MswConfig(T=5, transition=kind), 50, (10, 40, 160))
    assert loglog_slope([r[0] for r in rows], [r[2] for r in rows]) == pytest.approx(-0.5, abs=0.15)
