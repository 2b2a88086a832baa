import numpy as np
import pytest
from scipy.integrate import quad

from kdvbreak.errors import ConfigError, DomainError, InstabilityError
from kdvbreak.hopf import hopf_scan
from kdvbreak.kdv import (KdvConfig, evolve, evolve_converged, field_from_values,
                          init_field, sample, soliton)


@pytest.fixture(scope="module")
def field0(sech2):
    return init_field(sech2, KdvConfig(eps=0.1, N=2 ** 13))


def test_config_validation():
    for bad in (dict(eps=0.0), dict(eps=0.1, N=3000), dict(eps=0.1, N=2048),
                dict(eps=0.1, L_d=-1), dict(eps=0.1, dt=0.0),
                dict(eps=0.1, dealias=1.5)):
        with pytest.raises(ConfigError):
            KdvConfig(**bad)


def test_grid_and_mask():
    cfg = KdvConfig(eps=0.1, N=4096)
    assert cfg.x[0] == -15.0 and cfg.x[-1] == pytest.approx(15.0 - cfg.dx)
    assert cfg.mask.sum() == int(2 / 3 * 4096 / 2) + 1
    assert not cfg.mask[-1]


def test_initial_samples(field0, sech2):
    cfg = field0.config
    i = np.argmin(field0.u)
    assert field0.u[i] == pytest.approx(-1.0, abs=1e-12)
    assert cfg.x[i] == pytest.approx(sech2.x_min, abs=cfg.dx)
    xs = np.linspace(-14.3, 14.1, 57) + 0.3 * cfg.dx
    assert np.max(np.abs(sample(field0, xs) - sech2.u0(xs))) < 1e-10


def test_initial_mass_matches_quadrature(field0, sech2):
    exact, _ = quad(sech2.u0, -15, 15, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert field0.mass == pytest.approx(exact, abs=1e-10)
    assert field0.mass == pytest.approx(-2.0, abs=1e-10)


def test_box_too_small(sech2):
    with pytest.raises(ConfigError):
        init_field(sech2, KdvConfig(eps=0.1, L_d=5.0, N=4096))


def test_field_shape_checked():
    with pytest.raises(DomainError):
        field_from_values(np.zeros(10), KdvConfig(eps=0.1, N=4096))


def test_evolve_identity_and_direction(field0):
    assert evolve(field0, field0.t) is field0
    later = evolve(field0, 0.01)
    with pytest.raises(DomainError):
        evolve(later, 0.005)


def test_evolve_lands_on_target(field0):
    f = evolve(field0, 0.0123456789)
    assert f.t == 0.0123456789
    assert f.drift() < 1e-10


def test_soliton_short_run():
    cfg = KdvConfig(eps=0.1, N=4096)
    u0 = soliton(cfg.x, 0.0, 1.0, 0.1)
    f = evolve(field_from_values(u0, cfg), 2.0)
    exact = soliton(cfg.x, 2.0, 1.0, 0.1, L=cfg.L_d)
    assert np.max(np.abs(f.u - exact)) < 1e-7


def test_soliton_wraps_periodically():
    x = np.array([-14.0, 0.0, 14.0])
    assert np.allclose(soliton(x, 30.0, 1.0, 0.1, L=15.0), soliton(x, 0.0, 1.0, 0.1))


def test_instability_detected(field0):
    with pytest.raises(InstabilityError):
        evolve(field0, 0.2, dt=0.05)


def test_step_halving(field0):
    f, dt = evolve_converged(field0, 0.05, dt=0.004)
    assert dt < 0.004
    assert f.drift() < 1e-8


def test_sample_grid_points_and_domain(field0):
    f = evolve(field0, 0.05)
    idx = [0, 5, 1000, 4096, 8191]
    assert np.allclose(sample(f, f.config.x[idx]), f.u[idx], atol=1e-13)
    with pytest.raises(DomainError):
        sample(f, 15.5)


def test_two_resolutions_agree_before_breaking(sech2, sech2_point):
    t = 0.8 * sech2_point.t_c
    xs = np.linspace(-3, 3, 97) + 1e-3
    vals = []
    for N in (2 ** 12, 2 ** 13):
        f, _ = evolve_converged(init_field(sech2, KdvConfig(eps=0.1, N=N)), t)
        vals.append(sample(f, xs))
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-6


@pytest.mark.parametrize("eps, N", [(0.1, 2 ** 13),
                                    pytest.param(0.035, 2 ** 14, marks=pytest.mark.slow)])
def test_resolution_independence_at_breaking(sech2, sech2_point, eps, N):
    t = sech2_point.t_c
    runs = []
    for n, scale in ((N, 1.0), (2 * N, 0.5)):
        cfg = KdvConfig(eps=eps, N=n)
        f = evolve(init_field(sech2, cfg), t, dt=scale * KdvConfig(eps=eps, N=N).step)
        assert f.drift() < 1e-8
        runs.append(f)
    coarse, fine = runs
    assert np.max(np.abs(fine.u[::2] - coarse.u)) < 1e-5


def test_hopf_limit_improves(sech2, sech2_point):
    t = sech2_point.t_c / 2
    xs = np.linspace(-3, 3, 121)
    hop = np.array([s.u for s in hopf_scan(sech2, sech2_point, xs, t)])
    errs = []
    for eps in (0.1, 0.05):
        cfg = KdvConfig(eps=eps, N=2 ** 13)
        f, _ = evolve_converged(init_field(sech2, cfg), t)
        errs.append(np.max(np.abs(sample(f, xs) - hop)))
    assert errs[1] < errs[0]
