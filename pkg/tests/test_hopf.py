import numpy as np
import pytest

from kdvbreak.errors import DomainError, RangeError
from kdvbreak.hopf import hopf_scan, solve_characteristic


def test_initial_time_is_identity(sech2, sech2_point):
    for x in (-2.0, -0.4, 0.0, 1.3):
        s = solve_characteristic(sech2, sech2_point, x, 0.0)
        assert s.xi == pytest.approx(x, abs=1e-12)
        assert s.u == pytest.approx(float(sech2.u0(x)), abs=1e-14)


def test_catastrophe_point(sech2, sech2_point):
    p = sech2_point
    s = solve_characteristic(sech2, p, p.x_c, p.t_c)
    assert s.u == pytest.approx(p.u_c, abs=1e-10)
    assert s.xi == pytest.approx(p.xi_c, abs=1e-10)
    assert s.ux == -np.inf


def test_constructed_characteristic(sech2, sech2_point):
    t = sech2_point.t_c / 2
    x = 6 * t * float(sech2.u0(-1.0)) - 1.0
    s = solve_characteristic(sech2, sech2_point, x, t)
    assert s.u == pytest.approx(float(sech2.u0(-1.0)), abs=1e-12)
    assert s.xi == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("frac", [0.3, 0.7, 0.95, 0.999])
def test_implicit_relation_holds(sech2, sech2_point, gauss2, frac):
    for prof, pt in ((sech2, sech2_point), (gauss2, None)):
        if pt is None:
            from kdvbreak.profile import locate_catastrophe
            pt = locate_catastrophe(prof)
        t = frac * pt.t_c
        xs = np.linspace(pt.x_c - 2, pt.x_c + 2, 41)
        for s in hopf_scan(prof, pt, xs, t):
            assert s.u == pytest.approx(float(prof.u0(s.x - 6 * s.u * t)), abs=1e-12)
            ux = float(prof.du0(s.xi)) / (1 + 6 * t * float(prof.du0(s.xi)))
            assert s.ux == pytest.approx(ux, rel=1e-9)


def test_characteristic_map_monotone_before_breaking(sech2, sech2_point):
    xi = np.linspace(-8, 8, 4001)
    for frac in (0.5, 0.9, 0.99):
        t = frac * sech2_point.t_c
        assert np.all(1 + 6 * t * sech2.du0(xi) > 0)


def test_slope_blows_up_along_critical_line(sech2, sech2_point):
    p = sech2_point
    inv = []
    for d in (1e-1, 1e-2, 1e-3, 1e-4):
        t = p.t_c * (1 - d)
        x = p.x_c + 6 * p.u_c * (t - p.t_c)
        inv.append(abs(1 / solve_characteristic(sech2, p, x, t).ux))
    assert all(b < a for a, b in zip(inv, inv[1:]))
    assert inv[-1] < 1e-3


def test_time_guards(sech2, sech2_point):
    p = sech2_point
    with pytest.raises(DomainError):
        solve_characteristic(sech2, p, 0.0, -0.1)
    with pytest.raises(RangeError):
        solve_characteristic(sech2, p, 0.0, 1.01 * p.t_c)


def test_scan_is_continuous(sech2, sech2_point):
    xs = np.linspace(-3, 3, 601)
    u = np.array([s.u for s in hopf_scan(sech2, sech2_point, xs,
                                         0.8 * sech2_point.t_c)])
    assert np.max(np.abs(np.diff(u))) < 0.05
