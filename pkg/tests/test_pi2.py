import numpy as np
import pytest

from kdvbreak.errors import (ConvergenceError, DomainError, RangeError,
                             SpacingError)
from kdvbreak.pi2 import (Pi2Family, Pi2Grid, Pi2Solution, asymptotic_boundary,
                          continuation_in_T, derivative, evaluate,
                          initial_guess, kdv_crosscheck, newton_solve,
                          residual, tangent_predictor)

SIX_23 = 6.0 ** (2.0 / 3.0)


@pytest.fixture(scope="module")
def wide_family():
    return continuation_in_T(Pi2Grid.from_spacing(40.0, 0.025), [-2, 0, 1, 2])


def test_asymptotic_leading_term():
    assert asymptotic_boundary(1000.0, 0.0)[0] == pytest.approx(-6000 ** (1 / 3), rel=1e-14)
    assert asymptotic_boundary(-1000.0, 0.0)[0] == pytest.approx(6000 ** (1 / 3), rel=1e-14)
    assert -6000 ** (1 / 3) == pytest.approx(-18.1712, abs=1e-4)


def test_asymptotic_T_term():
    for X in (12.0, -50.0, 400.0):
        diff = asymptotic_boundary(X, 1.5)[0] - asymptotic_boundary(X, 0.0)[0]
        expected = -np.sign(X) * SIX_23 / 3 * 1.5 * abs(X) ** (-1 / 3)
        assert diff == pytest.approx(expected, rel=1e-12)


def test_asymptotic_derivative_matches_series():
    h = 1e-4
    for X in (15.0, -15.0):
        for T in (-1.0, 0.0, 2.0):
            fd = (asymptotic_boundary(X + h, T)[0]
                  - asymptotic_boundary(X - h, T)[0]) / (2 * h)
            assert asymptotic_boundary(X, T)[1] == pytest.approx(fd, rel=1e-8)


def test_asymptotic_range():
    with pytest.raises(RangeError):
        asymptotic_boundary(5.0, 0.0)


def test_grid_validation():
    with pytest.raises(DomainError):
        Pi2Grid(10.0, 5)
    with pytest.raises(DomainError):
        Pi2Grid(-1.0, 101)
    g = Pi2Grid.from_spacing(20.0, 0.02)
    assert g.h == pytest.approx(0.02)
    assert g.X[0] == -20.0 and g.X[-1] == 20.0


def test_initial_guess_examples():
    g = Pi2Grid(6.0, 13)  # nodes at every integer
    U = initial_guess(g, 0.0)
    assert U[6] == 0.0
    assert U[0] == pytest.approx(36 ** (1 / 3), abs=1e-13)
    assert U[0] == pytest.approx(3.3019, abs=1e-4)


def test_initial_guess_solves_cubic():
    g = Pi2Grid.from_spacing(25.0, 0.05)
    for T in (-2.0, -0.5, 0.0):
        U = initial_guess(g, T)
        assert np.max(np.abs(T * U - U ** 3 / 6 - g.X)) < 1e-12
    assert np.all(np.diff(initial_guess(g, -1.0)) < 0)


def test_initial_guess_positive_T_continuous():
    g = Pi2Grid.from_spacing(25.0, 0.05)
    for T in (0.5, 1.0, 2.0):
        U = initial_guess(g, T)
        assert np.all(np.isfinite(U))
        # outer branches decrease and the monotone bridge keeps that shape
        assert np.all(np.diff(U) < 0)
        far = np.abs(g.X) > 10
        assert np.max(np.abs(T * U[far] - U[far] ** 3 / 6 - g.X[far])) < 1e-10


def test_residual_of_zero_is_minus_X():
    g = Pi2Grid.from_spacing(20.0, 0.1)
    r = residual(g, 0.7, np.zeros(g.n))
    assert np.allclose(r[2:-2], -g.X[2:-2], atol=1e-13)


def test_newton_accepts_and_reports(pi2_family):
    for s in pi2_family.solutions:
        assert s.residual <= 1e-9
        assert s.boundary_mismatch < 1e-12
        r = residual(s.grid, s.T, s.U)
        assert np.max(np.abs(r[2:-2])) <= 1e-9


def test_newton_failure_carries_T():
    g = Pi2Grid.from_spacing(20.0, 0.05)
    with pytest.raises(ConvergenceError) as info:
        newton_solve(g, 0.5, initial_guess(g, 0.5), max_iter=1)
    assert info.value.T == 0.5
    with pytest.raises(DomainError):
        newton_solve(g, 0.0, np.full(g.n, np.nan))


def test_truncation_independence():
    a = continuation_in_T(Pi2Grid.from_spacing(20.0, 0.025), [0]).solutions[0]
    b = continuation_in_T(Pi2Grid.from_spacing(30.0, 0.025), [0]).solutions[0]
    X = np.linspace(-5, 5, 401)
    assert np.max(np.abs(evaluate(a, X) - evaluate(b, X))) < 1e-4


def test_envelope_at_T0(pi2_family):
    s = pi2_family.get(0.0)
    env = (6 * np.abs(s.X)) ** (1 / 3)
    assert np.all(s.U >= -env - 1) and np.all(s.U <= env + 1)


def test_known_value_stable(pi2_family):
    # regression value; verified by grid refinement (h and h/2 agree to 1e-8)
    assert evaluate(pi2_family.get(0.0), 0.0) == pytest.approx(-0.41517, abs=1e-5)


def test_pole_free_proxy_full_T_range():
    # the interior peak reaches about 9 at T = 2, so the bound needs a long box
    fam = continuation_in_T(Pi2Grid.from_spacing(100.0, 0.025), [-2, -1, 0, 1, 2])
    for s in fam.solutions:
        assert np.max(np.abs(s.U)) <= (6 * 100.0) ** (1 / 3) + 2


def test_pole_free_proxy_default_box(pi2_family):
    L = pi2_family.grid.L
    for s in pi2_family.solutions:
        assert np.max(np.abs(s.U)) <= (6 * L) ** (1 / 3) + 2


def test_far_field_mismatch_decays(wide_family):
    for s in wide_family.solutions:
        scaled = []
        for X in (10.0, 15.0, 20.0, 25.0, 30.0):
            m = max(abs(evaluate(s, sg * X) - asymptotic_boundary(sg * X, s.T)[0])
                    for sg in (1, -1))
            scaled.append(m * X)
        assert all(b <= a for a, b in zip(scaled, scaled[1:]))


def test_continuation_single_member():
    fam = continuation_in_T(Pi2Grid.from_spacing(20.0, 0.05), [0])
    assert len(fam.solutions) == 1
    with pytest.raises(DomainError):
        continuation_in_T(Pi2Grid.from_spacing(20.0, 0.05), [])


def test_continuation_iteration_budget():
    fam = continuation_in_T(Pi2Grid.from_spacing(25.0, 0.025),
                            [0, 0.5, -0.5, 1, -1])
    assert list(fam.T_values) == [-1, -0.5, 0, 0.5, 1]
    assert all(s.iterations <= 15 for s in fam.solutions)
    with pytest.raises(KeyError):
        fam.get(0.25)


def test_auxiliary_members_kept_on_request():
    fam = continuation_in_T(Pi2Grid.from_spacing(20.0, 0.05), [0, 1],
                            keep_auxiliary=True)
    assert np.allclose(fam.T_values, [0, 0.25, 0.5, 0.75, 1])


def test_members_vary_linearly_in_T():
    g = Pi2Grid.from_spacing(20.0, 0.05)
    base = continuation_in_T(g, [0]).solutions[0]
    jumps = [np.max(np.abs(newton_solve(g, d, tangent_predictor(base, d)).U - base.U))
             for d in (0.2, 0.1, 0.05)]
    ratios = [a / b for a, b in zip(jumps, jumps[1:])]
    assert all(r == pytest.approx(2.0, abs=0.2) for r in ratios)


def test_evaluate_nodes_and_fallback(pi2_family):
    s = pi2_family.get(1.0)
    idx = [0, 17, 500, 1000, s.grid.n - 1]
    assert np.array_equal(evaluate(s, s.X[idx]), s.U[idx])
    assert evaluate(s, 1000.0) == pytest.approx(
        asymptotic_boundary(1000.0, 1.0)[0], rel=1e-15)
    assert evaluate(pi2_family.get(0.0), 1000.0) == pytest.approx(-18.1712, abs=1e-4)
    with pytest.raises(RangeError):
        evaluate(s, 26.0, allow_asymptotic=False)


def test_evaluate_out_of_window_small_box():
    g = Pi2Grid(8.0, 33)
    s = Pi2Solution(0.0, g, np.zeros(g.n), 0.0, 0, 0.0)
    with pytest.raises(RangeError):
        evaluate(s, 9.0)


def test_evaluate_interpolates_smooth_data_to_sixth_order():
    g = Pi2Grid.from_spacing(5.0, 0.1)
    s = Pi2Solution(0.0, g, np.sin(g.X), 0.0, 0, 0.0)
    X = np.linspace(-4.9, 4.9, 333)
    assert np.max(np.abs(evaluate(s, X) - np.sin(X))) < 2e-8


def test_grid_refinement():
    fams = [continuation_in_T(Pi2Grid.from_spacing(20.0, h), [0])
            for h in (0.0125, 0.00625)]
    X = np.linspace(-5, 5, 401)
    diff = evaluate(fams[0].get(0.0), X) - evaluate(fams[1].get(0.0), X)
    assert np.max(np.abs(diff)) < 1e-6


def test_discretization_error_is_fourth_order():
    X = np.linspace(-5, 5, 201)
    vals = [evaluate(continuation_in_T(Pi2Grid.from_spacing(20.0, h), [0]).solutions[0], X)
            for h in (0.05, 0.025, 0.0125)]
    ratio = np.max(np.abs(vals[0] - vals[1])) / np.max(np.abs(vals[1] - vals[2]))
    assert ratio == pytest.approx(16.0, rel=0.25)


def test_derivative_stencils():
    x = np.linspace(0, 2, 201)
    h = x[1] - x[0]
    u = np.sin(x)
    for order, exact in ((1, np.cos(x)), (2, -np.sin(x)), (3, -np.cos(x))):
        d = derivative(u, h, order)
        inner = np.isfinite(d)
        assert np.max(np.abs(d[inner] - exact[inner])) < 1e-6
        assert np.isnan(d[0]) and np.isnan(d[-1])
    with pytest.raises(DomainError):
        derivative(u, h, 4)


def test_crosscheck_target_and_refinement():
    coarse = continuation_in_T(Pi2Grid.from_spacing(20.0, 0.02), [-0.1, 0, 0.1])
    fine = continuation_in_T(Pi2Grid.from_spacing(20.0, 0.01), [-0.05, 0, 0.05])
    r0, r1 = kdv_crosscheck(coarse), kdv_crosscheck(fine)
    assert r0 < 1e-3
    assert r1 <= r0 / 2


def test_crosscheck_constant_family_is_spatial_part():
    g = Pi2Grid.from_spacing(20.0, 0.05)
    s = continuation_in_T(g, [0]).solutions[0]
    fam = Pi2Family(g, [Pi2Solution(T, g, s.U, 0.0, 0, 0.0) for T in (-0.1, 0.0, 0.1)])
    U = s.U
    spatial = U * derivative(U, g.h, 1) + derivative(U, g.h, 3) / 12
    window = np.abs(g.X) <= g.L / 2
    assert kdv_crosscheck(fam, order=2) == pytest.approx(
        np.max(np.abs(spatial[window])), rel=1e-14)


def test_crosscheck_ladder_validation(pi2_family):
    g = pi2_family.grid
    with pytest.raises(SpacingError):
        kdv_crosscheck(Pi2Family(g, pi2_family.solutions[:2]))
    uneven = [Pi2Solution(T, g, pi2_family.solutions[0].U, 0, 0, 0)
              for T in (-1.0, 0.0, 0.5)]
    with pytest.raises(SpacingError):
        kdv_crosscheck(Pi2Family(g, uneven))
    with pytest.raises(DomainError):
        kdv_crosscheck(pi2_family, order=3)
