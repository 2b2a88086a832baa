"""Pole-free solution of the second Painleve-I equation

    X = T U - (U^3/6 + (U_X^2 + 2 U U_XX)/24 + U_XXXX/240)

as a two-point boundary-value problem on [-L, L] with the two-term
algebraic asymptotics imposed at both ends, plus continuation in T.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import solve_banded

from .errors import ConvergenceError, DomainError, RangeError, SpacingError

SIX_23 = 6.0 ** (2.0 / 3.0)
MAX_CONTINUATION_STEP = 0.25
ACCEPT_RESIDUAL = 1e-9

# 4th-order central stencils on offsets -2..2 / -3..3
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D4_WIDE = np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0
_D4_NARROW = np.array([1.0, -4.0, 6.0, -4.0, 1.0])
# one-sided 4th-order first derivative at the end node
_D1_EDGE = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0

_EXT = np.longdouble
_D1_INT = np.array([1, -8, 0, 8, -1], dtype=_EXT)
_D2_INT = np.array([-1, 16, -30, 16, -1], dtype=_EXT)
_D4_WIDE_INT = np.array([-1, 12, -39, 56, -39, 12, -1], dtype=_EXT)
_D1_EDGE_INT = np.array([-25, 48, -36, 16, -3], dtype=_EXT)


@dataclass(frozen=True)
class Pi2Grid:
    L: float
    n: int

    def __post_init__(self):
        if self.n < 9:
            raise DomainError("Pi2Grid needs at least 9 nodes")
        if self.L <= 0:
            raise DomainError("half-length must be positive")

    @classmethod
    def from_spacing(cls, L, h):
        n = int(round(2 * L / h)) + 1
        return cls(L, n)

    @property
    def h(self):
        return 2.0 * self.L / (self.n - 1)

    @property
    def X(self):
        return np.linspace(-self.L, self.L, self.n)

    def _ext(self):
        L = _EXT(self.L)
        X = np.linspace(-L, L, self.n, dtype=_EXT)
        return X, 2 * L / (self.n - 1)


@dataclass
class Pi2Solution:
    T: float
    grid: Pi2Grid
    U: np.ndarray
    residual: float
    iterations: int
    boundary_mismatch: float

    @property
    def X(self):
        return self.grid.X


@dataclass
class Pi2Family:
    grid: Pi2Grid
    solutions: list = field(default_factory=list)

    @property
    def T_values(self):
        return np.array([s.T for s in self.solutions])

    def get(self, T, tol=1e-12):
        for s in self.solutions:
            if abs(s.T - T) <= tol:
                return s
        raise KeyError(f"no member with T = {T}")


def asymptotic_boundary(X, T, sign=None):
    """Two-term large-|X| expansion of U and its X-derivative.

    U = -/+ (6|X|)^{1/3} -/+ (1/3) 6^{2/3} T |X|^{-1/3} for X -> +/- inf.
    ``sign`` defaults to the sign of X.
    """
    X = np.asarray(X, dtype=float)
    if np.any(np.abs(X) < 10.0):
        raise RangeError("asymptotic series used only for |X| >= 10")
    s = np.sign(X) if sign is None else float(sign)
    a = np.abs(X)
    U = -s * ((6.0 * a) ** (1.0 / 3.0) + SIX_23 / 3.0 * T * a ** (-1.0 / 3.0))
    # d|X|/dX = s, so the sign drops out of the derivative
    dU = -(6.0 ** (1.0 / 3.0) / 3.0 * a ** (-2.0 / 3.0)
           - SIX_23 / 9.0 * T * a ** (-4.0 / 3.0))
    return U, dU


def _cardano(X, T):
    """Real root of U^3/6 - T U + X = 0 where it is unique."""
    p = -6.0 * T
    q = 6.0 * np.asarray(X, dtype=float)
    disc = q ** 2 / 4.0 + p ** 3 / 27.0
    sq = np.sqrt(np.maximum(disc, 0.0))
    U = np.cbrt(-q / 2.0 + sq) + np.cbrt(-q / 2.0 - sq)
    for _ in range(3):
        f = U ** 3 / 6.0 - T * U + X
        df = U ** 2 / 2.0 - T
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(df) > 1e-12, f / df, 0.0)
        U = U - step
    return U


def initial_guess(grid, T):
    """Root of the dispersionless cubic X = T U - U^3/6.

    For T > 0 the cubic is triple-valued on |X| <= (2/3) T sqrt(2T); there the
    two outer branches are bridged by a monotone cubic interpolant.
    """
    X = grid.X
    if T <= 0:
        return _cardano(X, T)
    x_star = 2.0 / 3.0 * T * np.sqrt(2.0 * T)
    margin = 0.25 + 0.1 * x_star
    outer = np.abs(X) > x_star + margin
    if outer.sum() < 4 or not (X[outer] < 0).any() or not (X[outer] > 0).any():
        raise RangeError("grid too short for the T > 0 initial guess")
    U = np.empty_like(X)
    U[outer] = _cardano(X[outer], T)
    bridge = PchipInterpolator(X[outer], U[outer])
    U[~outer] = bridge(X[~outer])
    return U


def _residual(U, X, T, h):
    # Integer stencils keep the coefficient sums exactly zero; with U in
    # extended precision the 1/h^4 roundoff floor drops well below 1e-9.
    n = len(U)
    F = np.empty(n, dtype=U.dtype)
    Ui = U[2:n - 2]
    d1 = np.zeros(n - 4, dtype=U.dtype)
    d2 = np.zeros(n - 4, dtype=U.dtype)
    for k, off in enumerate(range(-2, 3)):
        seg = U[2 + off:n - 2 + off]
        d1 += _D1_INT[k] * seg
        d2 += _D2_INT[k] * seg
    d1 /= 12 * h
    d2 /= 12 * h ** 2
    d4 = np.zeros(n - 4, dtype=U.dtype)
    # nodes 3..n-4 use the 7-point stencil, nodes 2 and n-3 the 5-point one
    wide = np.zeros(n - 6, dtype=U.dtype)
    for k, off in enumerate(range(-3, 4)):
        wide += _D4_WIDE_INT[k] * U[3 + off:n - 3 + off]
    d4[1:-1] = wide / 6
    for j, i in ((0, 2), (-1, n - 3)):
        d4[j] = _D4_NARROW @ U[i - 2:i + 3]
    d4 /= h ** 4
    F[2:n - 2] = (T * Ui - Ui ** 3 / 6 - (d1 ** 2 + 2 * Ui * d2) / 24
                  - d4 / 240 - X[2:n - 2])
    SL, dSL = asymptotic_boundary(float(X[0]), T)
    SR, dSR = asymptotic_boundary(float(X[-1]), T)
    F[0] = U[0] - SL
    F[1] = (_D1_EDGE_INT @ U[:5]) / (12 * h) - dSL
    F[n - 1] = U[-1] - SR
    F[n - 2] = -(_D1_EDGE_INT @ U[::-1][:5]) / (12 * h) - dSR
    return F, d1, d2


def _jacobian_banded(U, T, h, d1, d2):
    """Jacobian in LAPACK banded storage, 3 sub- and 3 superdiagonals."""
    n = len(U)
    ab = np.zeros((7, n))
    rows = np.arange(2, n - 2)
    u, p1, p2 = U[rows], d1, d2
    ab[3, rows] += T - u ** 2 / 2.0 - 2.0 * p2 / 24.0
    for k, off in enumerate(range(-2, 3)):
        ab[3 - off, rows + off] += -(2.0 * p1 * _D1[k] / h
                                     + 2.0 * u * _D2[k] / h ** 2) / 24.0
    inner = np.arange(3, n - 3)
    for k, off in enumerate(range(-3, 4)):
        ab[3 - off, inner + off] += -_D4_WIDE[k] / h ** 4 / 240.0
    for i in (2, n - 3):
        for k, off in enumerate(range(-2, 3)):
            ab[3 - off, i + off] += -_D4_NARROW[k] / h ** 4 / 240.0
    ab[3, 0] += 1.0
    ab[3, n - 1] += 1.0
    for k in range(5):
        ab[3 + 1 - k, k] += _D1_EDGE[k] / h
        j = n - 1 - k
        ab[3 + (n - 2) - j, j] += -_D1_EDGE[k] / h
    return ab


def residual(grid, T, U):
    """Discrete residual vector (boundary rows first/last two entries)."""
    X, h = grid._ext()
    F, _, _ = _residual(np.asarray(U, dtype=_EXT), X, T, h)
    return F.astype(float)


def newton_solve(grid, T, guess, max_iter=50, step_tol=1e-12, res_tol=1e-10,
                 accept_tol=ACCEPT_RESIDUAL):
    """Damped Newton iteration with banded linear solves.

    The iterate and residual live in extended precision while the Jacobian
    solve runs in double, so late iterations act as iterative refinement.
    A converged iterate whose interior residual exceeds ``accept_tol`` is
    rejected with ConvergenceError.
    """
    U = np.array(guess, dtype=_EXT)
    if not np.all(np.isfinite(U)):
        raise DomainError("initial guess must be finite")
    X, h = grid._ext()
    F, d1, d2 = _residual(U, X, T, h)
    norm = np.max(np.abs(F))
    for it in range(1, max_iter + 1):
        ab = _jacobian_banded(U.astype(float), T, float(h), d1.astype(float),
                              d2.astype(float))
        step = solve_banded((3, 3), ab, -F.astype(float))
        lam = 1.0
        while True:
            trial = U + lam * step
            Ft, d1t, d2t = _residual(trial, X, T, h)
            nt = np.max(np.abs(Ft))
            if np.isfinite(nt) and (nt < norm or lam < 1e-3 or nt < res_tol):
                break
            lam *= 0.5
        U, F, d1, d2, norm = trial, Ft, d1t, d2t, nt
        step_norm = lam * np.max(np.abs(step))
        if step_norm < step_tol or norm < res_tol:
            break
    else:
        raise ConvergenceError(f"Newton did not converge at T = {T} "
                               f"(residual {norm:.3e})", T=T)
    if not np.all(np.isfinite(U)):
        raise ConvergenceError(f"non-finite solution at T = {T}", T=T)
    interior = float(np.max(np.abs(F[2:-2])))
    mismatch = float(np.max(np.abs(F[[0, 1, -2, -1]])))
    if interior > accept_tol:
        raise ConvergenceError(f"residual {interior:.3e} at T = {T} exceeds "
                               f"{accept_tol:g}", T=T)
    # the stored values are the double rounding of the extended iterate
    return Pi2Solution(float(T), grid, U.astype(float), interior, it, mismatch)


def _ladder_with_substeps(ladder, max_step):
    pts = sorted(set(float(t) for t in ladder) | {0.0})
    full = []
    for a, b in zip(pts[:-1], pts[1:]):
        m = int(np.ceil((b - a) / max_step - 1e-12))
        full.extend(a + (b - a) * np.arange(m) / m)
    full.append(pts[-1])
    return [float(t) for t in full]


def tangent_predictor(solution, T_new):
    """First-order guess at T_new from dU/dT, obtained from J dU/dT = -dF/dT."""
    grid = solution.grid
    X, h = grid._ext()
    U = np.asarray(solution.U, dtype=_EXT)
    _, d1, d2 = _residual(U, X, solution.T, h)
    ab = _jacobian_banded(U.astype(float), solution.T, float(h),
                          d1.astype(float), d2.astype(float))
    dF = np.zeros(grid.n)
    dF[2:-2] = U[2:-2].astype(float)
    # the boundary data are linear in T
    for i, j in ((0, 1), (-1, -2)):
        S1, dS1 = asymptotic_boundary(float(X[i]), 1.0)
        S0, dS0 = asymptotic_boundary(float(X[i]), 0.0)
        dF[i] = -(S1 - S0)
        dF[j] = -(dS1 - dS0)
    dU = solve_banded((3, 3), ab, -dF)
    return U + (T_new - solution.T) * dU


def continuation_in_T(grid, ladder, max_step=MAX_CONTINUATION_STEP,
                      keep_auxiliary=False):
    """Solve at T = 0 from the cubic guess, then march outwards in T.

    Gaps wider than ``max_step`` are bridged with auxiliary solves; they are
    kept in the family only when ``keep_auxiliary`` is set.
    """
    requested = sorted(set(float(t) for t in ladder))
    if not requested:
        raise DomainError("empty T ladder")
    full = _ladder_with_substeps(requested, max_step)
    i0 = full.index(0.0)
    solved = {0.0: newton_solve(grid, 0.0, initial_guess(grid, 0.0))}
    for direction in (range(i0 + 1, len(full)), range(i0 - 1, -1, -1)):
        prev = solved[0.0]
        for i in direction:
            T = full[i]
            sol = newton_solve(grid, T, tangent_predictor(prev, T))
            solved[T] = sol
            prev = sol
    keep = full if keep_auxiliary else requested
    return Pi2Family(grid, [solved[T] for T in keep])


def evaluate(solution, X, allow_asymptotic=True):
    """Quintic interpolation through the six nearest nodes.

    Outside [-L, L] the two-term asymptotic series is used when
    ``allow_asymptotic`` is set (and |X| >= 10); otherwise RangeError.
    """
    X_arr = np.asarray(X, dtype=float)
    flat = X_arr.ravel()
    grid = solution.grid
    L, h, n = grid.L, grid.h, grid.n
    out = np.empty_like(flat)
    outside = np.abs(flat) > L * (1 + 1e-14)
    if outside.any():
        if not allow_asymptotic or np.any(np.abs(flat[outside]) < 10):
            raise RangeError("X outside the solution window")
        out[outside] = asymptotic_boundary(flat[outside], solution.T)[0]
    inside = ~outside
    if inside.any():
        xs = np.clip(flat[inside], -L, L)
        pos = (xs + L) / h
        i = np.clip(np.floor(pos).astype(int) - 2, 0, n - 6)
        nodes = grid.X
        U = np.asarray(solution.U, dtype=float)
        val = np.zeros_like(xs)
        for a in range(6):
            wa = np.ones_like(xs)
            for b in range(6):
                if b != a:
                    wa *= (xs - nodes[i + b]) / (nodes[i + a] - nodes[i + b])
            val += wa * U[i + a]
        # exact node hits
        on_node = np.isclose(pos, np.round(pos), rtol=0, atol=1e-12)
        j = np.round(pos).astype(int)
        val[on_node] = U[j[on_node]]
        out[inside] = val
    out = out.reshape(X_arr.shape)
    return float(out) if out.ndim == 0 else out


def derivative(U, h, order):
    """4th-order central derivative of grid data (interior nodes, edges NaN)."""
    n = len(U)
    out = np.full(n, np.nan)
    if order == 1:
        st, r = _D1, 2
    elif order == 2:
        st, r = _D2, 2
    elif order == 3:
        st, r = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0, 3
    else:
        raise DomainError("order must be 1, 2 or 3")
    acc = np.zeros(n - 2 * r)
    for k, off in enumerate(range(-r, r + 1)):
        acc += st[k] * U[r + off:n - r + off]
    out[r:n - r] = acc / h ** order
    return out


def _time_derivative(family, m, dT, order):
    sols = family.solutions
    if order == 2:
        return (np.asarray(sols[m + 1].U) - np.asarray(sols[m - 1].U)) / (2 * dT)
    if m >= 2 and m + 2 < len(sols):
        u = [np.asarray(sols[m + j].U) for j in (-2, -1, 1, 2)]
        step = dT
    else:
        # only three members: add the two half-step neighbours of the middle
        mid = sols[m]
        u = [np.asarray(sols[m - 1].U)]
        for sgn in (-1, 1):
            T = mid.T + sgn * dT / 2
            u.append(newton_solve(family.grid, T,
                                  tangent_predictor(mid, T)).U)
        u.append(np.asarray(sols[m + 1].U))
        step = dT / 2
    return (u[0] - 8 * u[1] + 8 * u[2] - u[3]) / (12 * step)


def kdv_crosscheck(family, order=4):
    """sup |U_T + U U_X + U_XXX/12| on |X| <= L/2 at the middle member.

    U_T is a central difference across the family: the 3-point stencil for
    ``order=2``, the 5-point stencil for ``order=4``.  A three-member family
    is completed at the half steps around its middle member for the latter.
    """
    T = family.T_values
    if len(T) < 3:
        raise SpacingError("need at least three T values")
    dT = np.diff(T)
    if np.max(np.abs(dT - dT[0])) > 1e-9 * max(1.0, abs(dT[0])):
        raise SpacingError("T ladder is not equally spaced")
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    m = len(T) // 2
    h = family.grid.h
    U = np.asarray(family.solutions[m].U)
    UT = _time_derivative(family, m, dT[0], order)
    res = UT + U * derivative(U, h, 1) + derivative(U, h, 3) / 12
    window = np.abs(family.grid.X) <= family.grid.L / 2
    return float(np.max(np.abs(res[window])))
