"""Dispersionless limit u_t + 6 u u_x = 0 solved by characteristics, t <= t_c."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError
from .quadrature import gauss_legendre

XI_TOL = 1e-12


@dataclass(frozen=True)
class HopfSample:
    x: float
    t: float
    u: float
    ux: float
    xi: float


def _foot(profile, x, t, guess):
    """Root of x = 6 t u0(xi) + xi, bracketed by u0 in [-1, 0]."""
    if t == 0.0:
        return x
    lo, hi = x, x + 6.0 * t

    def g(xi):
        return 6.0 * t * profile.u0(xi) + xi - x

    xi = guess if guess is not None and lo <= guess <= hi else 0.5 * (lo + hi)
    for _ in range(200):
        val = g(xi)
        if val == 0.0:
            return xi
        if val < 0:
            lo = xi
        else:
            hi = xi
        if hi - lo < XI_TOL:
            break
        slope = 1.0 + 6.0 * t * profile.du0(xi)
        nxt = xi - val / slope if slope > 0 else None
        if nxt is None or not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - xi) < 1e-15 * max(1.0, abs(xi)):
            return nxt
        xi = nxt
    return 0.5 * (lo + hi)


def _local_residual(profile, point, x, t):
    """x-residual in d = xi - xi_c, free of cancellation near the cusp.

    Taylor's formula with integral remainder,
    u0(xi_c + d) = u_c + u0' d + u0'' d^2 / 2 + d^3/2 * int_0^1 (1-s)^2 u0'(3)(xi_c + s d) ds,
    lets the O(1) terms cancel analytically so the cubic behaviour at the
    catastrophe survives rounding.
    """
    s, w = gauss_legendre(16)
    xi_c = point.xi_c
    a1 = float(profile.du0(xi_c))
    a2 = float(profile.d2u0(xi_c))
    shift = 6.0 * point.u_c * (t - point.t_c) - (x - point.x_c)
    lin = 1.0 + 6.0 * t * a1

    def g(d):
        rem = 0.5 * d ** 3 * np.dot(w * (1 - s) ** 2,
                                    profile.d3u0(xi_c + s * d))
        return shift + lin * d + 3.0 * t * a2 * d * d + 6.0 * t * rem

    return g


def _bisect(g, lo, hi):
    glo = g(lo)
    while hi - lo > XI_TOL:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_characteristic(profile, point, x, t, guess=None):
    """Value and slope of the Hopf solution at (x, t) for 0 <= t <= t_c.

    Late times use bisection on the local form around xi_c, where the map
    xi -> 6 t u0(xi) + xi flattens.  At the catastrophe point itself the
    slope is reported as -inf: u0' < 0 there and 1 + 6 t u0' tends to zero
    from above.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t > point.t_c * (1.0 + 1e-14):
        raise RangeError("t > t_c: the Hopf solution is multivalued")
    t = min(t, point.t_c)
    xi = None
    if t > 0.5 * point.t_c:
        g = _local_residual(profile, point, x, t)
        lo = max(x - point.xi_c, -0.5)
        hi = min(x + 6.0 * t - point.xi_c, 0.5)
        if lo < hi and g(lo) <= 0.0 <= g(hi):
            xi = point.xi_c + _bisect(g, lo, hi)
    if xi is None:
        xi = _foot(profile, x, t, guess)
    u = float(profile.u0(xi))
    d1 = float(profile.du0(xi))
    denom = 1.0 + 6.0 * t * d1
    at_cusp = t == point.t_c and abs(xi - point.xi_c) <= XI_TOL
    ux = -np.inf if (denom <= 0.0 or at_cusp) else d1 / denom
    return HopfSample(float(x), float(t), u, ux, float(xi))


def hopf_scan(profile, point, xs, t):
    """Samples along an x-grid, warm-starting each foot from the last."""
    out = []
    guess = None
    for x in np.asarray(xs, dtype=float):
        s = solve_characteristic(profile, point, x, t, guess)
        out.append(s)
        guess = s.xi
    return out
