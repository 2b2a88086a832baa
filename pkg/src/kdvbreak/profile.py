"""Single-bump initial data, inverse branches and the gradient-catastrophe point."""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import (DomainError, GenericityError, InconsistencyError,
                     ShapeError, SingularityError)

ROOT_XTOL = 1e-13


@dataclass(frozen=True)
class InitialProfile:
    """Analytic negative bump u0 with its first three derivatives.

    The evaluators must accept numpy arrays (real, and complex where the
    sign checks need continuation off the real axis).  ``half_width`` is the
    distance from ``x_min`` beyond which |u0| < 1e-12.
    """
    name: str
    u0: Callable
    du0: Callable
    d2u0: Callable
    d3u0: Callable
    x_min: float
    half_width: float

    def derivative(self, x, order=0):
        return (self.u0, self.du0, self.d2u0, self.d3u0)[order](x)


@dataclass(frozen=True)
class CatastrophePoint:
    x_c: float
    t_c: float
    u_c: float
    xi_c: float
    k: float

    @property
    def xt_c(self):
        """Galilean-shifted critical coordinate x_c - 6 u_c t_c."""
        return self.x_c - 6.0 * self.u_c * self.t_c

    def as_row(self):
        return (self.x_c, self.t_c, self.u_c, self.xi_c, self.k)


# --- catalog ---------------------------------------------------------------

def _sech2_parts(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        with np.errstate(over="ignore"):
            s = 1.0 / np.cosh(x) ** 2
        return s, np.tanh(x)
    # overflow-free form for real arguments far in the tails
    e = np.exp(-2.0 * np.abs(x))
    s = 4.0 * e / (1.0 + e) ** 2
    th = np.sign(x) * (1.0 - e) / (1.0 + e)
    return s, th


def _sech2_u0(x):
    s, _ = _sech2_parts(x)
    return -s


def _sech2_du0(x):
    s, th = _sech2_parts(x)
    return 2.0 * s * th


def _sech2_d2u0(x):
    s, th = _sech2_parts(x)
    return 2.0 * s * (1.0 - 3.0 * th ** 2)


def _sech2_d3u0(x):
    s, th = _sech2_parts(x)
    return -8.0 * s * th * (2.0 - 3.0 * th ** 2)


def sech2_profile():
    """u0(x) = -1/cosh^2 x; decays below 1e-12 for |x| > 15."""
    return InitialProfile("sech2", _sech2_u0, _sech2_du0, _sech2_d2u0,
                          _sech2_d3u0, x_min=0.0, half_width=15.0)


# Two Gaussians, the second narrower and shifted right, rescaled to min -1.
_GA, _GB, _GC = 0.6, 2.0, 0.7


def _gauss_terms(x):
    x = np.asarray(x)
    e1 = np.exp(-x ** 2)
    y = x - _GC
    e2 = _GA * np.exp(-_GB * y ** 2)
    return x, y, e1, e2


def _gauss_g(x, order):
    x, y, e1, e2 = _gauss_terms(x)
    b = _GB
    if order == 0:
        return e1 + e2
    if order == 1:
        return -2 * x * e1 - 2 * b * y * e2
    if order == 2:
        return (4 * x ** 2 - 2) * e1 + (4 * b ** 2 * y ** 2 - 2 * b) * e2
    return ((-8 * x ** 3 + 12 * x) * e1
            + (-8 * b ** 3 * y ** 3 + 12 * b ** 2 * y) * e2)


def gaussian_pair_profile():
    """Asymmetric bump -(g(x))/g(x_M) with g a sum of two Gaussians."""
    x_m = brentq(lambda x: _gauss_g(x, 1), 0.0, _GC, xtol=1e-15)
    peak = _gauss_g(x_m, 0)

    def make(order):
        return lambda x: -_gauss_g(x, order) / peak

    return InitialProfile("gauss2", make(0), make(1), make(2), make(3),
                          x_min=float(x_m), half_width=7.0)


CATALOG = {
    "sech2": sech2_profile,
    "gauss2": gaussian_pair_profile,
}


def get_profile(name):
    try:
        return CATALOG[name]()
    except KeyError:
        raise DomainError(f"unknown profile {name!r}; "
                          f"choose from {sorted(CATALOG)}") from None


def check_profile(profile, npts=2001):
    """Assert the normalization and single-bump invariants on a grid."""
    xm = profile.x_min
    if abs(profile.u0(xm) + 1.0) > 1e-12:
        raise ShapeError("u0(x_M) != -1")
    if abs(profile.du0(xm)) > 1e-10:
        raise ShapeError("u0'(x_M) != 0")
    if not profile.d2u0(xm) > 0:
        raise ShapeError("u0''(x_M) <= 0")
    w = profile.half_width
    if max(abs(profile.u0(xm - w)), abs(profile.u0(xm + w))) > 1e-12:
        raise ShapeError("profile has not decayed at the stated half-width")
    left = np.linspace(xm - w, xm, npts)[:-1]
    right = np.linspace(xm, xm + w, npts)[1:]
    if np.any(profile.du0(left) >= 0) or np.any(profile.du0(right) <= 0):
        raise ShapeError("profile is not a single bump")


# --- inverse branches ------------------------------------------------------

def inverse_branch(profile, u, branch="minus"):
    """Solve u0(x) = u on the decreasing (minus) or increasing (plus) flank.

    Vectorized bracketed Newton: each element keeps its own bracket and a
    Newton step leaving it is replaced by bisection.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(~(u_arr > -1.0)) or np.any(~(u_arr < 0.0)):
        raise DomainError("inverse_branch requires -1 < u < 0")
    if branch not in ("minus", "plus"):
        raise DomainError(f"branch must be 'minus' or 'plus', not {branch!r}")
    sgn = -1.0 if branch == "minus" else 1.0
    u_flat = u_arr.ravel()
    xm = profile.x_min

    # g(d) = u0(xm + sgn*d) - u is increasing in the distance d >= 0
    def g(d):
        return profile.u0(xm + sgn * d) - u_flat

    lo = np.zeros_like(u_flat)
    hi = np.ones_like(u_flat)
    for _ in range(200):
        low_side = g(hi) < 0
        if not low_side.any():
            break
        lo = np.where(low_side, hi, lo)
        hi = np.where(low_side, 2 * hi, hi)
    else:
        raise InconsistencyError("could not bracket inverse branch")
    if np.any(g(lo) > 0):
        raise InconsistencyError("inverse branch not bracketed; "
                                 "profile violates its invariants")

    d = 0.5 * (lo + hi)
    for _ in range(300):
        val = g(d)
        lo = np.where(val < 0, d, lo)
        hi = np.where(val >= 0, d, hi)
        slope = sgn * profile.du0(xm + sgn * d)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = val / slope
        d_new = d - step
        bad = ~np.isfinite(d_new) | (d_new <= lo) | (d_new >= hi)
        d_new = np.where(bad, 0.5 * (lo + hi), d_new)
        delta = np.abs(d_new - d)
        d = d_new
        if np.all((delta < ROOT_XTOL * np.maximum(1.0, d))
                  | (hi - lo < ROOT_XTOL * np.maximum(1.0, d))):
            break
    x = xm + sgn * d
    x = x.reshape(u_arr.shape)
    return float(x) if x.ndim == 0 else x


def f_minus_derivatives(profile, u, order):
    """d^n f_-/du^n for n = 0..3 via implicit differentiation of u0(f(u)) = u."""
    x = np.asarray(inverse_branch(profile, u, "minus"))
    if order == 0:
        return x if x.ndim else float(x)
    d1 = profile.du0(x)
    if np.any(np.abs(d1) < 1e-300):
        raise SingularityError("u0' vanishes at the evaluated point")
    out = _implicit_derivative(d1, profile.d2u0(x), profile.d3u0(x), order)
    return out if np.ndim(out) else float(out)


def _implicit_derivative(d1, d2, d3, order):
    if order == 1:
        return 1.0 / d1
    if order == 2:
        return -d2 / d1 ** 3
    if order == 3:
        return (3.0 * d2 ** 2 - d1 * d3) / d1 ** 5
    raise DomainError("order must be 0, 1, 2 or 3")


def f_minus_complex(profile, xi, order=0, newton_steps=60):
    """Analytic continuation of f_- (and derivatives) to complex arguments.

    The branch cut is (-inf, -1].  Near the bottom of the bump the start
    value follows the square-root law x ~ x_M - sqrt((xi+1) / (u0''/2)),
    elsewhere the real root at Re xi plus a first-order correction.
    """
    xi = np.asarray(xi, dtype=complex)
    flat = xi.ravel()
    xm = profile.x_min
    c2 = 0.5 * profile.d2u0(xm)
    x = xm - np.sqrt(flat + 1.0) / np.sqrt(c2)
    far = np.abs(flat + 1.0) > 0.1
    if far.any():
        re = np.clip(flat[far].real, -1 + 1e-9, -1e-12)
        x_re = np.asarray(inverse_branch(profile, re, "minus"))
        x[far] = x_re + (flat[far] - re) / profile.du0(x_re)
    for _ in range(newton_steps):
        step = (profile.u0(x) - flat) / profile.du0(x)
        x = x - step
        if np.all(np.abs(step) < 1e-14 * np.maximum(1.0, np.abs(x))):
            break
    if order == 0:
        out = x
    else:
        out = _implicit_derivative(profile.du0(x), profile.d2u0(x),
                                   profile.d3u0(x), order)
    return out.reshape(xi.shape)


# --- catastrophe -------------------------------------------------------------

def locate_catastrophe(profile, nscan=4001):
    """Find the breaking point of the Hopf solution started from ``profile``.

    The critical characteristic starts where -u0' is maximal on the
    decreasing flank, i.e. at the inflection point u0''(xi_c) = 0 there.
    """
    xm, w = profile.x_min, profile.half_width
    xs = np.linspace(xm - w, xm, nscan)
    slope = -profile.du0(xs)
    i = int(np.argmax(slope))
    if i == 0 or i == nscan - 1:
        raise ShapeError("no interior critical point of u0' on the "
                         "decreasing flank")
    a, b = xs[i - 1], xs[i + 1]
    if profile.d2u0(a) * profile.d2u0(b) > 0:
        raise ShapeError("u0'' does not change sign near the maximal slope")
    xi_c = brentq(profile.d2u0, a, b, xtol=1e-16, rtol=1e-15, maxiter=200)
    d1 = float(profile.du0(xi_c))
    t_c = 1.0 / (-6.0 * d1)
    u_c = float(profile.u0(xi_c))
    k = -float(_implicit_derivative(d1, float(profile.d2u0(xi_c)),
                                    float(profile.d3u0(xi_c)), 3))
    if not k > 1e-8:
        raise GenericityError(f"non-generic catastrophe: k = {k:g}")
    x_c = 6.0 * t_c * u_c + xi_c
    return CatastrophePoint(x_c=x_c, t_c=t_c, u_c=u_c, xi_c=float(xi_c), k=k)


def catastrophe_residuals(profile, point):
    """Residuals of the three defining equations of the breaking point."""
    f1 = f_minus_derivatives(profile, point.u_c, 1)
    f2 = f_minus_derivatives(profile, point.u_c, 2)
    f0 = f_minus_derivatives(profile, point.u_c, 0)
    return {
        "time": 6.0 * point.t_c + f1,
        "inflection": f2,
        "position": point.x_c - 6.0 * point.t_c * point.u_c - f0,
    }
