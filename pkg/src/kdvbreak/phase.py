"""Semiclassical phase functions near the gradient catastrophe.

All integrals with square-root endpoint behaviour are mapped to smooth
integrands on [0, 1] by quadratic substitutions and evaluated with the
double-exponential rule from :mod:`kdvbreak.quadrature`, which also copes
with the logarithmic singularity of f_- at u = 0.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, RangeError, SingularityError
from .profile import (catastrophe_residuals, f_minus_complex,
                      f_minus_derivatives, inverse_branch, locate_catastrophe)
from .quadrature import tanh_sinh

QUAD_LEVEL = 6


def _as_array(lam):
    arr = np.asarray(lam)
    return arr, arr.ndim == 0


def _out(val, scalar):
    if scalar:
        val = val[()]
        return complex(val) if np.iscomplexobj(val) else float(val)
    return val


def alpha(eta, x, t):
    """Phase of the free evolution, 4 t (-eta)^{3/2} + x (-eta)^{1/2}."""
    s = np.sqrt(-np.asarray(eta, dtype=float))
    return 4.0 * t * s ** 3 + x * s


class PhaseContext:
    """Profile plus catastrophe point, with cached quadrature data.

    The Cauchy-type integral defining the G-function only needs rho on a fixed
    set of nodes in (u_c, 0); those values are computed once here.
    """

    def __init__(self, profile, point=None, level=QUAD_LEVEL):
        self.profile = profile
        self.point = point if point is not None else locate_catastrophe(profile)
        res = catastrophe_residuals(profile, self.point)
        if not (abs(res["time"]) < 1e-9 and abs(res["inflection"]) < 1e-8
                and abs(res["position"]) < 1e-9):
            raise DomainError(f"catastrophe point inconsistent with "
                              f"profile: {res}")
        self.level = level
        self.u_c = self.point.u_c
        # eta = u_c (1 - v^2); distance to 0 kept separately for the log end
        v, vc, w = tanh_sinh(level)
        self._v, self._w = v, w
        self._neg_eta = -self.u_c * vc * (1.0 + v)
        self._rho_nodes = self._rho_from_distance(self._neg_eta)

    # ---- rho family -------------------------------------------------------

    def _rho_from_distance(self, neg_lam, branch="minus"):
        # rho(lam) = sqrt(-lam) * int_0^1 f(lam (1 - s^2)) ds, lam = -neg_lam
        s, sc, w = tanh_sinh(self.level)
        neg_lam = np.asarray(neg_lam, dtype=float)
        u = -(neg_lam[..., None] * sc * (1.0 + s))
        vals = inverse_branch(self.profile, u, branch)
        return np.sqrt(neg_lam) * (vals @ w)

    def rho(self, lam):
        lam, scalar = _as_array(lam)
        lam = lam.astype(float)
        if np.any(~(lam >= -1.0)) or np.any(~(lam <= 0.0)):
            raise DomainError("rho is implemented for -1 <= lam <= 0 only")
        out = np.zeros_like(lam)
        inner = lam < 0
        if inner.any():
            out[inner] = self._rho_from_distance(-lam[inner], "minus")
        return _out(out, scalar)

    def rho_plus(self, lam):
        """Companion of rho built from the increasing flank f_+."""
        lam, scalar = _as_array(lam)
        lam = lam.astype(float)
        if np.any(~(lam >= -1.0)) or np.any(~(lam <= 0.0)):
            raise DomainError("rho_plus is implemented for -1 <= lam <= 0")
        out = np.zeros_like(lam)
        inner = lam < 0
        if inner.any():
            out[inner] = self._rho_from_distance(-lam[inner], "plus")
        return _out(out, scalar)

    def tau(self, lam):
        """Tunnelling action between the two turning points."""
        lam, scalar = _as_array(lam)
        lam = lam.astype(float)
        if np.any(~(lam >= -1.0)) or np.any(~(lam < 0.0)):
            raise DomainError("tau requires -1 <= lam < 0")
        out = np.zeros_like(lam)
        inner = lam > -1.0
        if inner.any():
            li = lam[inner]
            xl = np.asarray(inverse_branch(self.profile, li, "minus"))
            xr = np.asarray(inverse_branch(self.profile, li, "plus"))
            s, _, w = tanh_sinh(self.level)
            width = (xr - xl)[..., None]
            xs = xl[..., None] + width * s
            gap = np.maximum(li[..., None] - self.profile.u0(xs), 0.0)
            out[inner] = (xr - xl) * (np.sqrt(gap) @ w)
        return _out(out, scalar)

    # ---- G-function ---------------------------------------------------------

    def _F_nodes(self, x, t):
        s = np.sqrt(self._neg_eta)
        return self._rho_nodes - (4.0 * t * s ** 3 + x * s)

    def g_function(self, lam, x, t, side=None):
        """G(lam; x, t), analytic off [u_c, +inf).

        Real ``lam`` on the cut needs ``side`` = '+' or '-' for the boundary
        value from above or below.  Complex ``lam`` is evaluated directly.
        """
        lam, scalar = _as_array(lam)
        u_c = self.u_c
        scale = 2.0 * np.sqrt(-u_c) / np.pi
        F = self._F_nodes(x, t)
        eta = -self._neg_eta
        if np.iscomplexobj(lam) and np.any(lam.imag != 0):
            if np.any((lam.imag == 0) & (lam.real >= u_c)):
                raise DomainError("complex evaluation on the cut needs side")
            root = np.sqrt(u_c - lam)
            integral = (F / (eta - lam[..., None])) @ self._w
            return _out(scale * root * integral, scalar)

        lam = lam.real.astype(float)
        if np.any(np.abs(lam - u_c) < 1e-6):
            raise SingularityError("lam too close to u_c; use phi_closed")
        out = np.empty(lam.shape, dtype=complex)
        below = lam < u_c
        if below.any():
            lb = lam[below]
            integral = (F / (eta - lb[..., None])) @ self._w
            out[below] = scale * np.sqrt(u_c - lb) * integral
        above = ~below
        if above.any():
            if side not in ("+", "-"):
                raise DomainError("lam on the cut [u_c, inf) needs side '+' "
                                  "or '-'")
            sgn = 1.0 if side == "+" else -1.0
            la = lam[above]
            root = -sgn * 1j * np.sqrt(la - u_c)
            out[above] = scale * root * self._cut_integral(la, x, t, F, sgn)
        if not np.any(above):
            out = out.real
        return _out(out, scalar)

    def _cut_integral(self, lam, x, t, F, sgn):
        # int_0^1 F(v) / (v^2 - a^2) dv * |u_c|, a^2 = (lam - u_c)/|u_c|
        u_c = self.u_c
        v = self._v
        a = np.sqrt((lam - u_c) / -u_c)
        res = np.empty(lam.shape, dtype=complex)
        inside = lam < 0
        if inside.any():
            li, ai = lam[inside], a[inside]
            F_lam = self.rho(li) - alpha(li, x, t)
            dv2 = v ** 2 - ai[..., None] ** 2
            J = ((F - F_lam[..., None]) / dv2) @ self._w
            pole = (np.log((1.0 - ai) / (1.0 + ai)) + sgn * 1j * np.pi) / (2 * ai)
            res[inside] = J + F_lam * pole
        outside = ~inside
        if outside.any():
            if np.any(lam[outside] == 0):
                raise SingularityError("G is singular at lam = 0 on the cut")
            ao = a[outside]
            res[outside] = (F / (v ** 2 - ao[..., None] ** 2)) @ self._w
        return res / -u_c

    def g1_coefficient(self, x, t):
        """Coefficient of (-lam)^{-1/2} in G as lam -> infinity."""
        return 2.0 * np.sqrt(-self.u_c) / np.pi * (self._F_nodes(x, t) @ self._w)

    # ---- phi ---------------------------------------------------------------

    def _shift(self, x, t):
        pt = self.point
        return x - pt.x_c - 6.0 * pt.u_c * (t - pt.t_c)

    def _root(self, lam, side):
        """sqrt(u_c - lam) with boundary values on the cut lam > u_c."""
        u_c = self.u_c
        if np.iscomplexobj(lam) and np.any(lam.imag != 0):
            return np.sqrt(u_c - lam.astype(complex))
        lam = lam.real.astype(float)
        if np.all(lam <= u_c):
            return np.sqrt(u_c - lam)
        if side not in ("+", "-"):
            raise DomainError("lam > u_c needs side '+' or '-'")
        sgn = 1.0 if side == "+" else -1.0
        return np.where(lam <= u_c, np.sqrt(np.maximum(u_c - lam, 0.0)) + 0j,
                        -sgn * 1j * np.sqrt(np.maximum(lam - u_c, 0.0)))

    def _segment_integral(self, lam, func, power, order):
        """int_0^1 func(lam + s (u_c - lam)) s^power ds, vectorized in lam.

        For complex lam the straight path may pass close to the branch point
        -1 of f_-; the s-interval is split at the closest approach so the
        double-exponential rule clusters nodes there.
        """
        u_c = self.u_c
        lam = np.asarray(lam)
        s, sc, w = tanh_sinh(self.level + 1)
        out = np.empty(lam.shape, dtype=complex if np.iscomplexobj(lam)
                       else float)
        for idx in np.ndindex(lam.shape):
            l0 = lam[idx]
            d = u_c - l0
            split = 0.0
            if np.iscomplexobj(lam):
                split = float(np.real((-1.0 - l0) * np.conj(d)) / abs(d) ** 2)
            pieces = [(0.0, 1.0)] if not 0.0 < split < 1.0 else \
                [(0.0, split), (split, 1.0)]
            total = 0.0
            for a, b in pieces:
                ss = a + (b - a) * s
                # xi - u_c computed from the distance to b to avoid cancellation
                xi = l0 + ss * d if b < 1.0 else u_c - (b - a) * sc * d
                if np.iscomplexobj(lam):
                    vals = func(xi)
                else:
                    vals = func(np.real(xi))
                total = total + (b - a) * np.sum(w * vals * ss ** power)
            out[idx] = total
        return out

    def _fprime(self, xi, t):
        if np.iscomplexobj(xi):
            return f_minus_complex(self.profile, xi, 1) + 6.0 * t
        return f_minus_derivatives(self.profile, np.clip(xi, -1 + 1e-16, -1e-300),
                                   1) + 6.0 * t

    def _fthird(self, xi):
        if np.iscomplexobj(xi):
            return f_minus_complex(self.profile, xi, 3)
        return f_minus_derivatives(self.profile,
                                   np.clip(xi, -1 + 1e-16, -1e-300), 3)

    def _check_phi_domain(self, lam):
        if np.iscomplexobj(lam) and np.any(lam.imag != 0):
            return
        lam = np.real(lam)
        if np.any(~(lam > -1.0)) or np.any(~(lam <= 0.0)):
            raise DomainError("phi on the real axis requires -1 < lam <= 0")

    def phi_closed(self, lam, x, t, side="+"):
        """phi = G - rho + alpha in closed form.

        Real lam > u_c returns the boundary value from ``side`` (purely
        imaginary part for the integral terms).
        """
        lam, scalar = _as_array(lam)
        self._check_phi_domain(lam)
        root = self._root(lam, side)
        cplx = np.iscomplexobj(lam) and np.any(lam.imag != 0)
        lam_eval = lam if cplx else lam.real.astype(float)
        integral = self._segment_integral(
            lam_eval, lambda xi: self._fprime(xi, t), 0.5, 1)
        val = root * self._shift(x, t) + root ** 3 * integral
        return _out(val, scalar)

    def phi_parts(self, lam, x, t, side="+"):
        """phi from the twice integrated-by-parts representation."""
        lam, scalar = _as_array(lam)
        self._check_phi_domain(lam)
        pt = self.point
        root = self._root(lam, side)
        cplx = np.iscomplexobj(lam) and np.any(lam.imag != 0)
        lam_eval = lam if cplx else lam.real.astype(float)
        integral = self._segment_integral(lam_eval, self._fthird, 2.5, 3)
        val = (root * self._shift(x, t) + 4.0 * root ** 3 * (t - pt.t_c)
               + 4.0 / 15.0 * root ** 7 * integral)
        return _out(val, scalar)

    def phi_prime(self, lam, x, t, side="+"):
        """d phi / d lam."""
        lam, scalar = _as_array(lam)
        self._check_phi_domain(lam)
        root = self._root(lam, side)
        cplx = np.iscomplexobj(lam) and np.any(lam.imag != 0)
        lam_eval = lam if cplx else lam.real.astype(float)
        # int_lam^uc g / sqrt(xi - lam) = root * int_0^1 g s^{-1/2} ds
        integral = self._segment_integral(
            lam_eval, lambda xi: self._fprime(xi, t), -0.5, 1)
        val = -self._shift(x, t) / (2.0 * root) - 0.5 * root * integral
        return _out(val, scalar)

    # ---- sign checks ------------------------------------------------------

    def check_phi_signs(self, x, t, delta=0.05, height=0.05, n_re=41, n_im=6,
                        n_cut=41):
        """Evaluate the four sign conditions on phi near (x_c, t_c).

        Returns a dict ``name -> (passed, worst_margin)``; a positive margin
        means the inequality holds with room to spare.
        """
        u_c = self.u_c
        re = np.linspace(-1.0 - delta, u_c - delta, n_re)
        im = np.linspace(height / n_im, height, n_im)
        grid = (re[:, None] + 1j * im[None, :]).ravel()
        upper = np.imag(self.phi_closed(grid, x, t))
        lower = np.imag(self.phi_closed(np.conj(grid), x, t))
        cut = np.linspace(u_c + delta, 0.0, n_cut)
        phi_cut = np.asarray(self.phi_closed(cut, x, t, side="+"))
        third = -np.imag(phi_cut)
        tau_vals = np.asarray(self.tau(cut[cut < 0]))
        fourth = tau_vals - np.real(1j * phi_cut[cut < 0])
        report = {
            "im_phi_upper_positive": float(upper.min()),
            "im_phi_lower_negative": float((-lower).min()),
            "im_phi_plus_negative_on_cut": float(third.min()),
            "minus_tau_plus_i_phi_negative": float(fourth.min()),
        }
        return {k: (v > 0, v) for k, v in report.items()}

    # ---- local conformal data ---------------------------------------------

    def local_maps(self, xt, t, radius=None):
        """Local coordinate f and shifts g1, g2 near u_c."""
        u_c = self.u_c
        max_r = min(u_c + 1.0, -u_c)
        if radius is None:
            radius = 0.5 * max_r
        if not 0 < radius < max_r:
            raise RangeError("radius must stay below the distance from u_c "
                             "to -1 and 0")
        return LocalMaps(self, xt, t, radius)

    def _h(self, lam):
        # (-f)/(u_c - lam) = (-28 int_0^1 f_-'''(xi) s^{5/2} ds)^{2/7}
        lam, scalar = _as_array(lam)
        integral = self._segment_integral(lam, self._fthird, 2.5, 3)
        if np.iscomplexobj(integral):
            val = (-28.0 * integral) ** (2.0 / 7.0)
        else:
            val = np.power(-28.0 * integral, 2.0 / 7.0)
        return _out(np.asarray(val), scalar)

    def f_fractional(self, lam):
        """f from the fractional power of phi at the critical point (real lam)."""
        lam, scalar = _as_array(lam)
        lam = lam.astype(float)
        pt = self.point
        phi = np.asarray(self.phi_closed(lam, pt.x_c, pt.t_c, side="+"))
        out = np.where(
            lam <= self.u_c,
            -np.power(np.maximum(-105.0 * np.real(phi), 0.0), 2.0 / 7.0),
            np.power(np.maximum(np.real(105.0j * phi), 0.0), 2.0 / 7.0))
        return _out(out, scalar)


@dataclass
class LocalMaps:
    ctx: PhaseContext
    xt: float
    t: float
    radius: float

    def _check(self, lam):
        if np.any(np.abs(np.asarray(lam) - self.ctx.u_c) > self.radius):
            raise RangeError("evaluation outside the local disk")

    def f(self, lam):
        self._check(lam)
        lam_arr = np.asarray(lam)
        val = (lam_arr - self.ctx.u_c) * np.asarray(self.ctx._h(lam_arr))
        return _out(np.asarray(val), lam_arr.ndim == 0)

    def g2(self, lam):
        self._check(lam)
        lam_arr = np.asarray(lam)
        h = np.asarray(self.ctx._h(lam_arr))
        val = 12.0 * (self.t - self.ctx.point.t_c) / h ** 1.5
        return _out(np.asarray(val), lam_arr.ndim == 0)

    def g1(self, lam):
        self._check(lam)
        lam_arr = np.asarray(lam)
        h = np.asarray(self.ctx._h(lam_arr))
        val = (self.xt - self.ctx.point.xt_c) / np.sqrt(h)
        return _out(np.asarray(val), lam_arr.ndim == 0)
