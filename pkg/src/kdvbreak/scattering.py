"""Reflection data of the semiclassical Schrodinger operator for the sech^2 well."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchError, DomainError, PoleError

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _check_poles(z):
    re = np.real(z)
    hit = (np.imag(z) == 0) & (re <= 0) & (re == np.round(re))
    if np.any(hit):
        raise PoleError("Gamma has a pole at nonpositive integers")


def _lanczos_log(z):
    # valid for Re z >= 1/2
    zm = z - 1.0
    series = _LANCZOS[0] + sum(_LANCZOS[i] / (zm + i) for i in range(1, 9))
    tt = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(tt) - tt + np.log(series)


def _log_sin_pi(z):
    # log sin(pi z) without overflow for large |Im z|, determined mod 2 pi i
    z = np.asarray(z, dtype=complex)
    # sin(pi (z - n)) = (-1)^n sin(pi z); the shift keeps expm1 accurate
    n = np.round(z.real)
    w = z - n
    y = w.imag
    up = y > 0
    down = y < 0
    out = np.empty(np.shape(z), dtype=complex)
    wu, wd = w[up], w[down]
    out[up] = (-1j * np.pi * wu + np.log(-np.expm1(2j * np.pi * wu))
               + np.log(0.5j))
    out[down] = (1j * np.pi * wd + np.log(-np.expm1(-2j * np.pi * wd))
                 - np.log(2j))
    flat = ~(up | down)
    out[flat] = np.log(np.sin(np.pi * w[flat]).astype(complex))
    return out + 1j * np.pi * n


def log_gamma(z):
    """log Gamma(z) for complex z; the imaginary part is defined mod 2 pi."""
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    flat = np.atleast_1d(z)
    out = np.empty(flat.shape, dtype=complex)
    right = flat.real >= 0.5
    out[right] = _lanczos_log(flat[right])
    left = ~right
    if left.any():
        zl = flat[left]
        out[left] = (np.log(np.pi) - _log_sin_pi(zl)
                     - _lanczos_log(1.0 - zl))
    return out.reshape(z.shape)[()] if z.ndim == 0 else out.reshape(z.shape)


def gamma_complex(z):
    """Gamma(z) for complex z (Lanczos with reflection for Re z < 1/2)."""
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    out = np.exp(log_gamma(z))
    return complex(out) if np.ndim(out) == 0 else out


def n_function(z):
    """sqrt(2 pi) / Gamma(1/2 + z) * exp(z log(z/e)), analytic off (-inf, 0]."""
    z = np.asarray(z, dtype=complex)
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise BranchError("N(z) is not defined on (-inf, 0]")
    val = np.exp(_HALF_LOG_2PI + z * (np.log(z) - 1.0) - log_gamma(0.5 + z))
    return complex(val) if np.ndim(val) == 0 else val


def _sech2_params(lam, eps):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam >= 0):
        raise DomainError("reflection coefficient needs lam < 0")
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    k = 1j * np.sqrt(-lam) / eps
    s = -0.5 + 1j * np.sqrt(1.0 - eps ** 2 / 4.0) / eps
    return k, s


def sech2_scattering_logs(lam, eps):
    """(log a, log b) for u0 = -sech^2 from the hypergeometric connection."""
    k, s = _sech2_params(lam, eps)
    lg_k1 = log_gamma(k + 1.0)
    log_a = lg_k1 + log_gamma(k) - log_gamma(k - s) - log_gamma(k + s + 1.0)
    log_b = lg_k1 + log_gamma(-k) - log_gamma(s + 1.0) - log_gamma(-s)
    return log_a, log_b


def exact_reflection_sech2(lam, eps):
    """r(lam; eps) = b/a for the well -sech^2 x."""
    log_a, log_b = sech2_scattering_logs(lam, eps)
    r = np.exp(log_b - log_a)
    return complex(r) if np.ndim(r) == 0 else r


def exact_transmission_sech2(lam, eps):
    log_a, _ = sech2_scattering_logs(lam, eps)
    t = np.exp(-log_a)
    return complex(t) if np.ndim(t) == 0 else t


def ode_reflection(profile, lam, eps, x_max=30.0, rtol=1e-12):
    """Reflection coefficient by integrating eps^2 f'' = (lam - u0) f.

    Starts from the pure transmitted wave exp(-i w x) at +x_max, integrates
    to -x_max and splits the solution into incoming and reflected waves.
    """
    if lam >= 0:
        raise DomainError("lam must be negative")
    w = np.sqrt(-lam) / eps

    def rhs(x, y):
        return [y[1], (lam - profile.u0(x)) * y[0] / eps ** 2]

    y0 = np.exp(-1j * w * x_max) * np.array([1.0, -1j * w])
    sol = solve_ivp(rhs, (x_max, -x_max), y0, method="DOP853", rtol=rtol,
                    atol=1e-300)
    f, df = sol.y[:, -1]
    x = sol.t[-1]
    incoming = 0.5 * (f - df / (1j * w)) * np.exp(1j * w * x)
    reflected = 0.5 * (f + df / (1j * w)) * np.exp(-1j * w * x)
    return reflected / incoming


@dataclass
class ReflectionEval:
    lam: float
    eps: float
    r: complex
    kappa: complex
    tau: float
    residuals: dict = field(default_factory=dict)


def reflection_eval(ctx, lam, eps):
    """Bundle r, kappa = -i r exp(2 i rho / eps), tau and unitarity residuals."""
    log_a, log_b = sech2_scattering_logs(lam, eps)
    r = complex(np.exp(log_b - log_a))
    rho = ctx.rho(lam)
    tau = ctx.tau(lam)
    kappa = -1j * r * np.exp(2j * rho / eps)
    trans_sq = np.exp(-2.0 * np.real(log_a))
    residuals = {
        "unitarity": abs(abs(r) ** 2 + trans_sq - 1.0),
        "wkb_transmission": abs(np.exp(-2 * np.real(log_a) + 2 * tau / eps) - 1),
    }
    return ReflectionEval(float(lam), float(eps), r, complex(kappa), float(tau),
                          residuals)


@dataclass
class WkbReport:
    lam: np.ndarray
    eps: np.ndarray
    max_kappa_dev: np.ndarray
    max_abs_kappa: np.ndarray
    max_transmission_dev: np.ndarray
    slope: float
    rows: list


def wkb_validation(ctx, lam_grid, eps_list):
    """Rate check kappa = 1 + O(eps) and |t|^2 e^{2 tau/eps} -> 1 on a grid."""
    lam_grid = np.sort(np.asarray(lam_grid, dtype=float))
    eps_arr = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    if np.any(lam_grid <= -1) or np.any(lam_grid >= 0):
        raise DomainError("grid must lie inside (-1, 0)")
    rho = np.asarray(ctx.rho(lam_grid))
    tau = np.asarray(ctx.tau(lam_grid))
    dev, amax, tdev, rows = [], [], [], []
    for eps in eps_arr:
        log_a, log_b = sech2_scattering_logs(lam_grid, eps)
        r = np.exp(log_b - log_a)
        kappa = -1j * r * np.exp(2j * rho / eps)
        tr = np.abs(np.exp(-2 * np.real(log_a) + 2 * tau / eps) - 1.0)
        dev.append(np.max(np.abs(kappa - 1)))
        amax.append(np.max(np.abs(kappa)))
        tdev.append(np.max(tr))
        for j, lam in enumerate(lam_grid):
            rows.append((lam, eps, abs(r[j]), abs(kappa[j] - 1), tr[j]))
    dev = np.array(dev)
    slope = float(np.polyfit(np.log(eps_arr), np.log(dev), 1)[0]) \
        if len(eps_arr) >= 2 else float("nan")
    return WkbReport(lam_grid, eps_arr, dev, np.array(amax), np.array(tdev),
                     slope, rows)
