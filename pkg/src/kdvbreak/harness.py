"""Double-scaling comparison of small-dispersion KdV with the P_I^2 profile."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InstabilityError, KdvBreakError
from .hopf import hopf_scan
from .kdv import KdvConfig, evolve_converged, init_field, sample
from .pi2 import Pi2Grid, continuation_in_T, evaluate

TARGET_SLOPE = 4.0 / 7.0


def default_modes(eps):
    """Fourier modes used for a given eps on the default box."""
    return 2 ** 13 if eps >= 0.07 else 2 ** 14


@dataclass(frozen=True)
class ScalingMap:
    """(X, T, eps) -> (x, t) near the catastrophe and the amplitude a(eps)."""
    point: object

    def x_scale(self, eps):
        return (8.0 * self.point.k * eps ** 6) ** (1.0 / 7.0)

    def t_scale(self, eps):
        return (4.0 * self.point.k ** 3 * eps ** 4) ** (1.0 / 7.0) / 6.0

    def amplitude(self, eps):
        return (2.0 * eps ** 2 / self.point.k ** 2) ** (1.0 / 7.0)

    def t_of(self, T, eps):
        return self.point.t_c + self.t_scale(eps) * T

    def x_of(self, X, T, eps):
        p = self.point
        t = self.t_of(T, eps)
        return p.x_c + 6.0 * p.u_c * (t - p.t_c) + self.x_scale(eps) * np.asarray(X)

    def __call__(self, X, T, eps):
        return self.x_of(X, T, eps), self.t_of(T, eps)


@dataclass
class ComparisonReport:
    eps: list
    T: list
    X: np.ndarray
    sup_error: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)
    limits: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    drift: dict = field(default_factory=dict)

    @property
    def succeeded(self):
        return [e for e in self.eps
                if all((e, T) in self.sup_error for T in self.T)]

    def eps_error(self, eps):
        """Sup-error over the whole (X, T) window for one eps."""
        return max(self.sup_error[eps, T] for T in self.T)

    @property
    def slope(self):
        ok = self.succeeded
        if len(ok) < 3:
            return None
        errs = [self.eps_error(e) for e in ok]
        return float(np.polyfit(np.log(ok), np.log(errs), 1)[0])

    def gap(self, eps, T=0.0):
        """max |(u - u_c)/a(eps) - U(X, T)| over the X window."""
        return float(np.max(np.abs(self.profiles[eps, T] - self.limits[T])))

    def to_csv(self):
        lines = ["eps,T,sup_error"]
        for e in self.eps:
            for T in self.T:
                if (e, T) in self.sup_error:
                    val = f"{self.sup_error[e, T]:.17g}"
                else:
                    val = "nan"
                lines.append(f"{e:.17g},{T:.17g},{val}")
        s = self.slope
        lines.append(f"slope={'nan' if s is None else f'{s:.4f}'} "
                     f"target={TARGET_SLOPE:.4f}")
        for key in sorted(self.failures):
            lines.append(f"# failed eps={key:.17g}: {self.failures[key]}")
        return "\n".join(lines) + "\n"


def evolve_runner(profile, L_d=15.0, modes=default_modes):
    """Default KdV provider: one run per eps, advanced through sorted times."""
    def run(eps, times):
        f = init_field(profile, KdvConfig(eps=eps, L_d=L_d, N=modes(eps)))
        out = []
        dt = None
        for t in times:
            f, dt = evolve_converged(f, t, dt)
            out.append(f)
        return out
    return run


def universality_compare(profile, point, eps_ladder, T_list, X_window=2.0,
                         nX=161, family=None, runner=None):
    """Sup-errors of u - u_c - a(eps) U(X, T) over |X| <= X_window.

    ``family`` is a P_I^2 family covering ``T_list`` (built on the default
    grid when omitted); ``runner(eps, times)`` returns KdV fields at the
    requested increasing times.  A failing eps is recorded in ``failures``.
    """
    T_list = [float(T) for T in T_list]
    eps_ladder = [float(e) for e in eps_ladder]
    if X_window <= 0:
        raise DomainError("X window must be positive")
    if family is None:
        family = continuation_in_T(Pi2Grid.from_spacing(25.0, 0.025), T_list)
    runner = runner or evolve_runner(profile)
    smap = ScalingMap(point)
    X = np.linspace(-X_window, X_window, nX)
    report = ComparisonReport(eps_ladder, T_list, X)
    for T in T_list:
        report.limits[T] = evaluate(family.get(T), X)
    order = sorted(T_list)
    for eps in eps_ladder:
        a = smap.amplitude(eps)
        try:
            fields = runner(eps, [smap.t_of(T, eps) for T in order])
        except (InstabilityError, ConvergenceError, KdvBreakError) as exc:
            report.failures[eps] = str(exc)
            continue
        for T, f in zip(order, fields):
            u = sample(f, smap.x_of(X, T, eps))
            rescaled = (u - point.u_c) / a
            report.profiles[eps, T] = rescaled
            report.sup_error[eps, T] = float(
                np.max(np.abs(u - point.u_c - a * report.limits[T])))
            report.drift[eps, T] = f.drift()
    return report


@dataclass
class HopfTable:
    t: float
    eps: list
    errors: list

    @property
    def monotone(self):
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    @property
    def slope(self):
        if len(self.eps) < 2:
            return None
        return float(np.polyfit(np.log(self.eps), np.log(self.errors), 1)[0])


def hopf_validation(profile, point, eps_ladder, t, x_window=3.0, nx=241,
                    runner=None):
    """Sup-norm distance between KdV and Hopf solutions on |x| <= x_window."""
    if t > 0.9 * point.t_c:
        raise DomainError("pre-breaking comparison needs t <= 0.9 t_c")
    eps_ladder = sorted((float(e) for e in eps_ladder), reverse=True)
    runner = runner or evolve_runner(profile)
    xs = np.linspace(-x_window, x_window, nx)
    hop = np.array([s.u for s in hopf_scan(profile, point, xs, t)])
    errors = []
    for eps in eps_ladder:
        f = runner(eps, [t])[0]
        errors.append(float(np.max(np.abs(sample(f, xs) - hop))))
    return HopfTable(float(t), eps_ladder, errors)
