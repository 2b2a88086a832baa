"""Command-line front end: ``kdvbreak <subcommand> [options]``.

Exit status is 0 on success, 1 when a validation fails or required caches
are missing, and 2 for usage or configuration errors.
"""

import argparse
import os
import sys

import numpy as np

from . import cache
from .config import RunConfig, apply_overrides, parse_config
from .errors import ConfigError, KdvBreakError
from .harness import ScalingMap, universality_compare, TARGET_SLOPE
from .hopf import hopf_scan
from .kdv import KdvConfig, evolve_converged, init_field
from .profile import (CATALOG, catastrophe_residuals, get_profile,
                      locate_catastrophe)
from .pi2 import Pi2Family, Pi2Grid, continuation_in_T

OK, FAILED, USAGE = 0, 1, 2


class Missing(Exception):
    """Required cache files are absent under cache policy 'use'."""

    def __init__(self, paths):
        super().__init__("missing cache files:\n  " + "\n  ".join(paths))
        self.paths = paths


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--profile", help="initial profile name")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--cache", choices=("use", "rebuild"))

    p = argparse.ArgumentParser(prog="kdvbreak", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    sub.add_parser("catastrophe", parents=[common],
                   help="locate the gradient catastrophe")

    h = sub.add_parser("hopf", parents=[common],
                       help="dispersionless solution on an x-grid")
    h.add_argument("--t", type=float, help="time (default t_c / 2)")
    h.add_argument("--x-min", type=float, default=-3.0)
    h.add_argument("--x-max", type=float, default=3.0)
    h.add_argument("--nx", type=int, default=121)

    sub.add_parser("phase-check", parents=[common],
                   help="phase-function identities and sign conditions")

    s = sub.add_parser("scattering-check", parents=[common],
                       help="exact reflection coefficient against WKB")
    s.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    s.add_argument("--nlam", type=int, default=9)

    sub.add_parser("pi2", parents=[common], help="solve and cache P_I^2 family")

    k = sub.add_parser("kdv", parents=[common], help="run and cache KdV snapshots")
    k.add_argument("--eps", type=float, nargs="+",
                   help="eps values (default: config ladder)")
    k.add_argument("--t", type=float, nargs="+",
                   help="output times (default: mapped T list)")

    sub.add_parser("compare", parents=[common],
                   help="universality comparison report and figures")
    return p


def _load_config(args):
    config = RunConfig()
    if args.config:
        with open(args.config) as fh:
            config = parse_config(fh.read())
    overrides = {"profile": args.profile, "output_dir": args.output_dir,
                 "cache": args.cache}
    config = apply_overrides(config, overrides, os.environ)
    if config.profile not in CATALOG:
        raise ConfigError(f"unknown profile {config.profile!r}; "
                          f"choose from {sorted(CATALOG)}")
    return config


def _cache_dir(config):
    return os.path.join(config.output_dir, "cache")


def _emit(config, name, text):
    path = os.path.join(config.output_dir, name)
    cache.atomic_write(path, text)
    sys.stdout.write(text)
    return path


# --- subcommands -------------------------------------------------------------

def cmd_catastrophe(config, args):
    profile = get_profile(config.profile)
    point = locate_catastrophe(profile)
    row = ",".join([profile.name] + [cache.fmt(v) for v in point.as_row()])
    _emit(config, "catastrophe.csv", "name,x_c,t_c,u_c,xi_c,k\n" + row + "\n")
    res = catastrophe_residuals(profile, point)
    return OK if max(abs(v) for v in res.values()) < 1e-9 else FAILED


def cmd_hopf(config, args):
    profile = get_profile(config.profile)
    point = locate_catastrophe(profile)
    t = 0.5 * point.t_c if args.t is None else args.t
    xs = np.linspace(args.x_min, args.x_max, args.nx)
    lines = ["x,u,ux"]
    for s in hopf_scan(profile, point, xs, t):
        lines.append(f"{cache.fmt(s.x)},{cache.fmt(s.u)},{cache.fmt(s.ux)}")
    _emit(config, f"hopf_t={t:.6g}.csv", "\n".join(lines) + "\n")
    return OK


def cmd_phase_check(config, args):
    from .phase import PhaseContext, alpha
    profile = get_profile(config.profile)
    ctx = PhaseContext(profile)
    pt = ctx.point
    x, t = pt.x_c, pt.t_c
    below = np.linspace(-0.95, pt.u_c - 0.05, 50)
    above = np.linspace(pt.u_c + 0.05, -0.02, 50)
    phi = np.asarray(ctx.phi_closed(below, x, t))
    ident = np.abs(np.asarray(ctx.g_function(below, x, t))
                   - np.asarray(ctx.rho(below)) + alpha(below, x, t) - phi)
    parts_below = np.abs(phi - np.asarray(ctx.phi_parts(below, x, t)))
    gp = np.asarray(ctx.g_function(above, x, t, side="+"))
    gm = np.asarray(ctx.g_function(above, x, t, side="-"))
    propg = np.abs(gp + gm - 2 * np.asarray(ctx.rho(above))
                   + 2 * alpha(above, x, t))
    parts_above = np.abs(np.asarray(ctx.phi_closed(above, x, t))
                         - np.asarray(ctx.phi_parts(above, x, t)))
    lines = ["lambda,residual_id,residual_propg,residual_phi1"]
    for lam, r1, r3 in zip(below, ident, parts_below):
        lines.append(f"{cache.fmt(lam)},{r1:.3e},nan,{r3:.3e}")
    for lam, r2, r3 in zip(above, propg, parts_above):
        lines.append(f"{cache.fmt(lam)},nan,{r2:.3e},{r3:.3e}")
    signs = ctx.check_phi_signs(x, t)
    for name, (passed, margin) in signs.items():
        lines.append(f"# {name}: {'pass' if passed else 'FAIL'} margin={margin:.3e}")
    _emit(config, "phase_check.csv", "\n".join(lines) + "\n")
    ok = (ident.max() < 1e-7 and propg.max() < 1e-7
          and max(parts_below.max(), parts_above.max()) < 1e-8
          and all(p for p, _ in signs.values()))
    return OK if ok else FAILED


def cmd_scattering_check(config, args):
    from .phase import PhaseContext
    from .scattering import wkb_validation
    if config.profile != "sech2":
        raise ConfigError("exact reflection data exist only for profile sech2")
    ctx = PhaseContext(get_profile("sech2"))
    lam = np.linspace(-0.9, -0.1, args.nlam)
    rep = wkb_validation(ctx, lam, args.eps)
    lines = ["lambda,eps,abs_r,abs_kappa_minus_1,unitarity_residual"]
    for row in rep.rows:
        lines.append(",".join(f"{v:.10g}" for v in row))
    lines.append(f"# slope={rep.slope:.4f} target=1")
    _emit(config, "scattering_check.csv", "\n".join(lines) + "\n")
    ok = abs(rep.slope - 1.0) <= 0.2 and np.all(rep.max_abs_kappa < 2.0)
    return OK if ok else FAILED


def _pi2_family(config, need_T, strict=False):
    """Load or solve the P_I^2 members for ``need_T``.

    Under cache policy 'use' complete caches are read back; missing ones are
    an error when ``strict`` and recomputed otherwise.
    """
    folder = _cache_dir(config)
    paths = {T: os.path.join(folder, cache.pi2_name(T, config.L, config.h))
             for T in need_T}
    missing = [p for p in paths.values() if not os.path.exists(p)]
    grid = Pi2Grid.from_spacing(config.L, config.h)
    if config.cache == "use":
        if not missing:
            return Pi2Family(grid, [cache.read_pi2(paths[T])
                                    for T in sorted(need_T)])
        if strict:
            raise Missing(missing)
    family = continuation_in_T(grid, need_T)
    for sol in family.solutions:
        cache.write_pi2(paths[sol.T], sol)
    return family


def _kdv_runner(config, profile, strict=False):
    folder = _cache_dir(config)

    def run(eps, times):
        paths = [os.path.join(folder, cache.kdv_name(eps, t)) for t in times]
        if config.cache == "use":
            missing = [p for p in paths if not os.path.exists(p)]
            if not missing:
                return [cache.read_kdv(p) for p in paths]
            if strict:
                raise Missing(missing)
        cfg = KdvConfig(eps=eps, L_d=config.L_d, N=config.modes(eps),
                        dt=config.time_step())
        f = init_field(profile, cfg)
        out, dt = [], None
        for t, path in zip(times, paths):
            f, dt = evolve_converged(f, t, dt)
            cache.write_kdv(path, f)
            out.append(f)
        return out
    return run


def cmd_pi2(config, args):
    family = _pi2_family(config, config.T)
    lines = ["T,residual,iterations"]
    for s in family.solutions:
        lines.append(f"{cache.fmt(s.T)},{s.residual:.3e},{s.iterations}")
    _emit(config, "pi2_summary.csv", "\n".join(lines) + "\n")
    return OK if all(s.residual <= 1e-9 for s in family.solutions) else FAILED


def cmd_kdv(config, args):
    profile = get_profile(config.profile)
    point = locate_catastrophe(profile)
    smap = ScalingMap(point)
    run = _kdv_runner(config, profile)
    lines = ["eps,t,mass_drift"]
    for eps in (args.eps or config.eps):
        times = sorted(args.t) if args.t else sorted(smap.t_of(T, eps)
                                                     for T in config.T)
        for f in run(eps, times):
            lines.append(f"{cache.fmt(eps)},{cache.fmt(f.t)},{f.drift():.3e}")
    _emit(config, "kdv_summary.csv", "\n".join(lines) + "\n")
    return OK


def _missing_compare_caches(config, point):
    folder = _cache_dir(config)
    smap = ScalingMap(point)
    names = [cache.pi2_name(T, config.L, config.h) for T in config.T]
    names += [cache.kdv_name(e, smap.t_of(T, e))
              for e in config.eps for T in sorted(config.T)]
    return [os.path.join(folder, n) for n in names
            if not os.path.exists(os.path.join(folder, n))]


def cmd_compare(config, args):
    from .plotting import plot_errors, plot_profiles
    profile = get_profile(config.profile)
    point = locate_catastrophe(profile)
    if config.cache == "use":
        missing = _missing_compare_caches(config, point)
        if missing:
            raise Missing(missing)
    family = _pi2_family(config, config.T, strict=True)
    report = universality_compare(profile, point, config.eps, config.T,
                                  config.X_window, config.nX, family,
                                  _kdv_runner(config, profile, strict=True))
    _emit(config, "compare_report.csv", report.to_csv())
    plot_errors(report, os.path.join(config.output_dir, "compare_errors.png"))
    if 0.0 in config.T:
        plot_profiles(report, os.path.join(config.output_dir,
                                           "compare_profiles_T0.png"))
    slope = report.slope
    ok = (slope is not None and abs(slope - TARGET_SLOPE) <= 0.15
          and not report.failures)
    return OK if ok else FAILED


COMMANDS = {
    "catastrophe": cmd_catastrophe,
    "hopf": cmd_hopf,
    "phase-check": cmd_phase_check,
    "scattering-check": cmd_scattering_check,
    "pi2": cmd_pi2,
    "kdv": cmd_kdv,
    "compare": cmd_compare,
}


def dispatch(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"kdvbreak: {exc}", file=sys.stderr)
        return USAGE
    try:
        return COMMANDS[args.command](config, args)
    except Missing as exc:
        print(f"kdvbreak: {exc}", file=sys.stderr)
        return FAILED
    except ConfigError as exc:
        print(f"kdvbreak: {exc}", file=sys.stderr)
        return USAGE
    except KdvBreakError as exc:
        print(f"kdvbreak: {exc}", file=sys.stderr)
        return FAILED


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
