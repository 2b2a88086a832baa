"""Figures for the universality report (files only, Agg backend)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import TARGET_SLOPE  # noqa: E402

FIG_SIZE = (6.4, 4.0)


def _finish(fig, ax, path):
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_profiles(report, path, T=0.0):
    """Rescaled KdV profiles (u - u_c)/a(eps) against U(X, T)."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for eps in report.eps:
        if (eps, T) in report.profiles:
            ax.plot(report.X, report.profiles[eps, T], lw=1.0,
                    label=f"eps = {eps:g}")
    ax.plot(report.X, report.limits[T], "k--", lw=1.5, label="U(X, T)")
    ax.set_xlabel("X")
    ax.set_ylabel("(u - u_c) / a(eps)")
    ax.set_title(f"rescaled profiles, T = {T:g}")
    ax.legend(frameon=False, fontsize=8)
    _finish(fig, ax, path)


def plot_errors(report, path):
    """Sup-errors against eps on log-log axes with the reference rate."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    eps = np.array(report.succeeded)
    for T in report.T:
        ax.loglog(eps, [report.sup_error[e, T] for e in eps], "o-", ms=4,
                  lw=1.0, label=f"T = {T:g}")
    if len(eps):
        top = np.array([report.eps_error(e) for e in eps])
        ref = top[0] * (eps / eps[0]) ** TARGET_SLOPE
        ax.loglog(eps, ref, "k:", label="slope 4/7")
    ax.set_xlabel("eps")
    ax.set_ylabel("sup |u - u_c - a U|")
    slope = report.slope
    if slope is not None:
        ax.set_title(f"fitted slope {slope:.3f}")
    ax.legend(frameon=False, fontsize=8)
    _finish(fig, ax, path)
