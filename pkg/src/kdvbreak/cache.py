"""Plain-text caches for P_I^2 solutions and KdV snapshots.

Every file is CSV with ``#``-prefixed ``key=value`` metadata headers.  Floats
are written with 17 significant digits so reading back is bit-exact.
Writes go to a temporary file in the same directory and are renamed into
place.
"""

import os
import tempfile
from dataclasses import replace

import numpy as np

from .errors import KdvBreakError, ParseError
from .kdv import KdvConfig, field_from_values
from .pi2 import Pi2Grid, Pi2Solution


def fmt(v):
    return f"{float(v):.17g}"


def atomic_write(path, text):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(meta, header, rows):
    lines = ["# " + " ".join(f"{k}={v}" for k, v in meta)]
    lines.append(header)
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _read(path):
    meta, rows = {}, []
    with open(path) as fh:
        lines = fh.read().splitlines()
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            for item in line[1:].split():
                key, sep, val = item.partition("=")
                if not sep:
                    raise ParseError(f"bad metadata {item!r} in {path}",
                                     lineno=lineno)
                meta[key] = val
        elif line and not line[0].isalpha():
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError:
                raise ParseError(f"bad data row in {path}", lineno=lineno) from None
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(f"ragged data row in {path}", lineno=lineno)
    return meta, np.array(rows)


# --- P_I^2 -------------------------------------------------------------------

def pi2_name(T, L, h):
    return f"pi2_T={T:g}_L={L:g}_h={h:g}.csv"


def write_pi2(path, sol):
    g = sol.grid
    meta = [("T", fmt(sol.T)), ("L", fmt(g.L)), ("h", fmt(g.h)),
            ("residual", fmt(sol.residual)), ("n", g.n)]
    atomic_write(path, _render(meta, "X,U", zip(g.X, sol.U)))


def _fields(path, meta, keys, kinds):
    try:
        return [kind(meta[k]) for k, kind in zip(keys, kinds)]
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: bad or missing metadata {exc}") from None


def read_pi2(path):
    meta, data = _read(path)
    T, L, n, res = _fields(path, meta, ("T", "L", "n", "residual"),
                           (float, float, int, float))
    try:
        grid = Pi2Grid(L, n)
    except KdvBreakError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if data.shape != (grid.n, 2):
        raise ParseError(f"{path}: expected {grid.n} rows of X,U")
    return Pi2Solution(T, grid, data[:, 1].copy(), res, 0, 0.0)


# --- KdV ---------------------------------------------------------------------

def kdv_name(eps, t):
    return f"kdv_eps={eps:g}_t={t:.17g}.csv"


def write_kdv(path, field):
    cfg = field.config
    meta = [("eps", fmt(field.eps)), ("t", fmt(field.t)), ("Ld", fmt(cfg.L_d)),
            ("N", cfg.N), ("mass0", fmt(field.mass0)),
            ("momentum0", fmt(field.momentum0))]
    atomic_write(path, _render(meta, "x,u", zip(cfg.x, field.u)))


def read_kdv(path):
    meta, data = _read(path)
    eps, t, L_d, N, mass0, momentum0 = _fields(
        path, meta, ("eps", "t", "Ld", "N", "mass0", "momentum0"),
        (float, float, float, int, float, float))
    try:
        cfg = KdvConfig(eps=eps, L_d=L_d, N=N)
    except KdvBreakError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if data.shape != (cfg.N, 2):
        raise ParseError(f"{path}: expected {cfg.N} rows of x,u")
    f = field_from_values(data[:, 1].copy(), cfg, t)
    # conservation is measured against the original datum, not the snapshot
    return replace(f, mass0=mass0, momentum0=momentum0)
