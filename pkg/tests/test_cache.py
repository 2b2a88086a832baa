import os
import stat

import numpy as np
import pytest

from kdvbreak import cache
from kdvbreak.errors import ParseError
from kdvbreak.kdv import KdvConfig, evolve, init_field


def test_pi2_round_trip_is_bit_exact(tmp_path, pi2_family):
    for sol in pi2_family.solutions:
        path = tmp_path / cache.pi2_name(sol.T, sol.grid.L, sol.grid.h)
        cache.write_pi2(path, sol)
        back = cache.read_pi2(path)
        assert back.T == sol.T and back.grid == sol.grid
        assert back.residual == sol.residual
        assert np.array_equal(back.U, sol.U)
        assert np.array_equal(back.X, sol.X)


def test_kdv_round_trip_is_bit_exact(tmp_path, sech2):
    f = evolve(init_field(sech2, KdvConfig(eps=0.1, N=4096)), 0.0123)
    path = tmp_path / cache.kdv_name(f.eps, f.t)
    cache.write_kdv(path, f)
    back = cache.read_kdv(path)
    assert np.array_equal(back.u, f.u)
    assert (back.t, back.eps, back.mass0, back.momentum0) == (f.t, f.eps, f.mass0,
                                                              f.momentum0)
    assert back.config == f.config
    assert back.drift() == f.drift()


def test_names():
    assert cache.pi2_name(-1.0, 25.0, 0.025) == "pi2_T=-1_L=25_h=0.025.csv"
    assert cache.kdv_name(0.1, 0.25) == "kdv_eps=0.1_t=0.25.csv"


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    path = tmp_path / "sub" / "a.csv"
    cache.atomic_write(path, "one\n")
    cache.atomic_write(path, "two\n")
    assert path.read_text() == "two\n"
    assert os.listdir(path.parent) == ["a.csv"]
    mode = stat.S_IMODE(os.stat(path).st_mode)
    mask = os.umask(0)
    os.umask(mask)
    assert mode == 0o666 & ~mask


def test_bad_files_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# T=0 L=1 h=0.5 residual=0 n=5\nX,U\n0,1\n")
    with pytest.raises(ParseError):
        cache.read_pi2(p)
    p.write_text("# T=0 broken\nX,U\n")
    with pytest.raises(ParseError):
        cache.read_pi2(p)


def test_fmt_round_trips_doubles():
    rng = np.random.default_rng(3)
    for v in rng.standard_normal(200) * 10.0 ** rng.integers(-30, 30, 200):
        assert float(cache.fmt(v)) == v


def test_missing_metadata_is_parse_error(tmp_path):
    p = tmp_path / "kdv.csv"
    p.write_text("# eps=0.1 t=0\nx,u\n0,0\n")
    with pytest.raises(ParseError):
        cache.read_kdv(p)


def test_bad_rows(tmp_path):
    p = tmp_path / "rows.csv"
    p.write_text("# T=0 L=1 h=0.25 residual=0 n=9\nX,U\n0,1\n1,x\n")
    with pytest.raises(ParseError) as info:
        cache.read_pi2(p)
    assert info.value.lineno == 4
    p.write_text("# T=0 L=1 h=0.25 residual=0 n=9\nX,U\n0,1\n1\n")
    with pytest.raises(ParseError):
        cache.read_pi2(p)
