"""Run configuration: ``key = value`` lines with ``#`` comments."""

from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError, ParseError

OUTPUT_ENV = "KDVBREAK_OUTPUT"


@dataclass(frozen=True)
class RunConfig:
    profile: str = "sech2"
    eps: tuple = (0.1, 0.07, 0.05, 0.035)
    T: tuple = (-1.0, 0.0, 1.0)
    X_window: float = 2.0
    nX: int = 161
    L: float = 25.0
    h: float = 0.025
    L_d: float = 15.0
    N: str = "auto"
    dt: str = "auto"
    output_dir: str = "kdvbreak_out"
    cache: str = "use"

    def __post_init__(self):
        if not self.eps:
            raise ConfigError("eps ladder is empty")
        if any(e <= 0 for e in self.eps):
            raise ConfigError("eps values must be positive")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise ConfigError("eps ladder must be strictly decreasing")
        if not self.T:
            raise ConfigError("T list is empty")
        for name in ("X_window", "L", "h", "L_d", "nX"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("N", "dt"):
            val = getattr(self, name)
            if val != "auto" and not float(val) > 0:
                raise ConfigError(f"{name} must be 'auto' or positive")
        if self.N != "auto":
            n = int(self.N)
            if n < 4096 or n & (n - 1):
                raise ConfigError("N must be a power of two >= 4096")
        if self.cache not in ("use", "rebuild"):
            raise ConfigError("cache must be 'use' or 'rebuild'")

    def modes(self, eps):
        from .harness import default_modes
        return default_modes(eps) if self.N == "auto" else int(self.N)

    def time_step(self):
        return None if self.dt == "auto" else float(self.dt)


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


_PARSERS = {
    "profile": str,
    "eps": _floats,
    "T": _floats,
    "X_window": float,
    "nX": int,
    "L": float,
    "h": float,
    "L_d": float,
    "N": lambda s: "auto" if s == "auto" else str(int(s)),
    "dt": lambda s: "auto" if s == "auto" else str(float(s)),
    "output_dir": str,
    "cache": str,
}
assert set(_PARSERS) == {f.name for f in fields(RunConfig)}


def parse_config(text, base=None):
    """Parse config text into a RunConfig, starting from ``base`` or defaults."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}",
                             lineno=lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if not key or not value:
            raise ParseError("empty key or value", lineno=lineno)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r} on line {lineno}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", lineno=lineno) from None
    return replace(base or RunConfig(), **values)


def apply_overrides(config, overrides, env=None):
    """Environment output root, then explicit flag values (flags win)."""
    if env and env.get(OUTPUT_ENV):
        config = replace(config, output_dir=env[OUTPUT_ENV])
    clean = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **clean)
