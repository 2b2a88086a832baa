"""Fixed quadrature rules on [0, 1] used by the phase-function integrals."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """n-point Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def tanh_sinh(level=7, floor=1e-20):
    """Double-exponential rule on [0, 1].

    Returns ``(x, xc, w)`` where ``xc = 1 - x`` is computed without
    cancellation, so integrands with endpoint singularities can be evaluated
    from the distance to the endpoint.  Nodes closer than ``floor`` to an
    endpoint are dropped; the omitted mass is below ``floor`` times the
    integrand's local size.  Step is 2**-level in the transformed variable.
    """
    h = 2.0 ** -level
    tmax = np.arcsinh(np.log(1.0 / floor) / np.pi)
    t = np.arange(-np.ceil(tmax / h), np.ceil(tmax / h) + 1) * h
    s = np.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-s))
    xc = 1.0 / (1.0 + np.exp(s))
    w = h * np.pi * np.cosh(t) * x * xc
    keep = (np.minimum(x, xc) >= floor) & (w > 0)
    return x[keep], xc[keep], w[keep]
