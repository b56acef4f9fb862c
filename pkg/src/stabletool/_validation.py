"""Small input-checking helpers shared across modules."""

import math

import numpy as np

from .errors import DomainError, ZeroFrequencyError


def check_order(s):
    """Return ``s`` as float, requiring ``0 < s < 1``."""
    s = float(s)
    if not (0.0 < s < 1.0):
        raise DomainError(f"order s must lie in (0, 1), got {s}")
    return s


def check_finite(x, name="value"):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def check_positive(x, name="value"):
    x = check_finite(x, name)
    if x <= 0:
        raise DomainError(f"{name} must be positive, got {x}")
    return x


def check_frequency(xi, n):
    """Coerce a frequency to an ``(n,)`` float array and reject ``xi = 0``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float)).ravel()
    if xi.shape != (n,):
        raise DomainError(f"frequency must have {n} components, got {xi.size}")
    if not np.any(xi):
        raise ZeroFrequencyError("symbol is undefined at xi = 0")
    return xi


def check_unit(nu, n, tol=1e-12):
    """Coerce a direction to an ``(n,)`` unit vector (normalising if needed)."""
    nu = check_frequency(nu, n)
    return nu / np.linalg.norm(nu)


def check_interval(xl, xr):
    xl, xr = check_finite(xl, "x_L"), check_finite(xr, "x_R")
    if not xl < xr:
        raise DomainError(f"need x_L < x_R, got ({xl}, {xr})")
    return xl, xr
