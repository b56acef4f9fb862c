"""Gamma-function helpers with explicit pole handling."""

import math

from .errors import DomainError, GammaPoleError

#: Half-width of the band around non-positive integers treated as a pole.
POLE_GUARD = 1e-8


def _nearest_pole(x):
    k = round(x)
    return k if k <= 0 else None


def gamma_fn(x):
    """Return Gamma(x) for real ``x``.

    Raises :class:`GammaPoleError` when ``x`` is within ``POLE_GUARD`` of a
    non-positive integer, instead of returning a huge number.
    """
    x = float(x)
    k = _nearest_pole(x)
    if k is not None and abs(x - k) < POLE_GUARD:
        raise GammaPoleError(f"Gamma has a pole at {k} (x={x!r})")
    return math.gamma(x)


def reflection_product(x):
    """Gamma(x) * Gamma(1 - x) = pi / sin(pi x), for non-integer ``x``."""
    x = float(x)
    if abs(x - round(x)) < POLE_GUARD:
        raise DomainError(f"reflection product undefined at integer x={x!r}")
    return math.pi / math.sin(math.pi * x)


def gamma_ratio(a, b):
    """Gamma(a) / Gamma(b), with 1/Gamma(pole) read as 0."""
    try:
        den = gamma_fn(b)
    except GammaPoleError:
        return 0.0
    return gamma_fn(a) / den


def stable_constant(s):
    r"""Return :math:`\int_0^\infty (1-\cos t)\,t^{-1-2s}\,dt` for s in (0, 1).

    Written as ``pi / (2 sin(pi s) Gamma(1 + 2s))`` so that it is positive and
    continuous through s = 1/2 (where it equals pi/2).
    """
    s = float(s)
    if not 0.0 < s < 1.0:
        raise DomainError(f"order s must lie in (0, 1), got {s!r}")
    return math.pi / (2.0 * math.sin(math.pi * s) * math.gamma(1.0 + 2.0 * s))


def odd_stable_constant(s):
    r"""Signed constant multiplying the odd part of the kernel in the symbol.

    Equals :math:`\int_0^\infty \sin t\, t^{-1-2s}dt` for s < 1/2 and the
    compensated integral :math:`\int_0^\infty (\sin t - t)\,t^{-1-2s}dt` for
    s > 1/2; in both cases ``stable_constant(s) * tan(pi s)``.
    """
    s = float(s)
    if abs(s - 0.5) < 1e-14:
        raise DomainError("odd stable constant is singular at s = 1/2")
    return stable_constant(s) * math.tan(math.pi * s)
