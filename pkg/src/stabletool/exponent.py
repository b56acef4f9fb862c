"""Boundary exponents, the 1D constant kappa and integration-by-parts constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import lagrange
from scipy.optimize import brentq

from ._validation import check_order, check_unit
from .errors import BisectionError, DomainError, InvalidKernelError
from .kernel import check_kernel
from .specfun import gamma_fn, stable_constant
from .symbol import SymbolValue, profile_weights, sqrt_pair, symbol

#: Distance from s below which the profile coefficients are interpolated.
NEAR_S_BAND = 2e-3
_BISECT_EPS = 1e-7


@dataclass(frozen=True)
class ExponentReport:
    gamma: float
    gamma_star: float
    normal: tuple
    symbol_at_normal: SymbolValue
    ibp_constant: float
    order: float
    dimension: int

    def as_dict(self):
        return {
            "nu": list(self.normal),
            "gamma": self.gamma,
            "gamma_star": self.gamma_star,
            "c": self.ibp_constant,
            "A": self.symbol_at_normal.a_part,
            "B": self.symbol_at_normal.b_part,
            "s": self.order,
        }


def _gamma_from_symbol(A, B, s):
    return s + math.atan(B / A) / math.pi


def gamma_exponent(K, nu):
    """Boundary exponent ``s + arctan(B(nu)/A(nu)) / pi`` at inward normal ``nu``."""
    nu = check_unit(nu, K.dimension)
    sv = symbol(K, nu)
    return _gamma_from_symbol(sv.a_part, sv.b_part, K.order)


def gamma_star(K, nu):
    """Exponent of the adjoint, ``2s - gamma``."""
    nu = check_unit(nu, K.dimension)
    sv = symbol(K, nu)
    return K.order - math.atan(sv.b_part / sv.a_part) / math.pi


def ibp_constant_from_symbol(A, B, s):
    g = _gamma_from_symbol(A, B, s)
    return gamma_fn(g + 1) * gamma_fn(2 * s - g + 1) * math.hypot(A, B)


def ibp_constant(K, nu):
    """``Gamma(gamma+1) Gamma(gamma*+1) |A(nu) + i B(nu)|``; invariant under ``L -> L*``."""
    nu = check_unit(nu, K.dimension)
    sv = symbol(K, nu)
    return ibp_constant_from_symbol(sv.a_part, sv.b_part, K.order)


def exponent_report(K, nu):
    nu = check_unit(nu, K.dimension)
    sv = symbol(K, nu)
    s = K.order
    g = _gamma_from_symbol(sv.a_part, sv.b_part, s)
    gs = s - math.atan(sv.b_part / sv.a_part) / math.pi
    c = gamma_fn(g + 1) * gamma_fn(gs + 1) * math.hypot(sv.a_part, sv.b_part)
    return ExponentReport(g, gs, tuple(nu.tolist()), sv, c, s, K.dimension)


# --------------------------------------------------------------------------
# one-dimensional kappa
# --------------------------------------------------------------------------

def _check_ab(a, b):
    a, b = float(a), float(b)
    if not a > 0:
        raise DomainError(f"need a > 0, got {a}")
    return a, b


def _kappa_formula(a, b, s, beta):
    """Entire-in-beta form of kappa; valid wherever Gamma(2s - beta) is finite.

    Equal to the product of Gamma quotients and tangents in the usual
    statement once the reflection formula removes the factors
    ``Gamma(-beta)`` and ``sin(pi beta)``.
    """
    pref = (2.0 / math.pi) * stable_constant(s) * gamma_fn(1 + beta) * gamma_fn(2 * s - beta)
    ang = math.pi * (s - beta)
    return pref * (a * math.sin(ang) - b * math.tan(math.pi * s) * math.cos(ang))


def kappa_1d(a, b_odd, s, beta):
    """Constant ``kappa`` with ``L[(x_+)^beta] = kappa x^{beta-2s}`` for x > 0.

    ``L`` has kernel ``(a + b sign y)/|y|^{1+2s}``, ``s != 1/2`` and
    ``0 < beta < 2s``.  The sign of ``kappa`` is positive below the root
    ``gamma_L`` and negative above it.
    """
    a, b = _check_ab(a, b_odd)
    s = check_order(s)
    beta = float(beta)
    if s == 0.5:
        raise DomainError("use kappa_1d_half for s = 1/2")
    if not 0.0 < beta < 2 * s:
        raise DomainError(f"beta must lie in (0, 2s) = (0, {2 * s}), got {beta}")
    return _kappa_formula(a, b, s, beta)


def kappa_1d_half(a, b, beta):
    """``kappa`` for ``L = a-kernel (weights a on both sides of |y|^{-2}) + b d/dx``.

    The kernel part alone is ``pi a (-Delta)^{1/2}``, which gives
    ``beta (pi a cot(pi beta) + b)``.
    """
    a, b = _check_ab(a, b)
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    return beta * (math.pi * a * math.cos(math.pi * beta) + b * math.sin(math.pi * beta)) \
        / math.sin(math.pi * beta)


def gamma_1d_closed(a, b_odd, s):
    a, b = _check_ab(a, b_odd)
    s = check_order(s)
    if s == 0.5:
        return 0.5 + math.atan(b / (math.pi * a)) / math.pi
    return s - math.atan((b / a) * math.tan(math.pi * s)) / math.pi


def exponent_bracket(s):
    """Open interval ``(0, 2s) n (2s-1, 1)`` containing every boundary exponent."""
    return max(0.0, 2 * s - 1), min(1.0, 2 * s)


def gamma_1d_root(a, b_odd, s):
    """Return ``(gamma_closed, gamma_bisect)`` for the 1D kernel.

    The second value is the sign change of kappa located by Brent's method.
    At ``s = 1/2`` ``b_odd`` is read as the drift coefficient.
    """
    a, b = _check_ab(a, b_odd)
    s = check_order(s)
    if s != 0.5 and not abs(b) < a:
        raise InvalidKernelError(f"need |b| < a, got a={a}, b={b}")
    closed = gamma_1d_closed(a, b, s)
    lo, hi = exponent_bracket(s)
    lo, hi = lo + _BISECT_EPS, hi - _BISECT_EPS
    if s == 0.5:
        f = lambda beta: kappa_1d_half(a, b, beta)
    else:
        f = lambda beta: kappa_1d(a, b, s, beta)
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise BisectionError(f"kappa has no sign change on ({lo}, {hi}): {flo}, {fhi}")
    root = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return closed, float(root)


def one_d_coefficients(K, nu):
    """Reduce ``K`` along ``nu`` to the 1D pair ``(a, b)`` used by :func:`kappa_1d`.

    For ``s = 1/2`` the returned ``b`` is the drift of the reduction.
    """
    nu = check_unit(nu, K.dimension)
    sv = symbol(K, nu)
    if K.order == 0.5:
        return sv.a_part / math.pi, sv.b_part
    wp, wm = profile_weights(sv.a_part, sv.b_part, K.order)
    return (wp + wm) / 2.0, (wp - wm) / 2.0


def kappa_profile(K, nu, beta):
    """``kappa`` for the profile ``(x . nu)_+^beta`` under a general kernel."""
    a, b = one_d_coefficients(K, nu)
    if K.order == 0.5:
        return kappa_1d_half(a, b, beta)
    return kappa_1d(a, b, K.order, beta)


# --------------------------------------------------------------------------
# half-space profile coefficients
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileCoefficients:
    A1: float
    A2: float
    A1_star: float
    A2_star: float
    c1: float
    c2: float
    c_combined: float


def _a_coefficients(a_sharp, b_sharp, s, gamma):
    """``(A1, A2)`` for ``sqrt(L)`` with 1D weights ``a_sharp +- b_sharp`` of order s/2."""
    A1 = _kappa_formula(a_sharp, b_sharp, s / 2.0, gamma)
    A2 = -(a_sharp + b_sharp) * gamma_fn(gamma + 1) * gamma_fn(s - gamma) / gamma_fn(1 + s)
    return A1, A2


def _raw_coeffs(A_sharp, B_sharp, s, gamma):
    half = s / 2.0
    c_half = stable_constant(half)
    a_sh = A_sharp / (2 * c_half)
    b_sh = -B_sharp / (2 * c_half * math.tan(math.pi * half))
    A1, A2 = _a_coefficients(a_sh, b_sh, s, gamma)
    # Adjoint: flip the odd part of sqrt(L) and swap gamma with 2s - gamma.
    A1s, A2s = _a_coefficients(a_sh, -b_sh, s, 2 * s - gamma)
    d = gamma - s
    c1 = math.pi * (-d) / math.tan(math.pi * d)
    c2 = gamma_fn(d + 1) * gamma_fn(1 - d)
    cc = -(c1 * (A1 * A1s + A2 * A2s) + c2 * (A1 * A2s + A2 * A1s))
    return ProfileCoefficients(A1, A2, A1s, A2s, c1, c2, cc)


def halfspace_profile_coeffs(K, gamma, nu=None):
    """Coefficients ``A1, A2`` (and starred versions), ``c1, c2`` and their combination.

    ``c_combined`` equals ``Gamma(g+1) Gamma(2s-g+1) (cos(pi(g-s)) A + sin(pi(g-s)) B)``
    for every ``g``, and the IBP constant at ``g = gamma(L, nu)``.  Near
    ``g = s`` the individual coefficients blow up while the combination stays
    smooth, so it is interpolated from points at distance >= ``NEAR_S_BAND``.
    """
    check_kernel(K)
    nu = np.ones(K.dimension) / math.sqrt(K.dimension) if nu is None else nu
    nu = check_unit(nu, K.dimension)
    s = K.order
    gamma = float(gamma)
    if not 0.0 < gamma < 2 * s:
        raise DomainError(f"gamma must lie in (0, 2s), got {gamma}")
    sv = symbol(K, nu)
    A_sh, B_sh = sqrt_pair(sv.a_part, sv.b_part)
    if abs(gamma - s) >= NEAR_S_BAND:
        return _raw_coeffs(A_sh, B_sh, s, gamma)
    delta = min(2 * NEAR_S_BAND, s / 4.0)
    offsets = np.array([-3, -2, -1, 1, 2, 3]) * delta
    vals = [_raw_coeffs(A_sh, B_sh, s, s + t).c_combined for t in offsets]
    cc = float(lagrange(offsets / delta, vals)((gamma - s) / delta))
    d = gamma - s
    c1 = -1.0 if d == 0 else math.pi * (-d) / math.tan(math.pi * d)
    c2 = gamma_fn(d + 1) * gamma_fn(1 - d)
    nan = float("nan")
    return ProfileCoefficients(nan, nan, nan, nan, c1, c2, cc)


def combined_constant_closed(A, B, s, gamma):
    """Closed form of ``c_combined`` as a function of ``gamma``."""
    d = math.pi * (gamma - s)
    return gamma_fn(gamma + 1) * gamma_fn(2 * s - gamma + 1) * (math.cos(d) * A + math.sin(d) * B)
