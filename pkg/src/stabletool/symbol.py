"""Fourier symbol ``A(xi) + i B(xi)`` of a stable operator and of its square root."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_frequency
from .kernel import check_kernel, even_odd_split
from .specfun import odd_stable_constant, stable_constant


@dataclass(frozen=True)
class SymbolValue:
    """Real part ``A`` and imaginary part ``B`` of a symbol at ``frequency``."""

    a_part: float
    b_part: float
    frequency: tuple

    @property
    def modulus(self):
        return math.hypot(self.a_part, self.b_part)

    def conj(self):
        return SymbolValue(self.a_part, -self.b_part, self.frequency)

    def __complex__(self):
        return complex(self.a_part, self.b_part)


def _symbol_parts(K, xi):
    Ke, Ko = even_odd_split(K)
    s = K.order
    A = stable_constant(s) * Ke.integrate(lambda th: np.abs(th @ xi) ** (2 * s))
    if s == 0.5:
        def xlogx(th):
            t = th @ xi
            out = np.zeros_like(t)
            nz = t != 0
            out[nz] = t[nz] * np.log(np.abs(t[nz]))
            return out
        B = Ko.integrate(xlogx) + float(K.drift @ xi)
    else:
        B = -odd_stable_constant(s) * Ko.integrate(
            lambda th: np.abs(th @ xi) ** (2 * s - 1) * (th @ xi))
    return A, B


def symbol(K, xi, check=True):
    """Evaluate the symbol of ``L`` at a nonzero frequency ``xi``.

    ``A`` uses the positive constant ``int_0^inf (1 - cos t) t^{-1-2s} dt``.
    For ``s = 1/2`` the odd part enters through ``t log|t|`` (with
    ``0 log 0 = 0``) and the drift adds ``b . xi``.
    """
    if check:
        check_kernel(K)
    xi = check_frequency(xi, K.dimension)
    A, B = _symbol_parts(K, xi)
    return SymbolValue(float(A), float(B), tuple(xi.tolist()))


def adjoint_symbol(K, xi, check=True):
    """Symbol of ``L*``, i.e. the complex conjugate of :func:`symbol`."""
    return symbol(K, xi, check).conj()


def sqrt_pair(A, B):
    """Principal square root of ``A + iB`` (``A > 0``), returned as a pair.

    Written without cancellation: ``A# = sqrt((A + r)/2)``,
    ``B# = B / sqrt(2 (A + r))`` with ``r = |A + iB|``.
    """
    r = math.hypot(A, B)
    a_sharp = math.sqrt((A + r) / 2.0)
    b_sharp = B / (math.sqrt(2.0) * math.sqrt(A + r))
    return a_sharp, b_sharp


def sqrt_symbol(K, xi, check=True):
    """Symbol of ``sqrt(L)`` with the branch ``A# > 0``.

    For ``s = 1/2`` the symbol of ``L`` is not homogeneous (``B`` has a log
    term when the spherical part is odd), so the result is only a pointwise
    square root there.
    """
    sv = symbol(K, xi, check)
    a, b = sqrt_pair(sv.a_part, sv.b_part)
    return SymbolValue(a, b, sv.frequency)


def profile_weights(A, B, s):
    """One-sided weights ``(w_plus, w_minus)`` of the 1D reduction along a direction.

    For a function of ``x . nu`` only, ``L`` acts as the 1D operator with
    kernel ``w_plus r^{-1-2s}`` for ``r > 0`` and ``w_minus |r|^{-1-2s}`` for
    ``r < 0`` (plus a drift ``B`` when ``s = 1/2``).
    """
    cA = stable_constant(s)
    if s == 0.5:
        return A / (2 * cA), A / (2 * cA)
    cot = 1.0 / math.tan(math.pi * s)
    return (A - cot * B) / (2 * cA), (A + cot * B) / (2 * cA)


def ind_margin(K, nu, check=True):
    """``A(nu) - |cot(pi s)| |B(nu)|``: positive iff both profile weights are.

    For ``s = 1/2`` this is just ``A(nu)``.
    """
    sv = symbol(K, nu, check)
    if K.order == 0.5:
        return sv.a_part
    return sv.a_part - abs(1.0 / math.tan(math.pi * K.order)) * abs(sv.b_part)
