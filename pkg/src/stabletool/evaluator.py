"""Pointwise evaluation of one-dimensional stable operators by singular quadrature.

For a 1D kernel with one-sided weights ``w+`` (for y > 0) and ``w-`` (y < 0),

    Lu(x) = int_0^inf D(r) r^{-1-2s} dr  [+ compensation]  [+ b u'(x) if s = 1/2],
    D(r)  = w+ (u(x) - u(x+r)) + w- (u(x) - u(x-r)).

Pairing ``r`` with ``-r`` inside ``D`` realises the principal value at
s = 1/2.  The integral is split into

* a near field ``(0, eps)`` done analytically from a Taylor expansion,
* a middle range ``(eps, R)`` done with Gauss-Legendre on panels graded
  geometrically toward every breakpoint (kinks of ``u``),
* a far field ``(R, inf)`` done analytically for compact support or power
  tails, numerically after ``r = R/t`` otherwise.

The gradient compensation for s > 1/2 and the first-order Taylor term for
s < 1/2 reduce to the same closed form ``-(w+ - w-) u'(x) eps^{1-2s}/(1-2s)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import binom

from ._validation import check_positive
from .errors import DomainError, InvalidKernelError, TailDivergenceError, ToleranceWarning
from .kernel import adjoint, check_kernel, one_sided_weights


@dataclass(frozen=True)
class QuadratureConfig:
    """Parameters of the singular quadrature.

    ``inner_cut`` and ``outer_cut`` are relative radii: the near field ends at
    ``inner_cut * min(1, distance to the nearest kink)`` and the far
    field starts at ``outer_cut * max(1, |x|)``.  ``panels`` caps the number of
    graded panels per segment, ``gauss_order`` is the number of nodes per
    panel and ``grading_ratio`` the geometric ratio of the grading.
    ``graded_exponent`` is used for the algebraic meshes of the half-line
    integrals (see :mod:`stabletool.halfspace`).
    """

    inner_cut: float = 1e-3
    outer_cut: float = 1e3
    panels: int = 2048
    graded_exponent: float = 2.0
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    gauss_order: int = 16
    grading_ratio: float = 0.15
    check_tolerance: bool = False

    def __post_init__(self):
        check_positive(self.inner_cut, "inner_cut")
        check_positive(self.outer_cut, "outer_cut")
        if not self.inner_cut < self.outer_cut:
            raise DomainError("inner_cut must be smaller than outer_cut")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.graded_exponent < 1:
            raise DomainError("graded_exponent must be >= 1")
        if not 0 < self.grading_ratio < 1:
            raise DomainError("grading_ratio must lie in (0, 1)")
        if self.panels < 4 or self.gauss_order < 2:
            raise DomainError("need panels >= 4 and gauss_order >= 2")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class SmoothFunction1D:
    """Vectorised test function with the metadata the quadrature needs.

    ``value`` and ``derivative`` must accept numpy arrays.  Outside
    ``support`` the function vanishes unless a tail ``(c, p)`` is given:
    ``u(y) = c y^p`` beyond the right end, ``u(y) = c |y|^p`` beyond the left.
    ``kinks`` lists points where ``u`` is not smooth; support endpoints are
    added automatically.  ``growth_exponent`` bounds ``|u(y)| <= C(1+|y|^p)``
    when the support is unbounded and no tail is known.
    """

    value: callable
    derivative: callable
    second_derivative: callable = None
    third_derivative: callable = None
    support: tuple = (-math.inf, math.inf)
    kinks: tuple = ()
    right_tail: tuple = None
    left_tail: tuple = None
    growth_exponent: float = 0.0

    @property
    def support_radius(self):
        return max(abs(self.support[0]), abs(self.support[1]))

    @property
    def compact(self):
        return (math.isfinite(self.support_radius)
                and self.right_tail is None and self.left_tail is None)

    def breakpoints(self):
        pts = [k for k in self.kinks if math.isfinite(k)]
        pts += [e for e in self.support if math.isfinite(e)]
        return sorted(set(pts))

    def growth(self):
        p = 0.0
        for tail in (self.right_tail, self.left_tail):
            if tail is not None:
                p = max(p, tail[1])
        if not math.isfinite(self.support_radius) and (
                self.right_tail is None or self.left_tail is None):
            p = max(p, self.growth_exponent)
        return p

    def shifted(self, h):
        """``y -> u(y - h)``."""
        sh = lambda f: None if f is None else (lambda y: f(np.asarray(y) - h))
        if self.right_tail is not None or self.left_tail is not None:
            raise DomainError("shifting a function with a power tail is not supported")
        return SmoothFunction1D(sh(self.value), sh(self.derivative), sh(self.second_derivative),
                                sh(self.third_derivative),
                                (self.support[0] + h, self.support[1] + h),
                                tuple(k + h for k in self.kinks), None, None, self.growth_exponent)

    def scaled(self, lam):
        """``y -> u(lam y)`` for ``lam > 0``."""
        lam = float(lam)
        if self.right_tail is not None or self.left_tail is not None:
            raise DomainError("scaling a function with a power tail is not supported")
        sc = lambda f, k: None if f is None else (lambda y: lam ** k * f(lam * np.asarray(y)))
        return SmoothFunction1D(sc(self.value, 0), sc(self.derivative, 1),
                                sc(self.second_derivative, 2), sc(self.third_derivative, 3),
                                (self.support[0] / lam, self.support[1] / lam),
                                tuple(k / lam for k in self.kinks), None, None, self.growth_exponent)


# --------------------------------------------------------------------------
# stock test functions
# --------------------------------------------------------------------------

def power_profile(beta, coef=1.0):
    """``coef * (x_+)^beta``."""
    beta = float(beta)

    def val(y):
        y = np.asarray(y, dtype=float)
        return coef * np.where(y > 0, np.abs(y) ** beta, 0.0)

    def der(k):
        c = coef * math.prod(beta - j for j in range(k))
        return lambda y: c * np.where(np.asarray(y) > 0, np.abs(np.asarray(y, float)) ** (beta - k), 0.0)

    return SmoothFunction1D(val, der(1), der(2), der(3), support=(0.0, 0.0),
                            right_tail=(coef, beta))


def bump(radius=4.0, center=0.0, height=1.0):
    """C-infinity bump ``exp(1 - 1/(1 - ((y-c)/R)^2))`` on ``(c-R, c+R)``."""
    R = float(radius)

    def _parts(y):
        t = (np.asarray(y, dtype=float) - center) / R
        inside = np.abs(t) < 1
        q = np.where(inside, 1 - t * t, 1.0)
        e = np.where(inside, np.exp(1 - 1 / q), 0.0)
        return t, q, e, inside

    def val(y):
        return height * _parts(y)[2]

    def der(y):
        t, q, e, inside = _parts(y)
        return height * np.where(inside, e * (-2 * t / q ** 2) / R, 0.0)

    def der2(y):
        t, q, e, inside = _parts(y)
        g1 = -2 * t / q ** 2
        g2 = -2 / q ** 2 - 8 * t * t / q ** 3
        return height * np.where(inside, e * (g1 * g1 + g2) / R ** 2, 0.0)

    return SmoothFunction1D(val, der, der2, support=(center - R, center + R))


def gaussian(center=0.0, width=1.0, height=1.0):
    """``height * exp(-((y - c)/w)^2)``, treated as compactly supported."""
    w = float(width)
    cut = 6.5 * w  # exp(-42) is below double precision relative to the peak

    def val(y):
        z = (np.asarray(y, dtype=float) - center) / w
        return height * np.exp(-z * z)

    def der(y):
        z = (np.asarray(y, dtype=float) - center) / w
        return height * (-2 * z / w) * np.exp(-z * z)

    def der2(y):
        z = (np.asarray(y, dtype=float) - center) / w
        return height * (4 * z * z - 2) / w ** 2 * np.exp(-z * z)

    return SmoothFunction1D(val, der, der2, support=(center - cut, center + cut))


def polynomial(coeffs):
    """Polynomial with ``coeffs`` in increasing degree, as an unbounded function."""
    p = np.polynomial.Polynomial(coeffs)
    d1, d2, d3 = p.deriv(1), p.deriv(2), p.deriv(3)
    return SmoothFunction1D(lambda y: p(np.asarray(y, float)), lambda y: d1(np.asarray(y, float)),
                            lambda y: d2(np.asarray(y, float)), lambda y: d3(np.asarray(y, float)),
                            growth_exponent=float(p.degree()))


# --------------------------------------------------------------------------
# graded Gauss-Legendre
# --------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gauss(n):
    return np.polynomial.legendre.leggauss(n)


def _graded_edges(p, q, ratio, levels, grade_left=True, grade_right=True):
    """Panel edges on ``[p, q]`` refined geometrically toward the chosen ends."""
    L = q - p
    if grade_left and grade_right:
        m = 0.5 * (p + q)
        half = 0.5 * L
        left = p + half * ratio ** np.arange(levels, 0, -1)
        right = q - half * ratio ** np.arange(1, levels + 1)
        return np.concatenate([[p], left, [m], right, [q]])
    if grade_left:
        return np.concatenate([[p], p + L * ratio ** np.arange(levels, 0, -1), [q]])
    if grade_right:
        return np.concatenate([[p], q - L * ratio ** np.arange(1, levels + 1), [q]])
    return np.array([p, q])


def _levels(cfg, span_ratio=1e-15):
    n = int(math.ceil(math.log(span_ratio) / math.log(cfg.grading_ratio)))
    return max(1, min(n, cfg.panels // 2 - 1))


def _nodes_on(edges, order):
    t, w = _gauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return (0.5 * (a + b) + half * t).ravel(), (half * w).ravel()


def graded_integral(f, edges, cfg):
    """Gauss-Legendre over panels; optional error estimate from a half-order rule."""
    x, w = _nodes_on(edges, cfg.gauss_order)
    val = float(np.dot(f(x), w))
    err = 0.0
    if cfg.check_tolerance:
        x2, w2 = _nodes_on(edges, max(2, cfg.gauss_order // 2))
        err = abs(val - float(np.dot(f(x2), w2)))
    return val, err


def _segment_edges(points, cfg, grade_first=True):
    """Concatenate graded panel edges over consecutive breakpoints."""
    lev = _levels(cfg)
    edges = []
    for i, (p, q) in enumerate(zip(points[:-1], points[1:])):
        e = _graded_edges(p, q, cfg.grading_ratio, lev, grade_left=(i > 0 or grade_first))
        edges.append(e if not edges else e[1:])
    return np.concatenate(edges)


# --------------------------------------------------------------------------
# operator evaluation
# --------------------------------------------------------------------------

def _tail_power_integral(coef, p, x, R, s):
    """``coef * int_R^inf (r + x)^p r^{-1-2s} dr`` for ``|x| < R`` by a binomial series."""
    z = x / R
    total, k = 0.0, 0
    while k < 200:
        term = binom(p, k) * z ** k / (2 * s + k - p)
        total += term
        if abs(term) < 1e-18 * abs(total) and k > 2:
            break
        k += 1
    return coef * R ** (p - 2 * s) * total


def _power_continuation(g, t1, t2):
    """``int_0^t1 g`` assuming ``g(t) ~ C t^q`` below ``t2``, with ``q`` read off ``g(t1), g(t2)``."""
    g1, g2 = float(g(np.array([t1]))[0]), float(g(np.array([t2]))[0])
    if g1 == 0 or g1 * g2 <= 0:
        return 0.0
    q = math.log(g2 / g1) / math.log(t2 / t1)
    if q <= -1:
        return 0.0
    return g1 * t1 / (q + 1)


def _derivs(u, x, h):
    d1 = float(u.derivative(x))
    if u.second_derivative is not None:
        d2 = float(u.second_derivative(x))
    else:
        d2 = float((u.derivative(x + h) - u.derivative(x - h)) / (2 * h))
    if u.third_derivative is not None:
        d3 = float(u.third_derivative(x))
    elif u.second_derivative is not None:
        d3 = float((u.second_derivative(x + h) - u.second_derivative(x - h)) / (2 * h))
    else:
        d3 = float((u.derivative(x + h) - 2 * u.derivative(x) + u.derivative(x - h)) / h ** 2)
    return d1, d2, d3


def _weights_1d(K):
    if K.dimension != 1:
        raise InvalidKernelError("one-dimensional kernel required")
    wp, wm = one_sided_weights(K)
    drift = float(K.drift[0]) if K.order == 0.5 else 0.0
    return wp, wm, drift


def apply_operator_1d(K, u, x, cfg=DEFAULT_CONFIG, validate=True):
    """Evaluate ``Lu(x)`` for a 1D kernel ``K`` and a :class:`SmoothFunction1D`."""
    if validate:
        check_kernel(K)
    s = K.order
    wp, wm, drift = _weights_1d(K)
    x = float(x)
    if u.growth() >= 2 * s:
        raise TailDivergenceError(f"growth exponent {u.growth()} >= 2s = {2 * s}")

    bps = np.array(u.breakpoints())
    dist = np.abs(bps - x)
    if dist.size and dist.min() == 0:
        raise DomainError(f"u is not smooth at x = {x}")
    scale = max(1.0, abs(x))
    dmin = dist.min() if dist.size else math.inf
    eps = cfg.inner_cut * min(1.0, dmin)

    ux = float(u.value(x))
    d1, d2, d3 = _derivs(u, x, eps)
    wsum, wdiff = wp + wm, wp - wm

    # near field and first-order term
    total = -wsum * d2 / 2 * eps ** (2 - 2 * s) / (2 - 2 * s)
    total -= wdiff * d3 / 6 * eps ** (3 - 2 * s) / (3 - 2 * s)
    if s != 0.5:
        total -= wdiff * d1 * eps ** (1 - 2 * s) / (1 - 2 * s)

    R = max(cfg.outer_cut * scale, 2.0 * (dist.max() if dist.size else 0.0))

    def D(r):
        return r ** (-1 - 2 * s) * (wsum * ux - wp * u.value(x + r) - wm * u.value(x - r))

    pts = np.unique(np.concatenate([[eps], dist[(dist > eps) & (dist < R)], [R]]))
    mid, err = graded_integral(D, _segment_edges(pts, cfg), cfg)
    total += mid

    # far field
    total += wsum * ux * R ** (-2 * s) / (2 * s)
    lo, hi = u.support
    for w, sign, tail, end in ((wp, 1.0, u.right_tail, hi), (wm, -1.0, u.left_tail, lo)):
        if w == 0:
            continue
        if tail is not None:
            total -= w * _tail_power_integral(tail[0], tail[1], sign * x, R, s)
        elif not math.isfinite(end):
            g = lambda t: u.value(x + sign * R / t) * (R / t) ** (-1 - 2 * s) * R / t ** 2
            edges = _graded_edges(0.0, 1.0, cfg.grading_ratio, _levels(cfg, 1e-30), True, False)
            val, e2 = graded_integral(g, edges[1:], cfg)
            total -= w * (val + _power_continuation(g, edges[1], edges[2]))
            err += w * e2
    total += drift * d1

    if cfg.check_tolerance and err > cfg.abs_tol + cfg.rel_tol * abs(total):
        warnings.warn(f"quadrature error estimate {err:.2e} exceeds tolerance at x={x}",
                      ToleranceWarning, stacklevel=2)
    return float(total)


def apply_adjoint_1d(K, u, x, cfg=DEFAULT_CONFIG, validate=True):
    """Evaluate ``L* u(x)``, i.e. :func:`apply_operator_1d` with ``adjoint(K)``."""
    return apply_operator_1d(adjoint(K), u, x, cfg, validate)


def apply_to_power(K, beta, x, cfg=DEFAULT_CONFIG):
    """Numerical ``L[(.)_+^beta](x)`` for ``x > 0``; compare with ``kappa x^{beta-2s}``."""
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if not 0 < beta < 2 * K.order:
        raise DomainError(f"beta must lie in (0, 2s), got {beta}")
    return apply_operator_1d(K, power_profile(beta), x, cfg)


# --------------------------------------------------------------------------
# pairing check
# --------------------------------------------------------------------------

def _x_edges(f, cfg, n_panels=128):
    lo, hi = f.support
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("pairing check needs compactly supported functions")
    pts = sorted(set([lo, hi] + [k for k in f.kinks if lo < k < hi]))
    edges = [np.linspace(p, q, n_panels + 1)[:-1] for p, q in zip(pts[:-1], pts[1:])]
    return np.concatenate(edges + [[hi]])


def pairing_integral(K, f, g, cfg=DEFAULT_CONFIG, adjoint_side=False, n_panels=128):
    """``int (L f) g`` (or ``int (L* f) g``) over the support of ``g``."""
    Kop = adjoint(K) if adjoint_side else K
    check_kernel(Kop)
    edges = _x_edges(g, cfg, n_panels)
    xs, ws = _nodes_on(edges, 8)
    gv = g.value(xs)
    keep = gv != 0
    Lf = np.array([apply_operator_1d(Kop, f, xi, cfg, validate=False) for xi in xs[keep]])
    return float(np.dot(Lf * gv[keep], ws[keep]))


def adjoint_pairing_check(K, eta, tau, cfg=DEFAULT_CONFIG, n_panels=128):
    """Absolute defect ``|int L eta tau - int eta L* tau|`` for compactly supported inputs."""
    lhs = pairing_integral(K, eta, tau, cfg, False, n_panels)
    rhs = pairing_integral(K, tau, eta, cfg, True, n_panels)
    return abs(lhs - rhs)
