"""Numerical check of the flat integration-by-parts identity on the half-line.

With ``u = x_+^gamma eta`` and ``v = x_+^{gamma*} tau`` the identity reads

    int_0^inf (u' L*v + Lu v') dx = c(L, +1) eta(0) tau(0).

``Lu`` is evaluated as ``eta(0) kappa(gamma) x^{gamma-2s}`` (which vanishes
because gamma is the harmonic exponent) plus the quadrature of ``L`` applied
to ``x_+^gamma (eta - eta(0))``.  This removes the cancellation that would
otherwise be amplified by the ``x^{gamma-1}`` weight near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidKernelError
from .evaluator import (DEFAULT_CONFIG, SmoothFunction1D, _gauss, apply_operator_1d,
                        bump)
from .exponent import gamma_exponent, ibp_constant, kappa_profile
from .kernel import adjoint, check_kernel

#: Left end of the half-line quadrature, relative to the support radius.
START_FRACTION = 1e-8


@dataclass
class IbpReport:
    lhs: float
    rhs: float
    rel_err: float
    gamma: float
    gamma_star: float
    constant: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "rel_err": self.rel_err,
                "gamma": self.gamma, "gamma_star": self.gamma_star, "c": self.constant,
                **self.diagnostics}


def _rel_err(lhs, rhs, floor=1e-14):
    return abs(lhs - rhs) / max(abs(rhs), floor)


def _check_compact(f, name):
    lo, hi = f.support
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"{name} must be compactly supported")
    if f.right_tail is not None or f.left_tail is not None:
        raise DomainError(f"{name} must not carry a power tail")


def profile_parts(eta, beta):
    """Return ``(u, w, eta0)`` with ``u = x_+^beta eta`` and ``w = x_+^beta (eta - eta(0))``.

    ``u'`` is exposed through ``u.derivative``; ``w`` carries the power tail
    ``-eta(0) x^beta`` beyond the support of ``eta``.
    """
    _check_compact(eta, "cutoff")
    eta0 = float(eta.value(0.0))
    d2 = eta.second_derivative

    def xp(y, k=0):
        y = np.asarray(y, dtype=float)
        c = math.prod(beta - j for j in range(k))
        return np.where(y > 0, c * np.abs(y) ** (beta - k), 0.0)

    def u_val(y):
        return xp(y) * eta.value(y)

    def u_der(y):
        return xp(y, 1) * eta.value(y) + xp(y) * eta.derivative(y)

    def w_val(y):
        return xp(y) * (eta.value(y) - eta0)

    def w_der(y):
        return xp(y, 1) * (eta.value(y) - eta0) + xp(y) * eta.derivative(y)

    w_der2 = None
    if d2 is not None:
        def w_der2(y):
            return (xp(y, 2) * (eta.value(y) - eta0) + 2 * xp(y, 1) * eta.derivative(y)
                    + xp(y) * d2(y))

    lo, hi = eta.support
    kinks = tuple(k for k in (lo, hi) if k > 0)
    u = SmoothFunction1D(u_val, u_der, support=(0.0, max(hi, 0.0)), kinks=kinks)
    tail = (-eta0, beta) if eta0 != 0 else None
    w_lo = 0.0 if (eta0 != 0 or lo < 0) else lo
    w = SmoothFunction1D(w_val, w_der, w_der2, support=(w_lo, max(hi, 0.0)), kinks=kinks,
                         right_tail=tail)
    return u, w, eta0


def _halfline_nodes(radius, breakpoints, cfg, n_uniform=48, x_split=0.25):
    """Gauss nodes on ``(x0, radius)``: geometric toward 0, uniform panels beyond."""
    x0 = START_FRACTION * radius
    xs = min(x_split, 0.5 * min(breakpoints)) if breakpoints else x_split
    levels = int(math.ceil(math.log(x0 / xs) / math.log(cfg.grading_ratio)))
    geo = xs * cfg.grading_ratio ** np.arange(levels, -1, -1)
    geo[0] = x0
    pts = sorted(set([xs, radius] + [b for b in breakpoints if xs < b < radius]))
    uni = [np.linspace(p, q, max(2, int(n_uniform * (q - p) / radius) + 1))
           for p, q in zip(pts[:-1], pts[1:])]
    edges = np.unique(np.concatenate([geo] + uni))
    t, w = _gauss(cfg.gauss_order)
    a, b = edges[:-1, None], edges[1:, None]
    h = 0.5 * (b - a)
    return x0, (0.5 * (a + b) + h * t).ravel(), (h * w).ravel()


@dataclass
class _HalflineData:
    x: np.ndarray
    w: np.ndarray
    x0: float
    u: SmoothFunction1D
    v: SmoothFunction1D
    Lu: np.ndarray
    Lsv: np.ndarray
    gamma: float
    gamma_star: float


def _halfline_data(K, eta, tau, cfg):
    if K.dimension != 1:
        raise InvalidKernelError("one-dimensional kernel required")
    check_kernel(K)
    s = K.order
    g = gamma_exponent(K, [1.0])
    gs = 2 * s - g
    Ks = adjoint(K)
    u, wu, eta0 = profile_parts(eta, g)
    v, wv, tau0 = profile_parts(tau, gs)
    radius = max(u.support[1], v.support[1])
    if radius <= 0:
        raise DomainError("cutoffs must not vanish on the half-line")
    bps = [p for p in u.breakpoints() + v.breakpoints() if p > 0]
    x0, x, w = _halfline_nodes(radius, bps, cfg)
    kap = kappa_profile(K, [1.0], g) if eta0 else 0.0
    kap_s = kappa_profile(Ks, [1.0], gs) if tau0 else 0.0
    Lu = np.array([apply_operator_1d(K, wu, xi, cfg, validate=False) for xi in x])
    Lu += eta0 * kap * x ** (g - 2 * s)
    Lsv = np.array([apply_operator_1d(Ks, wv, xi, cfg, validate=False) for xi in x])
    Lsv += tau0 * kap_s * x ** (gs - 2 * s)
    return _HalflineData(x, w, x0, u, v, Lu, Lsv, g, gs)


def verify_flat_ibp(K, eta=None, tau=None, cfg=DEFAULT_CONFIG):
    """Compare ``int_0^inf (u' L*v + Lu v')`` with ``c(L, +1) eta(0) tau(0)``.

    Defaults for ``eta`` and ``tau`` are the bump of radius 4.
    """
    eta = bump(4.0) if eta is None else eta
    tau = bump(4.0) if tau is None else tau
    d = _halfline_data(K, eta, tau, cfg)
    f1 = d.u.derivative(d.x) * d.Lsv
    f2 = d.Lu * d.v.derivative(d.x)
    main = float(np.dot(f1 + f2, d.w))
    # Power-law continuation of the integrand on (0, x0), read off the first node.
    i0 = int(np.argmin(d.x))
    scale1 = f1[i0] * (d.x0 / d.x[i0]) ** (d.gamma - 1)
    scale2 = f2[i0] * (d.x0 / d.x[i0]) ** (d.gamma_star - 1)
    corr = d.x0 * (scale1 / d.gamma + scale2 / d.gamma_star)
    lhs = main + corr
    c = ibp_constant(K, [1.0])
    rhs = c * float(eta.value(0.0)) * float(tau.value(0.0))
    diag = {"nodes": int(d.x.size), "endpoint_correction": corr, "x0": d.x0}
    return IbpReport(lhs, rhs, _rel_err(lhs, rhs), d.gamma, d.gamma_star, c, diag)


def shifted_energy_probe(K, eta=None, tau=None, lambda_shifts=(0.08, 0.04, 0.02, 0.01),
                         cfg=DEFAULT_CONFIG, data=None):
    """Return ``[(lam, E_lam)]`` for ``lam = 0`` and every shift, plus the fitted slope.

    ``E_lam = int_0^inf (u(x+lam) L*v(x) + Lu(x) v(x+lam)) dx``.  The slope at
    ``lam -> 0`` is fitted with the model ``E0 + lam (S + c1 lam^gamma +
    c2 lam^gamma* + c3 lam)``; the fractional powers come from the boundary
    behaviour of ``u`` and ``v``.
    """
    eta = bump(4.0) if eta is None else eta
    tau = bump(4.0) if tau is None else tau
    lams = np.asarray(lambda_shifts, dtype=float)
    if np.any(lams <= 0) or np.any(lams > 0.1):
        raise DomainError("shifts must lie in (0, 0.1]")
    d = _halfline_data(K, eta, tau, cfg) if data is None else data
    out = []
    for lam in np.concatenate([[0.0], lams]):
        e = float(np.dot(d.u.value(d.x + lam) * d.Lsv + d.Lu * d.v.value(d.x + lam), d.w))
        out.append((float(lam), e))
    E0 = out[0][1]
    q = np.array([(e - E0) / lam for lam, e in out[1:]])
    cols = [np.ones_like(lams), lams ** d.gamma]
    if abs(d.gamma_star - d.gamma) > 1e-3:
        cols.append(lams ** d.gamma_star)
    cols.append(lams)
    A = np.column_stack(cols[: len(lams)])
    coef = np.linalg.lstsq(A, q, rcond=None)[0]
    return out, float(coef[0])
