"""One-dimensional nonlocal Dirichlet problems with zero exterior data.

The operator is discretised by applying it exactly to the piecewise-linear
interpolant on a uniform mesh (extended by zero outside the interval).  For
s >= 1/2 the nearest-neighbour interaction is replaced by a second difference
and the odd part (or drift) by a first difference, which keeps the matrix an
M-matrix.  The matrix of the adjoint kernel is the transpose of the matrix of
the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, toeplitz
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_interval
from .errors import (DomainError, InsufficientResolutionError, InvalidKernelError,
                     SingularMatrixError)
from .evaluator import DEFAULT_CONFIG, SmoothFunction1D, apply_operator_1d
from .exponent import gamma_exponent, ibp_constant
from .kernel import check_kernel, one_sided_weights
from .specfun import gamma_fn
from .symbol import symbol

MIN_CELLS = 16


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh of ``(x_left, x_right)`` with ``n_cells`` cells.

    The unknowns live at the ``n_cells - 1`` interior vertices; the two
    boundary vertices carry the exterior value 0.
    """

    x_left: float
    x_right: float
    n_cells: int

    def __post_init__(self):
        xl, xr = check_interval(self.x_left, self.x_right)
        object.__setattr__(self, "x_left", xl)
        object.__setattr__(self, "x_right", xr)
        if int(self.n_cells) < MIN_CELLS:
            raise DomainError(f"need at least {MIN_CELLS} cells, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def h(self):
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def length(self):
        return self.x_right - self.x_left

    @property
    def nodes(self):
        return self.x_left + self.h * np.arange(1, self.n_cells)

    def distance(self, endpoint):
        x = self.nodes
        return x - self.x_left if endpoint == "left" else self.x_right - x


@dataclass
class GridFunction1D:
    """Nodal values on a :class:`Grid1D`, zero outside the interval."""

    grid: Grid1D
    values: np.ndarray

    def __call__(self, x):
        g = self.grid
        xs = np.concatenate([[g.x_left], g.nodes, [g.x_right]])
        vs = np.concatenate([[0.0], self.values, [0.0]])
        return np.interp(np.asarray(x, dtype=float), xs, vs, left=0.0, right=0.0)


@dataclass
class DirichletProblem:
    kernel: object
    rhs: callable
    grid: Grid1D

    def __post_init__(self):
        check_kernel(self.kernel)
        if self.kernel.dimension != 1:
            raise InvalidKernelError("one-dimensional kernel required")
        fv = np.asarray(self.rhs(self.grid.nodes), dtype=float)
        if not np.all(np.isfinite(fv)):
            raise DomainError("right-hand side must be bounded on the interval")


@dataclass
class Solution1D:
    grid: Grid1D
    values: np.ndarray
    kernel: object
    residual_norm: float = float("nan")
    traces: dict = field(default_factory=dict)
    exponents: dict = field(default_factory=dict)

    @property
    def function(self):
        return GridFunction1D(self.grid, self.values)


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------

def _g2(t, s):
    """Second antiderivative of ``t^{-1-2s}`` on t > 0, with ``G2(0) = 0`` for s < 1/2."""
    t = np.asarray(t, dtype=float)
    pos = t > 0
    tt = np.where(pos, t, 1.0)
    if s == 0.5:
        return np.where(pos, -np.log(tt), 0.0)
    return np.where(pos, tt ** (1 - 2 * s) / ((-2 * s) * (1 - 2 * s)), 0.0)


def _g1(t, s):
    return -1.0 / t if s == 0.5 else t ** (-2 * s) / (-2 * s)


def hat_weights(s, n, exact_near=False):
    """Unit-spacing interaction weights of hat functions at offsets ``1..n``.

    ``wt[m-1] = int |r|^{-1-2s} phi_m(r) dr`` over one side, where ``phi_m`` is
    the hat centred at ``m``.  By default the first weight only covers
    ``[1, 2]`` and the part ``(0, 1)`` is left to the difference terms of
    :func:`assemble_matrix`.  ``exact_near`` (s < 1/2 only) integrates the
    whole hat instead.  Also returns the diagonal weight per unit of ``w+ + w-``.
    """
    m = np.arange(1, n + 1, dtype=float)
    wt = _g2(m + 1, s) - 2 * _g2(m, s) + _g2(m - 1, s)
    if exact_near:
        if s >= 0.5:
            raise DomainError("exact near-field weights need s < 1/2")
        return wt, 1 / (1 - 2 * s) + 1 / (2 * s)
    wt[0] = -_g1(1.0, s) + _g2(2.0, s) - _g2(1.0, s)
    return wt, 1 / (2 * s)


def assemble_matrix(K, grid, cfg=DEFAULT_CONFIG, central=True, exact_near=False):
    """Dense matrix of the discrete operator on the interior nodes.

    Interactions at distance ``>= h`` integrate the kernel exactly against the
    piecewise-linear interpolant.  On ``(0, h)`` the even part becomes a second
    difference and the odd part (or drift at s = 1/2) a first difference,
    central when that keeps the M-matrix property and upwind otherwise.
    ``exact_near`` uses the exact interpolant on ``(0, h)`` as well (s < 1/2);
    its consistency error grows like ``1/(1 - 2s)``.
    ``cfg`` is accepted for interface symmetry; all kernel integrals are exact.
    """
    check_kernel(K)
    if K.dimension != 1:
        raise InvalidKernelError("one-dimensional kernel required")
    s = K.order
    wp, wm = one_sided_weights(K)
    h, n = grid.h, grid.n_cells - 1
    wt, diag = hat_weights(s, n, exact_near)
    wt = wt * h ** (-2 * s)
    diag = diag * h ** (-2 * s) * (wp + wm)
    # Column j < i sees the node on the left (r < 0), weighted by w-.
    A = -toeplitz(np.r_[0.0, wm * wt[: n - 1]], np.r_[0.0, wp * wt[: n - 1]])
    A[np.diag_indices(n)] += diag
    if exact_near:
        return A
    eye = np.eye(n)
    up, down = np.eye(n, k=1), np.eye(n, k=-1)
    d = (wp + wm) * h ** (-2 * s) / (2 * (2 - 2 * s))
    A += d * (2 * eye - up - down)
    c = (wp - wm) * h ** (1 - 2 * s) / (2 * s - 1) if s != 0.5 else float(K.drift[0])
    if c != 0:
        if central and abs(c) / (2 * h) <= d + min(wp, wm) * wt[0]:
            A += c / (2 * h) * (up - down)
        elif c > 0:
            A += c / h * (eye - down)
        else:
            A += -c / h * (eye - up)
    return A


def is_m_matrix(A, tol=0.0):
    off = A - np.diag(np.diag(A))
    return bool(np.all(np.diag(A) > 0) and np.all(off <= tol))


# --------------------------------------------------------------------------
# solving
# --------------------------------------------------------------------------

def _factor(A):
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu = lu_factor(A, check_finite=True)
        except (LinAlgWarning, ValueError) as exc:
            raise SingularMatrixError(str(exc)) from None
    if np.any(np.diag(lu[0]) == 0):
        raise SingularMatrixError("zero pivot in LU factorisation")
    return lu


def _spline_function(grid, values):
    xs = np.concatenate([[grid.x_left], grid.nodes, [grid.x_right]])
    vs = np.concatenate([[0.0], values, [0.0]])
    cs = CubicSpline(xs, vs)
    lo, hi = grid.x_left, grid.x_right

    def wrap(f):
        def g(y):
            y = np.asarray(y, dtype=float)
            return np.where((y > lo) & (y < hi), f(np.clip(y, lo, hi)), 0.0)
        return g

    return SmoothFunction1D(wrap(cs), wrap(cs.derivative(1)), wrap(cs.derivative(2)),
                            wrap(cs.derivative(3)), support=(lo, hi))


def residual_check(sol, rhs, n_points=7, margin=10, cfg=DEFAULT_CONFIG):
    """Max of ``|L[spline(u)] - f|`` at points at least ``margin * h`` inside."""
    g = sol.grid
    lo = g.x_left + max(margin * g.h, 0.25 * g.length)
    hi = g.x_right - max(margin * g.h, 0.25 * g.length)
    xs = np.linspace(lo, hi, n_points) + 0.5 * g.h
    u = _spline_function(g, sol.values)
    res = [apply_operator_1d(sol.kernel, u, x, cfg, validate=False) - float(rhs(x)) for x in xs]
    return float(np.max(np.abs(res)))


def solve_dirichlet(problem, cfg=DEFAULT_CONFIG, check_residual=False):
    """Solve ``Lu = f`` in the interval with ``u = 0`` outside.

    With ``check_residual`` the interpolant is fed back into the pointwise
    evaluator; the result is stored as ``residual_norm`` and should shrink
    like ``h^{min(2s, 1)}``.
    """
    A = assemble_matrix(problem.kernel, problem.grid, cfg)
    lu = _factor(A)
    f = np.asarray(problem.rhs(problem.grid.nodes), dtype=float)
    u = lu_solve(lu, f)
    sol = Solution1D(problem.grid, u, problem.kernel)
    if check_residual:
        sol.residual_norm = residual_check(sol, problem.rhs, cfg=cfg)
    return sol


# --------------------------------------------------------------------------
# boundary analysis
# --------------------------------------------------------------------------

def _window(sol, endpoint, lo_mult, hi_frac, min_nodes=8):
    if endpoint not in ("left", "right"):
        raise DomainError("endpoint must be 'left' or 'right'")
    g = sol.grid
    d = g.distance(endpoint)
    mask = (d >= lo_mult * g.h) & (d <= hi_frac * g.length)
    if mask.sum() < min_nodes:
        raise InsufficientResolutionError(
            f"only {int(mask.sum())} nodes in the fit window at the {endpoint} endpoint")
    return d[mask], sol.values[mask]


def fit_boundary_exponent(sol, endpoint, window=(5.0, 0.05)):
    """Fit ``log u = c + gamma log d + c1 d`` on ``d in [5h, 0.05 |interval|]``.

    The linear term absorbs the first correction to the pure power.  The
    pure log-log slope is returned in the diagnostics as well.
    """
    d, u = _window(sol, endpoint, *window)
    if np.any(u <= 0):
        raise InsufficientResolutionError("solution is not positive in the fit window")
    ld, lu = np.log(d), np.log(u)
    X = np.column_stack([np.ones_like(d), ld, d])
    coef, *_ = np.linalg.lstsq(X, lu, rcond=None)
    slope = float(np.polyfit(ld, lu, 1)[0])
    resid = float(np.sqrt(np.mean((X @ coef - lu) ** 2)))
    diag = {"pure_slope": slope, "linear_correction": float(coef[2]),
            "log_prefactor": float(coef[0]), "rms": resid, "n_nodes": int(d.size)}
    sol.exponents[endpoint] = float(coef[1])
    return float(coef[1]), diag


def boundary_trace(sol, endpoint, gamma, window=(10.0, 0.05)):
    """Limit of ``u / d^gamma`` at an endpoint.

    The quotient is fitted by ``c0 + c1 d + c2 d^2`` on the window and
    ``c0`` is returned.
    """
    d, u = _window(sol, endpoint, *window)
    X = np.column_stack([np.ones_like(d), d, d * d])
    c0 = float(np.linalg.lstsq(X, u / d ** gamma, rcond=None)[0][0])
    sol.traces[endpoint] = c0
    return c0


def holder_quotient(sol, alpha):
    """Discrete ``C^{0,alpha}`` seminorm of ``u`` on the middle half of the interval."""
    g = sol.grid
    x = g.nodes
    mid = (x > g.x_left + 0.25 * g.length) & (x < g.x_right - 0.25 * g.length)
    xm, um = x[mid], sol.values[mid]
    dx = np.abs(xm[:, None] - xm[None, :])
    du = np.abs(um[:, None] - um[None, :])
    off = dx > 0
    return float(np.max(du[off] / dx[off] ** alpha))


def _derivative(func, fprime, x, step):
    if fprime is not None:
        return np.asarray(fprime(x), dtype=float)
    return (np.asarray(func(x + step)) - np.asarray(func(x - step))) / (2 * step)


@dataclass
class PohozaevReport:
    lhs: float
    rhs: float
    rel_err: float
    n_cells: int
    gamma_left: float
    gamma_right: float
    constant: float
    traces: dict

    def as_dict(self):
        return {"N": self.n_cells, "lhs": self.lhs, "rhs": self.rhs, "rel_err": self.rel_err,
                "gamma_left": self.gamma_left, "gamma_right": self.gamma_right,
                "c": self.constant, **{f"trace_{k}": v for k, v in self.traces.items()}}


def verify_pohozaev(K, f, g, interval=(-1.0, 1.0), e=1, n_cells=1024, cfg=DEFAULT_CONFIG,
                    fprime=None, gprime=None):
    """Pohozaev identity on an interval for ``Lu = f``, ``L*v = g``.

    ``lhs = int (d_e u L*v + Lu d_e v) = -e int (u g' + f' v)`` after
    substituting the equations; ``rhs`` uses the boundary traces
    ``u/d^gamma`` and ``v/d^{gamma*}`` at each endpoint, with the exponents
    swapped at the right endpoint where the inward normal is ``-1``.
    """
    if e not in (1, -1):
        raise DomainError("e must be +1 or -1")
    grid = Grid1D(interval[0], interval[1], n_cells)
    A = assemble_matrix(K, grid, cfg)
    lu = _factor(A)
    x = grid.nodes
    fv, gv = np.asarray(f(x), float), np.asarray(g(x), float)
    u = lu_solve(lu, fv)
    v = lu_solve(lu, gv, trans=1)
    step = 1e-6 * grid.length
    fp, gp = _derivative(f, fprime, x, step), _derivative(g, gprime, x, step)
    # u and v vanish at the boundary vertices, so the trapezoid rule is a plain sum.
    lhs = -e * grid.h * float(np.sum(u * gp + v * fp))

    gl = gamma_exponent(K, [1.0])
    gr = 2 * K.order - gl
    su, sv = Solution1D(grid, u, K), Solution1D(grid, v, K)
    tl = boundary_trace(su, "left", gl) * boundary_trace(sv, "left", gr)
    tr = boundary_trace(su, "right", gr) * boundary_trace(sv, "right", gl)
    c = ibp_constant(K, [1.0])
    rhs = e * c * (tl - tr)
    rel = abs(lhs - rhs) / max(abs(rhs), 1e-14)
    traces = {"u_left": su.traces["left"], "v_left": sv.traces["left"],
              "u_right": su.traces["right"], "v_right": sv.traces["right"]}
    return PohozaevReport(lhs, rhs, rel, n_cells, gl, gr, c, traces)


def symmetric_pohozaev_constant(K):
    """``Gamma(1+s)^2 A(1)``, the constant for kernels with ``B = 0``."""
    return gamma_fn(1 + K.order) ** 2 * symbol(K, [1.0]).a_part


# --------------------------------------------------------------------------
# estimator wrappers
# --------------------------------------------------------------------------

class NonlocalDirichletSolver(BaseEstimator):
    """Estimator-style wrapper: ``fit(f)`` solves, ``predict(x)`` interpolates.

    ``f`` may be a callable or an array of values at the interior nodes.
    """

    def __init__(self, kernel=None, interval=(-1.0, 1.0), n_cells=512, central=True):
        self.kernel = kernel
        self.interval = interval
        self.n_cells = n_cells
        self.central = central

    def fit(self, f, y=None):
        if self.kernel is None:
            raise InvalidKernelError("a kernel is required")
        self.grid_ = Grid1D(self.interval[0], self.interval[1], self.n_cells)
        self.matrix_ = assemble_matrix(self.kernel, self.grid_, central=self.central)
        lu = _factor(self.matrix_)
        rhs = f(self.grid_.nodes) if callable(f) else check_array(f, ensure_2d=False)
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.grid_.n_cells - 1,):
            raise DomainError("right-hand side has the wrong number of nodal values")
        self.coef_ = lu_solve(lu, rhs)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return GridFunction1D(self.grid_, self.coef_)(np.asarray(X, dtype=float))

    def solution(self):
        check_is_fitted(self, "coef_")
        return Solution1D(self.grid_, self.coef_, self.kernel)


class BoundaryExponentEstimator(RegressorMixin, BaseEstimator):
    """Fit ``u ~ exp(c) d^gamma exp(c1 d)`` to distance/value pairs."""

    def __init__(self, linear_correction=True):
        self.linear_correction = linear_correction

    def fit(self, X, y):
        d = check_array(X, ensure_2d=False).ravel()
        u = np.asarray(y, dtype=float).ravel()
        if np.any(d <= 0) or np.any(u <= 0):
            raise DomainError("distances and values must be positive")
        cols = [np.ones_like(d), np.log(d)] + ([d] if self.linear_correction else [])
        coef, *_ = np.linalg.lstsq(np.column_stack(cols), np.log(u), rcond=None)
        self.intercept_ = float(coef[0])
        self.gamma_ = float(coef[1])
        self.correction_ = float(coef[2]) if self.linear_correction else 0.0
        return self

    def predict(self, X):
        check_is_fitted(self, "gamma_")
        d = check_array(X, ensure_2d=False).ravel()
        return np.exp(self.intercept_ + self.gamma_ * np.log(d) + self.correction_ * d)
