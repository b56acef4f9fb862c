"""Stable kernels described by a spectral measure on the unit sphere.

A kernel ``K`` that is positively homogeneous of degree ``-n-2s`` is fully
determined by its restriction to the sphere.  Here that restriction is a
finite measure made of point masses (atoms) plus an optional absolutely
continuous part sampled on a sphere quadrature rule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import roots_jacobi

from ._validation import check_order
from .errors import ConfigError, DegenerateKernelError, InvalidKernelError

CANCELLATION_TOL = 1e-12
DEGENERACY_TOL = 1e-12
_MERGE_TOL = 1e-12


# --------------------------------------------------------------------------
# sphere quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereRule:
    """Quadrature nodes on S^{n-1} closed under the antipodal map."""

    name: str
    param: int
    nodes: np.ndarray
    weights: np.ndarray
    antipode: np.ndarray

    @property
    def size(self):
        return len(self.weights)


def _uniform_angle(m):
    if m < 2 or m % 2:
        raise ValueError("uniform-angle rule needs an even number of nodes")
    phi = 2.0 * np.pi * np.arange(m) / m
    nodes = np.column_stack([np.cos(phi), np.sin(phi)])
    weights = np.full(m, 2.0 * np.pi / m)
    antipode = (np.arange(m) + m // 2) % m
    return nodes, weights, antipode


def _product_gauss(n, p):
    """Product rule on S^{n-1}: Gauss-Jacobi in the first cosine, recursively."""
    if n == 2:
        return _uniform_angle(2 * p)
    t, w = roots_jacobi(p, (n - 3) / 2.0, (n - 3) / 2.0)
    sub_nodes, sub_w, sub_anti = _product_gauss(n - 1, p)
    m = len(sub_w)
    radius = np.sqrt(1.0 - t ** 2)
    nodes = np.concatenate([np.column_stack([np.full(m, ti), ri * sub_nodes])
                            for ti, ri in zip(t, radius)])
    weights = np.concatenate([wi * sub_w for wi in w])
    # Gauss-Jacobi nodes are symmetric: node i pairs with node p-1-i.
    antipode = np.concatenate([(p - 1 - i) * m + sub_anti for i in range(p)])
    return nodes, weights, antipode


def sphere_rule(n, size, name=None):
    """Build a named sphere rule.

    ``n == 1``: the two points of S^0 with unit weights.
    ``n == 2``: ``uniform-angle`` with ``size`` equispaced angles.
    ``n >= 3``: ``product-gauss`` with ``size`` nodes per coordinate.
    """
    if n == 1:
        nodes = np.array([[1.0], [-1.0]])
        return SphereRule("points", 2, nodes, np.ones(2), np.array([1, 0]))
    if n == 2:
        if name not in (None, "uniform-angle"):
            raise ValueError(f"unknown rule {name!r} for n=2")
        return SphereRule("uniform-angle", size, *_uniform_angle(size))
    if name not in (None, "product-gauss"):
        raise ValueError(f"unknown rule {name!r} for n={n}")
    return SphereRule("product-gauss", size, *_product_gauss(n, size))


# --------------------------------------------------------------------------
# kernel value type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalDensity:
    """Density values sampled at the nodes of a sphere rule."""

    rule: SphereRule
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.rule.size,):
            raise InvalidKernelError(
                f"density has {values.size} values, rule has {self.rule.size} nodes")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class StableKernel:
    """Homogeneous kernel of order ``2s`` given by its spectral measure.

    Instances are immutable.  Weights may be signed so that the odd part of a
    kernel can be represented with the same type; use :func:`validate` or
    :func:`check_kernel` to enforce the structural assumptions.
    """

    dimension: int
    order: float
    directions: np.ndarray = field(default=None)
    weights: np.ndarray = field(default=None)
    density: SphericalDensity | None = None
    drift: np.ndarray = field(default=None)

    def __post_init__(self):
        n = int(self.dimension)
        if n < 1:
            raise InvalidKernelError("dimension must be >= 1")
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "order", check_order(self.order))
        dirs = np.zeros((0, n)) if self.directions is None else np.array(self.directions, dtype=float)
        dirs = dirs.reshape(-1, n)
        w = np.zeros(0) if self.weights is None else np.array(self.weights, dtype=float).ravel()
        if len(w) != len(dirs):
            raise InvalidKernelError("atoms: directions and weights differ in length")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(norms == 0):
            raise InvalidKernelError("atom direction must be nonzero")
        dirs = dirs / norms[:, None]
        b = np.zeros(n) if self.drift is None else np.array(self.drift, dtype=float).ravel()
        if b.shape != (n,):
            raise InvalidKernelError(f"drift must have {n} components")
        if self.density is not None and self.density.rule.nodes.shape[1] != n:
            raise InvalidKernelError("density rule lives on a sphere of the wrong dimension")
        for arr in (dirs, w, b):
            arr.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "drift", b)

    @property
    def atoms(self):
        return [(tuple(d), float(w)) for d, w in zip(self.directions, self.weights)]

    def measure(self):
        """All point masses of the spherical measure (atoms + density samples)."""
        if self.density is None:
            return self.directions, self.weights
        rule = self.density.rule
        return (np.vstack([self.directions, rule.nodes]),
                np.concatenate([self.weights, rule.weights * self.density.values]))

    def integrate(self, func):
        """Integrate ``func(theta)`` (vectorised over rows) against the measure."""
        dirs, w = self.measure()
        if len(w) == 0:
            return 0.0
        return float(np.dot(func(dirs), w))

    def same_as(self, other, tol=0.0):
        """Field-by-field comparison (atoms compared as merged measures).

        ``tol`` is added to a round-off allowance relative to the weights, so
        that ``K_e + K_o`` compares equal to ``K``.
        """
        if not isinstance(other, StableKernel):
            return NotImplemented
        if self.dimension != other.dimension or self.order != other.order:
            return False
        scale = max([1.0] + [float(np.max(np.abs(k.weights))) for k in (self, other)
                             if len(k.weights)])
        tol = tol + 1e-13 * scale
        if not np.allclose(self.drift, other.drift, atol=tol, rtol=0):
            return False
        a, b = _merged(self.directions, self.weights), _merged(other.directions, other.weights)
        if len(a[1]) != len(b[1]):
            return False
        if not (np.allclose(a[0], b[0], atol=_MERGE_TOL, rtol=0)
                and np.allclose(a[1], b[1], atol=tol, rtol=0)):
            return False
        if (self.density is None) != (other.density is None):
            return False
        if self.density is not None:
            return np.allclose(self.density.values, other.density.values, atol=tol, rtol=0)
        return True

    __eq__ = same_as
    __hash__ = None


def _merged(dirs, w):
    """Merge coincident directions and sort them lexicographically."""
    out_d, out_w = [], []
    for d, wi in zip(dirs, w):
        for k, e in enumerate(out_d):
            if np.max(np.abs(e - d)) < _MERGE_TOL:
                out_w[k] += wi
                break
        else:
            out_d.append(np.array(d))
            out_w.append(float(wi))
    if not out_d:
        return np.zeros((0, dirs.shape[1])), np.zeros(0)
    order = np.lexsort(np.array(out_d).T[::-1])
    return np.array(out_d)[order], np.array(out_w)[order]


# --------------------------------------------------------------------------
# constructors and transformations
# --------------------------------------------------------------------------

def kernel_1d(a, b_odd, s):
    """One-dimensional kernel ``(a + b sign y) / |y|^{1+2s}``.

    For ``s = 1/2`` the cancellation condition forbids an odd spherical part,
    so ``b_odd`` is stored as the drift of ``a |y|^{-2}`` instead.
    """
    a, b_odd = float(a), float(b_odd)
    s = check_order(s)
    if a <= 0 or not abs(b_odd) < a:
        raise InvalidKernelError(f"need a > 0 and |b| < a, got a={a}, b={b_odd}")
    if s == 0.5:
        return StableKernel(1, s, [[1.0], [-1.0]], [a, a], drift=[b_odd])
    return StableKernel(1, s, [[1.0], [-1.0]], [a + b_odd, a - b_odd])


def even_odd_split(K):
    """Return ``(K_e, K_o)`` with ``K_e(t) = (K(t)+K(-t))/2``, ``K_o = K - K_e``.

    The odd part carries the drift, since both flip sign under the adjoint.
    """
    d, w = K.directions, K.weights
    dirs = np.vstack([d, -d])
    even_d, even_w = _merged(dirs, np.concatenate([w, w]) / 2.0)
    odd_d, odd_w = _merged(dirs, np.concatenate([w, -w]) / 2.0)
    even_dens = odd_dens = None
    if K.density is not None:
        v, anti = K.density.values, K.density.rule.antipode
        even_dens = SphericalDensity(K.density.rule, (v + v[anti]) / 2.0)
        odd_dens = SphericalDensity(K.density.rule, (v - v[anti]) / 2.0)
    n = K.dimension
    Ke = StableKernel(n, K.order, even_d, even_w, even_dens)
    Ko = StableKernel(n, K.order, odd_d, odd_w, odd_dens, drift=K.drift)
    return Ke, Ko


def combine(K1, K2, sign=1.0):
    """Spherical measure ``K1 + sign*K2`` (drifts combined the same way)."""
    if K1.dimension != K2.dimension or K1.order != K2.order:
        raise InvalidKernelError("kernels must share dimension and order")
    d, w = _merged(np.vstack([K1.directions, K2.directions]),
                   np.concatenate([K1.weights, sign * K2.weights]))
    dens = None
    if K1.density is not None or K2.density is not None:
        if K1.density is None or K2.density is None or K1.density.rule is not K2.density.rule:
            raise InvalidKernelError("densities must share one sphere rule")
        dens = SphericalDensity(K1.density.rule, K1.density.values + sign * K2.density.values)
    return StableKernel(K1.dimension, K1.order, d, w, dens, K1.drift + sign * K2.drift)


def adjoint(K):
    """Kernel of the adjoint operator: ``K_e - K_o`` and drift ``-b``."""
    d, w = K.directions, K.weights
    dens = None
    if K.density is not None:
        dens = SphericalDensity(K.density.rule, K.density.values[K.density.rule.antipode])
    # K*(t) = K(-t): reflect every atom.
    return StableKernel(K.dimension, K.order, -d if len(d) else d, w, dens, -K.drift)


# --------------------------------------------------------------------------
# ellipticity and validation
# --------------------------------------------------------------------------

def direction_grid(n, size):
    """Unit directions used to estimate the ellipticity infimum."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        return _uniform_angle(max(2, size + size % 2))[0]
    p = max(2, int(round(size ** (1.0 / (n - 1)))))
    return _product_gauss(n, p)[0]


def ellipticity_constants(K, direction_grid_size=64):
    """Return ``(lambda_est, Lambda_est)``.

    ``Lambda_est`` is the total mass of the spherical measure and
    ``lambda_est`` the minimum of ``int |nu.theta|^{2s} K`` over a direction
    grid.  Raises :class:`DegenerateKernelError` when ``lambda_est <= 1e-12``.
    """
    dirs, w = K.measure()
    Lam = float(np.sum(w))
    if len(w) == 0:
        raise DegenerateKernelError("empty spherical measure")
    nus = direction_grid(K.dimension, direction_grid_size)
    moments = (np.abs(nus @ dirs.T) ** (2 * K.order)) @ w
    lam = float(np.min(moments))
    if lam <= DEGENERACY_TOL:
        raise DegenerateKernelError(
            f"ellipticity infimum {lam:.3g} <= {DEGENERACY_TOL}: measure lies on a hyperplane")
    return lam, Lam


@dataclass
class ValidationReport:
    nonnegative: bool
    cancellation: bool
    elliptic: bool
    drift_bounded: bool
    lambda_est: float = float("nan")
    Lambda_est: float = float("nan")
    first_moment: tuple = ()
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        return self.nonnegative and self.cancellation and self.elliptic and self.drift_bounded

    def as_dict(self):
        return {
            "ok": self.ok,
            "nonnegative": self.nonnegative,
            "cancellation": self.cancellation,
            "elliptic": self.elliptic,
            "drift_bounded": self.drift_bounded,
            "lambda": self.lambda_est,
            "Lambda": self.Lambda_est,
            "first_moment": list(self.first_moment),
            "messages": list(self.messages),
        }


def validate(K, direction_grid_size=64):
    """Check nonnegativity, the s = 1/2 cancellation, ellipticity and ``|b| <= Lambda``."""
    msgs = []
    dirs, w = K.measure()
    nonneg = bool(np.all(w >= 0))
    if not nonneg:
        msgs.append("negative weight or density value")
    moment = dirs.T @ w if len(w) else np.zeros(K.dimension)
    cancel = True
    if K.order == 0.5:
        cancel = bool(np.all(np.abs(moment) <= CANCELLATION_TOL))
        if not cancel:
            msgs.append(f"first moment {moment.tolist()} does not vanish at s = 1/2")
    elif np.any(K.drift != 0):
        msgs.append("drift is ignored unless s = 1/2")
    try:
        lam, Lam = ellipticity_constants(K, direction_grid_size)
        elliptic = True
    except DegenerateKernelError as exc:
        lam, Lam, elliptic = 0.0, float(np.sum(w)), False
        msgs.append(str(exc))
    drift_ok = True
    if K.order == 0.5:
        drift_ok = bool(np.linalg.norm(K.drift) <= Lam)
        if not drift_ok:
            msgs.append("|b| exceeds Lambda")
    return ValidationReport(nonneg, cancel, elliptic, drift_ok, lam, Lam,
                            tuple(float(m) for m in moment), msgs)


def check_kernel(K):
    """Raise :class:`InvalidKernelError` unless the hard assumptions hold.

    The drift bound ``|b| <= Lambda`` is a normalisation, so it is reported by
    :func:`validate` but not enforced here.
    """
    rep = validate(K)
    if not rep.elliptic:
        raise DegenerateKernelError("; ".join(rep.messages))
    if not (rep.nonnegative and rep.cancellation):
        raise InvalidKernelError("; ".join(rep.messages))
    return K


def one_sided_weights(K):
    """Return ``(w_plus, w_minus)`` of a one-dimensional kernel."""
    if K.dimension != 1:
        raise InvalidKernelError("one-dimensional kernel required")
    dirs, w = K.measure()
    x = dirs[:, 0]
    return float(np.sum(w[x > 0])), float(np.sum(w[x < 0]))


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def kernel_to_dict(K):
    out = {
        "dimension": K.dimension,
        "order": K.order,
        "atoms": [{"direction": list(map(float, d)), "weight": float(w)}
                  for d, w in zip(K.directions, K.weights)],
    }
    if K.density is not None:
        rule = K.density.rule
        out["density"] = {"rule": rule.name, "size": rule.param,
                          "values": K.density.values.tolist()}
    if np.any(K.drift != 0):
        out["drift"] = K.drift.tolist()
    return out


def kernel_from_dict(data):
    """Build a kernel from the JSON schema; errors carry the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("kernel config must be a JSON object")
    try:
        n = int(data["dimension"])
        s = float(data["order"])
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad dimension/order: {exc}") from None
    dirs, weights = [], []
    for i, atom in enumerate(data.get("atoms", [])):
        try:
            d = np.asarray(atom["direction"], dtype=float).ravel()
            w = float(atom["weight"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"atoms[{i}]: {exc}") from None
        if d.shape != (n,):
            raise ConfigError(f"atoms[{i}].direction: expected {n} components")
        nrm = np.linalg.norm(d)
        if not nrm > 0:
            raise ConfigError(f"atoms[{i}].direction: zero vector")
        dirs.append(d / nrm)
        weights.append(w)
    dens = None
    if data.get("density") is not None:
        spec = data["density"]
        try:
            rule = sphere_rule(n, int(spec["size"]), spec.get("rule"))
            dens = SphericalDensity(rule, spec["values"])
        except (KeyError, TypeError, ValueError, InvalidKernelError) as exc:
            raise ConfigError(f"density: {exc}") from None
    drift = data.get("drift")
    try:
        return StableKernel(n, s, np.array(dirs).reshape(-1, n), weights, dens, drift)
    except InvalidKernelError as exc:
        raise ConfigError(str(exc)) from None


def load_kernel(path):
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return kernel_from_dict(data)


def save_kernel(K, path):
    Path(path).write_text(json.dumps(kernel_to_dict(K), indent=2))


def random_kernel(rng, n, s, n_atoms=4, density_size=None):
    """Random valid kernel (atoms along random directions plus antipodes).

    Used by property tests.  For ``s = 1/2`` the measure is made even so that
    the cancellation condition holds.
    """
    dirs = rng.normal(size=(n_atoms, n))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    w_plus = rng.uniform(0.2, 2.0, n_atoms)
    w_minus = rng.uniform(0.2, 2.0, n_atoms)
    if s == 0.5:
        w_minus = w_plus
    d = np.vstack([dirs, -dirs])
    w = np.concatenate([w_plus, w_minus])
    dens = None
    if density_size and n == 2:
        rule = sphere_rule(2, density_size)
        phi = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
        vals = 1.0 + 0.5 * np.cos(phi - rng.uniform(0, 2 * math.pi))
        if s == 0.5:
            vals = (vals + vals[rule.antipode]) / 2.0
        dens = SphericalDensity(rule, vals)
    drift = rng.uniform(-0.5, 0.5, n) if s == 0.5 else None
    return StableKernel(n, s, d, w, dens, drift)
