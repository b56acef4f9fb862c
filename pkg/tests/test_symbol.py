import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabletool import (StableKernel, ZeroFrequencyError, adjoint, adjoint_symbol, kernel_1d,
                        sqrt_symbol, symbol)
from stabletool.errors import DomainError
from stabletool.kernel import SphericalDensity, random_kernel, sphere_rule
from stabletool.specfun import stable_constant
from stabletool.symbol import ind_margin, profile_weights, sqrt_pair


def test_symbol_quarter_example():
    sv = symbol(kernel_1d(1.0, 0.0, 0.25), [1.0])
    assert sv.a_part == pytest.approx(2 * math.sqrt(2 * math.pi), rel=1e-14)
    assert sv.b_part == 0.0


@pytest.mark.parametrize("s", [0.2, 0.35, 0.65, 0.8])
@pytest.mark.parametrize("b", [-0.6, 0.3])
def test_symbol_1d_closed_form(s, b):
    K = kernel_1d(1.3, b, s)
    for xi in (0.7, -2.0):
        sv = symbol(K, [xi])
        A = stable_constant(s) * 2 * 1.3 * abs(xi) ** (2 * s)
        assert sv.a_part == pytest.approx(A, rel=1e-13)
        assert sv.b_part / sv.a_part == pytest.approx(
            -(b / 1.3) * math.tan(math.pi * s) * math.copysign(1, xi), rel=1e-12)


def test_symbol_half_drift():
    sv = symbol(kernel_1d(1.0, 0.7, 0.5), [1.0])
    assert sv.b_part == pytest.approx(0.7)
    assert sv.a_part == pytest.approx(math.pi)


def test_isotropic_2d_density():
    # A = c_A int_{S^1} |cos phi|^{2s} dphi |xi|^{2s}
    s = 0.3
    rule = sphere_rule(2, 400)
    K = StableKernel(2, s, density=SphericalDensity(rule, np.ones(rule.size)))
    xi = np.array([1.2, -0.5])
    ref = (stable_constant(s) * 2 * math.sqrt(math.pi) * math.gamma(s + 0.5)
           / math.gamma(s + 1) * np.linalg.norm(xi) ** (2 * s))
    sv = symbol(K, xi)
    # |cos|^{2s} has cusps, so the equispaced rule converges only algebraically
    assert sv.a_part == pytest.approx(ref, rel=1e-4)
    assert abs(sv.b_part) < 1e-12



def test_symmetric_kernel_has_zero_b():
    assert symbol(kernel_1d(1.0, 0.0, 0.7), [2.5]).b_part == 0.0
    rng = np.random.default_rng(0)
    dirs = rng.normal(size=(3, 3))
    K = StableKernel(3, 0.4, np.vstack([dirs, -dirs]), [1.0, 2.0, 0.5] * 2)
    for _ in range(5):
        assert symbol(K, rng.normal(size=3)).b_part == pytest.approx(0.0, abs=1e-14)


def test_zero_frequency():
    with pytest.raises(ZeroFrequencyError):
        symbol(kernel_1d(1.0, 0.0, 0.3), [0.0])
    with pytest.raises(DomainError):
        symbol(kernel_1d(1.0, 0.0, 0.3), [1.0, 2.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2, 3]),
       st.sampled_from([0.2, 0.45, 0.5, 0.55, 0.9]))
def test_adjoint_symbol_is_conjugate(seed, n, s):
    rng = np.random.default_rng(seed)
    K = random_kernel(rng, n, s, density_size=10 if n == 2 else None)
    xi = rng.normal(size=n)
    a, b = adjoint_symbol(K, xi), symbol(adjoint(K), xi)
    assert a.a_part == pytest.approx(b.a_part, rel=1e-12)
    assert a.b_part == pytest.approx(b.b_part, rel=1e-12, abs=1e-12 * a.modulus)
    assert complex(a) == pytest.approx(complex(symbol(K, xi)).conjugate())


def test_sqrt_pair_exact():
    assert sqrt_pair(3.0, 4.0) == pytest.approx((2.0, 1.0), rel=1e-15)
    assert sqrt_pair(4.0, 0.0) == (2.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-1e3, 1e3))
def test_sqrt_pair_identities(A, B):
    a, b = sqrt_pair(A, B)
    r = math.hypot(A, B)
    assert a > 0
    assert a * a - b * b == pytest.approx(A, abs=1e-12 * r)
    assert 2 * a * b == pytest.approx(B, abs=1e-12 * r)


def test_sqrt_symbol_squares_back():
    K = kernel_1d(1.0, 0.6, 0.7)
    sq, sv = sqrt_symbol(K, [1.5]), symbol(K, [1.5])
    assert complex(sq) ** 2 == pytest.approx(complex(sv), rel=1e-13)


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_profile_weights_recover_1d_kernel(s):
    K = kernel_1d(1.0, 0.4, s)
    sv = symbol(K, [1.0])
    wp, wm = profile_weights(sv.a_part, sv.b_part, s)
    assert (wp, wm) == pytest.approx((1.4, 0.6), rel=1e-13)


def test_ind_margin_positive_on_directions():
    rng = np.random.default_rng(4)
    for s in (0.3, 0.7):
        K = random_kernel(rng, 2, s, n_atoms=2)
        phi = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        assert all(ind_margin(K, [math.cos(p), math.sin(p)]) > 0 for p in phi)
