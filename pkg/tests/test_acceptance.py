"""Acceptance criteria.  Each test prints one PASS/FAIL line.

Tolerances are pinned here; the lines are repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from stabletool import (adjoint, adjoint_pairing_check, apply_operator_1d, apply_to_power,
                        assemble_matrix, gamma_1d_root, gamma_exponent, gamma_fn, gamma_star,
                        halfspace_profile_coeffs, ibp_constant, kappa_1d, kappa_1d_half,
                        kernel_1d, symbol, verify_flat_ibp, verify_pohozaev)
from stabletool.dirichlet import (DirichletProblem, Grid1D, fit_boundary_exponent,
                                  solve_dirichlet, symmetric_pohozaev_constant)
from stabletool.evaluator import bump, gaussian, polynomial
from stabletool.exponent import combined_constant_closed, exponent_bracket
from stabletool.kernel import direction_grid, random_kernel
from stabletool.symbol import ind_margin, sqrt_pair

pytestmark = pytest.mark.acceptance

S_GRID = (0.2, 0.35, 0.5, 0.65, 0.8)
B_GRID = (-0.9, -0.5, 0.0, 0.5, 0.9)

TOL_TRIPLE = 1e-8
TOL_POWER = 1e-4
TOL_ROOT = 1e-8
TOL_IBP = 1e-3
TOL_SYM_RHS = 1e-10
TOL_COMBINED = 1e-9
TOL_SYMBOL = 1e-12
TOL_EXPONENT = 0.02
TOL_POHOZAEV = 5e-2
TOL_DUALITY = 1e-8
TOL_PAIRING = 1e-6

IBP_KERNELS = ((0.25, 0.5), (0.75, 0.5), (0.5, 0.5), (0.6, 0.0))


def _kappa(a, b, s, beta):
    return kappa_1d_half(a, b, beta) if s == 0.5 else kappa_1d(a, b, s, beta)


def test_c1_exponent_triple(report):
    t0 = time.perf_counter()
    worst, in_range, sums = 0.0, True, True
    for s in S_GRID:
        for b in B_GRID:
            K = kernel_1d(1.0, b, s)
            closed, bisect = gamma_1d_root(1.0, b, s)
            via_symbol = gamma_exponent(K, [1.0])
            worst = max(worst, abs(closed - bisect), abs(closed - via_symbol),
                        abs(bisect - via_symbol))
            lo, hi = exponent_bracket(s)
            in_range &= lo < via_symbol < hi and 0 < via_symbol < 2 * s
            sums &= abs(via_symbol + gamma_star(K, [1.0]) - 2 * s) <= 4 * np.finfo(float).eps
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL_TRIPLE and in_range and sums and elapsed < 5.0
    report(1, ok, f"max pairwise diff {worst:.2e} (tol {TOL_TRIPLE:g}), range {in_range}, "
                  f"gamma+gamma*=2s {sums}, {elapsed:.2f}s (< 5s)")
    assert ok


def test_c2_power_profile(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(20):
        s = 0.5 if i % 5 == 0 else float(rng.uniform(0.15, 0.9))
        b = float(rng.uniform(-0.9, 0.9))
        beta = float(rng.uniform(0.05, 0.95)) * 2 * s
        K = kernel_1d(1.0, b, s)
        for x in (0.5, 1.0, 2.0):
            ref = _kappa(1.0, b, s, beta) * x ** (beta - 2 * s)
            got = apply_to_power(K, beta, x)
            worst = max(worst, abs(got - ref) / abs(ref))
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL_POWER and elapsed < 60.0
    report(2, ok, f"20 tuples x 3 points, max rel err {worst:.2e} (tol {TOL_POWER:g}), "
                  f"{elapsed:.2f}s (< 60s)")
    assert ok


def test_c3_kappa_sign_chart(report):
    bad = []
    worst = 0.0
    for s in S_GRID:
        for b in B_GRID:
            lo, hi = exponent_bracket(s)
            lo, hi = lo + 0.01, hi - 0.01
            f = np.vectorize(lambda beta: _kappa(1.0, b, s, beta))
            grid = np.linspace(lo, hi, 4001)
            signs = np.sign(f(grid))
            signs = signs[signs != 0]  # a node sitting on the root is not a change
            changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
            g = gamma_exponent(kernel_1d(1.0, b, s), [1.0])
            root = brentq(f, lo, hi, xtol=1e-15) if changes == 1 else float("nan")
            worst = max(worst, abs(root - g)) if changes == 1 else worst
            if changes != 1 or not abs(root - g) <= TOL_ROOT:
                bad.append((s, b, changes))
    ok = not bad
    report(3, ok, f"25 kernels, one sign change each: {not bad}, "
                  f"max |root - gamma_L| {worst:.2e} (tol {TOL_ROOT:g})")
    assert ok, bad


def test_c4_flat_ibp(report):
    t0 = time.perf_counter()
    errs = {}
    for s, b in IBP_KERNELS:
        errs[(s, b)] = verify_flat_ibp(kernel_1d(1.0, b, s)).rel_err
    K = kernel_1d(1.0, 0.0, 0.6)
    sym = gamma_fn(1.6) ** 2 * symbol(K, [1.0]).a_part
    sym_err = abs(ibp_constant(K, [1.0]) - sym) / sym
    elapsed = time.perf_counter() - t0
    worst = max(errs.values())
    ok = worst <= TOL_IBP and sym_err <= TOL_SYM_RHS and elapsed < 120
    detail = ", ".join(f"{k}: {v:.1e}" for k, v in errs.items())
    report(4, ok, f"rel_err {detail} (tol {TOL_IBP:g}); symmetric rhs diff {sym_err:.1e} "
                  f"(tol {TOL_SYM_RHS:g}); {elapsed:.1f}s (< 120s)")
    assert ok


def _kernels_for_c5():
    """Ten kernels whose harmonic exponents sample the admissible range away from s."""
    out = []
    for s, frac in ((0.2, 0.1), (0.3, 0.85), (0.45, 0.35), (0.55, 0.2), (0.65, 0.9),
                    (0.8, 0.6), (0.9, 0.05)):
        lo, hi = exponent_bracket(s)
        g = lo + frac * (hi - lo)
        b = -math.tan(math.pi * (g - s)) / math.tan(math.pi * s)
        out.append(kernel_1d(1.0, b, s))
    rng = np.random.default_rng(11)
    for s in (0.3, 0.6, 0.75):
        out.append(random_kernel(rng, 2, s, n_atoms=3, density_size=16))
    return out


def test_c5_combined_constant(report):
    worst_at_gamma, worst_closed, n_kernels = 0.0, 0.0, 0
    for K in _kernels_for_c5():
        s = K.order
        nu = [1.0] if K.dimension == 1 else [0.6, 0.8]
        g = gamma_exponent(K, nu)
        assert abs(g - s) > 1e-3
        c = ibp_constant(K, nu)
        cc = halfspace_profile_coeffs(K, g, nu).c_combined
        worst_at_gamma = max(worst_at_gamma, abs(cc - c) / c)
        sv = symbol(K, nu)
        for t in np.linspace(0.02, 0.98, 25) * 2 * s:
            ref = combined_constant_closed(sv.a_part, sv.b_part, s, t)
            got = halfspace_profile_coeffs(K, t, nu).c_combined
            worst_closed = max(worst_closed, abs(got - ref) / max(abs(ref), 1e-300) if
                               abs(ref) > 1e-6 * c else abs(got - ref) / c)
        n_kernels += 1
    ok = worst_at_gamma <= TOL_COMBINED and worst_closed <= TOL_COMBINED and n_kernels == 10
    report(5, ok, f"{n_kernels} kernels, |c_combined - c|/c at gamma_L {worst_at_gamma:.1e}, "
                  f"closed form over gamma grid {worst_closed:.1e} (tol {TOL_COMBINED:g})")
    assert ok


def test_c6_symbol_properties(report):
    rng = np.random.default_rng(3)
    worst, a_pos, ind_ok = 0.0, True, True
    for trial in range(40):
        n = 1 + trial % 2
        s = (0.15, 0.3, 0.5, 0.7, 0.85)[trial % 5]
        K = random_kernel(rng, n, s, n_atoms=3, density_size=12 if n == 2 else None)
        for _ in range(4):
            xi = rng.normal(size=n)
            p, m = symbol(K, xi), symbol(K, -xi)
            scale = p.modulus
            worst = max(worst, abs(p.a_part - m.a_part) / scale,
                        abs(p.b_part + m.b_part) / scale)
            a_pos &= p.a_part > 0
            if s != 0.5:
                t = float(rng.uniform(0.3, 3.0))
                q = symbol(K, t * xi)
                worst = max(worst, abs(q.a_part - t ** (2 * s) * p.a_part) / q.modulus,
                            abs(q.b_part - t ** (2 * s) * p.b_part) / q.modulus)
            a_sh, b_sh = sqrt_pair(p.a_part, p.b_part)
            worst = max(worst, abs(a_sh ** 2 - b_sh ** 2 - p.a_part) / scale,
                        abs(2 * a_sh * b_sh - p.b_part) / scale)
        for nu in direction_grid(n, 64):
            ind_ok &= ind_margin(K, nu) > 0
    ok = worst <= TOL_SYMBOL and a_pos and ind_ok
    report(6, ok, f"40 random kernels, max defect {worst:.1e} (tol {TOL_SYMBOL:g}), "
                  f"A > 0 {a_pos}, IND on 64 directions {ind_ok}")
    assert ok


def test_c7_solver_exponents(report):
    t0 = time.perf_counter()
    K = kernel_1d(1.0, 0.5, 0.75)
    g = gamma_exponent(K, [1.0])
    gs = 1.5 - g
    errs_l, errs_r, sums = [], [], []
    for N in (512, 1024, 2048):
        sol = solve_dirichlet(DirichletProblem(K, lambda x: np.ones_like(x),
                                               Grid1D(-1.0, 1.0, N)))
        gl, _ = fit_boundary_exponent(sol, "left")
        gr, _ = fit_boundary_exponent(sol, "right")
        errs_l.append(abs(gl - g))
        errs_r.append(abs(gr - gs))
        sums.append(abs(gl + gr - 1.5))
    elapsed = time.perf_counter() - t0
    mono = all(np.diff(errs_l) < 0) and all(np.diff(errs_r) < 0)
    ok = mono and errs_l[-1] <= TOL_EXPONENT and errs_r[-1] <= TOL_EXPONENT \
        and sums[-1] <= TOL_EXPONENT and elapsed < 180
    report(7, ok, f"left err {', '.join(f'{e:.4f}' for e in errs_l)}; right err "
                  f"{', '.join(f'{e:.4f}' for e in errs_r)}; sum err {sums[-1]:.4f} "
                  f"(tol {TOL_EXPONENT:g}); {elapsed:.1f}s (< 180s)")
    assert ok


def test_c8_pohozaev(report):
    f = polynomial([1.0, 0.5])
    g = polynomial([1.0])
    rows, ok = [], True
    for s, b in IBP_KERNELS:
        K = kernel_1d(1.0, b, s)
        errs = [verify_pohozaev(K, f.value, g.value, n_cells=N, fprime=f.derivative,
                                gprime=g.derivative).rel_err for N in (512, 1024, 2048)]
        ok &= errs[-1] <= TOL_POHOZAEV and errs[0] > errs[1] > errs[2]
        rows.append(f"{(s, b)}: {errs[-1]:.3f}")
    K = kernel_1d(1.0, 0.0, 0.6)
    const = symmetric_pohozaev_constant(K)
    sym_err = max(abs(ibp_constant(K, [nu]) - const) / const for nu in (1.0, -1.0))
    ok &= sym_err <= TOL_POHOZAEV
    report(8, ok, f"rel_err at N=2048 {'; '.join(rows)} (tol {TOL_POHOZAEV:g}, monotone); "
                  f"symmetric constant diff at both endpoints {sym_err:.1e}")
    assert ok


def test_c9_structural(report):
    rng = np.random.default_rng(5)
    involution = duality = comparison = annihilate = True
    worst_dual, worst_pair, worst_const = 0.0, 0.0, 0.0
    for trial in range(6):
        s = (0.3, 0.5, 0.7)[trial % 3]
        K = random_kernel(rng, 1 + trial % 2, s, n_atoms=3,
                          density_size=8 if trial % 2 else None)
        involution &= adjoint(adjoint(K)) == K
        b = float(rng.uniform(-0.8, 0.8))
        K1 = kernel_1d(1.0, b, s)
        grid = Grid1D(-1.0, 1.0, 96)
        A, As = assemble_matrix(K1, grid), assemble_matrix(adjoint(K1), grid)
        u, v = rng.normal(size=(2, grid.n_cells - 1))
        d = abs(v @ (A @ u) - u @ (As @ v)) / (np.linalg.norm(A) * np.linalg.norm(u)
                                                * np.linalg.norm(v))
        worst_dual = max(worst_dual, d)
        fpos = np.abs(rng.normal(size=grid.n_cells - 1))
        comparison &= bool(np.all(np.linalg.solve(A, fpos) >= 0))
        for x in (-0.7, 0.3, 2.0):
            worst_const = max(worst_const,
                              abs(apply_operator_1d(K1, polynomial([1.0]), x)))
            if s > 0.5:
                worst_const = max(worst_const,
                                  abs(apply_operator_1d(K1, polynomial([0.4, -1.3]), x)))
        worst_pair = max(worst_pair, adjoint_pairing_check(
            K1, gaussian(0.2, 0.7), bump(1.5, center=-0.3)))
    duality = worst_dual <= TOL_DUALITY
    annihilate = worst_const <= 1e-8
    ok = involution and duality and comparison and annihilate and worst_pair <= TOL_PAIRING
    report(9, ok, f"involution {involution}, duality {worst_dual:.1e} (tol {TOL_DUALITY:g}), "
                  f"comparison {comparison}, constants/affine {worst_const:.1e}, "
                  f"pairing defect {worst_pair:.1e} (tol {TOL_PAIRING:g})")
    assert ok
