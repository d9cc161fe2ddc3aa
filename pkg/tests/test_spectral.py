import math

import numpy as np
import pytest
from scipy.linalg import eigh

from nlkg1d import (
    branch_inverse,
    closed_form,
    critical_omegas,
    default_grid,
    sigma2,
    sigma_prime,
)
from nlkg1d.profiles import SpatialGrid
from nlkg1d.spectral import (
    assemble,
    constrained_min_eig,
    constrained_min_mode,
    domega_profile,
    xi_bilinear,
    xi_value,
)


def dense_constrained_min(sys):
    """Reference eigenvalue by dense projection; O(n^3), small grids only."""
    n = sys.form_diag.size
    a = np.diag(sys.form_diag) + np.diag(sys.form_off, 1) + np.diag(sys.form_off, -1)
    q = np.zeros((n + 1, n + 1))
    q[:n, :n] = a
    q[n, n] = sys.mass_scalar
    s = np.sqrt(np.concatenate([sys.mass_diag, [1.0]]))
    qt = q / s[:, None] / s[None, :]
    c = np.concatenate([sys.constraint_v / s[:n], [sys.mass_scalar]])
    c /= np.linalg.norm(c)
    proj = np.eye(n + 1) - np.outer(c, c)
    h = proj @ qt @ proj
    rng = np.random.default_rng(0)
    y = rng.normal(size=n + 1)
    y -= c * (c @ y)
    y /= np.linalg.norm(y)
    ub = y @ qt @ y
    h += (ub + 1 + abs(ub)) * np.outer(c, c)
    return eigh(h, eigvals_only=True, subset_by_index=[0, 0])[0]


class TestAssemble:
    def test_potential_reaches_free_value_in_tail(self, tau8):
        sys = assemble(closed_form(tau8, 1.9))
        c = tau8.csq(1.9)
        assert sys.potential[-1] == pytest.approx(c, abs=1e-12 * c)

    def test_matrix_symmetric(self, tau8):
        mat = assemble(closed_form(tau8, 1.9, default_grid(tau8, 1.9, 256))).lplus_matrix()
        assert (mat != mat.T).nnz == 0

    def test_translation_mode_annihilated_in_odd_sector(self, tau8):
        # the odd extension (Dirichlet at 0) applied to R' is the zero mode;
        # the second-difference residual must vanish at O(h^2)
        prof = closed_form(tau8, 1.9, default_grid(tau8, 1.9, 2048))
        sys = assemble(prof)
        h = prof.grid.spacing
        rp = prof.derivative
        res = (-rp[:-2] + 2.0 * rp[1:-1] - rp[2:]) / h**2 + sys.potential[1:-1] * rp[1:-1]
        scale = np.max(np.abs(sys.potential[1:-1] * rp[1:-1]))
        assert np.max(np.abs(res)) < 20.0 * h**2 * scale

    def test_mass_scalar_is_line_norm(self, tau8):
        prof = closed_form(tau8, 1.9)
        sys = assemble(prof)
        from scipy.integrate import simpson

        ref = 2.0 * simpson(prof.values**2, x=prof.grid.x())
        assert sys.mass_scalar == pytest.approx(ref, rel=1e-6)


class TestConstrainedMinimum:
    def test_agrees_with_dense_reference(self, tau8):
        sys = assemble(closed_form(tau8, 1.9, default_grid(tau8, 1.9, 512)))
        sparse_val = constrained_min_eig(sys)
        dense_val = dense_constrained_min(sys)
        assert sparse_val == pytest.approx(dense_val, abs=1e-10)

    def test_positive_on_decreasing_branch(self, tau8):
        for w in (1.88, 1.92, 1.97):
            sys = assemble(closed_form(tau8, w, default_grid(tau8, w, 1024)))
            assert constrained_min_eig(sys) > 1e-6 * tau8.csq(w)

    def test_minimizer_is_feasible_unit_vector(self, tau8):
        sys = assemble(closed_form(tau8, 1.9, default_grid(tau8, 1.9, 512)))
        eig, v, eta = constrained_min_mode(sys)
        assert sys.norm_sq(v, eta) == pytest.approx(1.0, abs=1e-10)
        assert abs(sys.constraint_value(v, eta)) < 1e-8 * sys.mass_scalar
        assert xi_value(sys, v, eta) == pytest.approx(eig, abs=1e-8 * max(1, abs(eig)))

    def test_sign_agreement_with_charge_slope(self, tau105):
        # min eig > 0 exactly where sigma' < 0; the middle branch carries a
        # negative direction
        win = tau105.window()
        for w in np.linspace(win.omega_lo + 0.02, win.omega_hi - 0.02, 7):
            sys = assemble(closed_form(tau105, w, default_grid(tau105, w, 768)))
            eig = constrained_min_eig(sys)
            slope = float(sigma_prime(tau105, w))
            if abs(eig) > 1e-3:  # away from the crossings
                assert (eig > 0) == (slope < 0)

    def test_psd_floor_at_minima(self, tau105):
        floor = -1e-6
        for w in branch_inverse(tau105, sigma2(tau105))[::2]:
            sys = assemble(closed_form(tau105, w, default_grid(tau105, w, 1024)))
            assert constrained_min_eig(sys) > floor * tau105.csq(w)

    def test_omega_must_match_profile(self, tau8):
        sys = assemble(closed_form(tau8, 1.9, default_grid(tau8, 1.9, 256)))
        with pytest.raises(ValueError):
            constrained_min_eig(sys, omega=1.8)


class TestDegeneracy:
    def test_eigenvalue_collapses_at_the_saddle(self, critical_triple):
        rep = critical_omegas(critical_triple)
        mags = []
        for n in (1024, 2048):
            grid = default_grid(critical_triple, rep.omega_s, n)
            sys = assemble(closed_form(critical_triple, rep.omega_s, grid))
            mags.append(abs(constrained_min_eig(sys)))
        assert mags[1] < mags[0]  # refinement drives it toward zero
        width = critical_triple.m - critical_triple.omega_star
        for dw in (-0.05 * width, 0.05 * width):
            w = rep.omega_s + dw
            sys = assemble(closed_form(critical_triple, w, default_grid(critical_triple, w, 2048)))
            assert abs(constrained_min_eig(sys)) > 10.0 * mags[1]

    def test_kernel_candidate_flattens_the_form(self, critical_triple, tau8):
        # xi(d_omega R, 1) tracks sigma'(omega): order 0.1+ away from the
        # saddle, near zero at it
        rep = critical_omegas(critical_triple)
        grid = default_grid(critical_triple, rep.omega_s, 2048)
        sys = assemble(closed_form(critical_triple, rep.omega_s, grid))
        dr = domega_profile(critical_triple, rep.omega_s, grid)
        assert abs(xi_value(sys, dr, 1.0)) < 1e-3

        grid8 = default_grid(tau8, 1.9, 2048)
        sys8 = assemble(closed_form(tau8, 1.9, grid8))
        dr8 = domega_profile(tau8, 1.9, grid8)
        slope = float(sigma_prime(tau8, 1.9))
        assert xi_value(sys8, dr8, 1.0) == pytest.approx(slope, rel=1e-4)


class TestFormAlgebra:
    def test_bilinear_symmetry_and_consistency(self, tau8):
        sys = assemble(closed_form(tau8, 1.9, default_grid(tau8, 1.9, 256)))
        rng = np.random.default_rng(41)
        n = sys.form_diag.size
        for _ in range(5):
            v1, v2 = rng.standard_normal((2, n))
            e1, e2 = rng.standard_normal(2)
            ab = xi_bilinear(sys, v1, e1, v2, e2)
            ba = xi_bilinear(sys, v2, e2, v1, e1)
            assert ab == pytest.approx(ba, rel=1e-12)
            # polarization identity against the quadratic form
            quad = 0.25 * (
                xi_value(sys, v1 + v2, e1 + e2) - xi_value(sys, v1 - v2, e1 - e2)
            )
            assert ab == pytest.approx(quad, rel=1e-9)
