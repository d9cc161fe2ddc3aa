"""Constrained Hessian of the reduced energy at a profile.

The second variation at a standing-wave branch point, restricted to the
tangent space of the charge constraint, is the quadratic form

    xi(v, eta) = int v'^2 + int (G''(R) + m^2 - omega^2) v^2
                 + eta^2 ||R||^2,

over pairs (v, eta) with  eta ||R||^2 + 2 omega (R, v) = 0, where all
integrals run over the full line.  Degeneracy of a minimum is equivalent
to sigma'(omega) = 0, and the kernel direction is proportional to
(d_omega R, 1); the smallest constrained eigenvalue computed here
cross-checks that criterion numerically.

Discretization: the profile lives on [0, L]; even reflection at the origin
(a Neumann condition) represents the symmetric sector and removes the odd
translation mode R' exactly, and a Dirichlet cut at L stands in for the
exponentially small tail (an O(exp(-sqrt(c) L)) perturbation).  The
Laplacian is the central second difference and the L^2 pairings use
trapezoid weights, so eigenvalues carry an O(h^2) scheme error.

The minimum of xi over the unit sphere of ||(v, eta)||^2 = eta^2 + ||v||^2
intersected with the constraint hyperplane is found by projecting the form
onto the hyperplane and running shift-invert Lanczos, with the shift
certified below the whole spectrum; solves use a banded Cholesky plus a
rank-two Woodbury correction, so the cost stays O(n) per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_solve_banded, cholesky_banded, eigh_tridiagonal
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import ConvergenceFailure
from .model import ModelParams
from .profiles import Profile, SpatialGrid, closed_form

# Relative step (in units of m - omega_*) for d_omega R by centered differences.
_DOMEGA_REL_STEP = 1e-5


@dataclass(frozen=True)
class HessianSystem:
    """Discretized constrained Hessian at a profile.

    Unknowns are the node values v_0 .. v_{n-1} (v_n = 0 at the Dirichlet
    cut) plus the scalar eta.  ``form_diag``/``form_off`` hold the
    tridiagonal matrix A of the v-part of the form (full line, quadrature
    weights folded in); ``mass_diag`` the diagonal of the v-part of the
    norm; ``constraint_v`` the v-part of the tangency functional whose eta
    coefficient is ``mass_scalar`` = ||R||^2.
    """

    profile: Profile
    potential: np.ndarray
    form_diag: np.ndarray
    form_off: np.ndarray
    mass_diag: np.ndarray
    constraint_v: np.ndarray
    mass_scalar: float

    def lplus_matrix(self) -> sp.csr_matrix:
        """The v-block of the form as a sparse symmetric matrix."""
        return sp.diags(
            [self.form_off, self.form_diag, self.form_off], [-1, 0, 1]
        ).tocsr()

    def norm_sq(self, v: np.ndarray, eta: float) -> float:
        v = np.asarray(v, dtype=float)[: self.mass_diag.size]
        return float(self.mass_diag @ v**2 + eta**2)

    def mass_inner(self, v1, eta1: float, v2, eta2: float) -> float:
        v1 = np.asarray(v1, dtype=float)[: self.mass_diag.size]
        v2 = np.asarray(v2, dtype=float)[: self.mass_diag.size]
        return float(self.mass_diag @ (v1 * v2) + eta1 * eta2)

    def constraint_value(self, v: np.ndarray, eta: float) -> float:
        v = np.asarray(v, dtype=float)[: self.constraint_v.size]
        return float(self.constraint_v @ v + self.mass_scalar * eta)


def assemble(prof: Profile) -> HessianSystem:
    """Build the constrained-Hessian system from a profile."""
    p = prof.params
    n = prof.grid.n
    h = prof.grid.spacing
    r = prof.values
    c = p.csq(prof.omega)
    potential = p.g(r, order=2) + c

    weights = np.full(n, h)
    weights[0] = 0.5 * h  # trapezoid at the reflected origin node
    mass_diag = 2.0 * weights

    # stiffness of sum (v_{j+1}-v_j)^2/h with v_n = 0: diag (1,2,...,2)/h
    stiff = np.full(n, 2.0 / h)
    stiff[0] = 1.0 / h
    form_diag = 2.0 * (stiff + weights * potential[:n])
    form_off = 2.0 * np.full(n - 1, -1.0 / h)

    mass_scalar = float(mass_diag @ r[:n] ** 2)
    constraint_v = 2.0 * prof.omega * mass_diag * r[:n]
    return HessianSystem(
        prof, potential, form_diag, form_off, mass_diag, constraint_v, mass_scalar
    )


def xi_value(sys: HessianSystem, v, eta: float) -> float:
    """Evaluate the constrained-Hessian form on an arbitrary pair (v, eta)."""
    v = np.asarray(v, dtype=float)[: sys.form_diag.size]
    quad = sys.form_diag @ v**2 + 2.0 * (sys.form_off @ (v[:-1] * v[1:]))
    return float(quad + sys.mass_scalar * eta**2)


def xi_bilinear(sys: HessianSystem, v1, eta1: float, v2, eta2: float) -> float:
    """Polarized form H[(v1,eta1),(v2,eta2)]; symmetric in its arguments."""
    n = sys.form_diag.size
    v1 = np.asarray(v1, dtype=float)[:n]
    v2 = np.asarray(v2, dtype=float)[:n]
    quad = sys.form_diag @ (v1 * v2) + sys.form_off @ (
        v1[:-1] * v2[1:] + v1[1:] * v2[:-1]
    )
    return float(quad + sys.mass_scalar * eta1 * eta2)


def domega_profile(
    p: ModelParams,
    omega: float,
    grid: SpatialGrid,
    rel_step: float = _DOMEGA_REL_STEP,
) -> np.ndarray:
    """d_omega R by centered differences of two closed-form profiles."""
    step = rel_step * (p.m - p.omega_star)
    hi = closed_form(p, omega + step, grid)
    lo = closed_form(p, omega - step, grid)
    return (hi.values - lo.values) / (2.0 * step)


def _scaled_tridiag(sys: HessianSystem):
    """Form and constraint in coordinates where the norm matrix is the identity."""
    s_v = np.sqrt(sys.mass_diag)
    d = sys.form_diag / sys.mass_diag
    e = sys.form_off / (s_v[:-1] * s_v[1:])
    c_vec = np.concatenate([sys.constraint_v / s_v, [sys.mass_scalar]])
    c_vec /= np.linalg.norm(c_vec)
    return s_v, d, e, c_vec


def constrained_min_mode(sys: HessianSystem):
    """Smallest constrained eigenpair: (eigenvalue, v nodes, eta).

    Raises ConvergenceFailure if the Lanczos iteration stalls.
    """
    n = sys.form_diag.size
    size = n + 1
    s_v, d, e, c = _scaled_tridiag(sys)

    def q_mat(y):
        out = np.empty_like(y)
        out[:n] = d * y[:n]
        out[1:n] += e * y[: n - 1]
        out[: n - 1] += e * y[1:n]
        out[n] = sys.mass_scalar * y[n]
        return out

    # certified lower bound of the full spectrum: the unconstrained minimum
    lam_unc = min(
        float(eigh_tridiagonal(d, e, select="i", select_range=(0, 0), eigvals_only=True)[0]),
        sys.mass_scalar,
    )

    def project(y):
        out = y - c * (c @ y)
        nrm = np.linalg.norm(out)
        return out / nrm

    # feasible upper bound for the constrained minimum, from smooth trials
    y0 = project(np.concatenate([sys.profile.values[:n] * s_v, [1.0]]))
    ub = float(y0 @ q_mat(y0))
    rng = np.random.default_rng(7)
    for _ in range(2):
        yt = project(rng.standard_normal(size))
        ub = min(ub, float(yt @ q_mat(yt)))

    rho = ub + 1.0 + abs(ub)  # pushes the constraint direction above the target
    w_vec = q_mat(c)
    s_val = float(c @ w_vec)

    def h_mat(y):
        cy = c @ y
        wy = w_vec @ y
        return q_mat(y) - c * wy - w_vec * cy + (s_val + rho) * c * cy

    # shift certified strictly below spec(H) >= min(lam_unc, 0)
    shift = min(lam_unc, 0.0) - 0.1 * max(1.0, abs(lam_unc))

    ab = np.zeros((2, size))
    ab[1, :n] = d - shift
    ab[1, n] = sys.mass_scalar - shift
    ab[0, 1:n] = e
    cho = cholesky_banded(ab)

    def t_solve(x):
        return cho_solve_banded((cho, False), x)

    u_mat = np.column_stack([c, w_vec])
    tu = np.column_stack([t_solve(u_mat[:, 0]), t_solve(u_mat[:, 1])])
    c_inv = np.array([[0.0, -1.0], [-1.0, -(s_val + rho)]])
    g2 = c_inv + u_mat.T @ tu

    def op_inv(x):
        t = t_solve(x)
        return t - tu @ np.linalg.solve(g2, u_mat.T @ t)

    h_op = LinearOperator((size, size), matvec=h_mat, dtype=float)
    inv_op = LinearOperator((size, size), matvec=op_inv, dtype=float)
    try:
        vals, vecs = eigsh(h_op, k=1, sigma=shift, which="LM", OPinv=inv_op, v0=y0)
    except ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"constrained eigensolve stalled: {exc}") from exc

    y = vecs[:, 0]
    u = np.empty(size)
    u[:n] = y[:n] / s_v
    u[n] = y[n]
    u /= np.sqrt(sys.norm_sq(u[:n], u[n]))
    if u[n] < 0 or (u[n] == 0 and u[np.argmax(np.abs(u[:n]))] < 0):
        u = -u
    return float(vals[0]), u[:n], float(u[n])


def constrained_min_eig(sys: HessianSystem, omega: float | None = None) -> float:
    """Smallest eigenvalue of the constrained Hessian at the profile.

    ``omega`` defaults to the profile frequency; passing a different value
    is rejected since the constraint is assembled with the profile.
    """
    if omega is not None and omega != sys.profile.omega:
        raise ValueError("omega must match the assembled profile")
    return constrained_min_mode(sys)[0]
