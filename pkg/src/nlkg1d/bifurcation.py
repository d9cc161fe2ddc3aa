"""Charge-frequency curve, its critical structure, and level classification.

For the quartic-sextic nonlinearity the charge of the frequency-omega
standing wave has the closed form

    sigma(omega) = omega / (2 sqrt(2 b)) * ln((1 + alpha) / (1 - alpha)),
    alpha = alpha(omega),

equivalently (a/4b) k1(alpha) with k1(alpha) = sqrt(tau - alpha^2) L(alpha),
L(alpha) = ln((1+alpha)/(1-alpha)).  Differentiating in the alpha chart,

    sigma'(omega) = (a/2b) alpha'(omega)
                    / ((1 - alpha^2) sqrt(tau - alpha^2)) * (tau - k2(alpha)),
    k2(alpha) = alpha^2 + (alpha - alpha^3)/2 * L(alpha),

and since alpha' < 0 the sign of sigma' is the sign of k2(alpha) - tau.
The parameter-free constant

    tau_star = sup_{(0,1)} k2  (~ 1.0738, attained near alpha ~ 0.938)

therefore separates three regimes: monotone charge curves (tau > tau_star),
a single saddle frequency omega_s (tau = tau_star), and an S-shaped curve
with a local minimum omega_m and maximum omega_M (1 < tau < tau_star).
In the S-shaped regime every level sigma strictly between
sigma_m = sigma(omega_m) and sigma_M = sigma(omega_M) is attained at three
frequencies, and the reduced energies of the outer two branches differ by
the equal-area functional

    e(omega_3) - e(omega_1) = g1(sigma) - g2(sigma),
    g1 = int_{omega_1}^{omega_2} (sigma - sigma(t)) dt,
    g2 = int_{omega_2}^{omega_3} (sigma(t) - sigma) dt,

which vanishes at exactly one level sigma_2: the unique charge carried by
two distinct positive minimizers.

All root-finding is bracketed bisection on proven-monotone pieces; no
derivative-based iteration is used anywhere.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import profiles
from .errors import DomainViolation, RegimeViolation, ToleranceFailure
from .model import FrequencyWindow, ModelParams

SUPERCRITICAL = "SUPERCRITICAL"
CRITICAL = "CRITICAL"
SUBCRITICAL = "SUBCRITICAL"

# |tau - tau_star| below this counts as the critical regime: exact equality
# is measure-zero in floating point, a documented band is testable.
REGIME_TOL = 1e-9

# Degeneracy of a minimum is decided by |sigma'| against this multiple of
# the natural charge scale a/(2b).
DEGENERACY_RTOL = 1e-8

_MIN_ENERGY_RTOL = 1e-9
_LEVEL_RTOL = 1e-12


def _check_alpha_open(alpha):
    if np.any(np.asarray(alpha) <= 0.0) or np.any(np.asarray(alpha) >= 1.0):
        raise DomainViolation("alpha must lie strictly inside (0, 1)")


def _check_omega_open(p: ModelParams, omega):
    arr = np.asarray(omega)
    if np.any(arr <= p.omega_star) or np.any(arr >= p.m):
        raise DomainViolation(
            f"omega must lie strictly inside (omega_* = {p.omega_star}, m = {p.m})"
        )


def _log_ratio(alpha):
    """ln((1 + alpha)/(1 - alpha)) for alpha strictly inside (0, 1)."""
    return np.log1p(alpha) - np.log1p(-alpha)


def k1(tau: float, alpha):
    """sqrt(tau - alpha^2) * ln((1+alpha)/(1-alpha)); needs tau >= 1."""
    _check_alpha_open(alpha)
    if tau < 1.0:
        raise DomainViolation(f"k1 needs tau >= 1, got {tau}")
    return np.sqrt(tau - np.square(alpha)) * _log_ratio(alpha)


def k2(alpha):
    """alpha^2 + (alpha - alpha^3)/2 * ln((1+alpha)/(1-alpha)) on (0, 1)."""
    _check_alpha_open(alpha)
    a2 = np.square(alpha)
    return a2 + 0.5 * alpha * (1.0 - a2) * _log_ratio(alpha)


def k2_prime(alpha):
    _check_alpha_open(alpha)
    return 3.0 * alpha + 0.5 * (1.0 - 3.0 * np.square(alpha)) * _log_ratio(alpha)


def k2_second(alpha):
    _check_alpha_open(alpha)
    a2 = np.square(alpha)
    return (4.0 - 6.0 * a2) / (1.0 - a2) - 3.0 * alpha * _log_ratio(alpha)


def _bisect(fn, lo: float, hi: float, max_iter: int = 200) -> float:
    """Bisection to floating-point resolution on a sign-changing bracket."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ToleranceFailure(
            f"no sign change on [{lo}, {hi}]: f = ({flo:.3g}, {fhi:.3g})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


@functools.lru_cache(maxsize=1)
def alpha_saddle() -> float:
    """The unique interior zero of k2' on (0, 1)."""
    return _bisect(k2_prime, 0.5, 1.0 - 1e-13)


@functools.lru_cache(maxsize=1)
def tau_star() -> float:
    """Universal threshold sup k2 = k2 at the saddle; exceeds 1."""
    return float(k2(alpha_saddle()))


def regime_of(p: ModelParams) -> str:
    ts = tau_star()
    if abs(p.tau - ts) < REGIME_TOL:
        return CRITICAL
    return SUPERCRITICAL if p.tau > ts else SUBCRITICAL


def sigma(p: ModelParams, omega):
    """Closed-form charge of the frequency-omega standing wave."""
    _check_omega_open(p, omega)
    alpha = p.alpha(omega)
    comp = p.alpha_complement(omega)
    # ln((1+alpha)/(1-alpha)) with 1 - alpha = comp/(1 + alpha)
    log_ratio = 2.0 * np.log1p(alpha) - np.log(comp)
    return omega / (2.0 * math.sqrt(2.0 * p.b)) * log_ratio


def sigma_prime(p: ModelParams, omega):
    """Closed-form derivative of the charge curve.

    alpha' = -2 b omega / (a^2 alpha) < 0, so the sign is that of
    k2(alpha) - tau.
    """
    _check_omega_open(p, omega)
    alpha = p.alpha(omega)
    comp = p.alpha_complement(omega)
    alpha_prime = -2.0 * p.b * omega / (p.a**2 * alpha)
    factor = p.a / (2.0 * p.b) * alpha_prime / (comp * np.sqrt(p.tau - np.square(alpha)))
    return factor * (p.tau - k2(alpha))


@functools.lru_cache(maxsize=None)
def _critical_alphas(tau: float) -> tuple[float, float]:
    """Roots alpha_1 < alpha_2 of k2 = tau, one per monotone side of the saddle."""
    a_s = alpha_saddle()
    a1 = _bisect(lambda t: k2(t) - tau, 1e-12, a_s)
    a2 = _bisect(lambda t: k2(t) - tau, a_s, 1.0 - 1e-13)
    return a1, a2


def _critical_points(p: ModelParams) -> tuple[float, float]:
    """(omega_m, omega_M) for the S-shaped regime.

    The chart reverses order: the larger alpha root maps to the local
    minimum omega_m, the smaller to the local maximum omega_M.
    """
    a1, a2 = _critical_alphas(p.tau)
    return float(p.alpha_inv(a2)), float(p.alpha_inv(a1))


@dataclass(frozen=True)
class BifurcationReport:
    """Regime label and the critical frequencies/levels that exist in it."""

    params: ModelParams
    tau: float
    tau_star: float
    regime: str
    omega_m: float | None = None
    omega_M: float | None = None
    omega_s: float | None = None
    sigma_m: float | None = None
    sigma_M: float | None = None
    sigma_s: float | None = None
    sigma_2: float | None = None

    def to_dict(self) -> dict:
        return {
            "a": self.params.a,
            "b": self.params.b,
            "m": self.params.m,
            "tau": self.tau,
            "tau_star": self.tau_star,
            "regime": self.regime,
            "omega_m": self.omega_m,
            "omega_M": self.omega_M,
            "omega_s": self.omega_s,
            "sigma_m": self.sigma_m,
            "sigma_M": self.sigma_M,
            "sigma_s": self.sigma_s,
            "sigma_2": self.sigma_2,
        }


def critical_omegas(p: ModelParams) -> BifurcationReport:
    """Locate the critical frequencies of the charge curve, per regime."""
    reg = regime_of(p)
    ts = tau_star()
    if reg == SUPERCRITICAL:
        return BifurcationReport(p, p.tau, ts, reg)
    if reg == CRITICAL:
        w_s = float(p.alpha_inv(alpha_saddle()))
        return BifurcationReport(
            p, p.tau, ts, reg, omega_s=w_s, sigma_s=float(sigma(p, w_s))
        )
    w_m, w_M = _critical_points(p)
    return BifurcationReport(
        p,
        p.tau,
        ts,
        reg,
        omega_m=w_m,
        omega_M=w_M,
        sigma_m=float(sigma(p, w_m)),
        sigma_M=float(sigma(p, w_M)),
        sigma_2=sigma2(p),
    )


def branch_inverse(
    p: ModelParams, level: float, window: FrequencyWindow | None = None
) -> list[float]:
    """All frequencies in the window with sigma(omega) = level, ascending.

    Cardinality is 1, 2 or 3 depending on the regime and the level.  Levels
    whose root would fall inside the excluded endpoint margins are refused.
    """
    if not level > 0.0:
        raise DomainViolation(f"charge level must be positive, got {level}")
    win = window if window is not None else p.window()
    s_lo = float(sigma(p, win.omega_lo))
    s_hi = float(sigma(p, win.omega_hi))
    if level > s_lo or level < s_hi:
        raise DomainViolation(
            f"level {level} has its root inside the excluded endpoint margin "
            f"(resolvable range [{s_hi:.6g}, {s_lo:.6g}])"
        )

    def root_between(wa: float, wb: float) -> float:
        return _bisect(lambda t: float(sigma(p, t)) - level, wa, wb)

    if regime_of(p) != SUBCRITICAL:
        # strictly decreasing curve: a single branch
        return [root_between(win.omega_lo, win.omega_hi)]

    w_m, w_M = _critical_points(p)
    s_m, s_M = float(sigma(p, w_m)), float(sigma(p, w_M))
    if abs(level - s_M) <= _LEVEL_RTOL * s_M:
        return [root_between(win.omega_lo, w_m), w_M]
    if abs(level - s_m) <= _LEVEL_RTOL * s_m:
        return [w_m, root_between(w_M, win.omega_hi)]
    if level > s_M:
        return [root_between(win.omega_lo, w_m)]
    if level < s_m:
        return [root_between(w_M, win.omega_hi)]
    return [
        root_between(win.omega_lo, w_m),
        root_between(w_m, w_M),
        root_between(w_M, win.omega_hi),
    ]


def energy_e(p: ModelParams, omega: float, grid: profiles.SpatialGrid | None = None) -> float:
    """Reduced energy e(omega) of the standing-wave branch, by quadrature.

    The derivative identity e' = omega * sigma' is a checked invariant of
    this function, not its computation route.
    """
    prof = profiles.closed_form(p, omega, grid)
    return profiles.energy(prof).direct


def _adaptive_simpson(fn, a: float, b: float, tol: float) -> float:
    """Adaptive Simpson with Richardson end correction."""

    def recurse(x0, x2, f0, f1, f2, whole, tol_, depth):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = fn(lm), fn(rm)
        left = (x1 - x0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (x2 - x1) / 6.0 * (f1 + 4.0 * frm + f2)
        err = (left + right - whole) / 15.0
        if depth >= 48 or abs(err) <= tol_:
            return left + right + err
        return recurse(x0, x1, f0, flm, f1, left, 0.5 * tol_, depth + 1) + recurse(
            x1, x2, f1, frm, f2, right, 0.5 * tol_, depth + 1
        )

    fa, fb = fn(a), fn(b)
    fm = fn(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def g1_g2(p: ModelParams, level: float) -> tuple[float, float]:
    """Equal-area integrals around the middle branch at a 3-root level."""
    if regime_of(p) != SUBCRITICAL:
        raise RegimeViolation("equal-area integrals exist only for 1 < tau < tau_star")
    w_m, w_M = _critical_points(p)
    s_m, s_M = float(sigma(p, w_m)), float(sigma(p, w_M))
    if not (s_m < level < s_M):
        raise DomainViolation(
            f"level {level} outside the three-root band ({s_m:.9g}, {s_M:.9g})"
        )
    w1, w2, w3 = branch_inverse(p, level)
    tol = 1e-13 * max(1.0, level * (w3 - w1))
    g1 = _adaptive_simpson(lambda t: level - float(sigma(p, t)), w1, w2, tol)
    g2 = _adaptive_simpson(lambda t: float(sigma(p, t)) - level, w2, w3, tol)
    return g1, g2


@functools.lru_cache(maxsize=None)
def _sigma2_cached(p: ModelParams) -> float:
    w_m, w_M = _critical_points(p)
    s_m, s_M = float(sigma(p, w_m)), float(sigma(p, w_M))
    lo = s_m * (1.0 + 1e-11)
    hi = s_M * (1.0 - 1e-11)

    def balance(level):
        g1, g2 = g1_g2(p, level)
        return g1 - g2

    flo, fhi = balance(lo), balance(hi)
    if not (flo < 0.0 < fhi):
        raise ToleranceFailure(
            f"equal-area bracket failed: g1-g2 = ({flo:.3g}, {fhi:.3g})"
        )
    while hi - lo > 1e-12 * lo:
        mid = 0.5 * (lo + hi)
        if balance(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sigma2(p: ModelParams) -> float:
    """The unique level in (sigma_m, sigma_M) where g1 = g2.

    At this charge the two outer branches carry equal energy and the level
    admits two distinct positive minimizers.
    """
    if regime_of(p) != SUBCRITICAL:
        raise RegimeViolation("sigma_2 exists only for 1 < tau < tau_star")
    return _sigma2_cached(p)


@dataclass(frozen=True)
class Branch:
    omega: float
    energy: float
    is_minimum: bool
    is_degenerate: bool

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "energy": self.energy,
            "is_minimum": self.is_minimum,
            "is_degenerate": self.is_degenerate,
        }


@dataclass(frozen=True)
class LevelClassification:
    """Critical points of one charge level with minimality and degeneracy.

    Counts refer to positive branches; the sign flip R -> -R silently
    doubles every count over signed profiles.
    """

    sigma: float
    cr_count: int
    k_count: int
    branches: tuple[Branch, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "cr_count": self.cr_count,
            "k_count": self.k_count,
            "branches": [br.to_dict() for br in self.branches],
        }


def classify(p: ModelParams, level: float) -> LevelClassification:
    """Count branches at a level; flag minima and degenerate minima.

    A branch is a minimum iff its energy ties the least branch energy to
    1e-9 relative; it is degenerate iff it is a minimum and |sigma'| falls
    below 1e-8 of the charge scale a/(2b).
    """
    roots = branch_inverse(p, level)
    energies = [energy_e(p, w) for w in roots]
    e_min = min(energies)
    scale = DEGENERACY_RTOL * p.a / (2.0 * p.b)
    branches = []
    for w, e in zip(roots, energies):
        minimal = e <= e_min * (1.0 + _MIN_ENERGY_RTOL)
        degenerate = minimal and abs(float(sigma_prime(p, w))) < scale
        branches.append(Branch(w, e, minimal, degenerate))
    return LevelClassification(
        sigma=level,
        cr_count=len(branches),
        k_count=sum(br.is_minimum for br in branches),
        branches=tuple(branches),
    )
