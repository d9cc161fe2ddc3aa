"""Model parameters and pointwise scalar maps of the quartic-sextic field.

The nonlinearity is G(s) = -a s^4 + b s^6 with a, b > 0, together with a
mass m > 0.  The whole standing-wave structure is governed by the single
dimensionless combination

    tau = 2 m^2 b / a^2.

Positivity of W(s)/s^2 = m^2/2 - a s^2 + b s^4 (the coercivity condition
every other module relies on) holds exactly when tau > 1, so that regime is
enforced at construction.  The one caller that deliberately works outside
it (the non-coercivity demonstration in the CLI) constructs with
``relaxed=True``.

Frequencies of standing waves live in (omega_*, m) where
omega_* = sqrt(m^2 - a^2/(2 b)).  The decreasing bijection

    alpha(omega) = sqrt(2 b (m^2 - omega^2)) / a     in (0, 1)

is the variable in which the charge curve and its critical points become
algebraic; its inverse is omega = a/sqrt(2 b) * sqrt(tau - alpha^2).

All values are immutable after construction and every method is pure, so
instances can be shared freely across threads.  Methods accept scalars or
numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainViolation, NonPositiveCoefficient, RegimeViolation

# Interval slack for closed-interval domain checks, relative to m.
_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class FrequencyWindow:
    """Admissible frequency interval, strictly inside (omega_*, m)."""

    omega_lo: float
    omega_hi: float

    def __post_init__(self):
        if not (self.omega_lo < self.omega_hi):
            raise DomainViolation(
                f"empty frequency window [{self.omega_lo}, {self.omega_hi}]"
            )

    def contains(self, omega) -> bool:
        return bool(np.all((self.omega_lo <= omega) & (omega <= self.omega_hi)))

    def linspace(self, count: int) -> np.ndarray:
        return np.linspace(self.omega_lo, self.omega_hi, count)


@dataclass(frozen=True)
class ModelParams:
    """Validated coefficient triple (a, b, m) of the field model.

    Raises NonPositiveCoefficient unless a, b, m are finite and positive,
    and RegimeViolation unless tau > 1.  ``relaxed=True`` skips only the
    regime check; quantities that need tau > 1 (omega_star, windows) then
    refuse to evaluate.
    """

    a: float
    b: float
    m: float
    relaxed: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("a", "b", "m"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val)):
                raise NonPositiveCoefficient(f"{name} = {val!r} is not a finite number")
            if val <= 0:
                raise NonPositiveCoefficient(f"{name} = {val} must be positive")
        if not self.relaxed and self.tau <= 1:
            raise RegimeViolation(
                f"tau = 2 m^2 b / a^2 = {self.tau} <= 1; "
                "no positive coercivity constant exists for these coefficients"
            )

    # -- derived constants -------------------------------------------------

    @property
    def tau(self) -> float:
        return 2.0 * self.m**2 * self.b / self.a**2

    @property
    def mu(self) -> float:
        """inf of W(s)/s^2 over s > 0, in closed form: (a^2/4b)(tau - 1)."""
        return self.a**2 / (4.0 * self.b) * (self.tau - 1.0)

    @property
    def s_star(self) -> float:
        """Location sqrt(a/2b) of the maximum of the effective potential."""
        return math.sqrt(self.a / (2.0 * self.b))

    @property
    def omega_star(self) -> float:
        """Lower frequency endpoint sqrt(m^2 - a^2/2b); needs tau > 1."""
        gap = self.m**2 - self.a**2 / (2.0 * self.b)
        if gap <= 0:
            raise RegimeViolation(
                f"omega_star undefined: m^2 - a^2/2b = {gap} <= 0 (tau = {self.tau})"
            )
        return math.sqrt(gap)

    # -- pointwise maps ----------------------------------------------------

    def g(self, s, order: int = 0):
        """G(s) = -a s^4 + b s^6, or its first/second derivative."""
        s = np.asarray(s, dtype=float) if not np.isscalar(s) else s
        if order == 0:
            return -self.a * s**4 + self.b * s**6
        if order == 1:
            return -4.0 * self.a * s**3 + 6.0 * self.b * s**5
        if order == 2:
            return -12.0 * self.a * s**2 + 30.0 * self.b * s**4
        raise ValueError(f"order must be 0, 1 or 2, got {order}")

    def w(self, s):
        """Energy density W(s) = m^2 s^2 / 2 + G(s)."""
        return 0.5 * self.m**2 * np.square(s) + self.g(s)

    def potential(self, s):
        """V(s) = -2 G(s)/s^2 = 2 a s^2 - 2 b s^4 (polynomial form, fine at 0)."""
        s2 = np.square(s)
        return 2.0 * self.a * s2 - 2.0 * self.b * s2**2

    # -- the frequency chart ------------------------------------------------

    def _check_omega(self, omega):
        slack = _EDGE_SLACK * self.m
        if np.any(omega < self.omega_star - slack) or np.any(omega > self.m + slack):
            raise DomainViolation(
                f"omega outside [omega_* = {self.omega_star}, m = {self.m}]"
            )

    def csq(self, omega):
        """m^2 - omega^2, evaluated as (m - omega)(m + omega) for accuracy."""
        return (self.m - omega) * (self.m + omega)

    def alpha(self, omega):
        """Decreasing bijection [omega_*, m] -> [1, 0]."""
        self._check_omega(omega)
        val = np.sqrt(np.maximum(2.0 * self.b * self.csq(omega), 0.0)) / self.a
        return np.minimum(val, 1.0)

    def alpha_complement(self, omega):
        """1 - alpha(omega)^2 without cancellation near omega_*."""
        self._check_omega(omega)
        comp = (self.a**2 - 2.0 * self.b * self.csq(omega)) / self.a**2
        return np.maximum(comp, 0.0)

    def alpha_inv(self, alpha):
        """Inverse chart: omega = a/sqrt(2b) * sqrt(tau - alpha^2)."""
        if np.any(alpha < -_EDGE_SLACK) or np.any(alpha > 1.0 + _EDGE_SLACK):
            raise DomainViolation("alpha outside [0, 1]")
        return self.a / math.sqrt(2.0 * self.b) * np.sqrt(self.tau - np.square(alpha))

    def r_star(self, omega):
        """Smaller positive root of V(s) = m^2 - omega^2.

        Evaluated as sqrt( (a/2b) alpha^2 / (1 + sqrt(1 - alpha^2)) ), which
        stays accurate at both endpoints; equals sqrt((a/2b)(1 - sqrt(1-alpha^2))).
        """
        al2 = np.square(self.alpha(omega))
        beta = np.sqrt(self.alpha_complement(omega))
        return np.sqrt(self.a / (2.0 * self.b) * al2 / (1.0 + beta))

    def window(self, margin: float = 1e-6) -> FrequencyWindow:
        """Default admissible window, inset by margin*(m - omega_*) per end.

        The endpoints omega_* and m are singular limits of the closed-form
        profile and charge curve, so sweeps stay strictly inside.
        """
        lo = self.omega_star
        delta = margin * (self.m - lo)
        return FrequencyWindow(lo + delta, self.m - delta)
