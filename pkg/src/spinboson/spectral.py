"""Correlation functions and dephasing integrals of damped thermal bosonic modes.

A spin coupled along :math:`\\hat j_z` to a set of harmonic modes picks up, for
each matrix element, a phase and a decay factor controlled by two double time
integrals of the mode quadrature correlation function

.. math::

    C(t) = |\\eta|^2 e^{-\\Gamma t/2}
           [\\coth(\\beta\\omega/2)\\cos\\omega t - i \\sin\\omega t].

This module evaluates those integrals three ways: in closed form, by adaptive
quadrature of the defining nested integrals (the reference used for
validation), and in the undamped and long-time limits.

All quantities are dimensionless; frequencies, couplings and rates are
expressed in units of a caller-chosen reference frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import QuadratureConvergenceError

__all__ = [
    "ModeSpec",
    "DephasingFactors",
    "thermal_occupation",
    "correlation_function",
    "dephasing_integrals_closed",
    "dephasing_integrals_undamped",
    "dephasing_integrals_quadrature",
    "asymptotic_rates",
    "accumulate_factors",
]

# Below gamma/omega = 1e-10 the printed closed forms lose digits to
# cancellation; route to the analytic undamped limit instead.
UNDAMPED_CROSSOVER = 1e-10


def _coth(x):
    """coth(x) for x > 0, safe at both tails.

    Returns 1 above x = 100 (error < 1e-86) and uses the Laurent series
    1/x + x/3 below 1e-4, where 1/tanh(x) starts losing digits.
    """
    if x > 100.0:
        return 1.0
    if x < 1e-4:
        return 1.0 / x + x / 3.0
    return 1.0 / math.tanh(x)


@dataclass(frozen=True)
class ModeSpec:
    """One damped bosonic mode, initially in equilibrium with its bath.

    Parameters
    ----------
    omega : float
        Angular frequency, > 0 (in units of the reference frequency).
    eta : complex
        Coupling amplitude to the spin (same units).
    gamma : float
        Decay rate into the thermal bath, >= 0.
    beta : float
        Inverse temperature, > 0. ``math.inf`` selects the exact
        zero-temperature branch.
    """

    omega: float
    eta: complex = 1.0
    gamma: float = 0.0
    beta: float = math.inf

    def __post_init__(self):
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ValueError(f"mode frequency must be positive and finite, got {self.omega}")
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"decay rate must be nonnegative and finite, got {self.gamma}")
        if not self.beta > 0.0:
            raise ValueError(f"inverse temperature must be positive (inf allowed), got {self.beta}")

    @property
    def coupling_sq(self):
        """|eta|^2."""
        return abs(self.eta) ** 2

    @property
    def thermal_coth(self):
        """coth(beta*omega/2); exactly 1 at zero temperature."""
        if math.isinf(self.beta):
            return 1.0
        return _coth(0.5 * self.beta * self.omega)


@dataclass(frozen=True)
class DephasingFactors:
    """Accumulated decay exponent ``i_re`` (>= 0) and phase exponent ``i_im``.

    Both vanish at t = 0. A matrix element (m, m') of the reduced spin state
    is multiplied by exp[-i (m^2 - m'^2) i_im - (m - m')^2 i_re]; the phase
    sign reflects the negative polaron energy shift of the displaced modes.
    """

    i_re: float
    i_im: float

    def __add__(self, other):
        return DephasingFactors(self.i_re + other.i_re, self.i_im + other.i_im)


def thermal_occupation(beta, omega):
    """Mean boson number 1/(exp(beta*omega) - 1) of a thermal mode.

    Returns exactly 0 for ``beta = inf`` and for beta*omega > 700 (where the
    exponential would overflow and the occupation is < 1e-304).
    """
    if omega <= 0.0:
        raise ValueError(f"frequency must be positive, got {omega}")
    if not beta > 0.0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    x = beta * omega
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def correlation_function(mode, t):
    """Quadrature correlation function C(t) of a damped thermal mode.

    C(t) = |eta|^2 exp(-gamma t / 2) [coth(beta omega/2) cos(omega t)
    - i sin(omega t)].
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    wt = mode.omega * t
    envelope = mode.coupling_sq * math.exp(-0.5 * mode.gamma * t)
    return envelope * complex(mode.thermal_coth * math.cos(wt), -math.sin(wt))


def dephasing_integrals_closed(mode, t):
    """Closed-form dephasing integrals (I_Re, I_Im) for one damped mode.

    Evaluates the analytic result of the nested double integral of the
    correlation function. Below gamma/omega = 1e-10 the dedicated undamped
    limit is used; the closed forms are continuous there but cancellation
    costs precision.

    Parameters
    ----------
    mode : ModeSpec
    t : float
        Time, >= 0.

    Returns
    -------
    DephasingFactors
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    w = mode.omega
    g = mode.gamma
    if g < UNDAMPED_CROSSOVER * w:
        return dephasing_integrals_undamped(mode, t)
    eta2 = mode.coupling_sq
    cth = mode.thermal_coth
    den = g * g + 4.0 * w * w
    gg4w = g * g - 4.0 * w * w
    damp = math.exp(-0.5 * g * t)
    s = math.sin(w * t)
    c = math.cos(w * t)
    i_re = (2.0 * eta2 * cth / den**2) * (
        -2.0 * gg4w + g * t * den + damp * (2.0 * gg4w * c - 8.0 * g * w * s)
    )
    i_im = (4.0 * eta2 / den**2) * (
        4.0 * w * g - w * t * den - damp * (gg4w * s + 4.0 * g * w * c)
    )
    # i_re is a double integral of a positive-definite kernel; clip the
    # ~1e-16-scale rounding noise that can survive the cancellation at small t.
    return DephasingFactors(max(i_re, 0.0), i_im)


def dephasing_integrals_undamped(mode, t):
    """Dephasing integrals in the vanishing-damping limit; ``mode.gamma`` is ignored.

    I_Re = (2|eta|^2/omega^2) coth(beta omega/2) sin^2(omega t/2) and
    I_Im = (|eta|^2/omega^2) sin(omega t) - (|eta|^2/omega) t.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    w = mode.omega
    eta2 = mode.coupling_sq
    half = math.sin(0.5 * w * t)
    i_re = (2.0 * eta2 / w**2) * mode.thermal_coth * half * half
    i_im = (eta2 / w**2) * math.sin(w * t) - (eta2 / w) * t
    return DephasingFactors(i_re, i_im)


def _correlation_time_integrals(mode, s):
    """(int_0^s C_Re, int_0^s C_Im): the inner integral of the nested pair, analytic."""
    a = 0.5 * mode.gamma
    w = mode.omega
    den = a * a + w * w
    e = math.exp(-a * s)
    sn = math.sin(w * s)
    cs = math.cos(w * s)
    f_re = mode.coupling_sq * mode.thermal_coth * (a - e * (a * cs - w * sn)) / den
    f_im = -mode.coupling_sq * (w - e * (w * cs + a * sn)) / den
    return f_re, f_im


def _adaptive_outer(f, t, tol):
    value, abserr, *tail = quad(f, 0.0, t, epsabs=tol, epsrel=1e-10, limit=500, full_output=True)
    # tail holds QUADPACK's message only when the subdivision budget ran out
    if len(tail) > 1:
        raise QuadratureConvergenceError(
            f"outer quadrature did not converge to {tol} over [0, {t}]: {tail[1]}",
            estimate=value,
            achieved=abserr,
        )
    return value


def dephasing_integrals_quadrature(mode, t, tol=1e-10):
    """Reference evaluation of (I_Re, I_Im) by quadrature of the defining integrals.

    The inner time integral of the correlation function has the closed
    antiderivative of exp(-gamma tau/2) cos/sin and is evaluated exactly; the
    outer integral is done by adaptive quadrature (QUADPACK) to absolute
    accuracy ``tol``. This path is deliberately independent of
    :func:`dephasing_integrals_closed` and serves as its oracle.

    Raises
    ------
    QuadratureConvergenceError
        If the adaptive integrator exhausts its subdivision budget; the
        exception carries the best estimate reached.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if t == 0.0:
        return DephasingFactors(0.0, 0.0)
    i_re = _adaptive_outer(lambda s: _correlation_time_integrals(mode, s)[0], t, tol)
    i_im = _adaptive_outer(lambda s: _correlation_time_integrals(mode, s)[1], t, tol)
    return DephasingFactors(i_re, i_im)


def asymptotic_rates(mode):
    """Long-time linear growth rates (rate_re, rate_im) of the dephasing integrals.

    For gamma*t >> 1 the transients die off and I_Re -> rate_re * t,
    I_Im -> rate_im * t with

        rate_re = 2|eta|^2 coth(beta omega/2) gamma / (gamma^2 + 4 omega^2),
        rate_im = -4|eta|^2 omega / (gamma^2 + 4 omega^2).

    Requires gamma > 0 (an undamped mode has no long-time linearisation of
    I_Re; the I_Im slope -|eta|^2/omega is the caller's business there).
    """
    if mode.gamma <= 0.0:
        raise ValueError("asymptotic rates require a positive decay rate")
    den = mode.gamma**2 + 4.0 * mode.omega**2
    rate_re = 2.0 * mode.coupling_sq * mode.thermal_coth * mode.gamma / den
    rate_im = -4.0 * mode.coupling_sq * mode.omega / den
    return rate_re, rate_im


def accumulate_factors(modes, t):
    """Sum the closed-form dephasing integrals over a collection of modes.

    Both components are additive over modes because the correlation function
    is a sum of single-mode terms.
    """
    modes = tuple(modes)
    if not modes:
        raise ValueError("at least one mode is required")
    i_re = 0.0
    i_im = 0.0
    for mode in modes:
        f = dephasing_integrals_closed(mode, t)
        i_re += f.i_re
        i_im += f.i_im
    return DephasingFactors(i_re, i_im)
