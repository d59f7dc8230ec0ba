"""Two-level solid-state emitter coupled to vibrational modes.

An electronic two-level defect (ground |g>, excited |e>) whose excited state
displaces local vibrational modes is the m in {0, 1} instance of the
dephasing map: the excited-state projector plays the role of the diagonal
spin coupling. On top of the exact vibronic factors, optical decay at
gamma_op and pure dephasing at gamma_dp enter the reduced state in closed
form. gamma_dp is the coherence decay rate contributed by pure dephasing.

Basis ordering: index 0 = |g>, index 1 = |e>.
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import accumulate_factors
from .spinmap import dephasing_factor

__all__ = ["EmitterParams", "evolve_emitter"]

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


class EmitterParams:
    """Vibrational modes plus optical decay and pure dephasing rates.

    Parameters
    ----------
    modes : sequence of ModeSpec
        Vibrational modes displaced by the excited state.
    gamma_op : float
        Optical decay rate |e> -> |g>, >= 0.
    gamma_dp : float
        Pure-dephasing coherence decay rate, >= 0.
    """

    def __init__(self, modes, gamma_op=0.0, gamma_dp=0.0):
        self.modes = tuple(modes)
        if not self.modes:
            raise ValueError("at least one vibrational mode is required")
        if gamma_op < 0.0 or gamma_dp < 0.0:
            raise ValueError("decay and dephasing rates must be nonnegative")
        self.gamma_op = float(gamma_op)
        self.gamma_dp = float(gamma_dp)


def evolve_emitter(rho0, params, t):
    """Reduced electronic state at time t.

    Populations follow the optical decay exactly,
    rho_ee(t) = rho_ee(0) exp(-gamma_op t) with rho_gg(t) = 1 - rho_ee(t);
    the coherence picks up the vibronic phase/decay factor for m = 0 vs
    m' = 1 on top of exp[-(gamma_dp + gamma_op/2) t].

    Parameters
    ----------
    rho0 : array_like
        2x2 density matrix in the {|g>, |e>} basis.
    params : EmitterParams
    t : float
        Time, >= 0.

    Returns
    -------
    numpy.ndarray
        2x2 density matrix.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > HERMITICITY_ATOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_ATOL:
        raise ValueError(f"trace must be 1, got {np.trace(rho)}")
    if rho[0, 0].real < EIGENVALUE_FLOOR or rho[1, 1].real < EIGENVALUE_FLOOR:
        raise ValueError("populations must be nonnegative")
    if abs(rho[0, 1]) ** 2 > rho[0, 0].real * rho[1, 1].real - EIGENVALUE_FLOOR:
        raise ValueError("density matrix is not positive semidefinite")

    factors = accumulate_factors(params.modes, t)
    rho_ee = rho[1, 1].real * math.exp(-params.gamma_op * t)
    rho_ge = (
        rho[0, 1]
        * math.exp(-(params.gamma_dp + 0.5 * params.gamma_op) * t)
        * dephasing_factor(0.0, 1.0, factors)
    )
    return np.array(
        [[1.0 - rho_ee, rho_ge], [rho_ge.conjugate(), rho_ee]], dtype=complex
    )
