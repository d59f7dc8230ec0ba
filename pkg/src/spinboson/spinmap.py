"""Exact reduced dynamics of a single spin-j dephased by damped thermal modes.

The reduced state at time t is obtained from the initial state by multiplying
each matrix element in the j_z eigenbasis with an analytic phase/decay factor;
no equations of motion are integrated. The map always acts from t = 0: it is
non-Markovian and not divisible, so there is deliberately no incremental
stepping API.
"""

from __future__ import annotations

import cmath

import numpy as np

from .spectral import accumulate_factors

__all__ = [
    "SpinDensityMatrix",
    "dephasing_factor",
    "evolve_spin",
    "coherence_magnitude",
]

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10  # Hermitian eigensolves jitter at the 1e-14..1e-12 scale


def dephasing_factor(m, mp, factors):
    """Multiplier of the (m, m') matrix element for given dephasing factors.

    exp[-i (m^2 - m'^2) i_im - (m - m')^2 i_re]; equals 1 on the diagonal.
    The phase sign is fixed by the exact displaced-oscillator solution (the
    level shift of the coupled modes is -m^2 |eta|^2/omega, so sectors with
    larger |m| advance in phase).
    """
    return cmath.exp(
        complex(-((m - mp) ** 2) * factors.i_re, -(m * m - mp * mp) * factors.i_im)
    )


class SpinDensityMatrix:
    """Density matrix of a spin-j particle in the j_z eigenbasis.

    Rows/columns are indexed by k = m + j in {0, ..., 2j}, i.e. ascending
    magnetic quantum number. Hermiticity, unit trace and positive
    semidefiniteness are enforced at construction.

    Parameters
    ----------
    j : float
        Spin quantum number; 2j must be a positive integer.
    elements : array_like
        (2j+1) x (2j+1) complex matrix.
    omega_spin : float, optional
        Bare transition frequency. Metadata only: the map is evaluated in the
        interaction picture, where it never enters.
    """

    def __init__(self, j, elements, omega_spin=0.0):
        twoj = round(2.0 * j)
        if twoj < 1 or abs(2.0 * j - twoj) > 1e-12:
            raise ValueError(f"j must be a positive half-integer, got {j}")
        dim = twoj + 1
        rho = np.array(elements, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for j={j}, got shape {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > HERMITICITY_ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace must be 1, got {np.trace(rho)}")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {lo})")
        self.j = float(j)
        self.elements = rho
        self.omega_spin = float(omega_spin)

    @property
    def dim(self):
        return self.elements.shape[0]

    @property
    def m_values(self):
        """Magnetic quantum numbers, ascending: -j, -j+1, ..., +j."""
        return np.arange(self.dim) - self.j

    def index_of(self, m):
        """Storage index k = m + j of magnetic quantum number m."""
        k = m + self.j
        ki = round(k)
        if abs(k - ki) > 1e-9 or not 0 <= ki < self.dim:
            raise IndexError(f"m={m} is not in the spin-{self.j} ladder")
        return int(ki)

    @classmethod
    def from_state_vector(cls, j, amplitudes, omega_spin=0.0):
        """Pure state |psi><psi| from amplitudes in the j_z basis (normalised here)."""
        psi = np.asarray(amplitudes, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(j, np.outer(psi, psi.conj()), omega_spin)

    @classmethod
    def uniform_superposition(cls, j, omega_spin=0.0):
        """Equal-amplitude superposition of all 2j+1 levels (maximal coherences)."""
        dim = round(2.0 * j) + 1
        return cls.from_state_vector(j, np.ones(dim), omega_spin)


def evolve_spin(rho0, modes, t):
    """Reduced spin state at time t for an initial state coupled to ``modes``.

    Each matrix element of ``rho0`` is multiplied by
    exp[-i (m^2 - m'^2) I_Im(t) - (m - m')^2 I_Re(t)] with the dephasing
    integrals accumulated over all modes (see :func:`dephasing_factor` for
    the phase sign). Diagonal elements (populations) are untouched. Always
    maps from t = 0; composing two calls is not the same as a single call
    with the summed time.

    Returns
    -------
    SpinDensityMatrix
    """
    factors = accumulate_factors(modes, t)
    m = rho0.m_values
    exponent = (
        -1j * np.subtract.outer(m * m, m * m) * factors.i_im
        - np.subtract.outer(m, m) ** 2 * factors.i_re
    )
    return SpinDensityMatrix(rho0.j, rho0.elements * np.exp(exponent), rho0.omega_spin)


def coherence_magnitude(rho, m, mp):
    """|<j,m| rho |j,m'>|, the coherence magnitude plotted against time."""
    return abs(rho.elements[rho.index_of(m), rho.index_of(mp)])
