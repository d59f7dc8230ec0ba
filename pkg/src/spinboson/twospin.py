"""Two spin-1/2 particles whose local modes hybridise into damped normal modes.

Coupling kappa between the two local vibrational modes produces symmetric and
antisymmetric normal modes at omega0 +/- 2 kappa, each decaying into its own
thermal bath. The collective operators j_z^(1) + j_z^(2) and
j_z^(1) - j_z^(2) couple to the symmetric and antisymmetric mode respectively,
with coupling magnitude |eta|/sqrt(2) apiece (fixed by requiring that at
kappa = 0 and equal decay rates the map factorises exactly into two
independent single-spin maps).

Local basis ordering follows the single-spin storage convention (ascending
magnetic quantum numbers): |-->, |-+>, |+->, |++> with index
k = (m1 + 1/2) * 2 + (m2 + 1/2).
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import ModeSpec, dephasing_integrals_closed

__all__ = [
    "TwoSpinParams",
    "TwoSpinDensityMatrix",
    "M1",
    "M2",
    "normal_mode_frequencies",
    "normal_mode_specs",
    "debye_rates",
    "antisymmetric_mode_spec",
    "evolve_two_spins",
    "symmetric_projector_population_from_mode",
    "local_to_coupled",
    "coupled_to_local",
    "symmetric_projector_population",
    "symmetric_overlap",
]

# Magnetic quantum numbers of the local product basis, in storage order.
M1 = np.array([-0.5, -0.5, 0.5, 0.5])
M2 = np.array([-0.5, 0.5, -0.5, 0.5])

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10

_SQ2 = 1.0 / math.sqrt(2.0)
# Rows: |1,1>, |1,0>, |1,-1>, |0,0> expressed in the local product basis,
# with |1,0> = (|+-> + |-+>)/sqrt(2) and |0,0> = (|+-> - |-+>)/sqrt(2).
_COUPLED_FROM_LOCAL = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, _SQ2, _SQ2, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -_SQ2, _SQ2, 0.0],
    ]
)


class TwoSpinParams:
    """Parameters of the coupled two-spin/two-mode system.

    Parameters
    ----------
    omega0 : float
        Bare frequency of each local mode, > 0.
    kappa : float
        Inter-mode hopping strength; both normal-mode frequencies
        omega0 +/- 2 kappa must stay positive.
    eta : float
        Spin-mode coupling of each spin to its local mode.
    gamma_plus, gamma_minus : float
        Decay rates >= 0 of the symmetric and antisymmetric normal modes.
    beta : float
        Inverse temperature shared by both normal-mode baths (inf allowed).
    """

    def __init__(self, omega0, kappa=0.0, eta=1.0, gamma_plus=0.0, gamma_minus=0.0, beta=math.inf):
        if not omega0 > 0.0:
            raise ValueError(f"omega0 must be positive, got {omega0}")
        if omega0 + 2.0 * kappa <= 0.0 or omega0 - 2.0 * kappa <= 0.0:
            raise ValueError(
                f"normal-mode frequencies omega0 +/- 2*kappa must be positive, "
                f"got {omega0 + 2.0 * kappa} and {omega0 - 2.0 * kappa}"
            )
        if gamma_plus < 0.0 or gamma_minus < 0.0:
            raise ValueError("decay rates must be nonnegative")
        if not beta > 0.0:
            raise ValueError(f"inverse temperature must be positive, got {beta}")
        self.omega0 = float(omega0)
        self.kappa = float(kappa)
        self.eta = float(eta)
        self.gamma_plus = float(gamma_plus)
        self.gamma_minus = float(gamma_minus)
        self.beta = beta


class TwoSpinDensityMatrix:
    """4x4 density matrix of two spin-1/2 particles in the local product basis."""

    def __init__(self, elements):
        rho = np.array(elements, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > HERMITICITY_ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace must be 1, got {np.trace(rho)}")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {lo})")
        self.elements = rho

    @classmethod
    def from_state_vector(cls, amplitudes):
        psi = np.asarray(amplitudes, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def symmetric_zero(cls):
        """|J=1, M=0><J=1, M=0| expressed in the local basis."""
        return cls.from_state_vector([0.0, 1.0, 1.0, 0.0])


def normal_mode_frequencies(params):
    """(omega_plus, omega_minus) = (omega0 + 2 kappa, omega0 - 2 kappa)."""
    return params.omega0 + 2.0 * params.kappa, params.omega0 - 2.0 * params.kappa


def normal_mode_specs(params):
    """Damped-mode descriptions of the two normal modes as seen by the spins.

    Each collective spin operator couples to its normal mode with magnitude
    |eta|/sqrt(2); these ModeSpecs carry that effective coupling and are the
    single convention shared by the analytic map and the oracle builders.
    """
    eta_eff = params.eta * _SQ2
    omega_plus, omega_minus = normal_mode_frequencies(params)
    return (
        ModeSpec(omega_plus, eta_eff, params.gamma_plus, params.beta),
        ModeSpec(omega_minus, eta_eff, params.gamma_minus, params.beta),
    )


def debye_rates(gamma0, omega0, kappa):
    """Normal-mode decay rates under a cubic density of states.

    A bath whose density of states grows as omega^3 (three-dimensional
    acoustic phonons) dresses the bare decay rate as
    Gamma_pm = gamma0 * ((omega0 +/- 2 kappa) / omega0)^3.
    """
    if gamma0 < 0.0:
        raise ValueError(f"bare decay rate must be nonnegative, got {gamma0}")
    omega_plus = omega0 + 2.0 * kappa
    omega_minus = omega0 - 2.0 * kappa
    if omega0 <= 0.0 or omega_plus <= 0.0 or omega_minus <= 0.0:
        raise ValueError("both normal-mode frequencies must be positive")
    return gamma0 * (omega_plus / omega0) ** 3, gamma0 * (omega_minus / omega0) ** 3


def evolve_two_spins(rho0, params, t):
    """Reduced two-spin state at time t.

    Each element of the local-basis density matrix is multiplied by a factor
    built from the eigenvalues of the collective operators coupled to the two
    normal modes: with s = m1 + m2 and d = m1 - m2,

        exp[ -i (s^2 - s'^2) I_Im(t; omega_+, Gamma_+)
           - i (d^2 - d'^2) I_Im(t; omega_-, Gamma_-)
           - (s - s')^2 I_Re(t; omega_+, Gamma_+)
           - (d - d')^2 I_Re(t; omega_-, Gamma_-) ],

    the same phase-sign convention as the single-spin map. States diagonal
    in the local basis do not evolve.
    """
    mode_plus, mode_minus = normal_mode_specs(params)
    fp = dephasing_integrals_closed(mode_plus, t)
    fm = dephasing_integrals_closed(mode_minus, t)
    s = M1 + M2
    d = M1 - M2
    exponent = (
        -1j * np.subtract.outer(s * s, s * s) * fp.i_im
        - 1j * np.subtract.outer(d * d, d * d) * fm.i_im
        - np.subtract.outer(s, s) ** 2 * fp.i_re
        - np.subtract.outer(d, d) ** 2 * fm.i_re
    )
    return TwoSpinDensityMatrix(rho0.elements * np.exp(exponent))


def local_to_coupled(rho):
    """Density matrix in the coupled basis {|1,1>, |1,0>, |1,-1>, |0,0>}.

    Plain 4x4 array; the inverse is :func:`coupled_to_local`, and the round
    trip is the identity up to rounding.
    """
    return _COUPLED_FROM_LOCAL @ rho.elements @ _COUPLED_FROM_LOCAL.T


def coupled_to_local(matrix):
    """Inverse of :func:`local_to_coupled`; returns a TwoSpinDensityMatrix."""
    return TwoSpinDensityMatrix(_COUPLED_FROM_LOCAL.T @ np.asarray(matrix, dtype=complex) @ _COUPLED_FROM_LOCAL)


def antisymmetric_mode_spec(omega0, kappa, eta, gamma_minus, beta=math.inf):
    """ModeSpec of the antisymmetric normal mode alone.

    Usable whenever omega0 - 2 kappa > 0, even for strongly negative kappa
    where the companion symmetric mode would be pushed below zero frequency;
    the symmetric-subspace population never involves that mode.
    """
    return ModeSpec(omega0 - 2.0 * kappa, eta * _SQ2, gamma_minus, beta)


def symmetric_projector_population_from_mode(mode_minus, t):
    """(p_keep, p_leak) given the antisymmetric normal mode directly."""
    decay = math.exp(-4.0 * dephasing_integrals_closed(mode_minus, t).i_re)
    p_keep = 0.5 * (1.0 + decay)
    return p_keep, 1.0 - p_keep


def symmetric_projector_population(params, t):
    """(p_keep, p_leak) for population started in |J=1, M=0>.

    p_keep = (1 + exp[-4 I_Re(t; omega_-, Gamma_-)]) / 2 is what remains in
    the symmetric state; the loss p_leak = 1 - p_keep is pumped into
    |J=0, M=0>. Only the antisymmetric normal mode enters.
    """
    _, mode_minus = normal_mode_specs(params)
    return symmetric_projector_population_from_mode(mode_minus, t)


def symmetric_overlap(params, t):
    """Tr[P_sym(t) P_sym(0)] for the rank-3 symmetric-subspace projector.

    Equals 2 + (1 + exp[-4 I_Re(t; omega_-, Gamma_-)]) / 2: the stationary
    M = +/-1 states contribute 2, and the M = 0 state decays. Independent of
    the symmetric-mode decay rate.
    """
    _, mode_minus = normal_mode_specs(params)
    decay = math.exp(-4.0 * dephasing_integrals_closed(mode_minus, t).i_re)
    return 2.0 + 0.5 * (1.0 + decay)
