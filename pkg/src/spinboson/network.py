"""Spectral analysis of N coupled bosonic modes.

All-negative inter-mode couplings single out a low-frequency, near-symmetric
normal mode gapped from the remaining N-1 modes. This module builds uniform
and random coupling matrices, diagonalises them, measures the fidelity of the
lowest mode to the fully symmetric one, and evaluates the random-matrix
(Furedi-Komlos) predictions for the isolated eigenvalue, the spectral gap and
the fidelity error bound. It also gives the effective one-axis-twisting
strength obtained by driving the symmetric mode through closed loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

__all__ = [
    "CouplingMatrix",
    "NormalModeDecomposition",
    "FkPredictions",
    "TwistingPulse",
    "build_uniform_coupling",
    "build_random_coupling",
    "decompose",
    "fk_predictions",
    "twisting_strength",
]

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric inter-mode coupling matrix kappa with bare frequency omega0.

    kappa must be real symmetric with zero diagonal; omega0 * 1 + kappa must
    be positive, which is verified when the matrix is diagonalised (and
    eagerly by the builders).
    """

    kappa: np.ndarray
    omega0: float

    def __post_init__(self):
        kappa = np.asarray(self.kappa, dtype=float)
        object.__setattr__(self, "kappa", kappa)
        if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1] or kappa.shape[0] < 2:
            raise ValueError(f"kappa must be square with n >= 2, got shape {kappa.shape}")
        if not np.array_equal(kappa, kappa.T):
            raise ValueError("kappa must be exactly symmetric")
        if np.any(np.diag(kappa) != 0.0):
            raise ValueError("kappa must have a zero diagonal")
        if not self.omega0 > 0.0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")

    @property
    def n(self):
        return self.kappa.shape[0]


@dataclass(frozen=True)
class NormalModeDecomposition:
    """Eigenfrequencies/eigenmodes of omega0 * 1 + kappa, ascending.

    ``eigenvectors[:, i]`` is the orthonormal mode at ``eigenvalues[i]``. The
    lowest mode is sign-fixed so its component sum is positive, and
    ``symmetric_fidelity`` is its squared overlap with the uniform vector;
    it is None when the lowest eigenvalue is degenerate and the overlap is
    not well defined.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    symmetric_fidelity: Optional[float]

    @property
    def gap(self):
        """Spectral gap between the two lowest normal modes."""
        return self.eigenvalues[1] - self.eigenvalues[0]


class FkPredictions(NamedTuple):
    lambda1_estimate: float
    expected_gap: float
    fidelity_error_bound: float


class TwistingPulse(NamedTuple):
    chi: float
    duration: float


def build_uniform_coupling(n, kappa, omega0):
    """All-to-all coupling with every off-diagonal entry equal to kappa.

    The spectrum is known exactly: one symmetric mode at omega0 + (n-1) kappa
    and an (n-1)-fold degenerate level at omega0 - kappa; both must be
    positive.
    """
    if n < 2:
        raise ValueError(f"need at least two modes, got {n}")
    if omega0 + (n - 1) * kappa <= 0.0 or omega0 - kappa <= 0.0:
        raise ValueError(
            f"omega0 * 1 + kappa is not positive for n={n}, kappa={kappa}, omega0={omega0}"
        )
    matrix = np.full((n, n), float(kappa))
    np.fill_diagonal(matrix, 0.0)
    return CouplingMatrix(matrix, omega0)


def build_random_coupling(n, kappa_max, omega0, seed):
    """Couplings drawn i.i.d. uniformly from [-kappa_max, 0] for i < j, mirrored.

    Deterministic for a given seed (any ``numpy.random.default_rng`` seed
    object is accepted). Raises if omega0 * 1 + kappa loses positivity.
    """
    if n < 2:
        raise ValueError(f"need at least two modes, got {n}")
    if kappa_max < 0.0:
        raise ValueError(f"kappa_max must be nonnegative, got {kappa_max}")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    matrix = np.zeros((n, n))
    matrix[iu] = rng.uniform(-kappa_max, 0.0, iu[0].size)
    matrix = matrix + matrix.T
    lowest = np.linalg.eigvalsh(omega0 * np.eye(n) + matrix)[0]
    if lowest <= 0.0:
        raise ValueError(
            f"omega0 * 1 + kappa is not positive (lowest eigenvalue {lowest}); "
            f"reduce kappa_max or raise omega0"
        )
    return CouplingMatrix(matrix, omega0)


def decompose(cm):
    """Normal modes of a coupling matrix.

    Diagonalises omega0 * 1 + kappa directly (with positivity enforced its
    spectrum already equals the normal-mode frequencies, so no square/
    square-root round trip is needed). For all-negative couplings the lowest
    mode has strictly positive components after sign fixing
    (Frobenius-Perron).
    """
    n = cm.n
    eigenvalues, eigenvectors = np.linalg.eigh(cm.omega0 * np.eye(n) + cm.kappa)
    if eigenvalues[0] <= 0.0:
        raise ValueError(
            f"omega0 * 1 + kappa is not positive (lowest eigenvalue {eigenvalues[0]})"
        )
    eigenvectors = eigenvectors.copy()
    if eigenvectors[:, 0].sum() < 0.0:
        eigenvectors[:, 0] = -eigenvectors[:, 0]
    scale = max(1.0, float(np.abs(eigenvalues).max()))
    if eigenvalues[1] - eigenvalues[0] <= DEGENERACY_RTOL * scale:
        fidelity = None
    else:
        fidelity = float(eigenvectors[:, 0].sum()) ** 2 / n
    return NormalModeDecomposition(eigenvalues, eigenvectors, fidelity)


def fk_predictions(n, mu, sigma, omega0):
    """Random-matrix predictions for i.i.d. couplings with negative mean.

    For entries with mean mu < 0 and standard deviation sigma the isolated
    lowest eigenvalue sits near

        lambda_1 = omega0 - sigma^2/|mu| + (n-1) mu,

    (the sample-sum term replaced by its expectation), the expected gap to
    the concentrated bulk is |mu| n + sigma^2/|mu| - 2 sigma sqrt(n), and the
    squared overlap of the lowest mode with the uniform vector falls short of
    1 by at most 2 sigma^2 / (n mu^2) with probability > 1 - 1/n.
    """
    if n < 2:
        raise ValueError(f"need at least two modes, got {n}")
    if mu >= 0.0:
        raise ValueError(f"the isolated-eigenvalue prediction requires mu < 0, got {mu}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    lambda1 = omega0 - sigma**2 / abs(mu) + (n - 1) * mu
    expected_gap = abs(mu) * n + sigma**2 / abs(mu) - 2.0 * sigma * math.sqrt(n)
    fidelity_error_bound = 2.0 * sigma**2 / (n * mu * mu)
    return FkPredictions(lambda1, expected_gap, fidelity_error_bound)


def twisting_strength(eta, omega_s, r):
    """Effective one-axis-twisting pulse from r half-periods of the symmetric mode.

    Undamped evolution for a duration t = r pi / omega_s (r a positive
    integer) acts on the spins alone as exp(-i chi J_z^2) with
    chi = r pi eta^2 / omega_s^2. Returns (chi, duration).
    """
    if omega_s <= 0.0:
        raise ValueError(f"symmetric-mode frequency must be positive, got {omega_s}")
    if r != int(r) or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    chi = r * math.pi * eta * eta / omega_s**2
    return TwistingPulse(chi, r * math.pi / omega_s)
