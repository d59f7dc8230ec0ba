"""Brute-force Lindblad master-equation oracle on truncated joint Hilbert spaces.

Independent ground truth for the analytic maps: spins and Fock-truncated
modes are assembled into a sparse Liouvillian which is integrated with
fixed-step classical RK4 (re-hermitizing after every step), then reduced by
partial trace. Dimensions are desk-scale by design; correctness and
reproducibility beat speed here, and every comparison should be guarded by a
truncation-convergence check (rerun at a larger cutoff) and, when in doubt, a
step-halving check.

Pictures: the analytic maps live in the interaction picture of the bare spin
and mode Hamiltonians. The oracle instead integrates the static Hamiltonian
with the bare spin/electronic term dropped and the bare mode terms kept.
That is exactly equivalent for every reduced quantity computed here, because
the free mode rotation commutes with the dissipators and cancels under the
partial trace, while the free spin rotation is diagonal in the coupling basis
and only contributes phases proportional to the (unused) transition
frequency. Keeping the mode terms static avoids a time-dependent integrator.

Subsystem ordering: all spins first, then all modes; operators are embedded
by Kronecker products in that order, and density matrices are flattened
row-major for the superoperator representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ._kernels import rk4_propagate
from .errors import OracleAccuracyError, TruncationError
from .spectral import thermal_occupation
from .twospin import normal_mode_specs

__all__ = [
    "DEFAULT_DIM_CAP",
    "ProductTerm",
    "Dissipator",
    "SystemSpec",
    "Trajectory",
    "suggested_cutoff",
    "default_timestep",
    "build_thermal_state",
    "thermal_product_state",
    "joint_state",
    "single_spin_system",
    "two_spin_system",
    "emitter_system",
    "single_mode_system",
    "product_operator",
    "hamiltonian_matrix",
    "liouvillian",
    "integrate",
    "propagate_operator",
    "partial_trace_spin",
    "two_time_quadrature_correlator",
    "check_joint_state",
]

DEFAULT_DIM_CAP = 20_000
TRACE_DRIFT_TOL = 1e-6
RETAINED_WEIGHT_MIN = 1.0 - 1e-6
STATE_EIGENVALUE_FLOOR = -1e-8  # looser than the analytic maps: ODE error accumulates

_SPIN_OPS = {"jz", "pe", "sz", "sminus"}
_MODE_OPS = {"a", "adag", "n"}


def _local_operator(name, dim):
    if name == "jz":
        return sparse.diags(np.arange(dim) - 0.5 * (dim - 1), format="csr", dtype=complex)
    if name == "pe":
        if dim != 2:
            raise ValueError("the excited-state projector needs a two-level system")
        return sparse.diags([0.0, 1.0], format="csr", dtype=complex)
    if name == "sz":
        if dim != 2:
            raise ValueError("sigma_z needs a two-level system")
        return sparse.diags([-1.0, 1.0], format="csr", dtype=complex)
    if name == "sminus":
        if dim != 2:
            raise ValueError("sigma_minus needs a two-level system")
        return sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    if name == "a":
        return sparse.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=complex)
    if name == "adag":
        return sparse.diags(np.sqrt(np.arange(1, dim)), -1, format="csr", dtype=complex)
    if name == "n":
        return sparse.diags(np.arange(dim, dtype=float), format="csr", dtype=complex)
    raise ValueError(f"unknown operator name {name!r}")


@dataclass(frozen=True)
class ProductTerm:
    """One Hamiltonian term: coefficient times a product of local operators.

    ``factors`` lists (subsystem index, operator name) pairs; subsystems not
    mentioned carry the identity. Valid names: jz, pe, sz, sminus on spins;
    a, adag, n on modes.
    """

    coefficient: complex
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(s), str(o)) for s, o in self.factors))


@dataclass(frozen=True)
class Dissipator:
    """Lindblad term rate * (A rho A+ - {A+ A, rho}/2) with a product operator A."""

    rate: float
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(s), str(o)) for s, o in self.factors))
        if self.rate < 0.0:
            raise ValueError(f"dissipator rate must be nonnegative, got {self.rate}")


@dataclass(frozen=True)
class SystemSpec:
    """Declarative description of a joint spin/mode system.

    Parameters
    ----------
    spin_dims : tuple of int
        Dimension 2j+1 of each spin-like subsystem (may be empty).
    mode_truncations : tuple of int
        Fock cutoff n_max of each mode; the mode dimension is n_max + 1.
    hamiltonian_terms : tuple of ProductTerm
    dissipators : tuple of Dissipator
    dim_cap : int
        Guard on the total Hilbert-space dimension.
    """

    spin_dims: tuple
    mode_truncations: tuple
    hamiltonian_terms: tuple = ()
    dissipators: tuple = ()
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        object.__setattr__(self, "spin_dims", tuple(int(d) for d in self.spin_dims))
        object.__setattr__(self, "mode_truncations", tuple(int(n) for n in self.mode_truncations))
        object.__setattr__(self, "hamiltonian_terms", tuple(self.hamiltonian_terms))
        object.__setattr__(self, "dissipators", tuple(self.dissipators))
        if any(d < 2 for d in self.spin_dims):
            raise ValueError(f"spin dimensions must be >= 2, got {self.spin_dims}")
        if any(n < 1 for n in self.mode_truncations):
            raise ValueError(f"Fock cutoffs must be >= 1, got {self.mode_truncations}")
        if self.dim > self.dim_cap:
            raise ValueError(
                f"total dimension {self.dim} exceeds the cap {self.dim_cap}"
            )
        for term in self.hamiltonian_terms:
            self._check_factors(term.factors)
        for dis in self.dissipators:
            self._check_factors(dis.factors)

    def _check_factors(self, factors):
        dims = self.subsystem_dims
        n_spins = len(self.spin_dims)
        for slot, name in factors:
            if not 0 <= slot < len(dims):
                raise ValueError(f"subsystem index {slot} out of range")
            allowed = _SPIN_OPS if slot < n_spins else _MODE_OPS
            if name not in allowed:
                raise ValueError(f"operator {name!r} is not valid on subsystem {slot}")

    @property
    def subsystem_dims(self):
        return self.spin_dims + tuple(n + 1 for n in self.mode_truncations)

    @property
    def dim(self):
        return math.prod(self.subsystem_dims)

    @property
    def spin_dim(self):
        return math.prod(self.spin_dims)

    def mode_slot(self, k):
        return len(self.spin_dims) + k


@dataclass
class Trajectory:
    """States sampled along one integration run."""

    times: np.ndarray
    states: list

    @property
    def final(self):
        return self.states[-1]


def product_operator(spec, factors):
    """Embed a product of local operators into the full space (CSR)."""
    dims = spec.subsystem_dims
    locals_ = [sparse.identity(d, format="csr", dtype=complex) for d in dims]
    for slot, name in factors:
        locals_[slot] = (locals_[slot] @ _local_operator(name, dims[slot])).tocsr()
    full = locals_[0]
    for op in locals_[1:]:
        full = sparse.kron(full, op, format="csr")
    return full


def hamiltonian_matrix(spec):
    """Assemble the Hamiltonian of a SystemSpec as a sparse CSR matrix."""
    h = sparse.csr_matrix((spec.dim, spec.dim), dtype=complex)
    for term in spec.hamiltonian_terms:
        h = h + complex(term.coefficient) * product_operator(spec, term.factors)
    return h.tocsr()


def liouvillian(spec):
    """Superoperator of the master equation for row-major flattened states.

    rho -> A rho B maps to kron(A, B.T) on vec(rho), so
    L = -i (H x 1 - 1 x H^T) + sum_k rate_k [A_k x conj(A_k)
    - (A_k^+ A_k x 1 + 1 x (A_k^+ A_k)^T)/2].
    """
    d = spec.dim
    ident = sparse.identity(d, format="csr", dtype=complex)
    h = hamiltonian_matrix(spec)
    louv = -1j * (sparse.kron(h, ident, format="csr") - sparse.kron(ident, h.T, format="csr"))
    for dis in spec.dissipators:
        if dis.rate == 0.0:
            continue
        a = product_operator(spec, dis.factors)
        ada = (a.conj().T @ a).tocsr()
        louv = louv + dis.rate * (
            sparse.kron(a, a.conj(), format="csr")
            - 0.5 * sparse.kron(ada, ident, format="csr")
            - 0.5 * sparse.kron(ident, ada.T, format="csr")
        )
    louv = louv.tocsr()
    louv.sum_duplicates()
    louv.sort_indices()
    return louv


def suggested_cutoff(mode):
    """Fock cutoff covering thermal spread plus the state-dependent displacement.

    n_max = ceil(4 nbar + 4 (2|eta|/omega)^2 + 10); the displacement of the
    mode by the coupling is x0 = 2 eta / omega in ground-state-width units.
    Always confirm with a convergence check at 1.5x the cutoff.
    """
    nbar = thermal_occupation(mode.beta, mode.omega)
    return math.ceil(4.0 * nbar + 4.0 * (2.0 * abs(mode.eta) / mode.omega) ** 2 + 10.0)


def default_timestep(modes, n_maxes, extra_rates=()):
    """Fixed RK4 step 0.02 / max(omega, gamma (nbar+1), |eta| sqrt(n_max), extras)."""
    scale = 0.0
    for mode, n_max in zip(modes, n_maxes):
        nbar = thermal_occupation(mode.beta, mode.omega)
        scale = max(
            scale,
            mode.omega,
            mode.gamma * (nbar + 1.0),
            abs(mode.eta) * math.sqrt(n_max),
        )
    for rate in extra_rates:
        scale = max(scale, rate)
    return 0.02 / scale


def build_thermal_state(n_max, beta, omega):
    """Truncated thermal state with Boltzmann weights exp(-beta omega n), renormalised.

    Raises TruncationError when the cutoff retains less than 1 - 1e-6 of the
    untruncated weight. beta = inf gives the exact vacuum projector.
    """
    if n_max < 1:
        raise ValueError(f"Fock cutoff must be >= 1, got {n_max}")
    if omega <= 0.0 or not beta > 0.0:
        raise ValueError("need omega > 0 and beta > 0")
    q = math.exp(-beta * omega)  # exactly 0 for beta = inf
    retained = 1.0 - q ** (n_max + 1)
    if retained < RETAINED_WEIGHT_MIN:
        raise TruncationError(
            f"cutoff n_max={n_max} retains only {retained:.8f} of the thermal weight "
            f"at beta*omega={beta * omega:g}"
        )
    weights = q ** np.arange(n_max + 1)
    weights /= weights.sum()
    return np.diag(weights).astype(complex)


def thermal_product_state(modes, n_maxes):
    """Tensor product of per-mode thermal states."""
    state = None
    for mode, n_max in zip(modes, n_maxes):
        block = build_thermal_state(n_max, mode.beta, mode.omega)
        state = block if state is None else np.kron(state, block)
    return state


def joint_state(*blocks):
    """Kronecker product of density-matrix blocks, spins first."""
    state = np.asarray(blocks[0], dtype=complex)
    for block in blocks[1:]:
        state = np.kron(state, np.asarray(block, dtype=complex))
    return state


def _thermal_dissipators(mode, slot):
    nbar = thermal_occupation(mode.beta, mode.omega)
    out = [Dissipator(mode.gamma * (nbar + 1.0), ((slot, "a"),))]
    if nbar > 0.0:
        out.append(Dissipator(mode.gamma * nbar, ((slot, "adag"),)))
    return out


def single_spin_system(j, modes, n_maxes):
    """Spin-j coupled along j_z to damped thermal modes.

    H = sum_k [omega_k n_k + eta_k jz adag_k + eta_k* jz a_k] with a thermal
    loss (and, at finite temperature, heating) dissipator per mode.
    """
    twoj = round(2.0 * j)
    if twoj < 1 or abs(2.0 * j - twoj) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    modes = tuple(modes)
    n_maxes = tuple(n_maxes)
    terms = []
    dissipators = []
    for k, mode in enumerate(modes):
        slot = 1 + k
        terms.append(ProductTerm(mode.omega, ((slot, "n"),)))
        terms.append(ProductTerm(mode.eta, ((0, "jz"), (slot, "adag"))))
        terms.append(ProductTerm(np.conj(mode.eta), ((0, "jz"), (slot, "a"))))
        dissipators.extend(_thermal_dissipators(mode, slot))
    return SystemSpec((twoj + 1,), n_maxes, tuple(terms), tuple(dissipators))


def two_spin_system(params, n_maxes):
    """Two spins coupled to the symmetric/antisymmetric normal modes.

    H = omega_+ n_+ + omega_- n_- + eta_eff (jz1 + jz2)(a_+ + adag_+)
    + eta_eff (jz1 - jz2)(a_- + adag_-) with eta_eff = eta/sqrt(2) taken from
    the same convention as the analytic two-spin map.
    """
    mode_plus, mode_minus = normal_mode_specs(params)
    n_maxes = tuple(n_maxes)
    terms = []
    dissipators = []
    for mspec, slot, sign in ((mode_plus, 2, 1.0), (mode_minus, 3, -1.0)):
        terms.append(ProductTerm(mspec.omega, ((slot, "n"),)))
        for ladder in ("a", "adag"):
            terms.append(ProductTerm(mspec.eta, ((0, "jz"), (slot, ladder))))
            terms.append(ProductTerm(sign * mspec.eta, ((1, "jz"), (slot, ladder))))
        dissipators.extend(_thermal_dissipators(mspec, slot))
    return SystemSpec((2, 2), n_maxes, tuple(terms), tuple(dissipators))


def emitter_system(params, n_maxes):
    """Two-level emitter with projector coupling, optical decay and pure dephasing.

    H = sum_k [omega_k n_k + eta_k P_e adag_k + eta_k* P_e a_k]; Lindblad
    operators sigma_- at gamma_op and sigma_z at gamma_dp/2 (so coherences
    dephase at gamma_dp on top of the vibronic factors).
    """
    modes = tuple(params.modes)
    n_maxes = tuple(n_maxes)
    terms = []
    dissipators = []
    for k, mode in enumerate(modes):
        slot = 1 + k
        terms.append(ProductTerm(mode.omega, ((slot, "n"),)))
        terms.append(ProductTerm(mode.eta, ((0, "pe"), (slot, "adag"))))
        terms.append(ProductTerm(np.conj(mode.eta), ((0, "pe"), (slot, "a"))))
        dissipators.extend(_thermal_dissipators(mode, slot))
    if params.gamma_op > 0.0:
        dissipators.append(Dissipator(params.gamma_op, ((0, "sminus"),)))
    if params.gamma_dp > 0.0:
        dissipators.append(Dissipator(0.5 * params.gamma_dp, ((0, "sz"),)))
    return SystemSpec((2,), n_maxes, tuple(terms), tuple(dissipators))


def single_mode_system(mode, n_max):
    """One damped mode, no spin: used for correlation-function checks."""
    terms = (ProductTerm(mode.omega, ((0, "n"),)),)
    return SystemSpec((), (n_max,), terms, tuple(_thermal_dissipators(mode, 0)))


def _csr_arrays(louv):
    if louv.nnz >= 2**31:
        raise ValueError("Liouvillian too large for 32-bit indices")
    return (
        np.ascontiguousarray(louv.data, dtype=complex),
        np.ascontiguousarray(louv.indices, dtype=np.int32),
        np.ascontiguousarray(louv.indptr, dtype=np.int32),
    )


def _run(louv, y, sample_times, dt, herm_dim):
    data, indices, indptr = _csr_arrays(louv)
    states = []
    previous = 0.0
    for t in sample_times:
        delta = t - previous
        if delta > 0.0:
            n_steps = max(1, math.ceil(delta / dt))
            rk4_propagate(data, indices, indptr, y, delta / n_steps, n_steps, herm_dim)
        states.append(y.copy())
        previous = t
    return states


def integrate(spec, rho0, t_final, dt, sample_times=None):
    """Propagate a joint density matrix with fixed-step RK4.

    Parameters
    ----------
    spec : SystemSpec
    rho0 : ndarray
        Initial joint density matrix, shape (dim, dim).
    t_final : float
        End time; also the only sample when ``sample_times`` is omitted.
    dt : float
        Step size. Each sampling interval is covered by ceil(interval/dt)
        equal steps, so the effective step never exceeds dt.
    sample_times : sequence of float, optional
        Increasing times in [0, t_final] at which to record the state.

    Returns
    -------
    Trajectory

    Raises
    ------
    OracleAccuracyError
        If the trace drifts from 1 by more than 1e-6 at any sample.
    """
    d = spec.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"initial state must be {d}x{d}, got {rho0.shape}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if sample_times is None:
        sample_times = [t_final]
    times = np.asarray(sample_times, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0.0) or times[0] < 0.0:
        raise ValueError("sample times must be strictly increasing and nonnegative")
    if times[-1] > t_final + 1e-12:
        raise ValueError("sample times must not exceed t_final")

    y = rho0.reshape(-1).copy()
    raw = _run(liouvillian(spec), y, times, dt, herm_dim=d)
    states = []
    for t, vec in zip(times, raw):
        rho = vec.reshape(d, d)
        drift = abs(np.trace(rho).real - 1.0)
        # not-within-tolerance phrasing so NaN from an unstable step also trips
        if not drift <= TRACE_DRIFT_TOL:
            raise OracleAccuracyError(
                f"trace drifted by {drift:.3e} at t={t:g} (dt={dt:g}); reduce the step"
            )
        states.append(rho)
    return Trajectory(times, states)


def propagate_operator(spec, op, t_final, dt, sample_times=None):
    """Propagate an arbitrary (possibly non-Hermitian) operator under the Liouvillian.

    Same stepping as :func:`integrate` but with re-hermitization and trace
    checks disabled; used for quantum-regression correlators.
    """
    d = spec.dim
    sigma = np.asarray(op, dtype=complex)
    if sigma.shape != (d, d):
        raise ValueError(f"operator must be {d}x{d}, got {sigma.shape}")
    if sample_times is None:
        sample_times = [t_final]
    times = np.asarray(sample_times, dtype=float)
    y = sigma.reshape(-1).copy()
    raw = _run(liouvillian(spec), y, times, dt, herm_dim=0)
    return Trajectory(times, [vec.reshape(d, d) for vec in raw])


def partial_trace_spin(rho, spec):
    """Trace out every mode factor, leaving the joint spin state."""
    ds = spec.spin_dim
    dm = spec.dim // ds
    rho = np.asarray(rho).reshape(ds, dm, ds, dm)
    return np.einsum("abcb->ac", rho)


def two_time_quadrature_correlator(mode, n_max, t, dt=None):
    """<X(t) X(0)> of one damped thermal mode, X = eta a + eta* adag.

    Quantum regression: the non-Hermitian operator X rho_th is propagated
    under the single-mode Liouvillian and closed with Tr[X . ]. Accepts a
    scalar time or a sequence (returns a complex array for the latter).
    """
    spec = single_mode_system(mode, n_max)
    if dt is None:
        dt = default_timestep([mode], [n_max])
    x = product_operator(spec, ((0, "a"),)) * mode.eta
    x = (x + x.conj().T).toarray()
    sigma0 = x @ build_thermal_state(n_max, mode.beta, mode.omega)
    scalar = np.isscalar(t)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if times[0] == 0.0:
        sample = times[1:]
        values = [np.trace(x @ sigma0)]
    else:
        sample = times
        values = []
    if sample.size:
        traj = propagate_operator(spec, sigma0, sample[-1], dt, sample_times=sample)
        values.extend(np.trace(x @ sigma_t) for sigma_t in traj.states)
    out = np.asarray(values, dtype=complex)
    return complex(out[0]) if scalar else out


def check_joint_state(rho, eig_floor=STATE_EIGENVALUE_FLOOR, atol=1e-8):
    """Raise if a joint state is not Hermitian, unit-trace and (loosely) positive."""
    rho = np.asarray(rho)
    herm = np.abs(rho - rho.conj().T).max()
    if herm > atol:
        raise ValueError(f"joint state is not Hermitian (max asymmetry {herm:.3e})")
    drift = abs(np.trace(rho).real - 1.0)
    if drift > atol:
        raise ValueError(f"joint state trace deviates from 1 by {drift:.3e}")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < eig_floor:
        raise ValueError(f"joint state has eigenvalue {lo:.3e} below the floor {eig_floor:g}")
