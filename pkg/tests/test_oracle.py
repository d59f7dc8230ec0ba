import math

import numpy as np
import pytest

from spinboson import ModeSpec, SpinDensityMatrix, TruncationError, thermal_occupation
from spinboson import oracle
from spinboson.errors import OracleAccuracyError
from conftest import random_density_matrix


class TestSystemSpec:
    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            oracle.SystemSpec((2,), (100, 100))
        spec = oracle.SystemSpec((2,), (99,))
        assert spec.dim == 200

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            oracle.SystemSpec((1,), (10,))
        with pytest.raises(ValueError):
            oracle.SystemSpec((2,), (0,))

    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            oracle.Dissipator(-0.5, ((0, "a"),))

    def test_rejects_operator_on_wrong_subsystem(self):
        with pytest.raises(ValueError):
            oracle.SystemSpec((2,), (5,), hamiltonian_terms=(
                oracle.ProductTerm(1.0, ((0, "a"),)),
            ))
        with pytest.raises(ValueError):
            oracle.SystemSpec((2,), (5,), dissipators=(
                oracle.Dissipator(1.0, ((1, "sz"),)),
            ))

    def test_rejects_out_of_range_slot(self):
        with pytest.raises(ValueError):
            oracle.SystemSpec((2,), (5,), hamiltonian_terms=(
                oracle.ProductTerm(1.0, ((2, "n"),)),
            ))


class TestThermalState:
    def test_zero_temperature_vacuum(self):
        state = oracle.build_thermal_state(10, math.inf, 1.0)
        expected = np.zeros((11, 11)); expected[0, 0] = 1.0
        assert np.array_equal(state, expected)

    def test_effectively_zero_temperature(self):
        state = oracle.build_thermal_state(10, 1e20, 1.0)
        assert abs(state[0, 0] - 1.0) < 1e-12
        assert np.abs(state[1:, 1:]).max() < 1e-12

    def test_mean_occupation(self):
        state = oracle.build_thermal_state(60, math.log(2.0), 1.0)
        n_mean = np.diag(state).real @ np.arange(61)
        assert n_mean == pytest.approx(1.0, abs=1e-6)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            oracle.build_thermal_state(10, 0.1, 1.0)

    def test_consistency_with_occupation_formula(self):
        beta, omega = 0.7, 1.3
        state = oracle.build_thermal_state(40, beta, omega)
        n_mean = np.diag(state).real @ np.arange(41)
        assert n_mean == pytest.approx(thermal_occupation(beta, omega), abs=1e-8)


class TestIntegrate:
    def test_thermal_states_are_stationary(self):
        for beta in (math.inf, 1.0):
            mode = ModeSpec(1.0, 0.0 + 0j, 0.8, beta)
            spec = oracle.single_mode_system(mode, 25)
            rho0 = oracle.build_thermal_state(25, beta, 1.0)
            trajectory = oracle.integrate(spec, rho0, 5.0, 0.01, sample_times=[2.0, 5.0])
            for state in trajectory.states:
                assert np.abs(state - rho0).max() < 1e-10

    def test_uncoupled_spin_is_constant(self, rng):
        mode = ModeSpec(1.0, 0.0 + 0j, 0.0, math.inf)
        spec = oracle.single_spin_system(0.5, [mode], [5])
        rho_spin = random_density_matrix(rng, 2)
        joint0 = oracle.joint_state(rho_spin, oracle.build_thermal_state(5, math.inf, 1.0))
        trajectory = oracle.integrate(spec, joint0, 4.0, 0.01)
        assert np.abs(trajectory.final - joint0).max() < 1e-12

    def test_fock_state_amplitude_damping(self):
        mode = ModeSpec(1.0, 0.0 + 0j, 0.5, math.inf)
        spec = oracle.single_mode_system(mode, 10)
        rho0 = np.zeros((11, 11), dtype=complex); rho0[4, 4] = 1.0
        number = oracle.product_operator(spec, ((0, "n"),)).toarray()
        dt = oracle.default_timestep([mode], [10])
        trajectory = oracle.integrate(spec, rho0, 4.0, dt, sample_times=[1.0, 2.5, 4.0])
        for t, state in zip(trajectory.times, trajectory.states):
            n_mean = np.trace(number @ state).real
            assert n_mean == pytest.approx(4.0 * math.exp(-0.5 * t), abs=1e-6)

    def test_thermalisation_from_vacuum(self):
        beta = 1.0
        mode = ModeSpec(1.0, 0.0 + 0j, 1.0, beta)
        spec = oracle.single_mode_system(mode, 25)
        rho0 = np.zeros((26, 26), dtype=complex); rho0[0, 0] = 1.0
        number = oracle.product_operator(spec, ((0, "n"),)).toarray()
        trajectory = oracle.integrate(spec, rho0, 25.0, 0.01)
        n_final = np.trace(number @ trajectory.final).real
        assert n_final == pytest.approx(thermal_occupation(beta, 1.0), abs=1e-4)

    def test_step_halving_convergence(self):
        mode = ModeSpec(1.0, 1.0, 0.5, math.inf)
        spec = oracle.single_spin_system(0.5, [mode], [20])
        rho_spin = SpinDensityMatrix.uniform_superposition(0.5).elements
        joint0 = oracle.joint_state(rho_spin, oracle.build_thermal_state(20, math.inf, 1.0))
        dt = oracle.default_timestep([mode], [20])
        coarse = oracle.integrate(spec, joint0, 5.0, dt).final
        fine = oracle.integrate(spec, joint0, 5.0, dt / 2.0).final
        assert np.abs(
            oracle.partial_trace_spin(coarse, spec) - oracle.partial_trace_spin(fine, spec)
        ).max() < 1e-6

    def test_fourth_order_convergence(self):
        # halving dt should shrink the error by ~2^4 on a smooth problem
        mode = ModeSpec(1.0, 1.0, 1.0, math.inf)
        spec = oracle.single_spin_system(0.5, [mode], [15])
        rho_spin = SpinDensityMatrix.uniform_superposition(0.5).elements
        joint0 = oracle.joint_state(rho_spin, oracle.build_thermal_state(15, math.inf, 1.0))

        def reduced_at(dt):
            final = oracle.integrate(spec, joint0, 2.0, dt).final
            return oracle.partial_trace_spin(final, spec)

        reference = reduced_at(0.0125 / 8.0)
        errors = [np.abs(reduced_at(dt) - reference).max() for dt in (0.1, 0.05, 0.025)]
        ratios = [a / b for a, b in zip(errors, errors[1:])]
        assert all(10.0 < r < 25.0 for r in ratios), (errors, ratios)

    def test_trace_drift_guard(self):
        # a wildly unstable step must be caught, not silently returned
        mode = ModeSpec(1.0, 1.0, 0.5, math.inf)
        spec = oracle.single_spin_system(0.5, [mode], [20])
        rho_spin = SpinDensityMatrix.uniform_superposition(0.5).elements
        joint0 = oracle.joint_state(rho_spin, oracle.build_thermal_state(20, math.inf, 1.0))
        with pytest.raises(OracleAccuracyError):
            oracle.integrate(spec, joint0, 50.0, 1.0)

    def test_sample_time_validation(self):
        mode = ModeSpec(1.0, 0.0 + 0j, 0.0, math.inf)
        spec = oracle.single_mode_system(mode, 3)
        rho0 = oracle.build_thermal_state(3, math.inf, 1.0)
        with pytest.raises(ValueError):
            oracle.integrate(spec, rho0, 1.0, 0.01, sample_times=[0.5, 0.5])
        with pytest.raises(ValueError):
            oracle.integrate(spec, rho0, 1.0, 0.01, sample_times=[0.5, 2.0])

    def test_hermiticity_maintained(self, rng):
        mode = ModeSpec(1.0, 0.7, 0.3, 2.0)
        spec = oracle.single_spin_system(0.5, [mode], [15])
        joint0 = oracle.joint_state(
            random_density_matrix(rng, 2), oracle.build_thermal_state(15, 2.0, 1.0)
        )
        final = oracle.integrate(spec, joint0, 3.0, 0.005).final
        oracle.check_joint_state(final)


class TestPartialTrace:
    def test_product_state_recovery(self, rng):
        spec = oracle.SystemSpec((3,), (12,))
        rho_spin = random_density_matrix(rng, 3)
        joint = oracle.joint_state(rho_spin, oracle.build_thermal_state(12, 1.5, 1.0))
        assert np.abs(oracle.partial_trace_spin(joint, spec) - rho_spin).max() < 1e-14

    def test_entangled_state_reduces_to_mixture(self):
        spec = oracle.SystemSpec((2,), (1,))
        psi = np.zeros(4, dtype=complex)
        psi[0] = 1.0 / math.sqrt(2.0)   # |spin 0, n=0>
        psi[3] = 1.0 / math.sqrt(2.0)   # |spin 1, n=1>
        joint = np.outer(psi, psi.conj())
        reduced = oracle.partial_trace_spin(joint, spec)
        assert np.abs(reduced - np.eye(2) / 2.0).max() < 1e-14

    def test_trace_preserved(self, rng):
        spec = oracle.SystemSpec((2, 2), (2, 2))
        joint = random_density_matrix(rng, spec.dim)
        reduced = oracle.partial_trace_spin(joint, spec)
        assert np.trace(reduced) == pytest.approx(np.trace(joint), abs=1e-12)


class TestCutoffAndTimestep:
    def test_suggested_cutoff_formula(self):
        assert oracle.suggested_cutoff(ModeSpec(1.0, 1.0, 0.0, math.inf)) == 26
        assert oracle.suggested_cutoff(ModeSpec(1.0, 0.5, 0.0, math.inf)) == 14

    def test_cutoff_grows_with_temperature(self):
        cold = oracle.suggested_cutoff(ModeSpec(1.0, 1.0, 0.0, math.inf))
        hot = oracle.suggested_cutoff(ModeSpec(1.0, 1.0, 0.0, 0.2))
        assert hot > cold

    def test_timestep_tracks_fastest_rate(self):
        slow = oracle.default_timestep([ModeSpec(1.0, 0.1, 0.0, math.inf)], [4])
        fast = oracle.default_timestep([ModeSpec(1.0, 0.1, 50.0, math.inf)], [4])
        assert fast < slow
        assert slow == pytest.approx(0.02)


class TestCorrelator:
    def test_vacuum_initial_value(self):
        value = oracle.two_time_quadrature_correlator(ModeSpec(1.0, 1.0, 1.0), 20, 0.0)
        assert value == pytest.approx(1.0 + 0.0j, abs=1e-12)

    def test_matches_analytic_form(self):
        from spinboson import correlation_function

        mode = ModeSpec(1.0, 1.0, 1.0, math.inf)
        value = oracle.two_time_quadrature_correlator(mode, 20, 1.0)
        assert value == pytest.approx(correlation_function(mode, 1.0), abs=1e-5)

    def test_undamped_periodicity(self):
        mode = ModeSpec(1.0, 1.0, 0.0, 2.0)
        times = [0.4, 0.4 + 2.0 * math.pi]
        values = oracle.two_time_quadrature_correlator(mode, 25, times)
        assert values[0] == pytest.approx(values[1], abs=1e-6)

    def test_complex_coupling(self):
        from spinboson import correlation_function

        mode = ModeSpec(1.3, 0.5 + 0.8j, 0.6, 1.5)
        value = oracle.two_time_quadrature_correlator(mode, 30, 0.9)
        assert value == pytest.approx(correlation_function(mode, 0.9), abs=1e-5)
