import math

import numpy as np
import pytest

from spinboson import (
    ModeSpec,
    build_random_coupling,
    build_uniform_coupling,
    decompose,
    dephasing_integrals_undamped,
    fk_predictions,
    twisting_strength,
)
from spinboson.network import CouplingMatrix


class TestCouplingMatrix:
    def test_rejects_asymmetric(self):
        kappa = np.zeros((3, 3)); kappa[0, 1] = -0.1
        with pytest.raises(ValueError):
            CouplingMatrix(kappa, 1.0)

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError):
            CouplingMatrix(np.eye(3) * 0.1, 1.0)

    def test_rejects_tiny_systems(self):
        with pytest.raises(ValueError):
            CouplingMatrix(np.zeros((1, 1)), 1.0)


class TestUniformCoupling:
    def test_two_modes(self):
        dec = decompose(build_uniform_coupling(2, -0.3, 1.0))
        assert dec.eigenvalues == pytest.approx([0.7, 1.3])

    def test_symmetric_mode_splits_off(self):
        dec = decompose(build_uniform_coupling(4, -0.2, 1.0))
        assert dec.eigenvalues == pytest.approx([0.4, 1.2, 1.2, 1.2], abs=1e-12)
        assert dec.symmetric_fidelity == pytest.approx(1.0, abs=1e-12)

    def test_positive_coupling_puts_symmetric_mode_on_top(self):
        dec = decompose(build_uniform_coupling(5, 0.15, 1.0))
        assert dec.eigenvalues[-1] == pytest.approx(1.0 + 4 * 0.15)
        top = dec.eigenvectors[:, -1]
        top = top * np.sign(top.sum())
        assert np.abs(top - 1.0 / math.sqrt(5)).max() < 1e-12
        # the lowest level is (n-1)-fold degenerate, so the fidelity is undefined
        assert dec.symmetric_fidelity is None

    def test_positivity_guard(self):
        with pytest.raises(ValueError):
            build_uniform_coupling(4, -0.4, 1.0)  # 1 + 3*(-0.4) < 0
        with pytest.raises(ValueError):
            build_uniform_coupling(4, 1.2, 1.0)   # 1 - 1.2 < 0


class TestRandomCoupling:
    def test_deterministic_given_seed(self):
        a = build_random_coupling(20, 1e-2, 1.0, seed=42)
        b = build_random_coupling(20, 1e-2, 1.0, seed=42)
        assert np.array_equal(a.kappa, b.kappa)
        c = build_random_coupling(20, 1e-2, 1.0, seed=43)
        assert not np.array_equal(a.kappa, c.kappa)

    def test_entry_statistics(self):
        n = 200
        cm = build_random_coupling(n, 0.5, 100.0, seed=7)  # omega0 large enough for positivity
        entries = cm.kappa[np.triu_indices(n, k=1)]
        assert np.all(entries <= 0.0) and np.all(entries >= -0.5)
        sem = (0.5 / math.sqrt(12.0)) / math.sqrt(entries.size)
        assert abs(entries.mean() + 0.25) < 3.0 * sem

    def test_zero_width_gives_bare_spectrum(self):
        dec = decompose(build_random_coupling(6, 0.0, 2.0, seed=0))
        assert dec.eigenvalues == pytest.approx(np.full(6, 2.0))
        assert dec.symmetric_fidelity is None  # fully degenerate

    def test_positivity_guard(self):
        with pytest.raises(ValueError):
            build_random_coupling(50, 1.0, 1.0, seed=3)  # mean shift ~ -25


class TestDecompose:
    def test_orthonormality_and_reconstruction(self):
        cm = build_random_coupling(40, 1e-2, 1.0, seed=11)
        dec = decompose(cm)
        v = dec.eigenvectors
        assert np.abs(v.T @ v - np.eye(40)).max() < 1e-10
        matrix = cm.omega0 * np.eye(40) + cm.kappa
        residual = v @ np.diag(dec.eigenvalues) @ v.T - matrix
        assert np.abs(residual).max() < 1e-10 * max(1.0, np.abs(cm.kappa).max())

    def test_eigenvalue_sum_is_trace(self):
        cm = build_random_coupling(60, 1e-3, 1.3, seed=2)
        total = decompose(cm).eigenvalues.sum()
        assert total == pytest.approx(60 * 1.3, rel=1e-10)

    def test_ground_mode_strictly_positive_components(self):
        # Frobenius-Perron for all-negative couplings, a handful of draws
        for seed in range(8):
            dec = decompose(build_random_coupling(30, 5e-3, 1.0, seed=seed))
            assert np.all(dec.eigenvectors[:, 0] > 0.0)

    def test_fidelity_bound_satisfied_in_most_seeds(self):
        n = 50
        bound = 2.0 / (3.0 * n)
        hits = 0
        for seed in range(10):
            dec = decompose(build_random_coupling(n, 1e-3, 1.0, seed=seed))
            if 1.0 - dec.symmetric_fidelity <= bound:
                hits += 1
        assert hits >= 9

    def test_bulk_concentration(self):
        kappa_max = 1e-3
        sigma = kappa_max / math.sqrt(12.0)
        for n in (50, 200):
            dec = decompose(build_random_coupling(n, kappa_max, 1.0, seed=5))
            bulk = dec.eigenvalues[1:]
            c = 2.5 * sigma * math.sqrt(n)
            assert np.all(np.abs(bulk - 1.0) <= c)


class TestFkPredictions:
    def test_deterministic_limit_matches_uniform_gap(self):
        n, mu = 12, -0.01
        fk = fk_predictions(n, mu, 0.0, 1.0)
        dec = decompose(build_uniform_coupling(n, mu, 1.0))
        assert fk.lambda1_estimate == pytest.approx(dec.eigenvalues[0], rel=1e-12)
        assert fk.expected_gap == pytest.approx(dec.gap, rel=1e-12)
        assert fk.fidelity_error_bound == 0.0

    def test_uniform_interval_gap_value(self):
        kappa_max = 1e-3
        fk = fk_predictions(100, -kappa_max / 2, kappa_max / math.sqrt(12.0), 1.0)
        assert fk.expected_gap == pytest.approx(44.3931639747704 * kappa_max, rel=1e-12)
        assert fk.fidelity_error_bound == pytest.approx(2.0 / 300.0, rel=1e-12)

    def test_gap_matches_ensemble(self):
        n, kappa_max = 100, 1e-3
        fk = fk_predictions(n, -kappa_max / 2, kappa_max / math.sqrt(12.0), 1.0)
        gaps = []
        for seed in range(10):
            gaps.append(decompose(build_random_coupling(n, kappa_max, 1.0, seed=seed)).gap)
        gaps = np.array(gaps)
        sem = gaps.std(ddof=1) / math.sqrt(len(gaps))
        # the prediction itself carries an O(1/sqrt(n)) remainder, so allow a
        # small systematic offset on top of the ensemble standard error
        assert abs(gaps.mean() - fk.expected_gap) < 3.0 * sem + 0.02 * fk.expected_gap

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fk_predictions(10, 0.0, 0.1, 1.0)
        with pytest.raises(ValueError):
            fk_predictions(10, 0.1, 0.1, 1.0)
        with pytest.raises(ValueError):
            fk_predictions(1, -0.1, 0.1, 1.0)


class TestTwistingStrength:
    def test_reference_value(self):
        pulse = twisting_strength(0.1, 1.0, 1)
        assert pulse.chi == pytest.approx(0.01 * math.pi, rel=1e-14)
        assert pulse.duration == pytest.approx(math.pi)

    def test_linear_in_r(self):
        assert twisting_strength(0.3, 2.0, 4).chi == pytest.approx(
            2 * twisting_strength(0.3, 2.0, 2).chi
        )

    def test_consistency_with_undamped_phase(self):
        # after an even number of half-periods the mode disentangles
        # (i_re = 0) and the accumulated phase equals the pulse strength
        eta, omega_s = 0.4, 1.7
        for r in (2, 4, 8):
            pulse = twisting_strength(eta, omega_s, r)
            f = dephasing_integrals_undamped(ModeSpec(omega_s, eta), pulse.duration)
            assert abs(f.i_re) < 1e-12
            assert f.i_im == pytest.approx(-pulse.chi, rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            twisting_strength(0.1, 0.0, 1)
        with pytest.raises(ValueError):
            twisting_strength(0.1, 1.0, 0)
