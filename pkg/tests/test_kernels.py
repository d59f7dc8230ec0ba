import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import sparse

from spinboson import _rk4_py
from spinboson._kernels import BACKEND_NAME

try:
    from spinboson import _rk4
except ImportError:
    _rk4 = None

needs_extension = pytest.mark.skipif(_rk4 is None, reason="compiled kernel not built")


def random_csr(rng, n, density=0.05):
    matrix = sparse.random(
        n, n, density=density, format="csr",
        random_state=np.random.RandomState(rng.integers(2**31)),
        dtype=float,
    )
    matrix = matrix.astype(complex)
    matrix.data = matrix.data + 1j * rng.normal(size=matrix.data.size)
    matrix.sort_indices()
    return (
        np.ascontiguousarray(matrix.data),
        np.ascontiguousarray(matrix.indices, dtype=np.int32),
        np.ascontiguousarray(matrix.indptr, dtype=np.int32),
        matrix,
    )


def test_python_kernel_single_step_matches_dense_rk4(rng):
    n = 30
    data, indices, indptr, matrix = random_csr(rng, n)
    dense = matrix.toarray()
    y0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    dt = 1e-3
    y = y0.copy()
    _rk4_py.rk4_propagate(data, indices, indptr, y, dt, 1, 0)
    k1 = dense @ y0
    k2 = dense @ (y0 + 0.5 * dt * k1)
    k3 = dense @ (y0 + 0.5 * dt * k2)
    k4 = dense @ (y0 + dt * k3)
    expected = y0 + dt / 6.0 * (k1 + 2 * (k2 + k3) + k4)
    assert np.abs(y - expected).max() < 1e-14


@needs_extension
def test_backends_agree_plain(rng):
    n = 64
    data, indices, indptr, _ = random_csr(rng, n)
    y0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    y_c = y0.copy()
    y_p = y0.copy()
    _rk4.rk4_propagate(data, indices, indptr, y_c, 2e-3, 200, 0)
    _rk4_py.rk4_propagate(data, indices, indptr, y_p, 2e-3, 200, 0)
    scale = np.abs(y_p).max()
    assert np.abs(y_c - y_p).max() < 1e-12 * max(scale, 1.0)


@needs_extension
def test_backends_agree_with_hermitization(rng):
    d = 12
    n = d * d
    data, indices, indptr, _ = random_csr(rng, n, density=0.02)
    rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = rho + rho.conj().T
    y_c = rho.reshape(-1).copy()
    y_p = rho.reshape(-1).copy()
    _rk4.rk4_propagate(data, indices, indptr, y_c, 1e-3, 150, d)
    _rk4_py.rk4_propagate(data, indices, indptr, y_p, 1e-3, 150, d)
    assert np.abs(y_c - y_p).max() < 1e-12 * max(np.abs(y_p).max(), 1.0)
    out = y_c.reshape(d, d)
    assert np.abs(out - out.conj().T).max() == 0.0


@needs_extension
def test_hermitization_halves_conjugate_pairs():
    d = 2
    y = np.array([1.0 + 1.0j, 2.0 + 3.0j, 4.0 - 1.0j, 5.0 - 2.0j])
    empty = sparse.csr_matrix((4, 4), dtype=complex)
    # zero generator: one step leaves y unchanged except the hermitization
    _rk4.rk4_propagate(
        np.ascontiguousarray(empty.data),
        np.ascontiguousarray(empty.indices, dtype=np.int32),
        np.ascontiguousarray(empty.indptr, dtype=np.int32),
        y, 0.1, 1, d,
    )
    expected = 0.5 * np.array([
        (1 + 1j) + (1 - 1j),
        (2 + 3j) + (4 + 1j),
        (4 - 1j) + (2 - 3j),
        (5 - 2j) + (5 + 2j),
    ])
    assert np.array_equal(y, expected)


def test_active_backend_name():
    assert BACKEND_NAME in ("cython", "python")
    if _rk4 is not None and not os.environ.get("SPINBOSON_PURE_PYTHON"):
        assert BACKEND_NAME == "cython"


def test_environment_variable_forces_fallback():
    code = (
        "from spinboson._kernels import BACKEND_NAME; print(BACKEND_NAME)"
    )
    env = dict(os.environ, SPINBOSON_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


_FALLBACK_CHECK = """
import math
import numpy as np
from spinboson import ModeSpec, SpinDensityMatrix, evolve_spin
from spinboson import oracle

mode = ModeSpec(1.0, 1.0, 0.5, math.inf)
spec = oracle.single_spin_system(0.5, [mode], [15])
rho_spin = SpinDensityMatrix.uniform_superposition(0.5)
joint0 = oracle.joint_state(rho_spin.elements, oracle.thermal_product_state([mode], [15]))
dt = oracle.default_timestep([mode], [15])
final = oracle.integrate(spec, joint0, 2.0, dt).final
reduced = oracle.partial_trace_spin(final, spec)
analytic = evolve_spin(rho_spin, [mode], 2.0).elements
print(np.abs(reduced - analytic).max())
"""


def test_fallback_reproduces_oracle_result():
    # the full integrate path gives the same physics on the pure-Python backend
    env = dict(os.environ, SPINBOSON_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", _FALLBACK_CHECK],
        env=env, capture_output=True, text=True, check=True,
    )
    assert float(out.stdout.strip()) < 1e-6
