"""Benchmark the compiled RK4 kernel against the pure-Python/SciPy fallback.

Times the propagation of two representative master-equation problems (a
spin-1/2 with one damped mode, and two spins with two normal modes) through
both kernel implementations and reports the speedup plus the maximum
discrepancy between the propagated states.

Run from the repository root:

    python3 benchmarks/bench_backends.py
"""

import math
import time

import numpy as np

from spinboson import (
    ModeSpec,
    SpinDensityMatrix,
    TwoSpinDensityMatrix,
    TwoSpinParams,
    normal_mode_specs,
)
from spinboson import oracle
from spinboson import _rk4_py

try:
    from spinboson import _rk4
except ImportError:
    _rk4 = None


def _problem_single_spin():
    mode = ModeSpec(1.0, 1.0, 3.0, math.inf)
    n_max = 40
    spec = oracle.single_spin_system(0.5, [mode], [n_max])
    rho = oracle.joint_state(
        SpinDensityMatrix.uniform_superposition(0.5).elements,
        oracle.thermal_product_state([mode], [n_max]),
    )
    dt = oracle.default_timestep([mode], [n_max])
    return "spin-1/2 + 1 mode (dim 82)", spec, rho, dt, 1200


def _problem_two_spin():
    params = TwoSpinParams(1.0, 0.1, 1.0, 1.0, 3.0, math.inf)
    n_max = 10
    spec = oracle.two_spin_system(params, (n_max, n_max))
    modes = list(normal_mode_specs(params))
    rho = oracle.joint_state(
        TwoSpinDensityMatrix.from_state_vector([1, 1, 1, 1]).elements,
        oracle.thermal_product_state(modes, (n_max, n_max)),
    )
    dt = oracle.default_timestep(modes, (n_max, n_max))
    return "2 spins + 2 modes (dim 484)", spec, rho, dt, 60


def _time_kernel(kernel, arrays, y0, dt, steps, dim):
    y = y0.copy()
    started = time.perf_counter()
    kernel(*arrays, y, dt, steps, dim)
    return time.perf_counter() - started, y


def run():
    if _rk4 is None:
        print("compiled kernel not available; build with pip install -e . first")

    for label, spec, rho, dt, steps in (_problem_single_spin(), _problem_two_spin()):
        louv = oracle.liouvillian(spec)
        arrays = (
            np.ascontiguousarray(louv.data, dtype=complex),
            np.ascontiguousarray(louv.indices, dtype=np.int32),
            np.ascontiguousarray(louv.indptr, dtype=np.int32),
        )
        y0 = rho.reshape(-1).astype(complex)
        dim = spec.dim
        print(f"\n{label}: {steps} RK4 steps, {louv.nnz} nonzeros, dt={dt:.4g}")

        t_py, y_py = _time_kernel(_rk4_py.rk4_propagate, arrays, y0, dt, steps, dim)
        print(f"  python/scipy : {t_py:8.3f} s")
        if _rk4 is not None:
            t_cy, y_cy = _time_kernel(_rk4.rk4_propagate, arrays, y0, dt, steps, dim)
            drift = np.abs(y_cy - y_py).max()
            print(f"  cython       : {t_cy:8.3f} s  ({t_py / t_cy:4.1f}x)  max |delta| = {drift:.2e}")


if __name__ == "__main__":
    run()
